// Copyright 2026 The sdbmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sdbmc/segmenter.hpp"

#include <gtest/gtest.h>

#include <random>

#include "sdbmc/error.hpp"
#include "test_support.hpp"

namespace sdbmc {
namespace {

using testing::box_mask;
using testing::random_frame;

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Precondition;
}

Frame with_box(const Frame& base, int x0, int y0, int bw, int bh, int delta) {
    Frame out = base;
    for (int y = y0; y < y0 + bh; ++y)
        for (int x = x0; x < x0 + bw; ++x)
            for (int c = 0; c < out.channels(); ++c) out.at(x, y, c) = static_cast<std::uint8_t>(out.at(x, y, c) + delta);
    return out;
}

TEST(Fpm, ConstantAndColdStart) {
    const FloatImage constant = fpm_plane(FpmSource::constant, nullptr, 5, 4);
    const FloatImage cold = fpm_plane(FpmSource::previous_mask, nullptr, 5, 4);
    for (float v : constant.data()) ASSERT_EQ(v, 0.5f);
    for (float v : cold.data()) ASSERT_EQ(v, 0.5f);
    EXPECT_EQ(parse_fpm_source("previous-mask"), FpmSource::previous_mask);
    EXPECT_EQ(code_of([] { (void)parse_fpm_source("semantic"); }), ErrorCode::InvalidConfig);
}

TEST(Fpm, BoxBlurOfPreviousMask) {
    const MaskFrame full = box_mask(20, 20, 0, 0, 20, 20);
    const FloatImage ones = fpm_plane(FpmSource::previous_mask, &full, 20, 20);
    for (float v : ones.data()) ASSERT_FLOAT_EQ(v, 1.0f);
    MaskFrame dot(20, 20);
    dot.set(10, 10, true);
    const FloatImage p = fpm_plane(FpmSource::previous_mask, &dot, 20, 20);
    EXPECT_FLOAT_EQ(p.at(10, 10), 1.0f / 49.0f);
    EXPECT_FLOAT_EQ(p.at(13, 7), 1.0f / 49.0f);
    EXPECT_EQ(p.at(14, 10), 0.0f);
    // Corner windows are clipped to the image.
    MaskFrame corner(20, 20);
    corner.set(0, 0, true);
    EXPECT_FLOAT_EQ(fpm_plane(FpmSource::previous_mask, &corner, 20, 20).at(0, 0), 1.0f / 16.0f);
}

TEST(AssembleInput, TwelveChannelsInOrder) {
    const Frame a(16, 16, 3, 10), b(16, 16, 3, 20), c(16, 16, 3, 30);
    const Tensor3 t = assemble_input(a, b, c, FpmSource::constant).to_tensor();
    ASSERT_EQ(t.channels(), 12);
    const float want[12] = {10, 10, 10, -1, 20, 20, 20, -1, 30, 30, 30, -1};
    for (int ch = 0; ch < 12; ++ch) {
        const float v = want[ch] < 0 ? 0.5f : want[ch] / 255.0f;
        EXPECT_FLOAT_EQ(t.at(ch, 3, 5), v) << ch;
    }
}

TEST(AssembleInput, Errors) {
    EXPECT_EQ(code_of([] { (void)assemble_input(Frame(8, 8, 3), Frame(8, 8, 3), Frame(8, 9, 3), FpmSource::constant); }),
              ErrorCode::DimensionMismatch);
    EXPECT_EQ(code_of([] { (void)assemble_input(Frame(8, 8, 1), Frame(8, 8, 3), Frame(8, 8, 3), FpmSource::constant); }),
              ErrorCode::WrongChannelCount);
}

TEST(Binarize, StrictThreshold) {
    const FloatImage p(3, 1, 1, std::vector<float>{0.9f, 0.5f, 0.2f});
    const MaskFrame m = binarize(p, 0.5);
    EXPECT_TRUE(m.foreground(0, 0));
    EXPECT_FALSE(m.foreground(1, 0));
    EXPECT_FALSE(m.foreground(2, 0));
    EXPECT_EQ(binarize(p, 1.0).count_foreground(), 0u);
}

// Property: raising the threshold never adds foreground.
TEST(Binarize, MonotoneInThreshold) {
    std::mt19937 rng(4);
    std::uniform_real_distribution<float> d(0.0f, 1.0f);
    for (int trial = 0; trial < 50; ++trial) {
        FloatImage p(9, 7, 1);
        for (float& v : p.data()) v = d(rng);
        const double lo = d(rng), hi = lo + (1.0 - lo) * d(rng);
        const MaskFrame a = binarize(p, lo), b = binarize(p, hi);
        for (std::size_t i = 0; i < p.pixel_count(); ++i) {
            if (b.foreground(i)) {
                ASSERT_TRUE(a.foreground(i));
            }
        }
    }
}

TEST(Differencing, ExactBoxAndNoise) {
    const Frame bg(64, 48, 3, 90);
    EXPECT_EQ(differencing_segment(bg, bg, 30, 50).count_foreground(), 0u);
    const MaskFrame box = differencing_segment(with_box(bg, 10, 12, 20, 20, 80), bg, 30, 50);
    EXPECT_EQ(box, box_mask(64, 48, 10, 12, 20, 20));

    Frame noisy = bg;
    std::mt19937 rng(2);
    for (int k = 0; k < 40; ++k) {
        const int x = 2 * static_cast<int>(rng() % 32), y = 2 * static_cast<int>(rng() % 24);
        noisy.at(x, y, 1) = 170;
    }
    EXPECT_GT(difference_mask(noisy, bg, 30).count_foreground(), 0u);
    EXPECT_EQ(differencing_segment(noisy, bg, 30, 50).count_foreground(), 0u);
    EXPECT_EQ(code_of([] { (void)difference_mask(Frame(4, 4, 3), Frame(4, 5, 3), 30); }),
              ErrorCode::DimensionMismatch);
}

// Components are 8-connected: a diagonal line of n pixels is one blob.
TEST(Differencing, ComponentSizeOracle) {
    MaskFrame diag(30, 30);
    for (int i = 0; i < 25; ++i) diag.set(i, i, true);
    EXPECT_EQ(remove_small_components(diag, 25).count_foreground(), 25u);
    EXPECT_EQ(remove_small_components(diag, 26).count_foreground(), 0u);
    EXPECT_EQ(remove_small_components(diag, 0), diag);
}

TEST(DifferencingSegmenter, ForegroundMustDifferFromBothBackgrounds) {
    const Frame empty(32, 32, 3, 60);
    Frame recent = empty;
    const Frame current = with_box(empty, 4, 4, 10, 10, 100);
    // The recent background already shows the left half of the box.
    for (int y = 4; y < 14; ++y)
        for (int x = 4; x < 9; ++x)
            for (int c = 0; c < 3; ++c) recent.at(x, y, c) = current.at(x, y, c);
    const DifferencingSegmenter seg(30, 1);
    const Segmentation s = seg.segment({empty, recent, current, nullptr});
    EXPECT_EQ(s.mask, box_mask(32, 32, 9, 4, 5, 10));
    EXPECT_FALSE(s.probability.has_value());
}

TEST(NetworkSegmenter, ProbabilityAndMaskAgree) {
    NetworkSpec spec = NetworkSpec::segmenter();
    auto net = std::make_shared<const Network>(spec, WeightStore::random(spec, 9));
    const NetworkSegmenter seg(net, FpmSource::constant, 0.5, 1);
    const Frame a = random_frame(32, 16, 3, 1), b = random_frame(32, 16, 3, 2), c = random_frame(32, 16, 3, 3);
    const Segmentation s = seg.segment({a, b, c, nullptr});
    ASSERT_TRUE(s.probability.has_value());
    EXPECT_EQ(s.probability->width(), 32);
    EXPECT_EQ(s.mask, binarize(*s.probability, 0.5));
}

}  // namespace
}  // namespace sdbmc
