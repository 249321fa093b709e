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

#include "sdbmc/image.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "sdbmc/error.hpp"
#include "test_support.hpp"

namespace sdbmc {
namespace {

using testing::random_frame;

TEST(Raster, ShapeInvariants) {
    const Frame f(5, 3, 3, 7);
    EXPECT_EQ(f.data().size(), 45u);
    EXPECT_EQ(f.pixel_count(), 15u);
    EXPECT_EQ(f.at(4, 2, 2), 7);
    EXPECT_THROW(Frame(0, 3, 1), Error);
    EXPECT_THROW(Frame(2, 2, 1, std::vector<std::uint8_t>(3)), Error);
}

TEST(MaskFrame, OnlyTwoLabels) {
    EXPECT_THROW(MaskFrame(2, 1, std::vector<std::uint8_t>{0, 7}), Error);
    const MaskFrame m(2, 1, std::vector<std::uint8_t>{0, 255});
    EXPECT_EQ(m.count_foreground(), 1u);
}

TEST(Quantize, RoundHalfUpAndClamp) {
    EXPECT_EQ(quantize(0.0f), 0);
    EXPECT_EQ(quantize(1.0f), 255);
    EXPECT_EQ(quantize(-0.5f), 0);
    EXPECT_EQ(quantize(2.0f), 255);
    EXPECT_EQ(quantize(100.5f / 255.0f), 101);
    // Normalized round trip is exact for every 8-bit value.
    Frame all(256, 1, 1);
    for (int v = 0; v < 256; ++v) all.at(v, 0) = static_cast<std::uint8_t>(v);
    EXPECT_EQ(to_8bit(to_normalized(all)), all);
}

TEST(ToGray, Bt601Weights) {
    Frame px(3, 1, 3);
    px.at(0, 0, 0) = px.at(0, 0, 1) = px.at(0, 0, 2) = 255;
    px.at(1, 0, 0) = 255;
    px.at(2, 0, 1) = 255;
    const Frame g = to_gray(px);
    EXPECT_EQ(g.at(0, 0), 255);
    EXPECT_EQ(g.at(1, 0), 76);
    EXPECT_EQ(g.at(2, 0), 150);
    try {
        to_gray(Frame(2, 2, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::WrongChannelCount);
    }
}

TEST(Resize, ConstantStaysConstant) {
    const Frame f(640, 480, 1, 128);
    const Frame r = resize_bilinear(f, 320, 240);
    EXPECT_EQ(r.width(), 320);
    EXPECT_EQ(r.height(), 240);
    for (auto v : r.data()) ASSERT_EQ(v, 128);
    for (auto [w, h] : {std::pair{7, 3}, std::pair{1, 1}, std::pair{999, 5}}) {
        const Frame small = resize_bilinear(Frame(13, 11, 3, 42), w, h);
        for (auto v : small.data()) ASSERT_EQ(v, 42);
    }
}

TEST(Resize, SameSizeIsIdentity) {
    const Frame f = random_frame(320, 240, 3, 1);
    EXPECT_EQ(resize_bilinear(f, 320, 240), f);
}

TEST(Resize, HalvingAveragesBlocks) {
    Frame f(4, 4, 1);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) f.at(x, y) = ((x + y) % 2) ? 200 : 10;
    const Frame r = resize_bilinear(f, 2, 2);
    for (auto v : r.data()) EXPECT_NEAR(v, 105, 1);
    EXPECT_THROW(resize_bilinear(f, 0, 2), Error);
}

Frame sort_median_oracle(const std::vector<Frame>& frames, int window) {
    const Frame& ref = frames.back();
    Frame out(ref.width(), ref.height(), ref.channels());
    for (std::size_t i = 0; i < out.data().size(); ++i) {
        std::vector<int> vals;
        for (std::size_t t = frames.size() - window; t < frames.size(); ++t) vals.push_back(frames[t].data()[i]);
        std::sort(vals.begin(), vals.end());
        out.data()[i] = static_cast<std::uint8_t>(vals[(window - 1) / 2]);
    }
    return out;
}

TEST(TemporalMedian, IdenticalFrames) {
    const Frame f = random_frame(6, 5, 3, 9);
    const std::vector<Frame> frames(5, f);
    EXPECT_EQ(temporal_median(frames, 5), f);
}

TEST(TemporalMedian, MajorityValue) {
    std::vector<Frame> frames;
    for (int t = 0; t < 100; ++t) frames.emplace_back(1, 1, 1, t < 60 ? 10 : 200);
    EXPECT_EQ(temporal_median(frames, 100).at(0, 0), 10);
}

TEST(TemporalMedian, MatchesSortOracle) {
    for (int window : {1, 2, 4, 31}) {
        std::vector<Frame> frames;
        for (int t = 0; t < 40; ++t) frames.push_back(random_frame(7, 5, 3, 100 + t));
        EXPECT_EQ(temporal_median(frames, window), sort_median_oracle(frames, window)) << window;
    }
}

TEST(TemporalMedian, PermutationInvariant) {
    std::vector<Frame> frames;
    for (int t = 0; t < 15; ++t) frames.push_back(random_frame(9, 4, 1, 500 + t));
    const Frame want = temporal_median(frames, 15);
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(frames.begin(), frames.end(), rng);
        ASSERT_EQ(temporal_median(frames, 15), want);
    }
}

TEST(TemporalMedian, Errors) {
    const std::vector<Frame> frames(3, Frame(2, 2, 1));
    try {
        temporal_median(frames, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::WindowTooLarge);
    }
    std::vector<Frame> mixed = {Frame(2, 2, 1), Frame(3, 2, 1)};
    EXPECT_THROW(temporal_median(mixed, 2), Error);
}

TEST(SlidingMedian, AgreesWithBatchMedian) {
    std::vector<Frame> frames;
    SlidingMedian ring(7);
    for (int t = 0; t < 30; ++t) {
        frames.push_back(random_frame(5, 4, 3, 900 + t));
        ring.push(frames.back());
        const int window = std::min<int>(7, static_cast<int>(frames.size()));
        ASSERT_EQ(ring.size(), window);
        ASSERT_EQ(ring.median(), temporal_median(frames, window)) << t;
    }
    ring.clear();
    EXPECT_EQ(ring.size(), 0);
}

MaskFrame dilate_oracle(const MaskFrame& m, int r) {
    MaskFrame out(m.width(), m.height());
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x) {
            bool hit = false;
            for (int yy = 0; yy < m.height() && !hit; ++yy)
                for (int xx = 0; xx < m.width() && !hit; ++xx)
                    hit = m.foreground(xx, yy) && (xx - x) * (xx - x) + (yy - y) * (yy - y) <= r * r;
            out.set(x, y, hit);
        }
    return out;
}

MaskFrame random_mask(int w, int h, double density, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::bernoulli_distribution d(density);
    MaskFrame m(w, h);
    for (std::size_t i = 0; i < m.pixel_count(); ++i) m.set(i, d(rng));
    return m;
}

TEST(Dilate, RadiusZeroIsIdentityAndRadiusOneIsCross) {
    const MaskFrame m = random_mask(9, 9, 0.2, 1);
    EXPECT_EQ(dilate_mask(m, 0), m);
    MaskFrame dot(5, 5);
    dot.set(2, 2, true);
    const MaskFrame d = dilate_mask(dot, 1);
    EXPECT_EQ(d.count_foreground(), 5u);
    EXPECT_TRUE(d.foreground(2, 1) && d.foreground(1, 2) && d.foreground(3, 2) && d.foreground(2, 3));
    EXPECT_THROW(dilate_mask(dot, -1), Error);
}

TEST(Dilate, MatchesDistanceOracle) {
    for (int seed = 0; seed < 20; ++seed) {
        const MaskFrame m = random_mask(17, 13, 0.04, seed);
        for (int r : {1, 2, 3}) ASSERT_EQ(dilate_mask(m, r), dilate_oracle(m, r)) << seed << " r=" << r;
    }
}

TEST(Dilate, CompositionContainsLargerRadius) {
    for (int seed = 0; seed < 10; ++seed) {
        const MaskFrame m = random_mask(20, 20, 0.03, 77 + seed);
        const MaskFrame twice = dilate_mask(dilate_mask(m, 2), 3);
        const MaskFrame once = dilate_mask(m, 3);
        for (std::size_t i = 0; i < m.pixel_count(); ++i)
            if (once.foreground(i)) {
                ASSERT_TRUE(twice.foreground(i));
            }
        // Within a pixel of dilate(m, a + b): every pixel of the composition
        // lies inside dilate(m, a + b + 1).
        const MaskFrame wide = dilate_mask(m, 6);
        for (std::size_t i = 0; i < m.pixel_count(); ++i)
            if (twice.foreground(i)) {
                ASSERT_TRUE(wide.foreground(i));
            }
    }
}

TEST(ResizeMask, NearestKeepsLabelsAndIdentity) {
    const MaskFrame m = random_mask(8, 6, 0.3, 5);
    EXPECT_EQ(resize_mask_nearest(m, 8, 6), m);
    const MaskFrame up = resize_mask_nearest(m, 16, 12);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x) ASSERT_EQ(up.foreground(x, y), m.foreground(x / 2, y / 2));
    EXPECT_EQ(resize_mask_nearest(up, 8, 6), m);
}

TEST(FrameSequence, ValidateRejectsMixedShapes) {
    FrameSequence seq;
    seq.frames = {Frame(2, 2, 3), Frame(2, 2, 1)};
    try {
        seq.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

}  // namespace
}  // namespace sdbmc
