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

#include <algorithm>
#include <cstdlib>
#include <vector>

namespace sdbmc {

FpmSource parse_fpm_source(const std::string& text) {
    if (text == "constant") return FpmSource::constant;
    if (text == "previous-mask") return FpmSource::previous_mask;
    throw Error(ErrorCode::InvalidConfig, "unknown FPM source '" + text + "' (constant | previous-mask)");
}

const char* to_string(FpmSource source) noexcept {
    return source == FpmSource::constant ? "constant" : "previous-mask";
}

Tensor3 SegmenterInput::to_tensor() const {
    const FloatImage* parts[] = {&empty_background, &empty_fpm, &recent_background, &recent_fpm, &current, &current_fpm};
    const int w = current.width(), h = current.height();
    int channels = 0;
    for (const FloatImage* p : parts) {
        if (p->width() != w || p->height() != h) throw Error(ErrorCode::DimensionMismatch, "segmenter inputs differ in size");
        channels += p->channels();
    }
    Tensor3 t(channels, h, w);
    int c0 = 0;
    for (const FloatImage* p : parts) {
        for (int c = 0; c < p->channels(); ++c)
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) t.at(c0 + c, y, x) = p->at(x, y, c);
        c0 += p->channels();
    }
    return t;
}

FloatImage fpm_plane(FpmSource source, const MaskFrame* previous, int width, int height) {
    if (source == FpmSource::constant || previous == nullptr || previous->empty()) return FloatImage(width, height, 1, 0.5f);
    if (previous->width() != width || previous->height() != height)
        throw Error(ErrorCode::DimensionMismatch, "previous mask does not match the frame size");
    // Summed-area table of the foreground indicator.
    std::vector<int> sat(static_cast<std::size_t>(width + 1) * (height + 1), 0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            sat[static_cast<std::size_t>(y + 1) * (width + 1) + x + 1] =
                (previous->foreground(x, y) ? 1 : 0) + sat[static_cast<std::size_t>(y) * (width + 1) + x + 1] +
                sat[static_cast<std::size_t>(y + 1) * (width + 1) + x] - sat[static_cast<std::size_t>(y) * (width + 1) + x];
    FloatImage out(width, height, 1);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const int x0 = std::max(0, x - 3), x1 = std::min(width, x + 4);
            const int y0 = std::max(0, y - 3), y1 = std::min(height, y + 4);
            auto s = [&](int xx, int yy) { return sat[static_cast<std::size_t>(yy) * (width + 1) + xx]; };
            const int sum = s(x1, y1) - s(x0, y1) - s(x1, y0) + s(x0, y0);
            out.at(x, y) = static_cast<float>(sum) / static_cast<float>((x1 - x0) * (y1 - y0));
        }
    return out;
}

SegmenterInput assemble_input(const Frame& empty_background, const Frame& recent_background, const Frame& current,
                              FpmSource source, const MaskFrame* previous_mask) {
    for (const Frame* f : {&empty_background, &recent_background, &current}) {
        if (f->channels() != 3) throw Error(ErrorCode::WrongChannelCount, "segmenter inputs must be 3-channel");
        if (!f->same_shape(current)) throw Error(ErrorCode::DimensionMismatch, "segmenter inputs differ in size");
    }
    const FloatImage fpm = fpm_plane(source, previous_mask, current.width(), current.height());
    return {to_normalized(empty_background), fpm, to_normalized(recent_background), fpm, to_normalized(current), fpm};
}

MaskFrame binarize(const FloatImage& probability, double threshold) {
    MaskFrame mask(probability.width(), probability.height());
    for (std::size_t i = 0; i < probability.pixel_count(); ++i)
        if (probability.data()[i * probability.channels()] > threshold) mask.set(i, true);
    return mask;
}

MaskFrame difference_mask(const Frame& current, const Frame& background, int threshold) {
    if (!current.same_shape(background)) throw Error(ErrorCode::DimensionMismatch, "frame and background differ in shape");
    const int cn = current.channels();
    MaskFrame mask(current.width(), current.height());
    for (std::size_t i = 0; i < current.pixel_count(); ++i) {
        int diff = 0;
        for (int c = 0; c < cn; ++c)
            diff = std::max(diff, std::abs(int{current.data()[i * cn + c]} - int{background.data()[i * cn + c]}));
        if (diff > threshold) mask.set(i, true);
    }
    return mask;
}

MaskFrame remove_small_components(const MaskFrame& mask, int min_blob) {
    if (min_blob <= 1) return mask;
    const int w = mask.width(), h = mask.height();
    MaskFrame out = mask;
    std::vector<std::uint8_t> seen(mask.pixel_count(), 0);
    std::vector<std::size_t> component, stack;
    for (std::size_t s = 0; s < mask.pixel_count(); ++s) {
        if (!mask.foreground(s) || seen[s]) continue;
        component.clear();
        stack.assign(1, s);
        seen[s] = 1;
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            component.push_back(p);
            const int x = static_cast<int>(p % w), y = static_cast<int>(p / w);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int qx = x + dx, qy = y + dy;
                    if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
                    const std::size_t q = static_cast<std::size_t>(qy) * w + qx;
                    if (mask.foreground(q) && !seen[q]) {
                        seen[q] = 1;
                        stack.push_back(q);
                    }
                }
        }
        if (static_cast<int>(component.size()) < min_blob)
            for (std::size_t p : component) out.set(p, false);
    }
    return out;
}

MaskFrame differencing_segment(const Frame& current, const Frame& background, int threshold, int min_blob) {
    return remove_small_components(difference_mask(current, background, threshold), min_blob);
}

Segmentation DifferencingSegmenter::segment(const SegmenterContext& ctx) const {
    MaskFrame a = difference_mask(ctx.current, ctx.empty_background, threshold_);
    const MaskFrame b = difference_mask(ctx.current, ctx.recent_background, threshold_);
    for (std::size_t i = 0; i < a.pixel_count(); ++i)
        if (!b.foreground(i)) a.set(i, false);
    return {remove_small_components(a, min_blob_), std::nullopt};
}

Segmentation NetworkSegmenter::segment(const SegmenterContext& ctx) const {
    const SegmenterInput input =
        assemble_input(ctx.empty_background, ctx.recent_background, ctx.current, fpm_, ctx.previous_mask);
    const Tensor3 out = network_->forward(input.to_tensor(), threads_);
    FloatImage prob(out.width(), out.height(), 1, std::vector<float>(out.data().begin(), out.data().end()));
    MaskFrame mask = binarize(prob, threshold_);
    return {std::move(mask), std::move(prob)};
}

}  // namespace sdbmc
