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

#include <algorithm>
#include <array>
#include <cmath>

namespace sdbmc {

MaskFrame::MaskFrame(int width, int height, bool foreground) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw Error(ErrorCode::Precondition, "mask dimensions must be >= 1");
    labels_.assign(static_cast<std::size_t>(width) * height, foreground ? kForeground : kBackground);
}

MaskFrame::MaskFrame(int width, int height, std::vector<std::uint8_t> labels)
    : width_(width), height_(height), labels_(std::move(labels)) {
    if (width < 1 || height < 1)
        throw Error(ErrorCode::Precondition, "mask dimensions must be >= 1");
    if (labels_.size() != static_cast<std::size_t>(width) * height)
        throw Error(ErrorCode::DimensionMismatch, "mask data length does not match width*height");
    for (auto v : labels_) {
        if (v != kBackground && v != kForeground)
            throw Error(ErrorCode::InvalidLabel, "mask value " + std::to_string(v) + " is not 0 or 255");
    }
}

std::size_t MaskFrame::count_foreground() const noexcept {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), kForeground));
}

void FrameSequence::validate() const {
    if (frames.empty()) return;
    const Frame& ref = frames.front();
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (!frames[i].same_shape(ref))
            throw Error(ErrorCode::DimensionMismatch,
                        "frame " + std::to_string(first_index + static_cast<int>(i)) + " differs in shape from the first frame");
    }
}

std::uint8_t quantize(float value) noexcept {
    const float scaled = std::floor(value * 255.0f + 0.5f);
    return static_cast<std::uint8_t>(std::clamp(scaled, 0.0f, 255.0f));
}

FloatImage to_normalized(const Frame& frame) {
    FloatImage out(frame.width(), frame.height(), frame.channels());
    auto src = frame.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<float>(src[i]) / 255.0f;
    return out;
}

Frame to_8bit(const FloatImage& image) {
    Frame out(image.width(), image.height(), image.channels());
    auto src = image.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = quantize(src[i]);
    return out;
}

Frame to_gray(const Frame& frame) {
    if (frame.channels() != 3)
        throw Error(ErrorCode::WrongChannelCount, "to_gray expects 3 channels, got " + std::to_string(frame.channels()));
    Frame out(frame.width(), frame.height(), 1);
    auto src = frame.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double lum = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
        dst[i] = static_cast<std::uint8_t>(std::clamp(std::floor(lum + 0.5), 0.0, 255.0));
    }
    return out;
}

Frame resize_bilinear(const Frame& frame, int target_width, int target_height) {
    if (target_width < 1 || target_height < 1)
        throw Error(ErrorCode::Precondition, "resize target must be >= 1x1");
    if (frame.width() == target_width && frame.height() == target_height) return frame;

    const int channels = frame.channels();
    const double sx = static_cast<double>(frame.width()) / target_width;
    const double sy = static_cast<double>(frame.height()) / target_height;

    // Pixel-center aligned source coordinates, clamped to the image.
    struct Tap { int i0, i1; double w1; };
    auto taps = [](int n_out, int n_in, double scale) {
        std::vector<Tap> t(n_out);
        for (int o = 0; o < n_out; ++o) {
            double s = std::clamp((o + 0.5) * scale - 0.5, 0.0, static_cast<double>(n_in - 1));
            int i0 = static_cast<int>(std::floor(s));
            int i1 = std::min(i0 + 1, n_in - 1);
            t[o] = {i0, i1, s - i0};
        }
        return t;
    };
    const auto xt = taps(target_width, frame.width(), sx);
    const auto yt = taps(target_height, frame.height(), sy);

    Frame out(target_width, target_height, channels);
    for (int y = 0; y < target_height; ++y) {
        const Tap& ty = yt[y];
        for (int x = 0; x < target_width; ++x) {
            const Tap& tx = xt[x];
            for (int c = 0; c < channels; ++c) {
                const double top = frame.at(tx.i0, ty.i0, c) * (1.0 - tx.w1) + frame.at(tx.i1, ty.i0, c) * tx.w1;
                const double bot = frame.at(tx.i0, ty.i1, c) * (1.0 - tx.w1) + frame.at(tx.i1, ty.i1, c) * tx.w1;
                const double v = top * (1.0 - ty.w1) + bot * ty.w1;
                out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
            }
        }
    }
    return out;
}

Frame temporal_median(std::span<const Frame> frames, int window) {
    if (window < 1) throw Error(ErrorCode::Precondition, "median window must be >= 1");
    if (static_cast<std::size_t>(window) > frames.size())
        throw Error(ErrorCode::WindowTooLarge, "median window " + std::to_string(window) + " exceeds sequence length " +
                                                   std::to_string(frames.size()));
    const auto last = frames.subspan(frames.size() - window);
    const Frame& ref = last.front();
    for (const Frame& f : last) {
        if (!f.same_shape(ref)) throw Error(ErrorCode::DimensionMismatch, "median window frames differ in shape");
    }

    Frame out(ref.width(), ref.height(), ref.channels());
    const std::size_t n = out.data().size();
    const int rank = (window - 1) / 2;  // lower median
    // Counting select: 8-bit samples make a histogram cheaper than sorting.
    std::array<int, 256> hist{};
    for (std::size_t i = 0; i < n; ++i) {
        hist.fill(0);
        for (const Frame& f : last) ++hist[f.data()[i]];
        int seen = 0;
        for (int v = 0; v < 256; ++v) {
            seen += hist[v];
            if (seen > rank) {
                out.data()[i] = static_cast<std::uint8_t>(v);
                break;
            }
        }
    }
    return out;
}

Frame temporal_median(const FrameSequence& seq, int window) {
    return temporal_median(std::span<const Frame>(seq.frames), window);
}

MaskFrame dilate_mask(const MaskFrame& mask, int radius) {
    if (radius < 0) throw Error(ErrorCode::Precondition, "dilation radius must be >= 0");
    if (radius == 0) return mask;

    // Half-width of the disk on each row offset.
    std::vector<int> half(2 * radius + 1);
    for (int dy = -radius; dy <= radius; ++dy) {
        int hw = 0;
        while ((hw + 1) * (hw + 1) + dy * dy <= radius * radius) ++hw;
        half[dy + radius] = hw;
    }

    const int w = mask.width();
    const int h = mask.height();
    MaskFrame out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.foreground(x, y)) continue;
            for (int dy = -radius; dy <= radius; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h) continue;
                const int hw = half[dy + radius];
                for (int xx = std::max(0, x - hw); xx <= std::min(w - 1, x + hw); ++xx) out.set(xx, yy, true);
            }
        }
    }
    return out;
}

MaskFrame resize_mask_nearest(const MaskFrame& mask, int target_width, int target_height) {
    if (target_width < 1 || target_height < 1) throw Error(ErrorCode::Precondition, "resize target must be positive");
    if (mask.width() == target_width && mask.height() == target_height) return mask;
    MaskFrame out(target_width, target_height);
    for (int y = 0; y < target_height; ++y) {
        const int sy = std::min(mask.height() - 1, static_cast<int>((y + 0.5) * mask.height() / target_height));
        for (int x = 0; x < target_width; ++x) {
            const int sx = std::min(mask.width() - 1, static_cast<int>((x + 0.5) * mask.width() / target_width));
            out.set(x, y, mask.foreground(sx, sy));
        }
    }
    return out;
}

SlidingMedian::SlidingMedian(int capacity) : capacity_(capacity) {
    if (capacity < 1) throw Error(ErrorCode::Precondition, "sliding median capacity must be >= 1");
}

void SlidingMedian::clear() {
    count_ = 0;
    head_ = 0;
    ring_.clear();
    sorted_.clear();
}

void SlidingMedian::push(const Frame& frame) {
    if (count_ == 0) {
        width_ = frame.width();
        height_ = frame.height();
        channels_ = frame.channels();
        ring_.assign(capacity_, Frame{});
        sorted_.assign(frame.data().size() * capacity_, 0);
        head_ = 0;
    } else if (frame.width() != width_ || frame.height() != height_ || frame.channels() != channels_) {
        throw Error(ErrorCode::DimensionMismatch, "sliding median frame shape changed");
    }

    const std::size_t n = frame.data().size();
    const auto incoming = frame.data();
    if (count_ == capacity_) {
        // Replace the oldest sample in each sorted run.
        const auto outgoing = ring_[head_].data();
        for (std::size_t i = 0; i < n; ++i) {
            std::uint8_t* run = &sorted_[i * capacity_];
            std::uint8_t* pos = std::lower_bound(run, run + count_, outgoing[i]);
            std::uint8_t v = incoming[i];
            // Shift toward the freed slot while keeping order.
            std::size_t k = static_cast<std::size_t>(pos - run);
            while (k > 0 && run[k - 1] > v) { run[k] = run[k - 1]; --k; }
            while (k + 1 < static_cast<std::size_t>(count_) && run[k + 1] < v) { run[k] = run[k + 1]; ++k; }
            run[k] = v;
        }
        ring_[head_] = frame;
        head_ = (head_ + 1) % capacity_;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint8_t* run = &sorted_[i * capacity_];
            std::size_t k = static_cast<std::size_t>(count_);
            const std::uint8_t v = incoming[i];
            while (k > 0 && run[k - 1] > v) { run[k] = run[k - 1]; --k; }
            run[k] = v;
        }
        ring_[(head_ + count_) % capacity_] = frame;
        ++count_;
    }
}

Frame SlidingMedian::median() const {
    if (count_ == 0) throw Error(ErrorCode::Precondition, "sliding median is empty");
    Frame out(width_, height_, channels_);
    const int rank = (count_ - 1) / 2;
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = sorted_[i * capacity_ + rank];
    return out;
}

}  // namespace sdbmc
