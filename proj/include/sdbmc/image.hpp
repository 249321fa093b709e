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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdbmc/error.hpp"

namespace sdbmc {

/// Canonical working resolution of the whole pipeline (QVGA).
inline constexpr int kCanonicalWidth = 320;
inline constexpr int kCanonicalHeight = 240;

/// Dense row-major raster with interleaved channels.
template <typename T>
class Raster {
public:
    using value_type = T;

    Raster() = default;

    Raster(int width, int height, int channels, T fill = T{})
        : width_(width), height_(height), channels_(channels) {
        check_dims();
        data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
    }

    Raster(int width, int height, int channels, std::vector<T> data)
        : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
        check_dims();
        if (data_.size() != static_cast<std::size_t>(width) * height * channels)
            throw Error(ErrorCode::DimensionMismatch, "raster data length does not match width*height*channels");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

    std::size_t index(int x, int y, int c = 0) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
    }
    T& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
    const T& at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }
    std::vector<T>& storage() noexcept { return data_; }

    template <typename U>
    bool same_shape(const Raster<U>& other) const noexcept {
        return width_ == other.width() && height_ == other.height() && channels_ == other.channels();
    }

    bool operator==(const Raster& other) const = default;

private:
    void check_dims() const {
        if (width_ < 1 || height_ < 1 || channels_ < 1)
            throw Error(ErrorCode::Precondition, "raster dimensions must be >= 1");
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<T> data_;
};

/// 8-bit storage frame (1 = gray, 3 = RGB).
using Frame = Raster<std::uint8_t>;
/// Normalized working copy, values nominally in [0, 1].
using FloatImage = Raster<float>;

/// Binary label raster: 0 = background, 255 = foreground.
class MaskFrame {
public:
    static constexpr std::uint8_t kBackground = 0;
    static constexpr std::uint8_t kForeground = 255;

    MaskFrame() = default;
    MaskFrame(int width, int height, bool foreground = false);
    /// Throws InvalidLabel if any value is outside {0, 255}.
    MaskFrame(int width, int height, std::vector<std::uint8_t> labels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return labels_.empty(); }
    std::size_t pixel_count() const noexcept { return labels_.size(); }

    bool foreground(int x, int y) const noexcept { return labels_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    bool foreground(std::size_t i) const noexcept { return labels_[i] != 0; }
    void set(int x, int y, bool fg) noexcept { labels_[static_cast<std::size_t>(y) * width_ + x] = fg ? kForeground : kBackground; }
    void set(std::size_t i, bool fg) noexcept { labels_[i] = fg ? kForeground : kBackground; }

    std::size_t count_foreground() const noexcept;
    std::span<const std::uint8_t> labels() const noexcept { return labels_; }

    bool operator==(const MaskFrame& other) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> labels_;
};

struct FrameSequence {
    std::vector<Frame> frames;
    std::optional<double> frame_rate;
    std::string source_id;
    /// Numeric file index of frames[0].
    int first_index = 0;

    std::size_t size() const noexcept { return frames.size(); }
    /// Throws DimensionMismatch unless all frames share one shape.
    void validate() const;
};

// --- conversions -----------------------------------------------------------

/// Round-half-up with clamping to [0, 255]; `value` is in normalized units.
std::uint8_t quantize(float value) noexcept;
FloatImage to_normalized(const Frame& frame);
Frame to_8bit(const FloatImage& image);

/// BT.601 luminance; requires 3 channels.
Frame to_gray(const Frame& frame);

Frame resize_bilinear(const Frame& frame, int target_width, int target_height);

/// Per-pixel, per-channel median over the last `window` frames. Even windows
/// take the lower of the two central values.
Frame temporal_median(std::span<const Frame> frames, int window);
Frame temporal_median(const FrameSequence& seq, int window);

/// Grows the foreground by a Euclidean disk of `radius` pixels.
MaskFrame dilate_mask(const MaskFrame& mask, int radius);

/// Nearest-neighbor resampling (pixel centers aligned).
MaskFrame resize_mask_nearest(const MaskFrame& mask, int target_width, int target_height);

/// Incremental form of temporal_median over a fixed-capacity ring of frames.
/// median() equals temporal_median over the frames currently held.
class SlidingMedian {
public:
    explicit SlidingMedian(int capacity);

    void push(const Frame& frame);
    void clear();
    int size() const noexcept { return count_; }
    int capacity() const noexcept { return capacity_; }
    Frame median() const;

private:
    int capacity_;
    int count_ = 0;
    int head_ = 0;
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<Frame> ring_;
    // Per sample (pixel*channel), `capacity_` slots kept sorted over the first count_.
    std::vector<std::uint8_t> sorted_;
};

}  // namespace sdbmc
