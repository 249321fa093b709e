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

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "sdbmc/image.hpp"

namespace sdbmc {

/// Dense displacement field defined on the grid of the source frame: pixel
/// (x, y) of the source corresponds to (x + u, y + v) in the target.
class FlowField {
public:
    FlowField() = default;
    FlowField(int width, int height, bool valid = true);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return u_.size(); }
    std::size_t index(int x, int y) const noexcept { return static_cast<std::size_t>(y) * width_ + x; }

    float& u(int x, int y) noexcept { return u_[index(x, y)]; }
    float& v(int x, int y) noexcept { return v_[index(x, y)]; }
    float u(int x, int y) const noexcept { return u_[index(x, y)]; }
    float v(int x, int y) const noexcept { return v_[index(x, y)]; }
    bool valid(int x, int y) const noexcept { return valid_[index(x, y)] != 0; }
    void set_valid(int x, int y, bool ok) noexcept { valid_[index(x, y)] = ok ? 1 : 0; }

    std::vector<float>& u_data() noexcept { return u_; }
    std::vector<float>& v_data() noexcept { return v_; }
    std::vector<std::uint8_t>& valid_data() noexcept { return valid_; }
    const std::vector<float>& u_data() const noexcept { return u_; }
    const std::vector<float>& v_data() const noexcept { return v_; }
    const std::vector<std::uint8_t>& valid_data() const noexcept { return valid_; }

    /// Bilinear sample of (u, v) at a sub-pixel position, clamped to the grid.
    std::pair<float, float> sample(float x, float y) const noexcept;

    /// Marks every foreground pixel of `mask` invalid.
    void invalidate(const MaskFrame& mask);

    bool operator==(const FlowField& other) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> u_;
    std::vector<float> v_;
    std::vector<std::uint8_t> valid_;
};

struct FlowParams {
    int levels = 4;
    /// Warping (linearization) passes per pyramid level.
    int iterations = 10;
    /// Smoothness weight alpha, expressed on the 0-255 intensity scale.
    double regularization = 15.0;
    /// Relaxation sweeps of the linearized system per warping pass.
    int inner_sweeps = 10;
    double sor_omega = 1.8;
    /// Gaussian pre-smoothing applied to each pyramid level.
    double presmooth_sigma = 0.8;
};

/// Coarse-to-fine variational flow (brightness constancy linearized around
/// the current estimate, quadratic smoothness). `a` and `b` are gray frames.
FlowField estimate_flow(const Frame& a, const Frame& b, const FlowParams& params = {});

struct FlowPairPlan {
    int window_length = 0;
    int stride = 0;
    std::vector<std::pair<int, int>> pairs;  // (source, target)
};

FlowPairPlan plan_flow_pairs(int window_length, int non_adjacent_stride);

/// Backward warp: out(x) = frame(x + flow(x)) by bilinear sampling. The mask
/// flags samples that fall outside the frame or hit invalid flow.
std::pair<Frame, MaskFrame> warp_frame(const Frame& frame, const FlowField& flow);
std::pair<FloatImage, MaskFrame> warp_image(const FloatImage& image, const FlowField& flow);

/// Bilinear sample of one channel with coordinates clamped to the image.
float sample_bilinear(const FloatImage& image, float x, float y, int channel = 0) noexcept;

/// Middlebury .flo (magic 202021.25, width, height, interleaved u, v).
void write_flo(const std::filesystem::path& path, const FlowField& flow);
FlowField read_flo(const std::filesystem::path& path);

}  // namespace sdbmc
