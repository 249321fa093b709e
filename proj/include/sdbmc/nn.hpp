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
#include <span>
#include <vector>

#include "sdbmc/error.hpp"

namespace sdbmc {

/// Channel-major (C, H, W) float tensor.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int channels, int height, int width, float fill = 0.0f);
    Tensor3(int channels, int height, int width, std::vector<float> data);

    int channels() const noexcept { return channels_; }
    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    std::size_t plane_size() const noexcept { return static_cast<std::size_t>(height_) * width_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::size_t index(int c, int y, int x) const noexcept {
        return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
    }
    float& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }
    float at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }
    float* plane(int c) noexcept { return data_.data() + static_cast<std::size_t>(c) * plane_size(); }
    const float* plane(int c) const noexcept { return data_.data() + static_cast<std::size_t>(c) * plane_size(); }

    std::vector<float>& data() noexcept { return data_; }
    const std::vector<float>& data() const noexcept { return data_; }

    bool operator==(const Tensor3& other) const = default;

private:
    int channels_ = 0;
    int height_ = 0;
    int width_ = 0;
    std::vector<float> data_;
};

/// 3x3 zero-padded cross-correlation. weights: (out, in, 3, 3); bias: out.
/// Per output value the sum runs over input channel, then kernel row, then
/// kernel column; the bias is added last.
Tensor3 conv2d(const Tensor3& x, std::span<const float> weights, std::span<const float> bias, int out_channels,
               int threads = 1);

struct BatchNormParams {
    std::vector<float> scale;
    std::vector<float> shift;
    std::vector<float> mean;
    std::vector<float> var;
};

inline constexpr float kBatchNormEps = 1e-5f;

/// (x - mean) / sqrt(var + eps) * scale + shift, per channel.
Tensor3 batchnorm_infer(const Tensor3& x, const BatchNormParams& bn, float eps = kBatchNormEps);
void batchnorm_infer_inplace(Tensor3& x, const BatchNormParams& bn, float eps = kBatchNormEps);

/// 2x2 max, stride 2. Odd height or width is an error.
Tensor3 maxpool2(const Tensor3& x);

/// Stride-2 transposed 3x3 convolution, padding 1, output padding 1, so the
/// output is exactly twice the input size. weights: (in, out, 3, 3).
Tensor3 upconv2(const Tensor3& x, std::span<const float> weights, std::span<const float> bias, int out_channels,
                int threads = 1);

void relu_inplace(Tensor3& x) noexcept;

/// Logistic function evaluated in double, clamped to the open interval (0, 1).
float sigmoid(float v) noexcept;
void sigmoid_inplace(Tensor3& x) noexcept;

/// Channel concatenation, `a` first.
Tensor3 concat_channels(const Tensor3& a, const Tensor3& b);

}  // namespace sdbmc
