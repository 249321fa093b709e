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

#include "sdbmc/nn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "sdbmc/parallel.hpp"

namespace sdbmc {

Tensor3::Tensor3(int channels, int height, int width, float fill)
    : channels_(channels), height_(height), width_(width) {
    if (channels < 1 || height < 1 || width < 1) throw Error(ErrorCode::ShapeMismatch, "tensor dimensions must be >= 1");
    data_.assign(static_cast<std::size_t>(channels) * height * width, fill);
}

Tensor3::Tensor3(int channels, int height, int width, std::vector<float> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
    if (channels < 1 || height < 1 || width < 1) throw Error(ErrorCode::ShapeMismatch, "tensor dimensions must be >= 1");
    if (data_.size() != static_cast<std::size_t>(channels) * height * width)
        throw Error(ErrorCode::ShapeMismatch, "tensor data length does not match C*H*W");
}

namespace {

constexpr int kOutBlock = 4;

void check_params(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw Error(ErrorCode::ShapeMismatch, std::string(what) + ": expected " + std::to_string(want) +
                                                  " values, got " + std::to_string(got));
}

}  // namespace

Tensor3 conv2d(const Tensor3& x, std::span<const float> weights, std::span<const float> bias, int out_channels,
               int threads) {
    const int cin = x.channels(), h = x.height(), w = x.width();
    if (out_channels < 1) throw Error(ErrorCode::ShapeMismatch, "conv2d: out_channels must be >= 1");
    check_params(weights.size(), static_cast<std::size_t>(out_channels) * cin * 9, "conv2d weights");
    check_params(bias.size(), static_cast<std::size_t>(out_channels), "conv2d bias");

    Tensor3 out(out_channels, h, w);
    const int blocks = (out_channels + kOutBlock - 1) / kOutBlock;
    parallel_for(static_cast<std::size_t>(blocks), threads, [&](std::size_t b) {
        const int o0 = static_cast<int>(b) * kOutBlock;
        const int nb = std::min(kOutBlock, out_channels - o0);
        std::vector<float> acc(static_cast<std::size_t>(kOutBlock) * w);
        for (int y = 0; y < h; ++y) {
            std::fill(acc.begin(), acc.end(), 0.0f);
            for (int i = 0; i < cin; ++i) {
                const float* in_plane = x.plane(i);
                for (int ky = 0; ky < 3; ++ky) {
                    const int sy = y + ky - 1;
                    if (sy < 0 || sy >= h) continue;
                    const float* row = in_plane + static_cast<std::size_t>(sy) * w;
                    for (int kx = 0; kx < 3; ++kx) {
                        const int off = kx - 1;
                        const int x0 = std::max(0, -off), x1 = std::min(w, w - off);
                        for (int k = 0; k < nb; ++k) {
                            const float wt = weights[((static_cast<std::size_t>(o0 + k) * cin + i) * 3 + ky) * 3 + kx];
                            float* a = acc.data() + static_cast<std::size_t>(k) * w;
                            const float* src = row + off;
                            for (int xx = x0; xx < x1; ++xx) a[xx] += wt * src[xx];
                        }
                    }
                }
            }
            for (int k = 0; k < nb; ++k) {
                float* dst = out.plane(o0 + k) + static_cast<std::size_t>(y) * w;
                const float* a = acc.data() + static_cast<std::size_t>(k) * w;
                const float bv = bias[o0 + k];
                for (int xx = 0; xx < w; ++xx) dst[xx] = a[xx] + bv;
            }
        }
    });
    return out;
}

void batchnorm_infer_inplace(Tensor3& x, const BatchNormParams& bn, float eps) {
    const auto c = static_cast<std::size_t>(x.channels());
    check_params(bn.scale.size(), c, "batchnorm scale");
    check_params(bn.shift.size(), c, "batchnorm shift");
    check_params(bn.mean.size(), c, "batchnorm mean");
    check_params(bn.var.size(), c, "batchnorm var");
    for (int ch = 0; ch < x.channels(); ++ch) {
        const float inv = 1.0f / std::sqrt(bn.var[ch] + eps);
        const float mean = bn.mean[ch], scale = bn.scale[ch], shift = bn.shift[ch];
        float* p = x.plane(ch);
        for (std::size_t i = 0; i < x.plane_size(); ++i) p[i] = (p[i] - mean) * inv * scale + shift;
    }
}

Tensor3 batchnorm_infer(const Tensor3& x, const BatchNormParams& bn, float eps) {
    Tensor3 out = x;
    batchnorm_infer_inplace(out, bn, eps);
    return out;
}

Tensor3 maxpool2(const Tensor3& x) {
    if (x.height() % 2 != 0 || x.width() % 2 != 0)
        throw Error(ErrorCode::OddDimensions, "maxpool2 needs even height and width, got " +
                                                  std::to_string(x.height()) + "x" + std::to_string(x.width()));
    const int h = x.height() / 2, w = x.width() / 2;
    Tensor3 out(x.channels(), h, w);
    for (int c = 0; c < x.channels(); ++c)
        for (int y = 0; y < h; ++y)
            for (int xx = 0; xx < w; ++xx)
                out.at(c, y, xx) = std::max({x.at(c, 2 * y, 2 * xx), x.at(c, 2 * y, 2 * xx + 1),
                                             x.at(c, 2 * y + 1, 2 * xx), x.at(c, 2 * y + 1, 2 * xx + 1)});
    return out;
}

Tensor3 upconv2(const Tensor3& x, std::span<const float> weights, std::span<const float> bias, int out_channels,
                int threads) {
    const int cin = x.channels(), h = x.height(), w = x.width();
    if (out_channels < 1) throw Error(ErrorCode::ShapeMismatch, "upconv2: out_channels must be >= 1");
    check_params(weights.size(), static_cast<std::size_t>(cin) * out_channels * 9, "upconv2 weights");
    check_params(bias.size(), static_cast<std::size_t>(out_channels), "upconv2 bias");

    const int oh = 2 * h, ow = 2 * w;
    Tensor3 out(out_channels, oh, ow);
    // out(oy, ox) gathers in(iy, ix) * W[ky][kx] with oy = 2*iy - 1 + ky.
    // Even output coordinates use k = 1; odd ones use k = 0 (i = o/2 + 1) and k = 2 (i = o/2).
    parallel_for(static_cast<std::size_t>(out_channels), threads, [&](std::size_t o_idx) {
        const int o = static_cast<int>(o_idx);
        std::vector<float> even(w), odd(w);
        for (int oy = 0; oy < oh; ++oy) {
            std::fill(even.begin(), even.end(), 0.0f);
            std::fill(odd.begin(), odd.end(), 0.0f);
            std::array<std::pair<int, int>, 2> taps{};  // (ky, iy)
            int ntaps = 0;
            if (oy % 2 == 0) {
                taps[ntaps++] = {1, oy / 2};
            } else {
                if (oy / 2 + 1 < h) taps[ntaps++] = {0, oy / 2 + 1};
                taps[ntaps++] = {2, oy / 2};
            }
            for (int i = 0; i < cin; ++i) {
                const float* kern = weights.data() + (static_cast<std::size_t>(i) * out_channels + o) * 9;
                for (int t = 0; t < ntaps; ++t) {
                    const auto [ky, iy] = taps[t];
                    const float* row = x.plane(i) + static_cast<std::size_t>(iy) * w;
                    const float w0 = kern[ky * 3 + 0], w1 = kern[ky * 3 + 1], w2 = kern[ky * 3 + 2];
                    for (int ix = 0; ix < w; ++ix) even[ix] += w1 * row[ix];
                    for (int ix = 0; ix + 1 < w; ++ix) odd[ix] += w0 * row[ix + 1];
                    for (int ix = 0; ix < w; ++ix) odd[ix] += w2 * row[ix];
                }
            }
            float* dst = out.plane(o) + static_cast<std::size_t>(oy) * ow;
            const float bv = bias[o];
            for (int ix = 0; ix < w; ++ix) {
                dst[2 * ix] = even[ix] + bv;
                dst[2 * ix + 1] = odd[ix] + bv;
            }
        }
    });
    return out;
}

void relu_inplace(Tensor3& x) noexcept {
    for (float& v : x.data()) v = std::max(v, 0.0f);
}

float sigmoid(float v) noexcept {
    const double s = 1.0 / (1.0 + std::exp(-static_cast<double>(v)));
    constexpr float lo = std::numeric_limits<float>::min();
    const float hi = std::nextafter(1.0f, 0.0f);
    return std::clamp(static_cast<float>(s), lo, hi);
}

void sigmoid_inplace(Tensor3& x) noexcept {
    for (float& v : x.data()) v = sigmoid(v);
}

Tensor3 concat_channels(const Tensor3& a, const Tensor3& b) {
    if (a.height() != b.height() || a.width() != b.width())
        throw Error(ErrorCode::ShapeMismatch, "concat: spatial sizes differ");
    std::vector<float> data;
    data.reserve(a.size() + b.size());
    data.insert(data.end(), a.data().begin(), a.data().end());
    data.insert(data.end(), b.data().begin(), b.data().end());
    return Tensor3(a.channels() + b.channels(), a.height(), a.width(), std::move(data));
}

}  // namespace sdbmc
