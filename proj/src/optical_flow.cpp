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

#include "sdbmc/optical_flow.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace sdbmc {

FlowField::FlowField(int width, int height, bool valid) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw Error(ErrorCode::Precondition, "flow dimensions must be >= 1");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    u_.assign(n, 0.0f);
    v_.assign(n, 0.0f);
    valid_.assign(n, valid ? 1 : 0);
}

std::pair<float, float> FlowField::sample(float x, float y) const noexcept {
    x = std::clamp(x, 0.0f, static_cast<float>(width_ - 1));
    y = std::clamp(y, 0.0f, static_cast<float>(height_ - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, width_ - 1);
    const int y1 = std::min(y0 + 1, height_ - 1);
    const float fx = x - x0;
    const float fy = y - y0;
    auto lerp2 = [&](const std::vector<float>& d) {
        const float top = d[index(x0, y0)] * (1 - fx) + d[index(x1, y0)] * fx;
        const float bot = d[index(x0, y1)] * (1 - fx) + d[index(x1, y1)] * fx;
        return top * (1 - fy) + bot * fy;
    };
    return {lerp2(u_), lerp2(v_)};
}

void FlowField::invalidate(const MaskFrame& mask) {
    if (mask.width() != width_ || mask.height() != height_)
        throw Error(ErrorCode::DimensionMismatch, "mask does not match flow field");
    for (std::size_t i = 0; i < valid_.size(); ++i)
        if (mask.foreground(i)) valid_[i] = 0;
}

namespace {

// Single-plane float image used inside the estimator.
struct Plane {
    int w = 0, h = 0;
    std::vector<float> d;
    Plane() = default;
    Plane(int w_, int h_) : w(w_), h(h_), d(static_cast<std::size_t>(w_) * h_, 0.0f) {}
    float& at(int x, int y) { return d[static_cast<std::size_t>(y) * w + x]; }
    float at(int x, int y) const { return d[static_cast<std::size_t>(y) * w + x]; }
};

Plane gaussian_blur(const Plane& src, double sigma) {
    if (sigma <= 0.0) return src;
    const int radius = std::max(1, static_cast<int>(std::ceil(2.5 * sigma)));
    std::vector<float> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = static_cast<float>(std::exp(-(i * i) / (2.0 * sigma * sigma)));
        sum += k[i + radius];
    }
    for (auto& v : k) v = static_cast<float>(v / sum);

    Plane tmp(src.w, src.h), out(src.w, src.h);
    for (int y = 0; y < src.h; ++y)
        for (int x = 0; x < src.w; ++x) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * src.at(std::clamp(x + i, 0, src.w - 1), y);
            tmp.at(x, y) = acc;
        }
    for (int y = 0; y < src.h; ++y)
        for (int x = 0; x < src.w; ++x) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp.at(x, std::clamp(y + i, 0, src.h - 1));
            out.at(x, y) = acc;
        }
    return out;
}

Plane downsample(const Plane& src) {
    Plane blurred = gaussian_blur(src, 1.0);
    Plane out((src.w + 1) / 2, (src.h + 1) / 2);
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) {
            const int x0 = 2 * x, y0 = 2 * y;
            const int x1 = std::min(x0 + 1, src.w - 1), y1 = std::min(y0 + 1, src.h - 1);
            out.at(x, y) = 0.25f * (blurred.at(x0, y0) + blurred.at(x1, y0) + blurred.at(x0, y1) + blurred.at(x1, y1));
        }
    return out;
}

float sample_plane(const Plane& p, float x, float y) {
    x = std::clamp(x, 0.0f, static_cast<float>(p.w - 1));
    y = std::clamp(y, 0.0f, static_cast<float>(p.h - 1));
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, p.w - 1), y1 = std::min(y0 + 1, p.h - 1);
    const float fx = x - x0, fy = y - y0;
    const float top = p.at(x0, y0) * (1 - fx) + p.at(x1, y0) * fx;
    const float bot = p.at(x0, y1) * (1 - fx) + p.at(x1, y1) * fx;
    return top * (1 - fy) + bot * fy;
}

void central_gradients(const Plane& p, Plane& gx, Plane& gy) {
    gx = Plane(p.w, p.h);
    gy = Plane(p.w, p.h);
    for (int y = 0; y < p.h; ++y)
        for (int x = 0; x < p.w; ++x) {
            gx.at(x, y) = 0.5f * (p.at(std::min(x + 1, p.w - 1), y) - p.at(std::max(x - 1, 0), y));
            gy.at(x, y) = 0.5f * (p.at(x, std::min(y + 1, p.h - 1)) - p.at(x, std::max(y - 1, 0)));
        }
}

Plane upsample_flow(const Plane& coarse, int w, int h, float scale) {
    Plane out(w, h);
    const float sx = static_cast<float>(coarse.w) / w;
    const float sy = static_cast<float>(coarse.h) / h;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            out.at(x, y) = scale * sample_plane(coarse, (x + 0.5f) * sx - 0.5f, (y + 0.5f) * sy - 0.5f);
    return out;
}

Plane to_plane(const Frame& f) {
    Plane p(f.width(), f.height());
    for (std::size_t i = 0; i < p.d.size(); ++i) p.d[i] = f.data()[i] / 255.0f;
    return p;
}

// Refines (u, v) on one pyramid level by repeated linearization and
// relaxation of the quadratic energy.
void refine_level(const Plane& a, const Plane& b, Plane& u, Plane& v, const FlowParams& params) {
    const int w = a.w, h = a.h;
    const double alpha = params.regularization / 255.0;
    const double alpha2 = alpha * alpha;
    const double omega = params.sor_omega;

    Plane ax, ay, bx, by;
    central_gradients(a, ax, ay);
    central_gradients(b, bx, by);

    Plane ix(w, h), iy(w, h), it(w, h), du(w, h), dv(w, h);
    for (int iter = 0; iter < params.iterations; ++iter) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const float sx = x + u.at(x, y);
                const float sy = y + v.at(x, y);
                if (sx < 0.0f || sy < 0.0f || sx > w - 1 || sy > h - 1) {
                    ix.at(x, y) = iy.at(x, y) = it.at(x, y) = 0.0f;
                    continue;
                }
                ix.at(x, y) = 0.5f * (ax.at(x, y) + sample_plane(bx, sx, sy));
                iy.at(x, y) = 0.5f * (ay.at(x, y) + sample_plane(by, sx, sy));
                it.at(x, y) = sample_plane(b, sx, sy) - a.at(x, y);
            }
        std::fill(du.d.begin(), du.d.end(), 0.0f);
        std::fill(dv.d.begin(), dv.d.end(), 0.0f);

        for (int sweep = 0; sweep < params.inner_sweeps; ++sweep) {
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    double su = 0.0, sv = 0.0;
                    int n = 0;
                    auto take = [&](int qx, int qy) {
                        su += u.at(qx, qy) + du.at(qx, qy);
                        sv += v.at(qx, qy) + dv.at(qx, qy);
                        ++n;
                    };
                    if (x > 0) take(x - 1, y);
                    if (x + 1 < w) take(x + 1, y);
                    if (y > 0) take(x, y - 1);
                    if (y + 1 < h) take(x, y + 1);

                    const double gx = ix.at(x, y), gy = iy.at(x, y), gt = it.at(x, y);
                    const double a11 = gx * gx + alpha2 * n;
                    const double a12 = gx * gy;
                    const double a22 = gy * gy + alpha2 * n;
                    const double b1 = -gx * gt + alpha2 * (su - n * u.at(x, y));
                    const double b2 = -gy * gt + alpha2 * (sv - n * v.at(x, y));
                    const double det = a11 * a22 - a12 * a12;
                    const double nu = (a22 * b1 - a12 * b2) / det;
                    const double nv = (a11 * b2 - a12 * b1) / det;
                    du.at(x, y) = static_cast<float>((1.0 - omega) * du.at(x, y) + omega * nu);
                    dv.at(x, y) = static_cast<float>((1.0 - omega) * dv.at(x, y) + omega * nv);
                }
        }
        for (std::size_t i = 0; i < u.d.size(); ++i) {
            u.d[i] += du.d[i];
            v.d[i] += dv.d[i];
        }
    }
}

}  // namespace

FlowField estimate_flow(const Frame& a, const Frame& b, const FlowParams& params) {
    if (a.channels() != 1 || b.channels() != 1)
        throw Error(ErrorCode::WrongChannelCount, "estimate_flow expects gray frames");
    if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "flow frames differ in size");
    if (params.levels < 1 || params.iterations < 1 || params.inner_sweeps < 1)
        throw Error(ErrorCode::Precondition, "flow levels, iterations and sweeps must be >= 1");
    const int min_dim = std::min(a.width(), a.height());
    if (min_dim < (1 << (params.levels - 1)) * 8)
        throw Error(ErrorCode::TooSmallForPyramid, "frame of " + std::to_string(a.width()) + "x" +
                                                       std::to_string(a.height()) + " too small for " +
                                                       std::to_string(params.levels) + " pyramid levels");

    std::vector<Plane> pa{gaussian_blur(to_plane(a), params.presmooth_sigma)};
    std::vector<Plane> pb{gaussian_blur(to_plane(b), params.presmooth_sigma)};
    for (int l = 1; l < params.levels; ++l) {
        pa.push_back(downsample(pa.back()));
        pb.push_back(downsample(pb.back()));
    }

    Plane u(pa.back().w, pa.back().h), v(pa.back().w, pa.back().h);
    for (int l = params.levels - 1; l >= 0; --l) {
        if (l != params.levels - 1) {
            const float scale_x = static_cast<float>(pa[l].w) / u.w;
            const float scale_y = static_cast<float>(pa[l].h) / u.h;
            u = upsample_flow(u, pa[l].w, pa[l].h, scale_x);
            v = upsample_flow(v, pa[l].w, pa[l].h, scale_y);
        }
        refine_level(pa[l], pb[l], u, v, params);
    }

    FlowField out(a.width(), a.height(), true);
    out.u_data() = std::move(u.d);
    out.v_data() = std::move(v.d);
    return out;
}

FlowPairPlan plan_flow_pairs(int window_length, int non_adjacent_stride) {
    if (window_length < 2) throw Error(ErrorCode::Precondition, "flow plan needs a window of >= 2 frames");
    if (non_adjacent_stride < 2) throw Error(ErrorCode::Precondition, "non-adjacent stride must be >= 2");
    FlowPairPlan plan{window_length, non_adjacent_stride, {}};
    for (int t = 0; t + 1 < window_length; ++t) {
        plan.pairs.emplace_back(t, t + 1);
        plan.pairs.emplace_back(t + 1, t);
    }
    for (int t = 0; t + non_adjacent_stride < window_length; ++t) {
        plan.pairs.emplace_back(t, t + non_adjacent_stride);
        plan.pairs.emplace_back(t + non_adjacent_stride, t);
    }
    return plan;
}

float sample_bilinear(const FloatImage& image, float x, float y, int channel) noexcept {
    x = std::clamp(x, 0.0f, static_cast<float>(image.width() - 1));
    y = std::clamp(y, 0.0f, static_cast<float>(image.height() - 1));
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, image.width() - 1), y1 = std::min(y0 + 1, image.height() - 1);
    const float fx = x - x0, fy = y - y0;
    const float top = image.at(x0, y0, channel) * (1 - fx) + image.at(x1, y0, channel) * fx;
    const float bot = image.at(x0, y1, channel) * (1 - fx) + image.at(x1, y1, channel) * fx;
    return top * (1 - fy) + bot * fy;
}

namespace {

template <typename Sampler>
MaskFrame warp_into(int w, int h, const FlowField& flow, Sampler&& write_sample) {
    MaskFrame invalid(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float sx = x + flow.u(x, y);
            const float sy = y + flow.v(x, y);
            const bool inside = sx >= 0.0f && sy >= 0.0f && sx <= w - 1 && sy <= h - 1;
            if (!flow.valid(x, y) || !inside || !std::isfinite(sx) || !std::isfinite(sy)) invalid.set(x, y, true);
            write_sample(x, y, std::isfinite(sx) ? sx : 0.0f, std::isfinite(sy) ? sy : 0.0f);
        }
    return invalid;
}

}  // namespace

std::pair<FloatImage, MaskFrame> warp_image(const FloatImage& image, const FlowField& flow) {
    if (image.width() != flow.width() || image.height() != flow.height())
        throw Error(ErrorCode::DimensionMismatch, "warp: image and flow differ in size");
    FloatImage out(image.width(), image.height(), image.channels());
    MaskFrame invalid = warp_into(image.width(), image.height(), flow, [&](int x, int y, float sx, float sy) {
        for (int c = 0; c < image.channels(); ++c) out.at(x, y, c) = sample_bilinear(image, sx, sy, c);
    });
    return {std::move(out), std::move(invalid)};
}

std::pair<Frame, MaskFrame> warp_frame(const Frame& frame, const FlowField& flow) {
    if (frame.width() != flow.width() || frame.height() != flow.height())
        throw Error(ErrorCode::DimensionMismatch, "warp: frame and flow differ in size");
    Frame out(frame.width(), frame.height(), frame.channels());
    const int w = frame.width(), h = frame.height();
    MaskFrame invalid = warp_into(w, h, flow, [&](int x, int y, float sx, float sy) {
        sx = std::clamp(sx, 0.0f, static_cast<float>(w - 1));
        sy = std::clamp(sy, 0.0f, static_cast<float>(h - 1));
        const int x0 = static_cast<int>(sx), y0 = static_cast<int>(sy);
        const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
        const float fx = sx - x0, fy = sy - y0;
        for (int c = 0; c < frame.channels(); ++c) {
            const float top = frame.at(x0, y0, c) * (1 - fx) + frame.at(x1, y0, c) * fx;
            const float bot = frame.at(x0, y1, c) * (1 - fx) + frame.at(x1, y1, c) * fx;
            out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::floor(top * (1 - fy) + bot * fy + 0.5f), 0.0f, 255.0f));
        }
    });
    return {std::move(out), std::move(invalid)};
}

namespace {

constexpr float kFloMagic = 202021.25f;
constexpr float kFloUnknown = 1e10f;

template <typename T>
void put_le(std::ofstream& os, T value) {
    static_assert(sizeof(T) == 4);
    std::uint32_t bits;
    std::memcpy(&bits, &value, 4);
    const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                           static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
    os.write(bytes, 4);
}

template <typename T>
T get_le(std::ifstream& is) {
    unsigned char bytes[4];
    if (!is.read(reinterpret_cast<char*>(bytes), 4)) throw Error(ErrorCode::UnreadableFile, "truncated .flo file");
    const std::uint32_t bits = bytes[0] | (bytes[1] << 8) | (bytes[2] << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
    T value;
    std::memcpy(&value, &bits, 4);
    return value;
}

}  // namespace

void write_flo(const std::filesystem::path& path, const FlowField& flow) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    put_le(os, kFloMagic);
    put_le(os, static_cast<std::int32_t>(flow.width()));
    put_le(os, static_cast<std::int32_t>(flow.height()));
    for (int y = 0; y < flow.height(); ++y)
        for (int x = 0; x < flow.width(); ++x) {
            put_le(os, flow.valid(x, y) ? flow.u(x, y) : kFloUnknown);
            put_le(os, flow.valid(x, y) ? flow.v(x, y) : kFloUnknown);
        }
    if (!os) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

FlowField read_flo(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
    if (get_le<float>(is) != kFloMagic) throw Error(ErrorCode::UnreadableFile, "bad .flo magic in " + path.string());
    const auto w = get_le<std::int32_t>(is);
    const auto h = get_le<std::int32_t>(is);
    if (w < 1 || h < 1 || w > 100000 || h > 100000)
        throw Error(ErrorCode::UnreadableFile, "bad .flo dimensions in " + path.string());
    FlowField flow(w, h, true);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float u = get_le<float>(is);
            const float v = get_le<float>(is);
            if (std::fabs(u) > 1e9f || std::fabs(v) > 1e9f) {
                flow.set_valid(x, y, false);
            } else {
                flow.u(x, y) = u;
                flow.v(x, y) = v;
            }
        }
    return flow;
}

}  // namespace sdbmc
