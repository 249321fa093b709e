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

// Brute-force reference implementations shared by the unit tests and the
// acceptance binary. Everything here is written from textbook definitions
// in double precision and shares no code with the library kernels.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "sdbmc/background_completion.hpp"
#include "sdbmc/flow_completion.hpp"
#include "sdbmc/nn.hpp"

namespace sdbmc::oracles {

inline std::vector<float> random_vector(std::size_t n, std::mt19937& rng, float lo = -1.0f, float hi = 1.0f) {
    std::uniform_real_distribution<float> d(lo, hi);
    std::vector<float> v(n);
    for (float& x : v) x = d(rng);
    return v;
}

inline Tensor3 random_tensor(int c, int h, int w, std::mt19937& rng) {
    return Tensor3(c, h, w, random_vector(static_cast<std::size_t>(c) * h * w, rng));
}

/// Largest |got - want| / max(1, |want|); infinity on a shape mismatch.
inline double max_rel_error(const Tensor3& got, const Tensor3& want) {
    if (got.channels() != want.channels() || got.height() != want.height() || got.width() != want.width())
        return INFINITY;
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const double scale = std::max(1.0, std::abs(static_cast<double>(want.data()[i])));
        worst = std::max(worst, std::abs(static_cast<double>(got.data()[i]) - want.data()[i]) / scale);
    }
    return worst;
}

/// Zero-padded 3x3 cross-correlation, weights [out][in][3][3].
inline Tensor3 conv(const Tensor3& x, const std::vector<float>& w, const std::vector<float>& b, int out) {
    Tensor3 y(out, x.height(), x.width());
    for (int o = 0; o < out; ++o)
        for (int yy = 0; yy < x.height(); ++yy)
            for (int xx = 0; xx < x.width(); ++xx) {
                double s = b[o];
                for (int i = 0; i < x.channels(); ++i)
                    for (int ky = 0; ky < 3; ++ky)
                        for (int kx = 0; kx < 3; ++kx) {
                            const int sy = yy + ky - 1, sx = xx + kx - 1;
                            if (sy < 0 || sx < 0 || sy >= x.height() || sx >= x.width()) continue;
                            s += static_cast<double>(w[((o * x.channels() + i) * 3 + ky) * 3 + kx]) * x.at(i, sy, sx);
                        }
                y.at(o, yy, xx) = static_cast<float>(s);
            }
    return y;
}

/// Scatter form: input (i, iy, ix) adds w[i][o][ky][kx] at output
/// (2 iy - 1 + ky, 2 ix - 1 + kx), cropped to 2H x 2W.
inline Tensor3 upconv(const Tensor3& x, const std::vector<float>& w, const std::vector<float>& b, int out) {
    const int H = 2 * x.height(), W = 2 * x.width();
    std::vector<double> acc(static_cast<std::size_t>(out) * H * W, 0.0);
    for (int i = 0; i < x.channels(); ++i)
        for (int iy = 0; iy < x.height(); ++iy)
            for (int ix = 0; ix < x.width(); ++ix)
                for (int o = 0; o < out; ++o)
                    for (int ky = 0; ky < 3; ++ky)
                        for (int kx = 0; kx < 3; ++kx) {
                            const int oy = 2 * iy - 1 + ky, ox = 2 * ix - 1 + kx;
                            if (oy < 0 || ox < 0 || oy >= H || ox >= W) continue;
                            acc[(static_cast<std::size_t>(o) * H + oy) * W + ox] +=
                                static_cast<double>(w[((i * out + o) * 3 + ky) * 3 + kx]) * x.at(i, iy, ix);
                        }
    Tensor3 y(out, H, W);
    for (int o = 0; o < out; ++o)
        for (int p = 0; p < H * W; ++p)
            y.plane(o)[p] = static_cast<float>(acc[static_cast<std::size_t>(o) * H * W + p] + b[o]);
    return y;
}

inline Tensor3 maxpool(const Tensor3& x) {
    Tensor3 y(x.channels(), x.height() / 2, x.width() / 2);
    for (int k = 0; k < x.channels(); ++k)
        for (int yy = 0; yy < y.height(); ++yy)
            for (int xx = 0; xx < y.width(); ++xx) {
                float m = x.at(k, 2 * yy, 2 * xx);
                for (int d = 1; d < 4; ++d) m = std::max(m, x.at(k, 2 * yy + d / 2, 2 * xx + d % 2));
                y.at(k, yy, xx) = m;
            }
    return y;
}

inline Tensor3 batchnorm(const Tensor3& x, const BatchNormParams& bn, double eps) {
    Tensor3 y = x;
    for (int k = 0; k < x.channels(); ++k)
        for (int i = 0; i < x.height() * x.width(); ++i)
            y.plane(k)[i] = static_cast<float>((static_cast<double>(x.plane(k)[i]) - bn.mean[k]) /
                                                   std::sqrt(static_cast<double>(bn.var[k]) + eps) * bn.scale[k] +
                                               bn.shift[k]);
    return y;
}

/// Solves the augmented system [A | b] in place by Gauss-Jordan elimination
/// with partial pivoting.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> a) {
    const int n = static_cast<int>(a.size());
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        for (int r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0.0) continue;
            const double f = a[r][c] / a[c][c];
            for (int k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> x(n);
    for (int r = 0; r < n; ++r) x[r] = a[r][n] / a[r][r];
    return x;
}

/// Edge-masked Laplace fill of one flow component. Hole pixel p links to
/// 4-neighbor q unless both are edges, or p is a non-edge hole pixel and q
/// an observed edge. Each hole pixel satisfies sum over links (f_q - f_p) = 0.
inline std::vector<double> edge_masked_fill(const std::vector<float>& field, int w, int h, const MaskFrame& hole,
                                            const EdgeMap& edges) {
    std::vector<int> var(field.size(), -1);
    int n = 0;
    for (std::size_t i = 0; i < field.size(); ++i)
        if (hole.foreground(i)) var[i] = n++;
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    const int dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            if (var[p] < 0) continue;
            const int row = var[p];
            for (int k = 0; k < 4; ++k) {
                const int qx = x + dx[k], qy = y + dy[k];
                if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
                const std::size_t q = static_cast<std::size_t>(qy) * w + qx;
                const bool pe = edges.edge(p), qe = edges.edge(q), qh = hole.foreground(q);
                if ((pe && qe) || (!pe && qe && !qh)) continue;
                a[row][row] -= 1.0;
                if (var[q] >= 0) a[row][var[q]] += 1.0;
                else a[row][n] -= field[q];
            }
        }
    const std::vector<double> sol = gauss_solve(std::move(a));
    std::vector<double> out(field.begin(), field.end());
    for (std::size_t i = 0; i < field.size(); ++i)
        if (var[i] >= 0) out[i] = sol[var[i]];
    return out;
}

/// Dense Poisson solve on one channel: for region pixel p and each in-image
/// neighbor q, sum (f_q - f_p) equals the summed guidance along the links
/// (forward differences, negated for the backward links); pixels outside
/// the region are fixed.
inline std::vector<double> poisson_fill(const FloatImage& img, const MaskFrame& region, const GuidanceField& g) {
    const int w = img.width(), h = img.height();
    std::vector<int> var(img.pixel_count(), -1);
    int n = 0;
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        if (region.foreground(i)) var[i] = n++;
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int row = var[static_cast<std::size_t>(y) * w + x];
            if (row < 0) continue;
            struct Link {
                int qx, qy;
                double v;
            };
            std::vector<Link> links;
            if (x + 1 < w) links.push_back({x + 1, y, g.gx[g.index(x, y, 0)]});
            if (x > 0) links.push_back({x - 1, y, -g.gx[g.index(x - 1, y, 0)]});
            if (y + 1 < h) links.push_back({x, y + 1, g.gy[g.index(x, y, 0)]});
            if (y > 0) links.push_back({x, y - 1, -g.gy[g.index(x, y - 1, 0)]});
            for (const Link& l : links) {
                a[row][row] -= 1.0;
                a[row][n] += l.v;
                const int col = var[static_cast<std::size_t>(l.qy) * w + l.qx];
                if (col >= 0) a[row][col] += 1.0;
                else a[row][n] -= img.at(l.qx, l.qy);
            }
        }
    const std::vector<double> sol = gauss_solve(std::move(a));
    std::vector<double> out(img.data().begin(), img.data().end());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (var[i] >= 0) out[i] = sol[var[i]];
    return out;
}

/// Exhaustive integer block matching over the interior (a border of
/// `border` pixels is skipped): the displacement d minimizing the summed
/// absolute difference a(x) - b(x + d), single channel.
inline std::pair<int, int> block_match(const Frame& a, const Frame& b, int radius, int border) {
    double best = INFINITY;
    std::pair<int, int> arg{0, 0};
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            double sad = 0;
            for (int y = border; y < a.height() - border; ++y)
                for (int x = border; x < a.width() - border; ++x) sad += std::abs(a.at(x, y) - b.at(x + dx, y + dy));
            if (sad < best) {
                best = sad;
                arg = {dx, dy};
            }
        }
    return arg;
}

}  // namespace sdbmc::oracles
