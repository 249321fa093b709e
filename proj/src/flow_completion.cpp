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

#include "sdbmc/flow_completion.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sdbmc {

std::size_t EdgeMap::count() const noexcept {
    return static_cast<std::size_t>(std::count(edge_.begin(), edge_.end(), std::uint8_t{1}));
}

EdgeMap extract_flow_edges(const FlowField& flow, double threshold) {
    const int w = flow.width(), h = flow.height();
    EdgeMap edges(w, h);
    if (!(threshold < INFINITY)) return edges;

    // Derivative along one axis; neighbors outside the image replicate the
    // center, invalid neighbors are skipped.
    auto derivative = [&](const std::vector<float>& d, int x, int y, int dx, int dy) -> double {
        const std::size_t c = flow.index(x, y);
        auto neighbor = [&](int nx, int ny, double& out) {
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) {
                out = d[c];
                return true;
            }
            if (!flow.valid(nx, ny)) return false;
            out = d[flow.index(nx, ny)];
            return true;
        };
        double fwd = 0.0, bwd = 0.0;
        const bool has_f = neighbor(x + dx, y + dy, fwd);
        const bool has_b = neighbor(x - dx, y - dy, bwd);
        if (has_f && has_b) return 0.5 * (fwd - bwd);
        if (has_f) return fwd - d[c];
        if (has_b) return d[c] - bwd;
        return 0.0;
    };

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!flow.valid(x, y)) continue;
            const double gu = std::hypot(derivative(flow.u_data(), x, y, 1, 0), derivative(flow.u_data(), x, y, 0, 1));
            const double gv = std::hypot(derivative(flow.v_data(), x, y, 1, 0), derivative(flow.v_data(), x, y, 0, 1));
            if (std::max(gu, gv) > threshold) edges.set(x, y, true);
        }
    return edges;
}

bool flow_link_blocked(bool p_edge, bool p_hole, bool q_edge, bool q_hole) noexcept {
    if (p_edge && q_edge) return true;
    return p_hole && !p_edge && q_edge && !q_hole;
}

namespace {

struct HolePixel {
    std::size_t index;
    int x, y;
    // Neighbor flat indices used by the update; at most four.
    std::array<std::size_t, 4> nbr{};
    int n = 0;
};

}  // namespace

CompletedFlow complete_flow(const FlowField& flow, const MaskFrame& mask, const EdgeMap& edges, double tol,
                            int max_iters) {
    const int w = flow.width(), h = flow.height();
    if (mask.width() != w || mask.height() != h || edges.width() != w || edges.height() != h)
        throw Error(ErrorCode::DimensionMismatch, "complete_flow: flow, mask and edge map differ in size");

    CompletedFlow result;
    result.flow = flow;
    result.provenance.assign(flow.pixel_count(), FlowOrigin::observed);

    std::vector<std::uint8_t> hole(flow.pixel_count(), 0);
    std::vector<HolePixel> pixels;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = flow.index(x, y);
            if (mask.foreground(i) || !flow.valid(x, y)) {
                hole[i] = 1;
                pixels.push_back({i, x, y});
            }
        }
    if (pixels.empty()) return result;

    auto build_links = [&](HolePixel& p, bool respect_edges) {
        p.n = 0;
        const int dx[4] = {-1, 1, 0, 0};
        const int dy[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
            const int qx = p.x + dx[k], qy = p.y + dy[k];
            if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
            const std::size_t q = flow.index(qx, qy);
            if (respect_edges && flow_link_blocked(edges.edge(p.index), true, edges.edge(q), hole[q] != 0)) continue;
            p.nbr[p.n++] = q;
        }
    };
    for (auto& p : pixels) build_links(p, true);

    std::vector<int> slot(flow.pixel_count(), -1);
    for (std::size_t k = 0; k < pixels.size(); ++k) slot[pixels[k].index] = static_cast<int>(k);

    // A hole pixel is reachable when some chain of its own links ends at an
    // observed value.
    auto reachable = [&]() {
        std::vector<std::uint8_t> seen(pixels.size(), 0);
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t k = 0; k < pixels.size(); ++k) {
                if (seen[k]) continue;
                for (int j = 0; j < pixels[k].n; ++j) {
                    const std::size_t q = pixels[k].nbr[j];
                    if (!hole[q] || seen[slot[q]]) {
                        seen[k] = 1;
                        changed = true;
                        break;
                    }
                }
            }
        }
        return seen;
    };

    std::vector<std::uint8_t> seen = reachable();
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        // Isolated by edges: those pixels fall back to unrestricted links.
        result.edge_fallback_used = true;
        for (std::size_t k = 0; k < pixels.size(); ++k)
            if (!seen[k]) build_links(pixels[k], false);
        seen = reachable();
    }

    auto& u = result.flow.u_data();
    auto& v = result.flow.v_data();
    std::vector<std::uint8_t> known(flow.pixel_count(), 1);
    for (const auto& p : pixels) {
        known[p.index] = 0;
        u[p.index] = 0.0f;
        v[p.index] = 0.0f;
        result.provenance[p.index] = FlowOrigin::synthesized;
        result.flow.set_valid(p.x, p.y, true);
    }

    // Pixels with no path to any observed value stay at zero flow.
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < pixels.size(); ++k) {
        if (seen[k]) active.push_back(k);
        else result.nonconvergence_warning = true;
    }

    // Onion-peel initial guess speeds up the relaxation.
    std::vector<std::size_t> pending = active;
    while (!pending.empty()) {
        std::vector<std::pair<std::size_t, std::array<float, 2>>> assigned;
        std::vector<std::size_t> rest;
        for (std::size_t k : pending) {
            const HolePixel& p = pixels[k];
            double su = 0.0, sv = 0.0;
            int n = 0;
            for (int j = 0; j < p.n; ++j)
                if (known[p.nbr[j]]) {
                    su += u[p.nbr[j]];
                    sv += v[p.nbr[j]];
                    ++n;
                }
            if (n > 0) assigned.push_back({k, {static_cast<float>(su / n), static_cast<float>(sv / n)}});
            else rest.push_back(k);
        }
        if (assigned.empty()) break;
        for (const auto& [k, val] : assigned) {
            u[pixels[k].index] = val[0];
            v[pixels[k].index] = val[1];
            known[pixels[k].index] = 1;
        }
        pending.swap(rest);
    }

    std::vector<std::size_t> red, black;
    for (std::size_t k : active) ((pixels[k].x + pixels[k].y) % 2 == 0 ? red : black).push_back(k);

    auto residual_norm = [&]() {
        double acc = 0.0;
        for (std::size_t k : active) {
            const HolePixel& p = pixels[k];
            if (p.n == 0) continue;
            double su = 0.0, sv = 0.0;
            for (int j = 0; j < p.n; ++j) {
                su += u[p.nbr[j]];
                sv += v[p.nbr[j]];
            }
            const double ru = su - p.n * static_cast<double>(u[p.index]);
            const double rv = sv - p.n * static_cast<double>(v[p.index]);
            acc += ru * ru + rv * rv;
        }
        return std::sqrt(acc);
    };

    auto relax = [&](const std::vector<std::size_t>& color) {
        double max_change = 0.0;
        for (std::size_t k : color) {
            const HolePixel& p = pixels[k];
            if (p.n == 0) continue;
            double su = 0.0, sv = 0.0;
            for (int j = 0; j < p.n; ++j) {
                su += u[p.nbr[j]];
                sv += v[p.nbr[j]];
            }
            const float nu = static_cast<float>(su / p.n);
            const float nv = static_cast<float>(sv / p.n);
            max_change = std::max({max_change, std::fabs(static_cast<double>(nu) - u[p.index]),
                                   std::fabs(static_cast<double>(nv) - v[p.index])});
            u[p.index] = nu;
            v[p.index] = nv;
        }
        return max_change;
    };

    double change = 0.0;
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        change = std::max(relax(red), relax(black));
        result.residual_history.push_back(residual_norm());
        if (change < tol) {
            ++iter;
            break;
        }
    }
    result.iterations = iter;
    result.final_update = change;
    if (iter >= max_iters && change > 10.0 * tol) result.nonconvergence_warning = true;
    return result;
}

}  // namespace sdbmc
