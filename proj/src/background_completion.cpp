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

#include "sdbmc/background_completion.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <set>
#include <tuple>

#include "sdbmc/parallel.hpp"

namespace sdbmc {

namespace {

bool in_bounds(float x, float y, int w, int h) {
    return std::isfinite(x) && std::isfinite(y) && x >= 0.0f && y >= 0.0f && x <= w - 1 && y <= h - 1;
}

std::array<float, 3> sample_color(const Frame& f, float x, float y) {
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, f.width() - 1), y1 = std::min(y0 + 1, f.height() - 1);
    const float fx = x - x0, fy = y - y0;
    std::array<float, 3> c{};
    for (int ch = 0; ch < f.channels() && ch < 3; ++ch) {
        const float top = f.at(x0, y0, ch) * (1 - fx) + f.at(x1, y0, ch) * fx;
        const float bot = f.at(x0, y1, ch) * (1 - fx) + f.at(x1, y1, ch) * fx;
        c[ch] = top * (1 - fy) + bot * fy;
    }
    return c;
}

bool masked_at(const MaskFrame& m, float x, float y) {
    const int xi = std::clamp(static_cast<int>(std::floor(x + 0.5f)), 0, m.width() - 1);
    const int yi = std::clamp(static_cast<int>(std::floor(y + 0.5f)), 0, m.height() - 1);
    return m.foreground(xi, yi);
}

struct Chain {
    std::size_t pixel;
    int frame;
    float x, y;
    int hops = 0;
};

}  // namespace

CandidateSet chain_candidates(std::span<const Frame> window, std::span<const MaskFrame> masks,
                              const FlowProvider& flows, int target, int max_hops, int stride,
                              const FlowPrefetch& prefetch) {
    const int n = static_cast<int>(window.size());
    if (n == 0 || masks.size() != window.size())
        throw Error(ErrorCode::DimensionMismatch, "chain_candidates: frames and masks are not aligned");
    if (target < 0 || target >= n) throw Error(ErrorCode::Precondition, "chain target outside the window");
    const int w = window[target].width(), h = window[target].height();
    for (int i = 0; i < n; ++i) {
        if (window[i].width() != w || window[i].height() != h || masks[i].width() != w || masks[i].height() != h)
            throw Error(ErrorCode::DimensionMismatch, "chain_candidates: frame/mask shape mismatch");
    }

    CandidateSet set;
    set.width = w;
    set.height = h;
    set.channels = window[target].channels();
    set.target = target;
    set.missing = masks[target];
    set.per_pixel.resize(static_cast<std::size_t>(w) * h);

    for (const ChainDirection dir : {ChainDirection::backward, ChainDirection::forward}) {
        const int step = dir == ChainDirection::backward ? -1 : 1;
        std::vector<Chain> active;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (set.missing.foreground(x, y))
                    active.push_back({static_cast<std::size_t>(y) * w + x, target, static_cast<float>(x),
                                      static_cast<float>(y)});

        // All chains advance one hop per round so the flows a round needs are
        // known up front; the outcome equals walking each chain on its own.
        while (!active.empty()) {
            if (prefetch) {
                std::set<FlowKey> keys;
                for (const Chain& c : active) {
                    if (c.hops >= max_hops) continue;
                    const int adj = c.frame + step;
                    if (adj < 0 || adj >= n) continue;
                    keys.insert({c.frame, adj});
                    const int jump = c.frame + step * stride;
                    if (stride >= 2 && jump >= 0 && jump < n) keys.insert({c.frame, jump});
                }
                if (!keys.empty()) prefetch(std::vector<FlowKey>(keys.begin(), keys.end()));
            }

            std::vector<Chain> next;
            for (Chain c : active) {
                if (c.hops >= max_hops) continue;
                const int adj = c.frame + step;
                if (adj < 0 || adj >= n) continue;

                const auto [ua, va] = flows(c.frame, adj).flow.sample(c.x, c.y);
                const float ax = c.x + ua, ay = c.y + va;
                const bool adj_ok = in_bounds(ax, ay, w, h);
                if (adj_ok && !masked_at(masks[adj], ax, ay)) {
                    set.per_pixel[c.pixel].push_back({adj, sample_color(window[adj], ax, ay), c.hops + 1, dir});
                    continue;
                }

                const int jump = c.frame + step * stride;
                bool jump_ok = false;
                float jx = 0.0f, jy = 0.0f;
                if (stride >= 2 && jump >= 0 && jump < n) {
                    const auto [uj, vj] = flows(c.frame, jump).flow.sample(c.x, c.y);
                    jx = c.x + uj;
                    jy = c.y + vj;
                    jump_ok = in_bounds(jx, jy, w, h);
                    if (jump_ok && !masked_at(masks[jump], jx, jy)) {
                        set.per_pixel[c.pixel].push_back({jump, sample_color(window[jump], jx, jy), c.hops + 1, dir});
                        continue;
                    }
                }

                if (jump_ok) next.push_back({c.pixel, jump, jx, jy, c.hops + 1});
                else if (adj_ok) next.push_back({c.pixel, adj, ax, ay, c.hops + 1});
            }
            active.swap(next);
        }
    }
    return set;
}

CandidateSet chain_candidates(std::span<const Frame> window, std::span<const MaskFrame> masks, const FlowMap& flows,
                              int target, int max_hops, int stride) {
    FlowProvider provider = [&](int s, int t) -> const CompletedFlow& {
        auto it = flows.find({s, t});
        if (it == flows.end())
            throw Error(ErrorCode::Precondition, "no flow for pair (" + std::to_string(s) + ", " + std::to_string(t) + ")");
        return it->second;
    };
    return chain_candidates(window, masks, provider, target, max_hops, stride);
}

namespace {

// Canonical order makes the weighted sum independent of candidate order.
std::vector<Candidate> canonical(const std::vector<Candidate>& cands) {
    std::vector<Candidate> sorted = cands;
    std::sort(sorted.begin(), sorted.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.frame_index, a.direction, a.chain_length, a.color) <
               std::tie(b.frame_index, b.direction, b.chain_length, b.color);
    });
    return sorted;
}

std::array<double, 3> fused_color(const std::vector<Candidate>& cands) {
    std::array<double, 3> acc{};
    double wsum = 0.0;
    for (const Candidate& c : canonical(cands)) {
        const double wgt = 1.0 / (1.0 + c.chain_length);
        for (int ch = 0; ch < 3; ++ch) acc[ch] += wgt * c.color[ch];
        wsum += wgt;
    }
    for (auto& v : acc) v /= wsum;
    return acc;
}

}  // namespace

FusionResult fuse_candidates(const CandidateSet& candidates, const Frame& target_frame) {
    if (target_frame.width() != candidates.width || target_frame.height() != candidates.height)
        throw Error(ErrorCode::DimensionMismatch, "fuse: target frame does not match candidate set");
    FusionResult out{target_frame, MaskFrame(candidates.width, candidates.height),
                     MaskFrame(candidates.width, candidates.height)};
    for (std::size_t i = 0; i < candidates.per_pixel.size(); ++i) {
        if (!candidates.missing.foreground(i)) continue;
        const auto& cands = candidates.per_pixel[i];
        if (cands.empty()) {
            out.residual.set(i, true);
            continue;
        }
        const auto color = fused_color(cands);
        for (int ch = 0; ch < target_frame.channels(); ++ch)
            out.partial.data()[i * target_frame.channels() + ch] =
                static_cast<std::uint8_t>(std::clamp(std::floor(color[ch] + 0.5), 0.0, 255.0));
        out.filled.set(i, true);
    }
    return out;
}

std::pair<FloatImage, MaskFrame> fuse_candidates_float(const CandidateSet& candidates, const FloatImage& target_frame) {
    if (target_frame.width() != candidates.width || target_frame.height() != candidates.height)
        throw Error(ErrorCode::DimensionMismatch, "fuse: target frame does not match candidate set");
    FloatImage partial = target_frame;
    MaskFrame residual(candidates.width, candidates.height);
    for (std::size_t i = 0; i < candidates.per_pixel.size(); ++i) {
        if (!candidates.missing.foreground(i)) continue;
        const auto& cands = candidates.per_pixel[i];
        if (cands.empty()) {
            residual.set(i, true);
            continue;
        }
        const auto color = fused_color(cands);
        for (int ch = 0; ch < target_frame.channels(); ++ch)
            partial.data()[i * target_frame.channels() + ch] = static_cast<float>(color[ch] / 255.0);
    }
    return {std::move(partial), std::move(residual)};
}

GuidanceField guidance_from(const FloatImage& image, const MaskFrame* unknown) {
    const int w = image.width(), h = image.height(), cn = image.channels();
    GuidanceField g(w, h, cn);
    auto usable = [&](int x, int y) { return !unknown || !unknown->foreground(x, y); };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < cn; ++c) {
                if (x + 1 < w && usable(x, y) && usable(x + 1, y))
                    g.gx[g.index(x, y, c)] = image.at(x + 1, y, c) - image.at(x, y, c);
                if (y + 1 < h && usable(x, y) && usable(x, y + 1))
                    g.gy[g.index(x, y, c)] = image.at(x, y + 1, c) - image.at(x, y, c);
            }
    return g;
}

PoissonResult poisson_reconstruct(const FloatImage& partial, const MaskFrame& region, const GuidanceField& guidance,
                                  double tol, int max_iters, const MaskFrame* unknown) {
    const int w = partial.width(), h = partial.height(), cn = partial.channels();
    if (region.width() != w || region.height() != h || guidance.width != w || guidance.height != h ||
        guidance.channels != cn || (unknown && (unknown->width() != w || unknown->height() != h)))
        throw Error(ErrorCode::DimensionMismatch, "poisson_reconstruct: inputs differ in shape");

    PoissonResult result;
    result.image = partial;

    std::vector<int> var(static_cast<std::size_t>(w) * h, -1);
    std::vector<std::pair<int, int>> coords;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (region.foreground(x, y)) {
                var[static_cast<std::size_t>(y) * w + x] = static_cast<int>(coords.size());
                coords.emplace_back(x, y);
            }
    if (coords.empty()) return result;

    const int dx[4] = {1, -1, 0, 0};
    const int dy[4] = {0, 0, 1, -1};
    auto participates = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < w && y < h && !(unknown && unknown->foreground(x, y) && !region.foreground(x, y));
    };

    // Components without any Dirichlet neighbor are singular; they keep their input.
    const std::size_t m = coords.size();
    std::vector<int> component(m, -1);
    std::vector<std::uint8_t> anchored;
    for (std::size_t s = 0; s < m; ++s) {
        if (component[s] >= 0) continue;
        const int id = static_cast<int>(anchored.size());
        anchored.push_back(0);
        std::vector<std::size_t> stack{s};
        component[s] = id;
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            const auto [x, y] = coords[k];
            for (int d = 0; d < 4; ++d) {
                const int qx = x + dx[d], qy = y + dy[d];
                if (!participates(qx, qy)) continue;
                const int q = var[static_cast<std::size_t>(qy) * w + qx];
                if (q < 0) {
                    anchored[id] = 1;
                } else if (component[q] < 0) {
                    component[q] = id;
                    stack.push_back(static_cast<std::size_t>(q));
                }
            }
        }
    }
    std::vector<int> active;
    for (std::size_t k = 0; k < m; ++k)
        if (anchored[component[k]]) active.push_back(static_cast<int>(k));
    if (active.empty()) return result;

    std::vector<int> slot(m, -1);
    for (std::size_t a = 0; a < active.size(); ++a) slot[active[a]] = static_cast<int>(a);
    const std::size_t na = active.size();

    struct Row {
        int diag = 0;
        std::array<int, 4> nbr{};
        int nn = 0;
    };
    std::vector<Row> rows(na);
    for (std::size_t a = 0; a < na; ++a) {
        const auto [x, y] = coords[active[a]];
        for (int d = 0; d < 4; ++d) {
            const int qx = x + dx[d], qy = y + dy[d];
            if (!participates(qx, qy)) continue;
            ++rows[a].diag;
            const int q = var[static_cast<std::size_t>(qy) * w + qx];
            if (q >= 0) rows[a].nbr[rows[a].nn++] = slot[q];
        }
    }

    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t a = 0; a < na; ++a) {
            double acc = rows[a].diag * in[a];
            for (int j = 0; j < rows[a].nn; ++j) acc -= in[rows[a].nbr[j]];
            out[a] = acc;
        }
    };

    double worst_residual = 0.0;
    int worst_iters = 0;
    bool all_converged = true;

    for (int c = 0; c < cn; ++c) {
        // A f = b with A = -laplacian over the region.
        std::vector<double> b(na, 0.0), f(na, 0.0), div(na, 0.0);
        for (std::size_t a = 0; a < na; ++a) {
            const auto [x, y] = coords[active[a]];
            f[a] = partial.at(x, y, c);
            double rhs = 0.0;
            for (int d = 0; d < 4; ++d) {
                const int qx = x + dx[d], qy = y + dy[d];
                if (!participates(qx, qy)) continue;
                // Guidance difference f(q) - f(p) along this link.
                double v = 0.0;
                if (d == 0) v = guidance.gx[guidance.index(x, y, c)];
                else if (d == 1) v = -guidance.gx[guidance.index(x - 1, y, c)];
                else if (d == 2) v = guidance.gy[guidance.index(x, y, c)];
                else v = -guidance.gy[guidance.index(x, y - 1, c)];
                rhs -= v;
                div[a] += v;
                if (var[static_cast<std::size_t>(qy) * w + qx] < 0) rhs += partial.at(qx, qy, c);
            }
            b[a] = rhs;
        }

        // Jacobi-preconditioned conjugate gradient.
        std::vector<double> r(na), z(na), p(na), ap(na);
        apply(f, ap);
        for (std::size_t a = 0; a < na; ++a) r[a] = b[a] - ap[a];
        auto inf_norm = [](const std::vector<double>& v) {
            double mx = 0.0;
            for (double x : v) mx = std::max(mx, std::fabs(x));
            return mx;
        };
        // Target below tol so the float-rounded output still meets it.
        const double target = 0.25 * tol;
        for (std::size_t a = 0; a < na; ++a) z[a] = r[a] / rows[a].diag;
        p = z;
        double rz = 0.0;
        for (std::size_t a = 0; a < na; ++a) rz += r[a] * z[a];
        int it = 0;
        while (inf_norm(r) > target && it < max_iters) {
            apply(p, ap);
            double pap = 0.0;
            for (std::size_t a = 0; a < na; ++a) pap += p[a] * ap[a];
            if (pap <= 0.0) break;
            const double alpha = rz / pap;
            for (std::size_t a = 0; a < na; ++a) {
                f[a] += alpha * p[a];
                r[a] -= alpha * ap[a];
            }
            for (std::size_t a = 0; a < na; ++a) z[a] = r[a] / rows[a].diag;
            double rz_new = 0.0;
            for (std::size_t a = 0; a < na; ++a) rz_new += r[a] * z[a];
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t a = 0; a < na; ++a) p[a] = z[a] + beta * p[a];
            ++it;
            // Periodic true-residual refresh limits drift in long solves.
            if (it % 200 == 0) {
                apply(f, ap);
                for (std::size_t a = 0; a < na; ++a) r[a] = b[a] - ap[a];
            }
        }
        worst_iters = std::max(worst_iters, it);

        for (std::size_t a = 0; a < na; ++a) {
            const auto [x, y] = coords[active[a]];
            result.image.at(x, y, c) = static_cast<float>(f[a]);
        }

        // Residual of the stored (float) solution.
        for (std::size_t a = 0; a < na; ++a) {
            const auto [x, y] = coords[active[a]];
            double lap = 0.0;
            for (int d = 0; d < 4; ++d) {
                const int qx = x + dx[d], qy = y + dy[d];
                if (!participates(qx, qy)) continue;
                lap += static_cast<double>(result.image.at(qx, qy, c)) - result.image.at(x, y, c);
            }
            worst_residual = std::max(worst_residual, std::fabs(lap - div[a]));
        }
        if (inf_norm(r) > target) all_converged = false;
    }

    result.iterations = worst_iters;
    result.residual = worst_residual;
    result.converged = all_converged && worst_residual <= tol;
    result.nonconvergence_warning = !result.converged && worst_residual > 10.0 * tol;
    return result;
}

FloatImage diffusion_inpaint(const FloatImage& image, const MaskFrame& residual, int max_rounds) {
    const int w = image.width(), h = image.height(), cn = image.channels();
    if (residual.width() != w || residual.height() != h)
        throw Error(ErrorCode::DimensionMismatch, "diffusion_inpaint: mask does not match frame");
    FloatImage out = image;
    std::vector<std::uint8_t> known(static_cast<std::size_t>(w) * h);
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < known.size(); ++i) {
        known[i] = residual.foreground(i) ? 0 : 1;
        if (!known[i]) pending.push_back(i);
    }
    if (pending.empty()) return out;
    if (pending.size() == known.size())
        throw Error(ErrorCode::AllPixelsMissing, "no known pixel to inpaint from");

    std::vector<double> acc(cn);
    for (int round = 0; !pending.empty() && (max_rounds <= 0 || round < max_rounds); ++round) {
        std::vector<std::pair<std::size_t, std::vector<float>>> assigned;
        std::vector<std::size_t> rest;
        for (std::size_t i : pending) {
            const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
            std::fill(acc.begin(), acc.end(), 0.0);
            int n = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int qx = x + dx, qy = y + dy;
                    if (qx < 0 || qy < 0 || qx >= w || qy >= h) continue;
                    if (!known[static_cast<std::size_t>(qy) * w + qx]) continue;
                    for (int c = 0; c < cn; ++c) acc[c] += out.at(qx, qy, c);
                    ++n;
                }
            if (n == 0) {
                rest.push_back(i);
                continue;
            }
            std::vector<float> val(cn);
            for (int c = 0; c < cn; ++c) val[c] = static_cast<float>(acc[c] / n);
            assigned.emplace_back(i, std::move(val));
        }
        for (auto& [i, val] : assigned) {
            for (int c = 0; c < cn; ++c) out.data()[i * cn + c] = val[c];
            known[i] = 1;
        }
        pending.swap(rest);
    }
    return out;
}

Frame diffusion_inpaint(const Frame& frame, const MaskFrame& residual, int max_rounds) {
    Frame out = to_8bit(diffusion_inpaint(to_normalized(frame), residual, max_rounds));
    // Known pixels pass through bit-exactly.
    for (std::size_t i = 0; i < frame.pixel_count(); ++i)
        if (!residual.foreground(i))
            for (int c = 0; c < frame.channels(); ++c)
                out.data()[i * frame.channels() + c] = frame.data()[i * frame.channels() + c];
    return out;
}

namespace {

// Thread-safe memo of completed flows keyed by frame pair.
class LazyFlows {
public:
    LazyFlows(std::span<const Frame> window, std::span<const MaskFrame> masks, const CompletionConfig& config,
              const FlowPairPlan& plan)
        : window_(window), masks_(masks), config_(config), gray_(window.size()), gray_once_(window.size()) {
        for (const auto& p : plan.pairs) admissible_.insert(p);
    }

    const CompletedFlow& get(int s, int t) {
        Entry* e = nullptr;
        {
            std::lock_guard lock(mutex_);
            if (!admissible_.count({s, t}))
                throw Error(ErrorCode::Precondition,
                            "pair (" + std::to_string(s) + ", " + std::to_string(t) + ") is not in the flow plan");
            auto& slot = entries_[{s, t}];
            if (!slot) slot = std::make_unique<Entry>();
            e = slot.get();
        }
        std::call_once(e->once, [&] { e->value = compute(s, t); });
        return e->value;
    }

    void prefetch(const std::vector<FlowKey>& keys) {
        parallel_for(keys.size(), config_.threads, [&](std::size_t i) { get(keys[i].first, keys[i].second); });
    }

    int estimated() const { return static_cast<int>(entries_.size()); }
    int warnings() const {
        int n = 0;
        for (const auto& [k, e] : entries_) n += e->value.nonconvergence_warning ? 1 : 0;
        return n;
    }

private:
    struct Entry {
        std::once_flag once;
        CompletedFlow value;
    };

    const Frame& gray(int i) {
        std::call_once(gray_once_[i], [&] {
            gray_[i] = window_[i].channels() == 1 ? window_[i] : to_gray(window_[i]);
        });
        return gray_[i];
    }

    CompletedFlow compute(int s, int t) {
        FlowField flow = estimate_flow(gray(s), gray(t), config_.flow);
        flow.invalidate(masks_[s]);
        const EdgeMap edges = extract_flow_edges(flow, config_.edge_threshold);
        return complete_flow(flow, masks_[s], edges, config_.flow_tol, config_.flow_max_iters);
    }

    std::span<const Frame> window_;
    std::span<const MaskFrame> masks_;
    const CompletionConfig& config_;
    std::vector<Frame> gray_;
    std::vector<std::once_flag> gray_once_;
    std::set<FlowKey> admissible_;
    std::mutex mutex_;
    std::map<FlowKey, std::unique_ptr<Entry>> entries_;
};

}  // namespace

CompletedFrame complete_background(std::span<const Frame> window, std::span<const MaskFrame> masks,
                                   const CompletionConfig& config) {
    const int n = static_cast<int>(window.size());
    if (n < 2) throw Error(ErrorCode::Precondition, "completion needs a window of >= 2 frames");
    if (masks.size() != window.size()) throw Error(ErrorCode::DimensionMismatch, "one mask per frame is required");
    const Frame& last = window.back();
    for (int i = 0; i < n; ++i) {
        if (!window[i].same_shape(last) || masks[i].width() != last.width() || masks[i].height() != last.height())
            throw Error(ErrorCode::DimensionMismatch, "window frames and masks must share one shape");
    }

    const int target = n - 1;
    CompletedFrame out;
    out.frame = last;
    out.filled.assign(last.pixel_count(), FillTag::observed);
    out.stats.missing = masks[target].count_foreground();
    if (out.stats.missing == 0) return out;
    if (out.stats.missing == last.pixel_count() &&
        std::all_of(masks.begin(), masks.end(), [](const MaskFrame& m) { return m.count_foreground() == m.pixel_count(); }))
        throw Error(ErrorCode::AllPixelsMissing, "every pixel of every frame is masked");

    const FlowPairPlan plan = plan_flow_pairs(n, std::max(config.stride, 2));
    LazyFlows flows(window, masks, config, plan);
    const int max_hops = config.max_hops > 0 ? config.max_hops : n;
    const CandidateSet candidates = chain_candidates(
        window, masks, [&](int s, int t) -> const CompletedFlow& { return flows.get(s, t); }, target, max_hops,
        config.stride, [&](const std::vector<FlowKey>& keys) { flows.prefetch(keys); });
    out.stats.flows_estimated = flows.estimated();
    out.stats.flow_warnings = flows.warnings();
    if (out.stats.flow_warnings > 0)
        out.warnings.push_back(std::to_string(out.stats.flow_warnings) + " flow completions hit the iteration cap");

    const FloatImage target_image = to_normalized(last);
    auto [fused, residual] = fuse_candidates_float(candidates, target_image);

    MaskFrame filled(last.width(), last.height());
    for (std::size_t i = 0; i < last.pixel_count(); ++i)
        if (masks[target].foreground(i) && !residual.foreground(i)) filled.set(i, true);

    const GuidanceField guidance = guidance_from(fused, &residual);
    const PoissonResult poisson =
        poisson_reconstruct(fused, filled, guidance, config.poisson_tol, config.poisson_max_iters, &residual);
    if (poisson.nonconvergence_warning) {
        out.stats.poisson_warning = true;
        out.warnings.push_back("poisson reconstruction did not converge (residual " + std::to_string(poisson.residual) + ")");
    }

    const FloatImage inpainted = diffusion_inpaint(poisson.image, residual);
    out.frame = to_8bit(inpainted);

    const int cn = last.channels();
    for (std::size_t i = 0; i < last.pixel_count(); ++i) {
        if (!masks[target].foreground(i)) {
            for (int c = 0; c < cn; ++c) out.frame.data()[i * cn + c] = last.data()[i * cn + c];
            continue;
        }
        if (residual.foreground(i)) {
            out.filled[i] = FillTag::diffusion_inpainted;
            ++out.stats.diffusion_filled;
        } else {
            bool changed = false;
            for (int c = 0; c < cn && !changed; ++c) changed = poisson.image.data()[i * cn + c] != fused.data()[i * cn + c];
            out.filled[i] = changed ? FillTag::poisson : FillTag::flow_filled;
            ++out.stats.flow_filled;
        }
    }
    return out;
}

Frame provenance_image(const CompletedFrame& completed) {
    static constexpr std::array<std::array<std::uint8_t, 3>, 4> kColors{{
        {0, 0, 0},      // observed
        {0, 200, 0},    // flow filled
        {40, 80, 255},  // poisson
        {230, 40, 40},  // diffusion inpainted
    }};
    Frame img(completed.frame.width(), completed.frame.height(), 3);
    for (std::size_t i = 0; i < completed.filled.size(); ++i) {
        const auto& col = kColors[static_cast<std::size_t>(completed.filled[i])];
        for (int c = 0; c < 3; ++c) img.data()[i * 3 + c] = col[c];
    }
    return img;
}

}  // namespace sdbmc
