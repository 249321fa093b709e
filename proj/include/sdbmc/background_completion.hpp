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

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdbmc/flow_completion.hpp"
#include "sdbmc/image.hpp"
#include "sdbmc/optical_flow.hpp"

namespace sdbmc {

enum class ChainDirection : std::uint8_t { forward, backward };

struct Candidate {
    int frame_index = 0;
    std::array<float, 3> color{};  // 8-bit scale, per channel
    int chain_length = 1;          // hops
    ChainDirection direction = ChainDirection::backward;
};

/// Candidate colors for every missing pixel of one target frame.
struct CandidateSet {
    int width = 0;
    int height = 0;
    int channels = 0;
    int target = 0;
    MaskFrame missing;
    /// Indexed by flat pixel index; empty for pixels that are not missing.
    std::vector<std::vector<Candidate>> per_pixel;
};

using FlowKey = std::pair<int, int>;
using FlowMap = std::map<FlowKey, CompletedFlow>;
/// Supplies the completed flow for (source, target); may compute lazily.
using FlowProvider = std::function<const CompletedFlow&(int source, int target)>;
/// Optional hint listing every flow the next hop will read.
using FlowPrefetch = std::function<void(const std::vector<FlowKey>&)>;

/// Follows completed flow from each missing pixel of `target` toward earlier
/// and later frames until an unmasked pixel is reached. Per hop the adjacent
/// destination is tried first, then the non-adjacent jump; when both are
/// masked the chain continues from the jump destination when it exists.
CandidateSet chain_candidates(std::span<const Frame> window, std::span<const MaskFrame> masks,
                              const FlowProvider& flows, int target, int max_hops, int stride,
                              const FlowPrefetch& prefetch = {});
CandidateSet chain_candidates(std::span<const Frame> window, std::span<const MaskFrame> masks, const FlowMap& flows,
                              int target, int max_hops, int stride);

struct FusionResult {
    Frame partial;       // target frame with fused colors written in
    MaskFrame filled;    // pixels that received a fused color
    MaskFrame residual;  // missing pixels without any candidate
};

/// Weighted mean of candidate colors, weight 1 / (1 + chain length).
FusionResult fuse_candidates(const CandidateSet& candidates, const Frame& target_frame);
/// Same weighting, kept in normalized float (no intermediate rounding).
std::pair<FloatImage, MaskFrame> fuse_candidates_float(const CandidateSet& candidates, const FloatImage& target_frame);

/// Per-pixel, per-channel forward differences: gx(x,y) ~ f(x+1,y) - f(x,y).
struct GuidanceField {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> gx;
    std::vector<float> gy;

    GuidanceField() = default;
    GuidanceField(int w, int h, int c)
        : width(w), height(h), channels(c), gx(static_cast<std::size_t>(w) * h * c, 0.0f),
          gy(static_cast<std::size_t>(w) * h * c, 0.0f) {}
    std::size_t index(int x, int y, int c) const noexcept { return (static_cast<std::size_t>(y) * width + x) * channels + c; }
};

/// Forward differences of `image`; links touching a pixel of `unknown` get 0.
GuidanceField guidance_from(const FloatImage& image, const MaskFrame* unknown = nullptr);

struct PoissonResult {
    FloatImage image;
    int iterations = 0;
    /// max |laplacian(f) - div(g)| over the region, normalized units.
    double residual = 0.0;
    bool converged = true;
    bool nonconvergence_warning = false;
};

/// Solves laplacian(f) = div(g) on `region` with Dirichlet values taken from
/// `partial` outside it (conjugate gradient, double precision). Neighbors
/// outside the image or flagged in `unknown` drop out (Neumann). Components
/// with no Dirichlet neighbor keep their input values.
PoissonResult poisson_reconstruct(const FloatImage& partial, const MaskFrame& region, const GuidanceField& guidance,
                                  double tol = 1e-6, int max_iters = 5000, const MaskFrame* unknown = nullptr);

/// Onion-peel fill: each round assigns every residual pixel with a known
/// 8-neighbor the mean of its known 8-neighbors. max_rounds <= 0 means until done.
FloatImage diffusion_inpaint(const FloatImage& image, const MaskFrame& residual, int max_rounds = 0);
Frame diffusion_inpaint(const Frame& frame, const MaskFrame& residual, int max_rounds = 0);

enum class FillTag : std::uint8_t { observed = 0, flow_filled = 1, poisson = 2, diffusion_inpainted = 3 };

struct CompletionConfig {
    FlowParams flow;
    int stride = 5;
    double edge_threshold = 1.0;
    double flow_tol = 1e-4;
    int flow_max_iters = 2000;
    /// 0 means the window length.
    int max_hops = 0;
    double poisson_tol = 1e-6;
    int poisson_max_iters = 5000;
    int threads = 1;
};

struct CompletionStats {
    int flows_estimated = 0;
    int flow_warnings = 0;
    bool poisson_warning = false;
    std::size_t missing = 0;
    std::size_t flow_filled = 0;
    std::size_t diffusion_filled = 0;
};

struct CompletedFrame {
    Frame frame;
    std::vector<FillTag> filled;
    CompletionStats stats;
    std::vector<std::string> warnings;
};

/// End-to-end completion of the last frame of `window`: flow estimation over
/// the planned pairs the chains visit, flow completion, candidate chaining,
/// fusion, Poisson reconstruction of the fused region and diffusion of the rest.
CompletedFrame complete_background(std::span<const Frame> window, std::span<const MaskFrame> masks,
                                   const CompletionConfig& config = {});

/// RGB provenance map, one color per FillTag.
Frame provenance_image(const CompletedFrame& completed);

}  // namespace sdbmc
