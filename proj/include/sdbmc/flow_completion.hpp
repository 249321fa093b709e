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
#include <vector>

#include "sdbmc/optical_flow.hpp"

namespace sdbmc {

class EdgeMap {
public:
    EdgeMap() = default;
    EdgeMap(int width, int height) : width_(width), height_(height), edge_(static_cast<std::size_t>(width) * height, 0) {}

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool edge(int x, int y) const noexcept { return edge_[static_cast<std::size_t>(y) * width_ + x] != 0; }
    bool edge(std::size_t i) const noexcept { return edge_[i] != 0; }
    void set(int x, int y, bool e) noexcept { edge_[static_cast<std::size_t>(y) * width_ + x] = e ? 1 : 0; }
    std::size_t count() const noexcept;

    bool operator==(const EdgeMap& other) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> edge_;
};

/// A pixel is an edge iff the larger of |grad u| and |grad v| (central
/// differences over valid neighbors) exceeds `threshold`. Invalid pixels are
/// never edges.
EdgeMap extract_flow_edges(const FlowField& flow, double threshold = 1.0);

enum class FlowOrigin : std::uint8_t { observed = 0, synthesized = 1 };

struct CompletedFlow {
    FlowField flow;
    std::vector<FlowOrigin> provenance;
    int iterations = 0;
    /// Largest per-pixel change of the final sweep.
    double final_update = 0.0;
    /// Max iterations reached with the update still above 10x tolerance.
    bool nonconvergence_warning = false;
    /// Holes with no admissible source; filled from unrestricted neighbors.
    bool edge_fallback_used = false;
    /// Edge-masked Laplacian residual (L2 over the hole) after each sweep.
    std::vector<double> residual_history;
};

/// Hole-to-neighbor link rule shared by the solver and its tests: a link
/// between p and q is blocked when both are edge pixels, or when an observed
/// edge pixel would act as a source for a non-edge hole pixel.
bool flow_link_blocked(bool p_edge, bool p_hole, bool q_edge, bool q_hole) noexcept;

/// Fills every pixel of `mask` (and any invalid pixel) by harmonic diffusion
/// of u and v, with diffusion suppressed across edges. Red-black Gauss-Seidel;
/// stops when the largest update falls below `tol` or after `max_iters`.
CompletedFlow complete_flow(const FlowField& flow, const MaskFrame& mask, const EdgeMap& edges, double tol = 1e-4,
                            int max_iters = 2000);

}  // namespace sdbmc
