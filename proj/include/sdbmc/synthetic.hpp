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
#include <string>
#include <vector>

#include "sdbmc/image.hpp"

namespace sdbmc {

enum class SceneKind : std::uint8_t { static_scene, pan, static_ghost };

SceneKind parse_scene_kind(const std::string& text);
const char* to_string(SceneKind kind) noexcept;

struct SceneOptions {
    SceneKind kind = SceneKind::pan;
    int length = 250;
    int width = kCanonicalWidth;
    int height = kCanonicalHeight;
    std::uint64_t seed = 7;
    /// Background translation in px/frame along x (pan only).
    int speed = 1;
    int box_size = 20;
    /// Per-frame box motion; the box bounces off the frame borders.
    int box_dx = 3;
    int box_dy = 2;
    bool with_object = true;
    /// static-ghost: the box stays put for this many frames, then leaves.
    int parked_frames = 80;
    /// Numeric index of the first frame on disk.
    int first_index = 1;
};

/// Box position in frame coordinates, or absent.
struct BoxPlacement {
    bool present = false;
    int x = 0;
    int y = 0;
    int size = 0;
};

struct SyntheticScene {
    SceneOptions options;
    std::vector<Frame> frames;
    std::vector<Frame> truth;
    /// Clean background plate in each frame's own coordinates.
    std::vector<Frame> plates;
    std::vector<BoxPlacement> boxes;
    /// Horizontal camera offset of each frame into the canvas.
    std::vector<int> offsets;
};

/// Deterministic in the options (seed included). The background is a smooth
/// low-frequency color field plus a smoothly interpolated coarse lattice of
/// random offsets, sampled from a canvas wide enough for the pan.
SyntheticScene generate_scene(const SceneOptions& options);

/// Writes in%06d.png, gt%06d.png, bg%06d.png and scene.json.
void write_scene(const SyntheticScene& scene, const std::filesystem::path& directory);

inline constexpr const char* kSyntheticFramePattern = "in%06d.png";
inline constexpr const char* kSyntheticPlatePattern = "bg%06d.png";

}  // namespace sdbmc
