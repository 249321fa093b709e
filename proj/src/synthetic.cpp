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

#include "sdbmc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "json.hpp"
#include "sdbmc/error.hpp"
#include "sdbmc/image_io.hpp"

namespace sdbmc {

namespace {

constexpr int kLatticeSpacing = 16;
constexpr int kTextureAmplitude = 10;
constexpr double kWaveAmplitude = 25.0;
constexpr double kWavePeriod = 900.0;
constexpr std::uint8_t kBoxColor[3] = {220, 60, 40};

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Raw engine output only: std distributions are not portable across
// standard libraries, the engine sequence is.
int lattice_value(std::mt19937& rng) {
    return static_cast<int>(rng() % (2 * kTextureAmplitude + 1)) - kTextureAmplitude;
}

Frame make_canvas(int width, int height, std::uint64_t seed) {
    std::mt19937 rng(static_cast<std::uint32_t>(seed ^ (seed >> 32)));
    const int lw = width / kLatticeSpacing + 2;
    const int lh = height / kLatticeSpacing + 2;
    std::vector<int> lattice(static_cast<std::size_t>(lw) * lh * 3);
    for (int& v : lattice) v = lattice_value(rng);
    double phase[3];
    for (double& p : phase) p = (rng() % 6283) / 1000.0;
    const double base[3] = {110.0, 120.0, 130.0};

    Frame canvas(width, height, 3);
    for (int y = 0; y < height; ++y) {
        const int ly = y / kLatticeSpacing;
        const double ty = smoothstep(static_cast<double>(y % kLatticeSpacing) / kLatticeSpacing);
        for (int x = 0; x < width; ++x) {
            const int lx = x / kLatticeSpacing;
            const double tx = smoothstep(static_cast<double>(x % kLatticeSpacing) / kLatticeSpacing);
            for (int c = 0; c < 3; ++c) {
                auto at = [&](int i, int j) {
                    return static_cast<double>(lattice[(static_cast<std::size_t>(j) * lw + i) * 3 + c]);
                };
                const double tex = (1 - ty) * ((1 - tx) * at(lx, ly) + tx * at(lx + 1, ly)) +
                                   ty * ((1 - tx) * at(lx, ly + 1) + tx * at(lx + 1, ly + 1));
                const double wave =
                    kWaveAmplitude * std::sin(2.0 * std::numbers::pi * (0.8 * x + 0.6 * y) / kWavePeriod + phase[c]);
                canvas.at(x, y, c) = static_cast<std::uint8_t>(std::lround(std::clamp(base[c] + wave + tex, 0.0, 255.0)));
            }
        }
    }
    return canvas;
}

// Triangle wave over [0, span].
int bounce(int position, int span) {
    if (span <= 0) return 0;
    const int period = 2 * span;
    int m = position % period;
    if (m < 0) m += period;
    return m <= span ? m : period - m;
}

}  // namespace

SceneKind parse_scene_kind(const std::string& text) {
    if (text == "static") return SceneKind::static_scene;
    if (text == "pan") return SceneKind::pan;
    if (text == "static-ghost") return SceneKind::static_ghost;
    throw Error(ErrorCode::InvalidConfig, "unknown scene '" + text + "' (static | pan | static-ghost)");
}

const char* to_string(SceneKind kind) noexcept {
    switch (kind) {
        case SceneKind::static_scene: return "static";
        case SceneKind::pan: return "pan";
        case SceneKind::static_ghost: return "static-ghost";
    }
    return "?";
}

SyntheticScene generate_scene(const SceneOptions& options) {
    const SceneOptions& o = options;
    if (o.length < 1 || o.width < 1 || o.height < 1)
        throw Error(ErrorCode::InvalidConfig, "scene needs a positive length and size");
    if (o.box_size < 1 || o.box_size > std::min(o.width, o.height))
        throw Error(ErrorCode::InvalidConfig, "box size must fit inside the frame");
    if (o.speed < 0) throw Error(ErrorCode::InvalidConfig, "speed must be non-negative");

    const int speed = o.kind == SceneKind::pan ? o.speed : 0;
    const Frame canvas = make_canvas(o.width + speed * (o.length - 1), o.height, o.seed);

    // Start position from the seed so different seeds move the box differently.
    std::mt19937 rng(static_cast<std::uint32_t>(o.seed * 2654435761u + 1));
    const int span_x = o.width - o.box_size;
    const int span_y = o.height - o.box_size;
    const int x0 = static_cast<int>(rng() % static_cast<std::uint32_t>(span_x + 1));
    const int y0 = static_cast<int>(rng() % static_cast<std::uint32_t>(span_y + 1));

    SyntheticScene scene;
    scene.options = o;
    for (int t = 0; t < o.length; ++t) {
        const int offset = speed * t;
        Frame plate(o.width, o.height, 3);
        for (int y = 0; y < o.height; ++y)
            for (int x = 0; x < o.width; ++x)
                for (int c = 0; c < 3; ++c) plate.at(x, y, c) = canvas.at(x + offset, y, c);

        BoxPlacement box;
        box.size = o.box_size;
        if (o.with_object) {
            if (o.kind == SceneKind::static_ghost) {
                box.present = t < o.parked_frames;
                box.x = x0;
                box.y = y0;
            } else {
                box.present = true;
                box.x = bounce(x0 + o.box_dx * t, span_x);
                box.y = bounce(y0 + o.box_dy * t, span_y);
            }
        }

        Frame frame = plate;
        Frame truth(o.width, o.height, 1, MaskFrame::kBackground);
        if (box.present)
            for (int y = box.y; y < box.y + box.size; ++y)
                for (int x = box.x; x < box.x + box.size; ++x) {
                    for (int c = 0; c < 3; ++c) frame.at(x, y, c) = kBoxColor[c];
                    truth.at(x, y) = MaskFrame::kForeground;
                }

        scene.frames.push_back(std::move(frame));
        scene.truth.push_back(std::move(truth));
        scene.plates.push_back(std::move(plate));
        scene.boxes.push_back(box);
        scene.offsets.push_back(offset);
    }
    return scene;
}

void write_scene(const SyntheticScene& scene, const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + directory.string() + ": " + ec.message());
    const SceneOptions& o = scene.options;
    nlohmann::ordered_json meta;
    meta["scene"] = to_string(o.kind);
    meta["length"] = o.length;
    meta["width"] = o.width;
    meta["height"] = o.height;
    meta["seed"] = o.seed;
    meta["speed"] = o.kind == SceneKind::pan ? o.speed : 0;
    meta["first_index"] = o.first_index;
    nlohmann::ordered_json boxes = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < scene.frames.size(); ++t) {
        const int index = o.first_index + static_cast<int>(t);
        write_frame(directory / format_index(kSyntheticFramePattern, index), scene.frames[t]);
        write_frame(directory / format_index(kDefaultGroundTruthPattern, index), scene.truth[t]);
        write_frame(directory / format_index(kSyntheticPlatePattern, index), scene.plates[t]);
        const BoxPlacement& b = scene.boxes[t];
        boxes.push_back(b.present ? nlohmann::ordered_json{b.x, b.y, b.size, b.size} : nlohmann::ordered_json(nullptr));
    }
    meta["boxes"] = std::move(boxes);
    std::ofstream out(directory / "scene.json");
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write scene.json in " + directory.string());
    out << meta.dump(2) << '\n';
}

}  // namespace sdbmc
