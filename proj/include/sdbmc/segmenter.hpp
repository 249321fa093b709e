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

#include <memory>
#include <optional>
#include <string>

#include "sdbmc/image.hpp"
#include "sdbmc/network.hpp"

namespace sdbmc {

enum class FpmSource : std::uint8_t { constant, previous_mask };

FpmSource parse_fpm_source(const std::string& text);
const char* to_string(FpmSource source) noexcept;

/// Normalized network inputs; concatenated in declaration order (12 channels).
struct SegmenterInput {
    FloatImage empty_background;  // 3 ch
    FloatImage empty_fpm;         // 1 ch
    FloatImage recent_background; // 3 ch
    FloatImage recent_fpm;        // 1 ch
    FloatImage current;           // 3 ch
    FloatImage current_fpm;       // 1 ch

    Tensor3 to_tensor() const;
};

/// FPM plane: constant 0.5, or the previous mask (foreground = 1) averaged
/// over a 7x7 box clipped to the image. No previous mask gives 0.5.
FloatImage fpm_plane(FpmSource source, const MaskFrame* previous, int width, int height);

/// All frames 3-channel and of one size; the same FPM plane feeds all three slots.
SegmenterInput assemble_input(const Frame& empty_background, const Frame& recent_background, const Frame& current,
                              FpmSource source, const MaskFrame* previous_mask = nullptr);

/// Foreground iff probability > threshold.
MaskFrame binarize(const FloatImage& probability, double threshold = 0.5);

/// Foreground iff the largest per-channel absolute difference exceeds threshold.
MaskFrame difference_mask(const Frame& current, const Frame& background, int threshold);
/// Drops 8-connected foreground components with fewer than min_blob pixels.
MaskFrame remove_small_components(const MaskFrame& mask, int min_blob);
/// difference_mask followed by remove_small_components.
MaskFrame differencing_segment(const Frame& current, const Frame& background, int threshold, int min_blob);

struct SegmenterContext {
    const Frame& empty_background;
    const Frame& recent_background;
    const Frame& current;
    const MaskFrame* previous_mask = nullptr;
};

struct Segmentation {
    MaskFrame mask;
    std::optional<FloatImage> probability;
};

class Segmenter {
public:
    virtual ~Segmenter() = default;
    virtual Segmentation segment(const SegmenterContext& ctx) const = 0;
    virtual std::string name() const = 0;
};

/// Classical fallback: a pixel is foreground when it differs from both the
/// empty and the recent background, then small blobs are removed.
class DifferencingSegmenter final : public Segmenter {
public:
    DifferencingSegmenter(int threshold, int min_blob) : threshold_(threshold), min_blob_(min_blob) {}
    Segmentation segment(const SegmenterContext& ctx) const override;
    std::string name() const override { return "differencing"; }

private:
    int threshold_;
    int min_blob_;
};

class NetworkSegmenter final : public Segmenter {
public:
    NetworkSegmenter(std::shared_ptr<const Network> network, FpmSource fpm, double threshold, int threads)
        : network_(std::move(network)), fpm_(fpm), threshold_(threshold), threads_(threads) {}
    Segmentation segment(const SegmenterContext& ctx) const override;
    std::string name() const override { return "network"; }

private:
    std::shared_ptr<const Network> network_;
    FpmSource fpm_;
    double threshold_;
    int threads_;
};

}  // namespace sdbmc
