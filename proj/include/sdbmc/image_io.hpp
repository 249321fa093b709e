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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sdbmc/image.hpp"

namespace sdbmc {

/// CDNet naming convention for input frames and ground truth.
inline constexpr const char* kDefaultFramePattern = "in%06d.jpg";
inline constexpr const char* kDefaultGroundTruthPattern = "gt%06d.png";
inline constexpr const char* kDefaultMaskPattern = "bin%06d.png";

struct IndexRange {
    int first = 0;
    int last = 0;  // inclusive
    int count() const noexcept { return last - first + 1; }
};

/// Expands a printf-style template holding exactly one integer conversion.
std::string format_index(const std::string& pattern, int index);

/// Numeric indices of files in `directory` matching `pattern`, sorted.
std::vector<int> matching_indices(const std::filesystem::path& directory, const std::string& pattern);

/// Loads numbered frames. Without a range every matching file is loaded and
/// the indices must be contiguous. Gray images load as 1 channel, color as RGB.
FrameSequence load_sequence(const std::filesystem::path& directory, const std::string& pattern = kDefaultFramePattern,
                            std::optional<IndexRange> range = std::nullopt);

Frame read_frame(const std::filesystem::path& path);
void write_frame(const std::filesystem::path& path, const Frame& frame);

/// Single-channel {0,255} PNG. Other values raise InvalidLabel.
MaskFrame read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const MaskFrame& mask);
std::vector<MaskFrame> load_masks(const std::filesystem::path& directory, const std::string& pattern, IndexRange range);

/// Raw single-channel 8-bit labels (ground truth with extended label sets).
Frame read_labels(const std::filesystem::path& path);

/// 16-bit PNG, value = round(p * 65535) for p in [0, 1].
void write_probability_png(const std::filesystem::path& path, const FloatImage& probability);
FloatImage read_probability_png(const std::filesystem::path& path);

}  // namespace sdbmc
