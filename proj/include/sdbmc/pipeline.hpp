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

#include <deque>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdbmc/background_completion.hpp"
#include "sdbmc/image.hpp"
#include "sdbmc/segmenter.hpp"

namespace sdbmc {

enum class SegmenterChoice : std::uint8_t { differencing, network };

struct PipelineConfig {
    int init_window = 100;
    /// Frames between scheduled refreshes; 0 disables scheduled refreshes.
    int section_length = 100;
    /// Mean fg_ratio over the trailing deterioration_window frames that
    /// forces an early refresh. 1.0 never fires.
    double deterioration_fg_ratio = 0.5;
    int deterioration_window = 10;
    int width = kCanonicalWidth;
    int height = kCanonicalHeight;

    SegmenterChoice segmenter = SegmenterChoice::differencing;
    int diff_threshold = 30;
    int min_blob = 50;
    int recent_window = 30;
    int mask_dilation = 2;
    double binarize_threshold = 0.5;
    FpmSource fpm_source = FpmSource::constant;
    std::filesystem::path weights;

    CompletionConfig completion;
    /// Worker threads; 0 means all cores.
    int threads = 0;

    void validate() const;
    int effective_threads() const;
    /// Frames completed on a refresh.
    int refresh_window() const noexcept { return section_length > 0 ? section_length : init_window; }
};

struct BackgroundModel {
    Frame empty_background;
    /// Median over the init window (the bootstrap background).
    Frame bootstrap;
    /// Trailing frames for the recent background.
    std::optional<SlidingMedian> recent;
    int last_refresh = -1;
    std::vector<std::string> warnings;

    bool initialized() const noexcept { return !empty_background.empty(); }
    /// Median of the trailing frames, or the empty background without history.
    Frame recent_background() const;
};

struct DetectionRecord {
    int frame_index = 0;
    MaskFrame mask;
    std::optional<FloatImage> probability;
    double fg_ratio = 0.0;
    bool bg_refreshed = false;
    bool warm_up = false;
};

struct InitResult {
    BackgroundModel model;
    /// Segmenter masks for the init window, before dilation.
    std::vector<MaskFrame> masks;
    std::vector<DetectionRecord> records;
    CompletedFrame completed;
};

/// Builds the configured segmenter (loads weights for the network variant).
std::unique_ptr<Segmenter> make_segmenter(const PipelineConfig& config);

/// Frames are resized to the configured size when they differ.
Frame to_working_size(const Frame& frame, const PipelineConfig& config);

/// Median bootstrap, per-frame segmentation, mask dilation and completion of
/// the last window frame. `frames` must hold at least init_window frames;
/// the first init_window are used.
InitResult initialize(std::span<const Frame> frames, const PipelineConfig& config, const Segmenter& segmenter);

/// Segments one frame against the model and pushes it into the recent ring.
DetectionRecord detect_frame(BackgroundModel& model, const Frame& frame, int frame_index, const PipelineConfig& config,
                             const Segmenter& segmenter, const MaskFrame* previous_mask = nullptr);

struct HistoryEntry {
    Frame frame;
    MaskFrame mask;
    double fg_ratio = 0.0;
};

enum class RefreshOutcome : std::uint8_t { none, refreshed, failed };

/// Refresh when the section is complete or the trailing foreground ratio
/// signals a stale background. `history` ends at frame_index. A failed
/// completion keeps the previous background and still restarts the section.
RefreshOutcome maybe_refresh(BackgroundModel& model, const std::deque<HistoryEntry>& history, int frame_index,
                             const PipelineConfig& config, std::string* reason = nullptr);

struct RefreshEvent {
    int frame_index = 0;
    std::string reason;
    bool succeeded = true;
};

struct RunResult {
    std::vector<DetectionRecord> records;
    std::vector<RefreshEvent> refreshes;
    std::vector<std::string> warnings;
    Frame initial_background;
    Frame final_background;
};

/// Initialization followed by per-frame detection and refresh.
RunResult run_video(const FrameSequence& seq, const PipelineConfig& config);
RunResult run_video(const FrameSequence& seq, const PipelineConfig& config, const Segmenter& segmenter);

/// Manifest JSON: config snapshot, per-frame log, refreshes, warnings.
std::string manifest_json(const RunResult& result, const PipelineConfig& config, const FrameSequence* seq = nullptr);

}  // namespace sdbmc
