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

#include "sdbmc/pipeline.hpp"

#include "json.hpp"
#include "sdbmc/config.hpp"
#include "sdbmc/parallel.hpp"

namespace sdbmc {

void PipelineConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw Error(ErrorCode::InvalidConfig, msg);
    };
    require(init_window >= 2, "init_window must be >= 2");
    require(section_length >= 0, "section_length must be >= 0 (0 disables)");
    require(deterioration_fg_ratio > 0.0 && deterioration_fg_ratio <= 1.0, "deterioration_fg_ratio must be in (0, 1]");
    require(deterioration_window >= 1, "deterioration_window must be >= 1");
    require(width >= 1 && height >= 1, "width and height must be >= 1");
    require(diff_threshold >= 0 && diff_threshold <= 255, "diff_threshold must be in [0, 255]");
    require(min_blob >= 0, "min_blob must be >= 0");
    require(recent_window >= 1, "recent_window must be >= 1");
    require(mask_dilation >= 0, "mask_dilation must be >= 0");
    require(binarize_threshold >= 0.0 && binarize_threshold <= 1.0, "binarize_threshold must be in [0, 1]");
    require(completion.stride >= 2, "flow_stride must be >= 2");
    require(completion.flow.levels >= 1, "flow_levels must be >= 1");
    require(completion.flow.iterations >= 1, "flow_iterations must be >= 1");
    require(completion.flow.inner_sweeps >= 1, "flow_inner_sweeps must be >= 1");
    require(completion.flow.regularization > 0.0, "flow_regularization must be > 0");
    require(completion.flow.sor_omega > 0.0 && completion.flow.sor_omega < 2.0, "flow_sor_omega must be in (0, 2)");
    require(completion.flow.presmooth_sigma >= 0.0, "flow_presmooth_sigma must be >= 0");
    require(completion.flow_tol > 0.0 && completion.poisson_tol > 0.0, "tolerances must be > 0");
    require(completion.flow_max_iters >= 1 && completion.poisson_max_iters >= 1, "iteration caps must be >= 1");
    require(completion.max_hops >= 0, "max_hops must be >= 0");
    require(threads >= 0, "threads must be >= 0");
}

int PipelineConfig::effective_threads() const { return threads > 0 ? threads : default_thread_count(); }

Frame BackgroundModel::recent_background() const {
    if (recent && recent->size() > 0) return recent->median();
    return empty_background;
}

std::unique_ptr<Segmenter> make_segmenter(const PipelineConfig& config) {
    if (config.segmenter == SegmenterChoice::differencing)
        return std::make_unique<DifferencingSegmenter>(config.diff_threshold, config.min_blob);
    if (config.weights.empty()) throw Error(ErrorCode::WeightsMissing, "the network segmenter needs a weights file");
    auto net = std::make_shared<const Network>(NetworkSpec::segmenter(), WeightStore::load(config.weights));
    return std::make_unique<NetworkSegmenter>(std::move(net), config.fpm_source, config.binarize_threshold,
                                              config.effective_threads());
}

Frame to_working_size(const Frame& frame, const PipelineConfig& config) {
    if (frame.width() == config.width && frame.height() == config.height) return frame;
    return resize_bilinear(frame, config.width, config.height);
}

namespace {

CompletionConfig completion_for(const PipelineConfig& config) {
    CompletionConfig c = config.completion;
    c.threads = config.effective_threads();
    return c;
}

double foreground_ratio(const MaskFrame& mask) {
    return static_cast<double>(mask.count_foreground()) / static_cast<double>(mask.pixel_count());
}

DetectionRecord segment_with(const Segmenter& segmenter, const Frame& empty, const Frame& recent, const Frame& frame,
                             const MaskFrame* previous, int index) {
    Segmentation seg = segmenter.segment({empty, recent, frame, previous});
    DetectionRecord rec;
    rec.frame_index = index;
    rec.fg_ratio = foreground_ratio(seg.mask);
    rec.mask = std::move(seg.mask);
    rec.probability = std::move(seg.probability);
    return rec;
}

}  // namespace

InitResult initialize(std::span<const Frame> frames, const PipelineConfig& config, const Segmenter& segmenter) {
    config.validate();
    const int n = config.init_window;
    if (static_cast<int>(frames.size()) < n)
        throw Error(ErrorCode::Precondition, "initialization needs " + std::to_string(n) + " frames, got " +
                                                 std::to_string(frames.size()));
    std::vector<Frame> window;
    window.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (frames[i].channels() != 3) throw Error(ErrorCode::WrongChannelCount, "pipeline frames must be RGB");
        window.push_back(to_working_size(frames[i], config));
    }

    InitResult init;
    BackgroundModel& model = init.model;
    model.bootstrap = temporal_median(std::span<const Frame>(window), n);
    model.recent.emplace(config.recent_window);

    // Warm-up detections: bootstrap median as the empty background.
    init.records.reserve(n);
    const MaskFrame* previous = nullptr;
    for (int t = 0; t < n; ++t) {
        const Frame recent = model.recent->size() > 0 ? model.recent->median() : model.bootstrap;
        DetectionRecord rec = segment_with(segmenter, model.bootstrap, recent, window[t], previous, t);
        rec.warm_up = true;
        init.masks.push_back(rec.mask);
        init.records.push_back(std::move(rec));
        previous = &init.records.back().mask;
        model.recent->push(window[t]);
    }

    std::vector<MaskFrame> dilated;
    dilated.reserve(n);
    for (const MaskFrame& m : init.masks) dilated.push_back(dilate_mask(m, config.mask_dilation));
    init.completed = complete_background(window, dilated, completion_for(config));
    model.empty_background = init.completed.frame;
    model.warnings = init.completed.warnings;
    model.last_refresh = n - 1;
    return init;
}

DetectionRecord detect_frame(BackgroundModel& model, const Frame& frame, int frame_index, const PipelineConfig& config,
                             const Segmenter& segmenter, const MaskFrame* previous_mask) {
    if (!model.initialized() || !model.recent) throw Error(ErrorCode::Precondition, "background model is not initialized");
    const Frame working = to_working_size(frame, config);
    if (!working.same_shape(model.empty_background))
        throw Error(ErrorCode::DimensionMismatch, "frame does not match the background model");
    DetectionRecord rec =
        segment_with(segmenter, model.empty_background, model.recent_background(), working, previous_mask, frame_index);
    model.recent->push(working);
    return rec;
}

RefreshOutcome maybe_refresh(BackgroundModel& model, const std::deque<HistoryEntry>& history, int frame_index,
                             const PipelineConfig& config, std::string* reason) {
    if (!model.initialized()) throw Error(ErrorCode::Precondition, "background model is not initialized");
    const int since = frame_index - model.last_refresh;
    const bool scheduled = config.section_length > 0 && since >= config.section_length;
    bool deteriorated = false;
    const int dw = config.deterioration_window;
    if (!scheduled && since >= dw && static_cast<int>(history.size()) >= dw) {
        double sum = 0.0;
        for (auto it = history.end() - dw; it != history.end(); ++it) sum += it->fg_ratio;
        deteriorated = sum / dw > config.deterioration_fg_ratio;
    }
    if (!scheduled && !deteriorated) return RefreshOutcome::none;
    if (reason) *reason = scheduled ? "section" : "deterioration";

    model.last_refresh = frame_index;
    const int len = std::min<int>(config.refresh_window(), static_cast<int>(history.size()));
    if (len < 2) {
        model.warnings.push_back("refresh at frame " + std::to_string(frame_index) +
                                 " skipped: fewer than 2 frames available");
        return RefreshOutcome::failed;
    }
    std::vector<Frame> frames;
    std::vector<MaskFrame> masks;
    for (auto it = history.end() - len; it != history.end(); ++it) {
        frames.push_back(it->frame);
        masks.push_back(dilate_mask(it->mask, config.mask_dilation));
    }
    try {
        CompletedFrame done = complete_background(frames, masks, completion_for(config));
        model.empty_background = std::move(done.frame);
        for (auto& w : done.warnings) model.warnings.push_back("frame " + std::to_string(frame_index) + ": " + w);
        return RefreshOutcome::refreshed;
    } catch (const Error& e) {
        model.warnings.push_back("refresh at frame " + std::to_string(frame_index) + " failed: " + e.what());
        return RefreshOutcome::failed;
    }
}

RunResult run_video(const FrameSequence& seq, const PipelineConfig& config) {
    return run_video(seq, config, *make_segmenter(config));
}

RunResult run_video(const FrameSequence& seq, const PipelineConfig& config, const Segmenter& segmenter) {
    config.validate();
    seq.validate();
    const int total = static_cast<int>(seq.size());
    if (total <= config.init_window)
        throw Error(ErrorCode::Precondition, "sequence has " + std::to_string(total) + " frames; init_window is " +
                                                 std::to_string(config.init_window));

    std::vector<Frame> frames;
    frames.reserve(total);
    for (const Frame& f : seq.frames) frames.push_back(to_working_size(f, config));

    InitResult init = initialize(frames, config, segmenter);
    BackgroundModel model = std::move(init.model);
    RunResult result;
    result.initial_background = model.empty_background;
    result.records = std::move(init.records);
    for (auto& r : result.records) r.frame_index += seq.first_index;

    const std::size_t keep = static_cast<std::size_t>(std::max(config.refresh_window(), config.deterioration_window));
    std::deque<HistoryEntry> history;
    for (int t = 0; t < config.init_window; ++t) {
        history.push_back({frames[t], result.records[t].mask, result.records[t].fg_ratio});
        if (history.size() > keep) history.pop_front();
    }

    for (int i = config.init_window; i < total; ++i) {
        DetectionRecord rec = detect_frame(model, frames[i], seq.first_index + i, config, segmenter,
                                           &result.records.back().mask);
        history.push_back({frames[i], rec.mask, rec.fg_ratio});
        if (history.size() > keep) history.pop_front();

        std::string reason;
        const RefreshOutcome outcome = maybe_refresh(model, history, i, config, &reason);
        if (outcome != RefreshOutcome::none)
            result.refreshes.push_back({seq.first_index + i, reason, outcome == RefreshOutcome::refreshed});
        rec.bg_refreshed = outcome == RefreshOutcome::refreshed;
        result.records.push_back(std::move(rec));
    }
    result.warnings = model.warnings;
    result.final_background = model.empty_background;
    return result;
}

std::string manifest_json(const RunResult& result, const PipelineConfig& config, const FrameSequence* seq) {
    nlohmann::ordered_json doc;
    doc["format"] = "sdbmc-run-manifest";
    doc["version"] = 1;
    if (seq) {
        doc["source"] = seq->source_id;
        doc["first_index"] = seq->first_index;
    }
    doc["config"] = config_snapshot(config);
    doc["frame_count"] = result.records.size();
    nlohmann::ordered_json frames = nlohmann::ordered_json::array();
    for (const DetectionRecord& r : result.records)
        frames.push_back({{"index", r.frame_index},
                          {"fg_ratio", r.fg_ratio},
                          {"bg_refreshed", r.bg_refreshed},
                          {"warm_up", r.warm_up}});
    doc["frames"] = std::move(frames);
    nlohmann::ordered_json refreshes = nlohmann::ordered_json::array();
    for (const RefreshEvent& e : result.refreshes)
        refreshes.push_back({{"index", e.frame_index}, {"reason", e.reason}, {"succeeded", e.succeeded}});
    doc["refreshes"] = std::move(refreshes);
    doc["warnings"] = result.warnings;
    return doc.dump(2);
}

}  // namespace sdbmc
