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
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "sdbmc/image.hpp"
#include "sdbmc/image_io.hpp"

namespace sdbmc {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
    bool operator==(const ConfusionCounts&) const = default;
};

/// Ground-truth label meanings. Pixels carrying an ignored label are not counted.
struct LabelPolicy {
    std::uint8_t background = 0;
    std::uint8_t foreground = 255;
    std::set<std::uint8_t> ignored{50, 85, 170};
};

std::set<std::uint8_t> parse_label_set(const std::string& text);

/// Single-channel ground truth; every value must be known to the policy.
class GroundTruthFrame {
public:
    GroundTruthFrame() = default;
    GroundTruthFrame(Frame labels, const LabelPolicy& policy = {});

    int width() const noexcept { return labels_.width(); }
    int height() const noexcept { return labels_.height(); }
    const Frame& labels() const noexcept { return labels_; }

private:
    Frame labels_;
};

ConfusionCounts accumulate(const MaskFrame& prediction, const GroundTruthFrame& truth, ConfusionCounts counts = {},
                           const LabelPolicy& policy = {});

/// Recall, specificity, FPR, FNR, PWC (percent), F-measure, precision.
/// A value is absent when its denominator is zero; F is absent unless both
/// precision and recall exist and their sum is positive.
struct MetricSet {
    std::optional<double> recall;
    std::optional<double> specificity;
    std::optional<double> fpr;
    std::optional<double> fnr;
    std::optional<double> pwc;
    std::optional<double> f_measure;
    std::optional<double> precision;

    bool operator==(const MetricSet&) const = default;
};

MetricSet metrics(const ConfusionCounts& counts);

inline constexpr const char* kMetricNames[7] = {"recall", "specificity", "fpr", "fnr", "pwc", "f_measure", "precision"};
std::optional<double> metric_value(const MetricSet& m, int index);
std::optional<double>& metric_value(MetricSet& m, int index);

/// Per-field mean over the sets where the field exists.
MetricSet mean_metrics(std::span<const MetricSet> sets);

struct VideoResult {
    std::string video;
    std::string category;
    int frames = 0;
    ConfusionCounts counts;
    MetricSet metrics;
};

struct CategoryResult {
    std::string category;
    int videos = 0;
    MetricSet metrics;
};

struct Aggregate {
    std::vector<CategoryResult> categories;
    /// Mean over category rows.
    MetricSet by_category;
    /// Mean over video rows.
    MetricSet by_video;
};

/// Category rows average per-video metrics. `required` lists categories that
/// must have at least one video (EmptyCategory otherwise).
Aggregate aggregate(std::span<const VideoResult> videos, const std::vector<std::string>& required = {});

struct EvalRange {
    std::string video;
    IndexRange range;
    std::string category;
};

/// Lines "<video> <first> <last> [category]"; parentheses and commas are
/// treated as blanks so "cats06 (190, 209)" parses. '#' starts a comment.
std::vector<EvalRange> parse_range_file(const std::string& text);
std::vector<EvalRange> load_range_file(const std::filesystem::path& path);

struct EvalOptions {
    std::string prediction_pattern = kDefaultMaskPattern;
    std::string truth_pattern = kDefaultGroundTruthPattern;
    LabelPolicy policy;
    std::optional<IndexRange> range;
    /// Frame indices left out of the counts (warm-up frames by default).
    std::set<int> excluded;
};

/// Pools counts over the frames present in both directories (or the range,
/// where every frame must exist).
VideoResult evaluate_video(const std::filesystem::path& predictions, const std::filesystem::path& truth,
                           const EvalOptions& options, const std::string& video = {},
                           const std::string& category = {});

/// Warm-up frame indices listed in a run manifest.
std::set<int> warm_up_frames(const std::filesystem::path& manifest);

}  // namespace sdbmc
