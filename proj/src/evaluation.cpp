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

#include "sdbmc/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace sdbmc {

namespace fs = std::filesystem;

std::set<std::uint8_t> parse_label_set(const std::string& text) {
    std::set<std::uint8_t> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        token.erase(std::remove_if(token.begin(), token.end(), [](char c) { return c == ' ' || c == '\t'; }), token.end());
        if (token.empty()) continue;
        int v = -1;
        try {
            std::size_t used = 0;
            v = std::stoi(token, &used);
            if (used != token.size()) v = -1;
        } catch (const std::exception&) {
            v = -1;
        }
        if (v < 0 || v > 255) throw Error(ErrorCode::InvalidConfig, "label '" + token + "' is not in [0, 255]");
        out.insert(static_cast<std::uint8_t>(v));
    }
    return out;
}

GroundTruthFrame::GroundTruthFrame(Frame labels, const LabelPolicy& policy) : labels_(std::move(labels)) {
    if (labels_.channels() != 1) throw Error(ErrorCode::WrongChannelCount, "ground truth must be single-channel");
    for (std::uint8_t v : labels_.data())
        if (v != policy.background && v != policy.foreground && !policy.ignored.count(v))
            throw Error(ErrorCode::InvalidLabel, "ground-truth label " + std::to_string(v) + " is not recognized");
}

ConfusionCounts accumulate(const MaskFrame& prediction, const GroundTruthFrame& truth, ConfusionCounts counts,
                           const LabelPolicy& policy) {
    if (prediction.width() != truth.width() || prediction.height() != truth.height())
        throw Error(ErrorCode::DimensionMismatch, "prediction " + std::to_string(prediction.width()) + "x" +
                                                      std::to_string(prediction.height()) + " vs ground truth " +
                                                      std::to_string(truth.width()) + "x" +
                                                      std::to_string(truth.height()));
    const auto labels = truth.labels().data();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::uint8_t g = labels[i];
        if (g != policy.foreground && g != policy.background) continue;
        const bool gt_fg = g == policy.foreground;
        const bool pr_fg = prediction.foreground(i);
        if (gt_fg) (pr_fg ? counts.tp : counts.fn) += 1;
        else (pr_fg ? counts.fp : counts.tn) += 1;
    }
    return counts;
}

MetricSet metrics(const ConfusionCounts& c) {
    MetricSet m;
    const auto tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const auto fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
    if (c.tp + c.fn > 0) {
        m.recall = tp / (tp + fn);
        m.fnr = fn / (tp + fn);
    }
    if (c.tn + c.fp > 0) {
        m.specificity = tn / (tn + fp);
        m.fpr = fp / (fp + tn);
    }
    if (c.total() > 0) m.pwc = 100.0 * (fn + fp) / (tp + fn + fp + tn);
    if (c.tp + c.fp > 0) m.precision = tp / (tp + fp);
    if (m.precision && m.recall && *m.precision + *m.recall > 0.0)
        m.f_measure = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    return m;
}

namespace {

template <typename M>
auto& metric_field(M& m, int index) {
    switch (index) {
        case 0: return m.recall;
        case 1: return m.specificity;
        case 2: return m.fpr;
        case 3: return m.fnr;
        case 4: return m.pwc;
        case 5: return m.f_measure;
        case 6: return m.precision;
    }
    throw Error(ErrorCode::Precondition, "metric index out of range");
}

}  // namespace

std::optional<double>& metric_value(MetricSet& m, int index) { return metric_field(m, index); }
std::optional<double> metric_value(const MetricSet& m, int index) { return metric_field(m, index); }

MetricSet mean_metrics(std::span<const MetricSet> sets) {
    MetricSet out;
    for (int k = 0; k < 7; ++k) {
        double sum = 0.0;
        int n = 0;
        for (const MetricSet& s : sets)
            if (const auto v = metric_value(s, k)) {
                sum += *v;
                ++n;
            }
        if (n > 0) metric_value(out, k) = sum / n;
    }
    return out;
}

Aggregate aggregate(std::span<const VideoResult> videos, const std::vector<std::string>& required) {
    if (videos.empty()) throw Error(ErrorCode::EmptyCategory, "no videos to aggregate");
    std::vector<std::string> order;
    std::map<std::string, std::vector<MetricSet>> groups;
    for (const std::string& c : required)
        if (!groups.count(c)) {
            groups[c];
            order.push_back(c);
        }
    std::vector<MetricSet> all;
    for (const VideoResult& v : videos) {
        if (!groups.count(v.category)) order.push_back(v.category);
        groups[v.category].push_back(v.metrics);
        all.push_back(v.metrics);
    }

    Aggregate agg;
    std::vector<MetricSet> category_means;
    for (const std::string& c : order) {
        const auto& sets = groups[c];
        if (sets.empty()) throw Error(ErrorCode::EmptyCategory, "category '" + c + "' has no videos");
        CategoryResult row{c, static_cast<int>(sets.size()), mean_metrics(sets)};
        category_means.push_back(row.metrics);
        agg.categories.push_back(std::move(row));
    }
    agg.by_category = mean_metrics(category_means);
    agg.by_video = mean_metrics(all);
    return agg;
}

std::vector<EvalRange> parse_range_file(const std::string& text) {
    std::vector<EvalRange> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::replace_if(line.begin(), line.end(), [](char c) { return c == '(' || c == ')' || c == ','; }, ' ');
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() < 3 || tok.size() > 4)
            throw Error(ErrorCode::InvalidConfig, "range line " + std::to_string(lineno) + ": expected <video> <first> <last> [category]");
        EvalRange r;
        r.video = tok[0];
        try {
            r.range = {std::stoi(tok[1]), std::stoi(tok[2])};
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidConfig, "range line " + std::to_string(lineno) + ": bad frame index");
        }
        if (r.range.last < r.range.first)
            throw Error(ErrorCode::InvalidConfig, "range line " + std::to_string(lineno) + ": last < first");
        if (tok.size() == 4) r.category = tok[3];
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<EvalRange> load_range_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::UnreadableFile, "cannot read range file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_range_file(text.str());
}

VideoResult evaluate_video(const fs::path& predictions, const fs::path& truth, const EvalOptions& options,
                           const std::string& video, const std::string& category) {
    std::vector<int> indices;
    if (options.range) {
        for (int i = options.range->first; i <= options.range->last; ++i) {
            for (const auto& [dir, pattern] : {std::pair{predictions, options.prediction_pattern},
                                               std::pair{truth, options.truth_pattern}})
                if (!fs::exists(dir / format_index(pattern, i)))
                    throw Error(ErrorCode::MissingFrame, "frame " + std::to_string(i) + " missing from " + dir.string());
            indices.push_back(i);
        }
    } else {
        const std::vector<int> pred = matching_indices(predictions, options.prediction_pattern);
        const std::vector<int> gt = matching_indices(truth, options.truth_pattern);
        std::set_intersection(pred.begin(), pred.end(), gt.begin(), gt.end(), std::back_inserter(indices));
        if (indices.empty())
            throw Error(ErrorCode::UnreadableFile, "no frame index has both a prediction and a ground truth");
    }

    VideoResult result;
    result.video = video.empty() ? predictions.filename().string() : video;
    result.category = category;
    for (int i : indices) {
        if (options.excluded.count(i)) continue;
        const MaskFrame pred = read_mask(predictions / format_index(options.prediction_pattern, i));
        const GroundTruthFrame gt(read_labels(truth / format_index(options.truth_pattern, i)), options.policy);
        result.counts = accumulate(pred, gt, result.counts, options.policy);
        ++result.frames;
    }
    result.metrics = metrics(result.counts);
    return result;
}

std::set<int> warm_up_frames(const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) throw Error(ErrorCode::UnreadableFile, "cannot read manifest " + manifest.string());
    std::set<int> out;
    try {
        const nlohmann::json doc = nlohmann::json::parse(in);
        for (const auto& f : doc.at("frames"))
            if (f.at("warm_up").get<bool>()) out.insert(f.at("index").get<int>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::UnreadableFile, "malformed manifest " + manifest.string() + ": " + e.what());
    }
    return out;
}

}  // namespace sdbmc
