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

#include "sdbmc/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sdbmc {

ReportFormat parse_report_format(const std::string& text) {
    if (text == "csv") return ReportFormat::csv;
    if (text == "json") return ReportFormat::json;
    throw Error(ErrorCode::InvalidConfig, "report format '" + text + "' (csv | json)");
}

double round_half_up(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    // The small nudge keeps decimal ties such as 0.81465 (stored just below) rounding up.
    return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

std::string format_metric(const std::optional<double>& value) {
    if (!value) return {};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", round_half_up(*value));
    return buf;
}

EvaluationReport make_report(std::vector<VideoResult> videos, const std::vector<std::string>& required_categories) {
    EvaluationReport r;
    r.aggregate = aggregate(videos, required_categories);
    r.videos = std::move(videos);
    return r;
}

namespace {

void append_metrics(std::ostringstream& os, const MetricSet& m) {
    for (int k = 0; k < 7; ++k) os << ',' << format_metric(metric_value(m, k));
}

nlohmann::ordered_json metrics_json(const MetricSet& m) {
    nlohmann::ordered_json j;
    for (int k = 0; k < 7; ++k) {
        const auto v = metric_value(m, k);
        j[kMetricNames[k]] = v ? nlohmann::ordered_json(round_half_up(*v)) : nlohmann::ordered_json(nullptr);
    }
    return j;
}

}  // namespace

std::string report_csv(const EvaluationReport& report) {
    std::ostringstream os;
    os << "scope,category,video,frames,tp,fp,fn,tn";
    for (const char* n : kMetricNames) os << ',' << n;
    os << '\n';
    for (const VideoResult& v : report.videos) {
        os << "video," << v.category << ',' << v.video << ',' << v.frames << ',' << v.counts.tp << ',' << v.counts.fp
           << ',' << v.counts.fn << ',' << v.counts.tn;
        append_metrics(os, v.metrics);
        os << '\n';
    }
    for (const CategoryResult& c : report.aggregate.categories) {
        os << "category," << c.category << ",," << c.videos << ",,,,";
        append_metrics(os, c.metrics);
        os << '\n';
    }
    os << "average_by_category,,,,,,,";
    append_metrics(os, report.aggregate.by_category);
    os << "\naverage_by_video,,,,,,,";
    append_metrics(os, report.aggregate.by_video);
    os << '\n';
    return os.str();
}

std::string report_json(const EvaluationReport& report) {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json videos = nlohmann::ordered_json::array();
    for (const VideoResult& v : report.videos)
        videos.push_back({{"video", v.video},
                          {"category", v.category},
                          {"frames", v.frames},
                          {"counts", {{"tp", v.counts.tp}, {"fp", v.counts.fp}, {"fn", v.counts.fn}, {"tn", v.counts.tn}}},
                          {"metrics", metrics_json(v.metrics)}});
    doc["videos"] = std::move(videos);
    nlohmann::ordered_json cats = nlohmann::ordered_json::array();
    for (const CategoryResult& c : report.aggregate.categories)
        cats.push_back({{"category", c.category}, {"videos", c.videos}, {"metrics", metrics_json(c.metrics)}});
    doc["categories"] = std::move(cats);
    doc["average_by_category"] = metrics_json(report.aggregate.by_category);
    doc["average_by_video"] = metrics_json(report.aggregate.by_video);
    return doc.dump(2);
}

void write_report(const std::filesystem::path& path, const EvaluationReport& report, ReportFormat format) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write report " + path.string());
    out << (format == ReportFormat::csv ? report_csv(report) : report_json(report) + "\n");
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::string summary_line(const std::string& label, const MetricSet& m) {
    std::ostringstream os;
    os << label;
    for (int k = 0; k < 7; ++k) {
        const std::string v = format_metric(metric_value(m, k));
        os << ' ' << kMetricNames[k] << '=' << (v.empty() ? "-" : v);
    }
    return os.str();
}

}  // namespace sdbmc
