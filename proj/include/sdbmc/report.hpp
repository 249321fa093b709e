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

#include "sdbmc/evaluation.hpp"

namespace sdbmc {

enum class ReportFormat : std::uint8_t { csv, json };

ReportFormat parse_report_format(const std::string& text);

/// Half-up rounding to `decimals` places (0.81466 -> 0.8147).
double round_half_up(double value, int decimals = 4);
/// Four decimals; absent values format as an empty string.
std::string format_metric(const std::optional<double>& value);

struct EvaluationReport {
    std::vector<VideoResult> videos;
    Aggregate aggregate;
};

EvaluationReport make_report(std::vector<VideoResult> videos, const std::vector<std::string>& required_categories = {});

/// One row per video, one per category, then the two overall rows. Columns:
/// scope,category,video,frames,tp,fp,fn,tn,recall,specificity,fpr,fnr,pwc,f_measure,precision.
std::string report_csv(const EvaluationReport& report);
/// Same content; absent values are null.
std::string report_json(const EvaluationReport& report);
void write_report(const std::filesystem::path& path, const EvaluationReport& report, ReportFormat format);

/// Splits CSV text into rows of fields (no quoting; fields never contain commas).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

/// One-line human summary of a metric set.
std::string summary_line(const std::string& label, const MetricSet& m);

}  // namespace sdbmc
