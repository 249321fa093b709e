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

#include "sdbmc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace sdbmc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
        throw Error(ErrorCode::InvalidConfig, key + ": '" + v + "' is not an integer");
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, key + ": '" + v + "' is not a number");
    }
}

// Shortest text that parses back to the same double.
std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Binding {
    ConfigKey key;
    std::function<void(PipelineConfig&, const std::string&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

#define SDBMC_INT(name, field, desc)                                                                 \
    Binding {                                                                                        \
        {name, desc}, [](PipelineConfig& c, const std::string& v) { c.field = parse_int(name, v); }, \
            [](const PipelineConfig& c) { return std::to_string(c.field); }                          \
    }
#define SDBMC_DOUBLE(name, field, desc)                                                                 \
    Binding {                                                                                           \
        {name, desc}, [](PipelineConfig& c, const std::string& v) { c.field = parse_double(name, v); }, \
            [](const PipelineConfig& c) { return format_double(c.field); }                              \
    }

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> table = {
        SDBMC_INT("init_window", init_window, "frames used to initialize the background"),
        SDBMC_INT("section_length", section_length, "frames between scheduled background refreshes (0 disables)"),
        SDBMC_DOUBLE("deterioration_fg_ratio", deterioration_fg_ratio,
                     "trailing mean foreground ratio that forces an early refresh (1 disables)"),
        SDBMC_INT("deterioration_window", deterioration_window, "frames averaged by the deterioration check"),
        SDBMC_INT("width", width, "working width in pixels"),
        SDBMC_INT("height", height, "working height in pixels"),
        Binding{{"segmenter", "segmenter variant: differencing | network"},
                [](PipelineConfig& c, const std::string& v) {
                    if (v == "differencing") c.segmenter = SegmenterChoice::differencing;
                    else if (v == "network") c.segmenter = SegmenterChoice::network;
                    else throw Error(ErrorCode::InvalidConfig, "segmenter: '" + v + "' (differencing | network)");
                },
                [](const PipelineConfig& c) {
                    return std::string(c.segmenter == SegmenterChoice::network ? "network" : "differencing");
                }},
        SDBMC_INT("diff_threshold", diff_threshold, "differencing threshold in gray levels (max over channels)"),
        SDBMC_INT("min_blob", min_blob, "smallest kept foreground component in pixels (8-connected)"),
        SDBMC_INT("recent_window", recent_window, "frames in the recent-background median"),
        SDBMC_INT("mask_dilation", mask_dilation, "mask dilation radius before completion, pixels"),
        SDBMC_DOUBLE("binarize_threshold", binarize_threshold, "probability above which a pixel is foreground"),
        Binding{{"fpm_source", "foreground probability planes: constant | previous-mask"},
                [](PipelineConfig& c, const std::string& v) { c.fpm_source = parse_fpm_source(v); },
                [](const PipelineConfig& c) { return std::string(to_string(c.fpm_source)); }},
        Binding{{"weights", "segmenter weights file (network segmenter only)"},
                [](PipelineConfig& c, const std::string& v) { c.weights = v; },
                [](const PipelineConfig& c) { return c.weights.string(); }},
        SDBMC_INT("flow_levels", completion.flow.levels, "optical flow pyramid levels"),
        SDBMC_INT("flow_iterations", completion.flow.iterations, "warping passes per pyramid level"),
        SDBMC_DOUBLE("flow_regularization", completion.flow.regularization,
                     "flow smoothness weight on the 0-255 intensity scale"),
        SDBMC_INT("flow_inner_sweeps", completion.flow.inner_sweeps, "SOR sweeps per warping pass"),
        SDBMC_DOUBLE("flow_sor_omega", completion.flow.sor_omega, "SOR relaxation factor"),
        SDBMC_DOUBLE("flow_presmooth_sigma", completion.flow.presmooth_sigma, "Gaussian presmoothing sigma, pixels"),
        SDBMC_INT("flow_stride", completion.stride, "non-adjacent flow stride in frames"),
        SDBMC_DOUBLE("edge_threshold", completion.edge_threshold, "flow edge threshold, pixels per pixel"),
        SDBMC_DOUBLE("flow_tol", completion.flow_tol, "flow completion tolerance, pixels"),
        SDBMC_INT("flow_max_iters", completion.flow_max_iters, "flow completion sweep cap"),
        SDBMC_INT("max_hops", completion.max_hops, "candidate chain hop cap (0 = window length)"),
        SDBMC_DOUBLE("poisson_tol", completion.poisson_tol, "Poisson residual tolerance, normalized units"),
        SDBMC_INT("poisson_max_iters", completion.poisson_max_iters, "Poisson solver iteration cap"),
        SDBMC_INT("threads", threads, "worker threads (0 = all cores)"),
    };
    return table;
}

#undef SDBMC_INT
#undef SDBMC_DOUBLE

const Binding& find_binding(const std::string& key) {
    for (const Binding& b : bindings())
        if (b.key.name == key) return b;
    throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> out;
        for (const Binding& b : bindings()) out.push_back(b.key);
        return out;
    }();
    return keys;
}

void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value) {
    find_binding(key).set(config, trim(value));
}

std::string get_config_value(const PipelineConfig& config, const std::string& key) {
    return find_binding(key).get(config);
}

std::map<std::string, std::string> config_snapshot(const PipelineConfig& config) {
    std::map<std::string, std::string> out;
    for (const Binding& b : bindings()) out[b.key.name] = b.get(config);
    return out;
}

PipelineConfig parse_config(const std::string& text, PipelineConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::InvalidConfig, "line " + std::to_string(lineno) + ": expected key = value");
        set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    base.validate();
    return base;
}

PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::UnreadableFile, "cannot read config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), std::move(base));
}

std::string format_config(const PipelineConfig& config) {
    std::string out;
    for (const Binding& b : bindings()) out += "# " + b.key.description + "\n" + b.key.name + " = " + b.get(config) + "\n";
    return out;
}

}  // namespace sdbmc
