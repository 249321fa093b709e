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

// sdbmc: background modeling, detection and evaluation from the shell.
//
// Exit codes: 0 ok, 2 I/O, 3 numeric failure, 4 precondition or bad
// arguments, 5 data mismatch. Human-readable output goes to stderr.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdbmc/background_completion.hpp"
#include "sdbmc/config.hpp"
#include "sdbmc/error.hpp"
#include "sdbmc/evaluation.hpp"
#include "sdbmc/image_io.hpp"
#include "sdbmc/optical_flow.hpp"
#include "sdbmc/pipeline.hpp"
#include "sdbmc/report.hpp"
#include "sdbmc/synthetic.hpp"

namespace fs = std::filesystem;
using namespace sdbmc;

namespace {

enum Exit : int { kOk = 0, kIo = 2, kNumeric = 3, kPrecondition = 4, kMismatch = 5 };

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingFrame:
        case ErrorCode::UnreadableFile:
        case ErrorCode::IoFailure: return kIo;
        case ErrorCode::AllPixelsMissing: return kNumeric;
        case ErrorCode::WindowTooLarge:
        case ErrorCode::TooSmallForPyramid:
        case ErrorCode::OddDimensions:
        case ErrorCode::EmptyCategory:
        case ErrorCode::Precondition:
        case ErrorCode::InvalidConfig: return kPrecondition;
        case ErrorCode::DimensionMismatch:
        case ErrorCode::InvalidLabel:
        case ErrorCode::WrongChannelCount:
        case ErrorCode::ShapeMismatch:
        case ErrorCode::WeightsMissing: return kMismatch;
    }
    return kPrecondition;
}

// Config keys exposed as --flag-name options; values land here as text and are
// applied on top of the config file.
struct ConfigFlags {
    fs::path file;
    std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App& cmd, ConfigFlags& flags) {
    cmd.add_option("--config", flags.file, "Config file (key = value lines)")->check(CLI::ExistingFile);
    const PipelineConfig defaults;
    for (const ConfigKey& key : config_keys()) {
        std::string name = key.name;
        std::replace(name.begin(), name.end(), '_', '-');
        cmd.add_option("--" + name, flags.values[key.name], key.description)
            ->default_str(get_config_value(defaults, key.name))
            ->type_name("VALUE");
    }
}

PipelineConfig resolve_config(const CLI::App& cmd, const ConfigFlags& flags) {
    PipelineConfig config = flags.file.empty() ? PipelineConfig{} : load_config(flags.file);
    for (const auto& [key, value] : flags.values) {
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        if (cmd.count("--" + name) > 0) set_config_value(config, key, value);
    }
    config.validate();
    config.completion.threads = config.effective_threads();
    return config;
}

std::string resolve_pattern(const fs::path& dir, const std::string& pattern) {
    if (!pattern.empty()) return pattern;
    if (!fs::is_directory(dir)) throw Error(ErrorCode::UnreadableFile, "no such directory " + dir.string());
    for (const char* candidate : {kDefaultFramePattern, kSyntheticFramePattern, "in%06d.jpeg", "in%06d.bmp"})
        if (!matching_indices(dir, candidate).empty()) return candidate;
    throw Error(ErrorCode::MissingFrame, "no in%06d.{jpg,png,jpeg,bmp} frames in " + dir.string());
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

fs::path sibling_with_suffix(const fs::path& path, const std::string& suffix) {
    return path.parent_path() / (path.stem().string() + suffix + path.extension().string());
}

// --- verbs ------------------------------------------------------------------

struct InitBgArgs {
    fs::path input;
    std::string pattern;
    int frames = 100;
    int first = -1;
    fs::path out = "background.png";
    fs::path provenance;
    ConfigFlags config;
};

int cmd_init_bg(const CLI::App& cmd, const InitBgArgs& a) {
    PipelineConfig config = resolve_config(cmd, a.config);
    if (cmd.count("--frames") > 0 || cmd.count("--init-window") == 0) config.init_window = a.frames;
    config.validate();
    const std::string pattern = resolve_pattern(a.input, a.pattern);
    const std::vector<int> indices = matching_indices(a.input, pattern);
    const int first = a.first >= 0 ? a.first : indices.front();
    const FrameSequence seq = load_sequence(a.input, pattern, IndexRange{first, first + config.init_window - 1});

    std::vector<Frame> frames;
    for (const Frame& f : seq.frames) frames.push_back(to_working_size(f, config));
    const InitResult init = initialize(frames, config, *make_segmenter(config));

    if (a.out.has_parent_path()) ensure_directory(a.out.parent_path());
    write_frame(a.out, init.model.empty_background);
    const fs::path prov = a.provenance.empty() ? sibling_with_suffix(a.out, "_provenance") : a.provenance;
    write_frame(prov, provenance_image(init.completed));
    for (const std::string& w : init.completed.warnings) std::cerr << "warning: " << w << '\n';
    std::cerr << "background from frames " << first << ".." << first + config.init_window - 1 << ": "
              << init.completed.stats.missing << " masked pixels, " << init.completed.stats.flow_filled
              << " filled from flow, " << init.completed.stats.diffusion_filled << " diffused -> " << a.out.string()
              << '\n';
    return kOk;
}

struct RunArgs {
    fs::path input;
    std::string pattern;
    fs::path out = "out";
    bool probabilities = false;
    ConfigFlags config;
};

int cmd_run(const CLI::App& cmd, const RunArgs& a) {
    const PipelineConfig config = resolve_config(cmd, a.config);
    const std::string pattern = resolve_pattern(a.input, a.pattern);
    const FrameSequence seq = load_sequence(a.input, pattern);
    if (static_cast<int>(seq.size()) <= config.init_window)
        throw Error(ErrorCode::Precondition, "sequence has " + std::to_string(seq.size()) +
                                                 " frames; init_window is " + std::to_string(config.init_window));
    std::cerr << "running " << seq.size() << " frames from " << a.input.string() << '\n';
    const RunResult result = run_video(seq, config);

    ensure_directory(a.out);
    const int native_w = seq.frames.front().width();
    const int native_h = seq.frames.front().height();
    for (const DetectionRecord& r : result.records) {
        write_mask(a.out / format_index(kDefaultMaskPattern, r.frame_index),
                   resize_mask_nearest(r.mask, native_w, native_h));
        if (a.probabilities && r.probability)
            write_probability_png(a.out / format_index("prob%06d.png", r.frame_index), *r.probability);
    }
    write_frame(a.out / "background_initial.png", result.initial_background);
    write_frame(a.out / "background_final.png", result.final_background);
    write_text(a.out / "manifest.json", manifest_json(result, config, &seq) + "\n");

    for (const RefreshEvent& e : result.refreshes)
        std::cerr << "refresh at frame " << e.frame_index << " (" << e.reason << ")"
                  << (e.succeeded ? "" : " failed") << '\n';
    for (const std::string& w : result.warnings) std::cerr << "warning: " << w << '\n';
    std::cerr << result.records.size() << " masks written to " << a.out.string() << '\n';
    return kOk;
}

struct EvalArgs {
    fs::path predictions;
    fs::path truth;
    fs::path range_file;
    fs::path out;
    std::string format;
    std::string prediction_pattern = kDefaultMaskPattern;
    std::string truth_pattern = kDefaultGroundTruthPattern;
    std::string video;
    std::string category;
    std::string ignored = "50,85,170";
    fs::path manifest;
    bool include_warm_up = false;
};

fs::path video_dir(const fs::path& root, const std::string& video) {
    return !video.empty() && fs::is_directory(root / video) ? root / video : root;
}

std::set<int> excluded_frames(const EvalArgs& a, const fs::path& predictions) {
    if (a.include_warm_up) return {};
    const fs::path manifest = a.manifest.empty() ? predictions / "manifest.json" : a.manifest;
    if (!fs::exists(manifest)) {
        if (!a.manifest.empty()) throw Error(ErrorCode::UnreadableFile, "no manifest " + manifest.string());
        return {};
    }
    return warm_up_frames(manifest);
}

int cmd_eval(const EvalArgs& a) {
    EvalOptions base;
    base.prediction_pattern = a.prediction_pattern;
    base.truth_pattern = a.truth_pattern;
    base.policy.ignored = parse_label_set(a.ignored);

    std::vector<VideoResult> videos;
    auto run_one = [&](const std::string& video, const std::string& category, std::optional<IndexRange> range) {
        EvalOptions options = base;
        options.range = range;
        const fs::path pred = video_dir(a.predictions, video);
        options.excluded = excluded_frames(a, pred);
        VideoResult r = evaluate_video(pred, video_dir(a.truth, video), options, video, category);
        std::cerr << summary_line(r.video + " (" + std::to_string(r.frames) + " frames)", r.metrics) << '\n';
        videos.push_back(std::move(r));
    };
    if (a.range_file.empty()) {
        run_one(a.video, a.category, std::nullopt);
    } else {
        for (const EvalRange& r : load_range_file(a.range_file))
            run_one(r.video, r.category.empty() ? a.category : r.category, r.range);
        if (videos.empty()) throw Error(ErrorCode::InvalidConfig, "range file lists no videos");
    }

    const EvaluationReport report = make_report(std::move(videos));
    if (!a.out.empty()) {
        const ReportFormat format =
            parse_report_format(!a.format.empty() ? a.format : a.out.extension() == ".json" ? "json" : "csv");
        if (a.out.has_parent_path()) ensure_directory(a.out.parent_path());
        write_report(a.out, report, format);
    }
    std::cout << summary_line("average", report.aggregate.by_video) << '\n';
    return kOk;
}

struct FlowArgs {
    fs::path input;
    std::string pattern;
    std::vector<int> pair;
    fs::path out = "flow.flo";
    fs::path warped;
    ConfigFlags config;
};

int cmd_flow(const CLI::App& cmd, const FlowArgs& a) {
    const PipelineConfig config = resolve_config(cmd, a.config);
    const std::string pattern = resolve_pattern(a.input, a.pattern);
    const std::vector<int> indices = matching_indices(a.input, pattern);
    for (int i : a.pair)
        if (!std::binary_search(indices.begin(), indices.end(), i))
            throw Error(ErrorCode::Precondition, "frame index " + std::to_string(i) + " is not in " + a.input.string());
    if (a.pair[0] == a.pair[1]) throw Error(ErrorCode::Precondition, "flow pair needs two distinct frames");
    const Frame source = to_working_size(read_frame(a.input / format_index(pattern, a.pair[0])), config);
    const Frame target = to_working_size(read_frame(a.input / format_index(pattern, a.pair[1])), config);
    const FlowField flow = estimate_flow(to_gray(source), to_gray(target), config.completion.flow);
    if (a.out.has_parent_path()) ensure_directory(a.out.parent_path());
    write_flo(a.out, flow);
    if (!a.warped.empty()) write_frame(a.warped, warp_frame(target, flow).first);
    std::cerr << "flow " << a.pair[0] << " -> " << a.pair[1] << " written to " << a.out.string() << '\n';
    return kOk;
}

struct CompleteArgs {
    fs::path input;
    fs::path masks;
    std::string pattern;
    std::string mask_pattern = kDefaultMaskPattern;
    std::vector<int> range;
    fs::path out = "completed.png";
    fs::path provenance;
    ConfigFlags config;
};

int cmd_complete(const CLI::App& cmd, const CompleteArgs& a) {
    const PipelineConfig config = resolve_config(cmd, a.config);
    const std::string pattern = resolve_pattern(a.input, a.pattern);
    if (a.range[1] <= a.range[0]) throw Error(ErrorCode::Precondition, "window needs at least two frames");
    const IndexRange range{a.range[0], a.range[1]};
    const FrameSequence seq = load_sequence(a.input, pattern, range);
    std::vector<MaskFrame> masks = load_masks(a.masks, a.mask_pattern, range);
    std::vector<Frame> frames;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        frames.push_back(to_working_size(seq.frames[i], config));
        masks[i] = dilate_mask(resize_mask_nearest(masks[i], config.width, config.height), config.mask_dilation);
    }
    const CompletedFrame completed = complete_background(frames, masks, config.completion);
    if (a.out.has_parent_path()) ensure_directory(a.out.parent_path());
    write_frame(a.out, completed.frame);
    write_frame(a.provenance.empty() ? sibling_with_suffix(a.out, "_provenance") : a.provenance,
                provenance_image(completed));
    for (const std::string& w : completed.warnings) std::cerr << "warning: " << w << '\n';
    std::cerr << "completed frame " << range.last << " -> " << a.out.string() << '\n';
    return kOk;
}

struct SynthArgs {
    std::string scene = "pan";
    SceneOptions options;
    bool no_object = false;
    fs::path out = "synthetic";
};

int cmd_synth(const SynthArgs& a) {
    SceneOptions o = a.options;
    o.kind = parse_scene_kind(a.scene);
    o.with_object = !a.no_object;
    write_scene(generate_scene(o), a.out);
    std::cerr << o.length << " " << a.scene << " frames written to " << a.out.string() << '\n';
    return kOk;
}

struct ReportArgs {
    std::vector<fs::path> inputs;
    fs::path out;
    std::string format;
    std::vector<std::string> categories;
};

// Rebuilds video rows from one or more report CSVs; metrics are recomputed
// from the pooled counts.
int cmd_report(const ReportArgs& a) {
    std::vector<VideoResult> videos;
    for (const fs::path& path : a.inputs) {
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::UnreadableFile, "cannot read " + path.string());
        std::ostringstream text;
        text << in.rdbuf();
        for (const auto& row : parse_csv(text.str())) {
            if (row.empty() || row[0] != "video") continue;
            if (row.size() < 8) throw Error(ErrorCode::UnreadableFile, "short video row in " + path.string());
            VideoResult v;
            v.category = row[1];
            v.video = row[2];
            try {
                v.frames = std::stoi(row[3]);
                v.counts = {std::stoull(row[4]), std::stoull(row[5]), std::stoull(row[6]), std::stoull(row[7])};
            } catch (const std::exception&) {
                throw Error(ErrorCode::UnreadableFile, "bad counts for " + v.video + " in " + path.string());
            }
            v.metrics = metrics(v.counts);
            videos.push_back(std::move(v));
        }
    }
    if (videos.empty()) throw Error(ErrorCode::EmptyCategory, "no video rows in the inputs");
    const EvaluationReport report = make_report(std::move(videos), a.categories);
    if (a.out.empty()) {
        std::cout << (a.format == "json" ? report_json(report) + "\n" : report_csv(report));
    } else {
        const ReportFormat format =
            parse_report_format(!a.format.empty() ? a.format : a.out.extension() == ".json" ? "json" : "csv");
        write_report(a.out, report, format);
    }
    for (const CategoryResult& c : report.aggregate.categories) std::cerr << summary_line(c.category, c.metrics) << '\n';
    std::cerr << summary_line("average", report.aggregate.by_category) << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sdbmc: flow-completed background modeling and foreground detection"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    InitBgArgs init_args;
    CLI::App* init_bg = app.add_subcommand("init-bg", "Build the empty background from the first frames");
    init_bg->add_option("input", init_args.input, "Frame directory")->required();
    init_bg->add_option("--frames", init_args.frames, "Frames in the initialization window");
    init_bg->add_option("--first", init_args.first, "First frame index (default: lowest on disk)");
    init_bg->add_option("--out", init_args.out, "Background PNG");
    init_bg->add_option("--provenance", init_args.provenance, "Provenance PNG (default: <out>_provenance.png)");
    init_bg->add_option("--pattern", init_args.pattern, "Frame file pattern (default: auto)");
    add_config_flags(*init_bg, init_args.config);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Detect foreground in every frame of a sequence");
    run->add_option("input", run_args.input, "Frame directory")->required();
    run->add_option("--out", run_args.out, "Output directory for masks and manifest.json");
    run->add_option("--pattern", run_args.pattern, "Frame file pattern (default: auto)");
    run->add_flag("--probabilities", run_args.probabilities, "Also write prob%06d.png (network segmenter)");
    add_config_flags(*run, run_args.config);

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Score predicted masks against ground truth");
    eval->add_option("predictions", eval_args.predictions, "Prediction directory (or root of per-video dirs)")
        ->required();
    eval->add_option("truth", eval_args.truth, "Ground-truth directory (or root of per-video dirs)")->required();
    eval->add_option("--range", eval_args.range_file, "Range file: <video> <first> <last> [category]")
        ->check(CLI::ExistingFile);
    eval->add_option("--out", eval_args.out, "Report file (.csv or .json)");
    eval->add_option("--format", eval_args.format, "csv | json (default: from --out extension)");
    eval->add_option("--prediction-pattern", eval_args.prediction_pattern, "Prediction file pattern");
    eval->add_option("--truth-pattern", eval_args.truth_pattern, "Ground-truth file pattern");
    eval->add_option("--video", eval_args.video, "Video name without a range file");
    eval->add_option("--category", eval_args.category, "Category for videos without one");
    eval->add_option("--ignore-labels", eval_args.ignored, "Ground-truth labels left out of the counts");
    eval->add_option("--manifest", eval_args.manifest, "Run manifest (default: <predictions>/manifest.json)");
    eval->add_flag("--include-warm-up", eval_args.include_warm_up, "Count warm-up frames too");

    FlowArgs flow_args;
    CLI::App* flow = app.add_subcommand("flow", "Estimate optical flow between two frames");
    flow->add_option("input", flow_args.input, "Frame directory")->required();
    flow->add_option("--pair", flow_args.pair, "Source and target frame indices")->expected(2)->required();
    flow->add_option("--out", flow_args.out, ".flo output");
    flow->add_option("--warped", flow_args.warped, "Also write the target warped onto the source");
    flow->add_option("--pattern", flow_args.pattern, "Frame file pattern (default: auto)");
    add_config_flags(*flow, flow_args.config);

    CompleteArgs complete_args;
    CLI::App* complete = app.add_subcommand("complete", "Complete the last frame of a window given masks");
    complete->add_option("input", complete_args.input, "Frame directory")->required();
    complete->add_option("--masks", complete_args.masks, "Mask directory")->required();
    complete->add_option("--range", complete_args.range, "First and last frame index")->expected(2)->required();
    complete->add_option("--out", complete_args.out, "Completed PNG");
    complete->add_option("--provenance", complete_args.provenance, "Provenance PNG (default: <out>_provenance.png)");
    complete->add_option("--pattern", complete_args.pattern, "Frame file pattern (default: auto)");
    complete->add_option("--mask-pattern", complete_args.mask_pattern, "Mask file pattern");
    add_config_flags(*complete, complete_args.config);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Write a synthetic sequence with ground truth and clean plates");
    synth->add_option("--scene", synth_args.scene, "static | pan | static-ghost");
    synth->add_option("--length", synth_args.options.length, "Frames");
    synth->add_option("--seed", synth_args.options.seed, "Random seed");
    synth->add_option("--speed", synth_args.options.speed, "Pan speed in px/frame");
    synth->add_option("--width", synth_args.options.width, "Frame width");
    synth->add_option("--height", synth_args.options.height, "Frame height");
    synth->add_option("--box-size", synth_args.options.box_size, "Object side length");
    synth->add_option("--parked-frames", synth_args.options.parked_frames, "static-ghost: frames the object stays");
    synth->add_option("--first-index", synth_args.options.first_index, "Index of the first file");
    synth->add_flag("--no-object", synth_args.no_object, "Background only");
    synth->add_option("--out", synth_args.out, "Output directory");

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Merge eval reports into category and overall rows");
    report->add_option("inputs", report_args.inputs, "Report CSV files")->required()->check(CLI::ExistingFile);
    report->add_option("--out", report_args.out, "Merged report (default: stdout)");
    report->add_option("--format", report_args.format, "csv | json");
    report->add_option("--categories", report_args.categories, "Categories that must have videos");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kPrecondition;
    }

    try {
        if (*init_bg) return cmd_init_bg(*init_bg, init_args);
        if (*run) return cmd_run(*run, run_args);
        if (*eval) return cmd_eval(eval_args);
        if (*flow) return cmd_flow(*flow, flow_args);
        if (*complete) return cmd_complete(*complete, complete_args);
        if (*synth) return cmd_synth(synth_args);
        if (*report) return cmd_report(report_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::bad_alloc&) {
        std::cerr << "error: out of memory\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kPrecondition;
}
