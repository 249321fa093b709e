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

#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "sdbmc/error.hpp"
#include "test_support.hpp"

namespace sdbmc {
namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::Precondition;
}

TEST(Config, Defaults) {
    const PipelineConfig c;
    EXPECT_EQ(c.init_window, 100);
    EXPECT_EQ(c.section_length, 100);
    EXPECT_EQ(c.deterioration_fg_ratio, 0.5);
    EXPECT_EQ(c.deterioration_window, 10);
    EXPECT_EQ(c.width, 320);
    EXPECT_EQ(c.height, 240);
    EXPECT_EQ(c.recent_window, 30);
    EXPECT_EQ(c.binarize_threshold, 0.5);
    EXPECT_EQ(c.fpm_source, FpmSource::constant);
    EXPECT_EQ(c.completion.stride, 5);
    EXPECT_EQ(c.completion.max_hops, 0);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParseOverridesAndComments) {
    const PipelineConfig c = parse_config(
        "# a comment\n"
        "init_window = 30\n"
        "  section_length=50   # trailing\n"
        "\n"
        "deterioration_fg_ratio = 0.25\n"
        "segmenter = network\n"
        "fpm_source = previous-mask\n");
    EXPECT_EQ(c.init_window, 30);
    EXPECT_EQ(c.section_length, 50);
    EXPECT_EQ(c.deterioration_fg_ratio, 0.25);
    EXPECT_EQ(c.segmenter, SegmenterChoice::network);
    EXPECT_EQ(c.fpm_source, FpmSource::previous_mask);
    EXPECT_EQ(c.refresh_window(), 50);
}

TEST(Config, Rejects) {
    EXPECT_EQ(code_of([] { (void)parse_config("init_window = 1\n"); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { (void)parse_config("init_window = ten\n"); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { (void)parse_config("nonsense = 3\n"); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { (void)parse_config("just words\n"); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { (void)parse_config("deterioration_fg_ratio = 0\n"); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { (void)parse_config("deterioration_fg_ratio = 1.5\n"); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { (void)parse_config("segmenter = magic\n"); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { (void)parse_config("flow_stride = 1\n"); }), ErrorCode::InvalidConfig);
    EXPECT_EQ(code_of([] { (void)load_config("/nonexistent/cfg.txt"); }), ErrorCode::UnreadableFile);
    EXPECT_NO_THROW((void)parse_config("deterioration_fg_ratio = 1\nsection_length = 0\n"));
}

TEST(Config, SectionZeroRefreshesOverTheInitWindow) {
    PipelineConfig c;
    c.section_length = 0;
    c.init_window = 40;
    EXPECT_EQ(c.refresh_window(), 40);
}

// Property: format then parse reproduces every key.
TEST(Config, FormatRoundTrip) {
    PipelineConfig c;
    c.init_window = 77;
    c.completion.poisson_tol = 3.5e-7;
    c.completion.flow.regularization = 123.25;
    c.weights = "/tmp/w.safetensors";
    const PipelineConfig back = parse_config(format_config(c));
    EXPECT_EQ(config_snapshot(back), config_snapshot(c));

    testing::TempDir dir("config");
    std::ofstream(dir / "c.txt") << format_config(c);
    EXPECT_EQ(config_snapshot(load_config(dir / "c.txt")), config_snapshot(c));
}

TEST(Config, KeysAreUniqueAndGettable) {
    std::set<std::string> names;
    const PipelineConfig c;
    for (const ConfigKey& k : config_keys()) {
        EXPECT_TRUE(names.insert(k.name).second) << k.name;
        EXPECT_FALSE(k.description.empty()) << k.name;
        EXPECT_NO_THROW((void)get_config_value(c, k.name));
    }
    EXPECT_EQ(names.size(), config_snapshot(c).size());
    EXPECT_EQ(get_config_value(c, "section_length"), "100");
}

}  // namespace
}  // namespace sdbmc
