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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdbmc/nn.hpp"

namespace sdbmc {

enum class LayerKind : std::uint8_t { conv_bn, dropout_maxpool, upconv_bn, conv_bn_concat, sigmoid };

const char* to_string(LayerKind kind) noexcept;

struct LayerSpec {
    LayerKind kind = LayerKind::conv_bn;
    int kernel = 3;
    /// Total input channels, skip channels included.
    int in_channels = 0;
    int out_channels = 0;
    /// Encoder stage (0 = shallowest) whose pre-pool output is concatenated
    /// in front of this layer's input.
    std::optional<int> skip_source;
    int skip_channels = 0;

    bool has_parameters() const noexcept { return kind != LayerKind::dropout_maxpool && kind != LayerKind::sigmoid; }
};

struct TraceEntry {
    int layer;
    int channels;
    int height;
    int width;
};

struct NetworkSpec {
    std::vector<LayerSpec> layers;
    int input_channels = 12;
    int output_channels = 1;

    /// The 31-row encoder-decoder stack of the foreground segmenter.
    static NetworkSpec segmenter();

    /// Checks kernel sizes, channel chaining (skip channels included) and the
    /// block counts. Throws ShapeMismatch.
    void validate() const;
    /// Output shape of every layer for an H x W input. Throws ShapeMismatch
    /// when a pooling step meets an odd size.
    std::vector<TraceEntry> trace(int height, int width) const;
    int pool_count() const noexcept;
};

struct ParamBlock {
    std::vector<std::int64_t> shape;
    std::vector<float> data;
};

/// Named float32 parameter blocks. Keys: "<layer>.weight", "<layer>.bias",
/// "<layer>.bn.scale|shift|mean|var", where <layer> is the row ordinal.
/// Conv weights are (out, in, 3, 3); up-conv weights are (in, out, 3, 3).
class WeightStore {
public:
    std::map<std::string, ParamBlock> blocks;

    /// Expected key -> shape for a spec.
    static std::map<std::string, std::vector<std::int64_t>> expected_shapes(const NetworkSpec& spec);
    /// He-normal conv weights, zero bias, identity batch norm. Deterministic in seed.
    static WeightStore random(const NetworkSpec& spec, std::uint64_t seed);

    /// Missing blocks -> WeightsMissing; extra blocks or wrong shapes -> ShapeMismatch.
    void validate(const NetworkSpec& spec) const;
    const ParamBlock& at(const std::string& key) const;

    /// Container: u64 little-endian header length, JSON header
    /// {key: {"dtype": "F32", "shape": [...], "data_offsets": [begin, end]}},
    /// then little-endian float32 data.
    void save(const std::filesystem::path& path) const;
    static WeightStore load(const std::filesystem::path& path);
};

/// Validated spec + weights; forward is const and deterministic.
class Network {
public:
    Network(NetworkSpec spec, WeightStore weights);
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;
    Network(Network&&) = default;

    const NetworkSpec& spec() const noexcept { return spec_; }
    const WeightStore& weights() const noexcept { return weights_; }

    /// input: input_channels x H x W with H, W divisible by 2^pools.
    /// Returns 1 x H x W probabilities in (0, 1).
    Tensor3 forward(const Tensor3& input, int threads = 1) const;

private:
    struct Layer {
        LayerSpec spec;
        const float* weight = nullptr;
        const float* bias = nullptr;
        BatchNormParams bn;
    };

    NetworkSpec spec_;
    WeightStore weights_;
    std::vector<Layer> layers_;
};

}  // namespace sdbmc
