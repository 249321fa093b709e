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

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "json.hpp"
#include "sdbmc/network.hpp"

namespace sdbmc {

static_assert(std::endian::native == std::endian::little, "weights container I/O assumes a little-endian host");

std::map<std::string, std::vector<std::int64_t>> WeightStore::expected_shapes(const NetworkSpec& spec) {
    std::map<std::string, std::vector<std::int64_t>> shapes;
    for (std::size_t r = 0; r < spec.layers.size(); ++r) {
        const LayerSpec& l = spec.layers[r];
        if (!l.has_parameters()) continue;
        const std::string p = std::to_string(r);
        if (l.kind == LayerKind::upconv_bn) shapes[p + ".weight"] = {l.in_channels, l.out_channels, 3, 3};
        else shapes[p + ".weight"] = {l.out_channels, l.in_channels, 3, 3};
        shapes[p + ".bias"] = {l.out_channels};
        for (const char* s : {".bn.scale", ".bn.shift", ".bn.mean", ".bn.var"}) shapes[p + s] = {l.out_channels};
    }
    return shapes;
}

WeightStore WeightStore::random(const NetworkSpec& spec, std::uint64_t seed) {
    WeightStore store;
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> normal(0.0f, 1.0f);
    for (std::size_t r = 0; r < spec.layers.size(); ++r) {
        const LayerSpec& l = spec.layers[r];
        if (!l.has_parameters()) continue;
        const std::string p = std::to_string(r);
        const auto n = static_cast<std::size_t>(l.in_channels) * l.out_channels * 9;
        const std::int64_t fan_in = static_cast<std::int64_t>(l.in_channels) * 9;
        const float stdev = std::sqrt(2.0f / static_cast<float>(fan_in));
        ParamBlock w;
        w.shape = l.kind == LayerKind::upconv_bn ? std::vector<std::int64_t>{l.in_channels, l.out_channels, 3, 3}
                                                 : std::vector<std::int64_t>{l.out_channels, l.in_channels, 3, 3};
        w.data.resize(n);
        for (float& v : w.data) v = normal(rng) * stdev;
        store.blocks[p + ".weight"] = std::move(w);
        const std::vector<std::int64_t> vec{l.out_channels};
        const auto oc = static_cast<std::size_t>(l.out_channels);
        store.blocks[p + ".bias"] = {vec, std::vector<float>(oc, 0.0f)};
        store.blocks[p + ".bn.scale"] = {vec, std::vector<float>(oc, 1.0f)};
        store.blocks[p + ".bn.shift"] = {vec, std::vector<float>(oc, 0.0f)};
        store.blocks[p + ".bn.mean"] = {vec, std::vector<float>(oc, 0.0f)};
        store.blocks[p + ".bn.var"] = {vec, std::vector<float>(oc, 1.0f)};
    }
    return store;
}

void WeightStore::validate(const NetworkSpec& spec) const {
    const auto expected = expected_shapes(spec);
    for (const auto& [key, shape] : expected) {
        auto it = blocks.find(key);
        if (it == blocks.end()) throw Error(ErrorCode::WeightsMissing, "no parameter block '" + key + "'");
        if (it->second.shape != shape)
            throw Error(ErrorCode::ShapeMismatch, "parameter '" + key + "' has the wrong shape");
        std::size_t n = 1;
        for (auto d : shape) n *= static_cast<std::size_t>(d);
        if (it->second.data.size() != n)
            throw Error(ErrorCode::ShapeMismatch, "parameter '" + key + "' data length does not match its shape");
    }
    for (const auto& [key, block] : blocks)
        if (!expected.count(key)) throw Error(ErrorCode::ShapeMismatch, "unexpected parameter block '" + key + "'");
}

const ParamBlock& WeightStore::at(const std::string& key) const {
    auto it = blocks.find(key);
    if (it == blocks.end()) throw Error(ErrorCode::WeightsMissing, "no parameter block '" + key + "'");
    return it->second;
}

void WeightStore::save(const std::filesystem::path& path) const {
    nlohmann::json header = nlohmann::json::object();
    std::uint64_t offset = 0;
    for (const auto& [key, block] : blocks) {
        const std::uint64_t bytes = block.data.size() * sizeof(float);
        header[key] = {{"dtype", "F32"}, {"shape", block.shape}, {"data_offsets", {offset, offset + bytes}}};
        offset += bytes;
    }
    const std::string text = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    const std::uint64_t len = text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& [key, block] : blocks)
        out.write(reinterpret_cast<const char*>(block.data.data()),
                  static_cast<std::streamsize>(block.data.size() * sizeof(float)));
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

WeightStore WeightStore::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open weights file " + path.string());
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    if (!in || len > (std::uint64_t{1} << 30)) throw Error(ErrorCode::UnreadableFile, "bad weights header in " + path.string());
    std::string text(len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(len));
    if (!in) throw Error(ErrorCode::UnreadableFile, "truncated weights header in " + path.string());
    std::vector<char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::UnreadableFile, std::string("weights header is not JSON: ") + e.what());
    }

    WeightStore store;
    for (const auto& [key, entry] : header.items()) {
        if (key == "__metadata__") continue;
        try {
            if (entry.at("dtype").get<std::string>() != "F32")
                throw Error(ErrorCode::UnreadableFile, "parameter '" + key + "' is not F32");
            ParamBlock block;
            block.shape = entry.at("shape").get<std::vector<std::int64_t>>();
            const auto offs = entry.at("data_offsets").get<std::vector<std::uint64_t>>();
            if (offs.size() != 2 || offs[1] < offs[0] || offs[1] > payload.size() || (offs[1] - offs[0]) % 4 != 0)
                throw Error(ErrorCode::UnreadableFile, "parameter '" + key + "' has bad data offsets");
            block.data.resize((offs[1] - offs[0]) / 4);
            std::memcpy(block.data.data(), payload.data() + offs[0], offs[1] - offs[0]);
            store.blocks[key] = std::move(block);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::UnreadableFile, "malformed entry '" + key + "': " + e.what());
        }
    }
    return store;
}

}  // namespace sdbmc
