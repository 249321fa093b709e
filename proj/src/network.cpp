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

#include "sdbmc/network.hpp"

#include <string>

namespace sdbmc {

const char* to_string(LayerKind kind) noexcept {
    switch (kind) {
        case LayerKind::conv_bn: return "Conv + BN";
        case LayerKind::dropout_maxpool: return "SD + Maxpooling";
        case LayerKind::upconv_bn: return "Up-conv + BN";
        case LayerKind::conv_bn_concat: return "Conv + BN (concat)";
        case LayerKind::sigmoid: return "Sigmoid";
    }
    return "?";
}

NetworkSpec NetworkSpec::segmenter() {
    NetworkSpec net;
    auto conv = [&](int in, int out) { net.layers.push_back({LayerKind::conv_bn, 3, in, out, std::nullopt, 0}); };
    auto pool = [&](int c) { net.layers.push_back({LayerKind::dropout_maxpool, 2, c, c, std::nullopt, 0}); };
    auto up = [&](int in, int out) { net.layers.push_back({LayerKind::upconv_bn, 3, in, out, std::nullopt, 0}); };
    auto cat = [&](int dec, int skip, int out, int stage) {
        net.layers.push_back({LayerKind::conv_bn_concat, 3, dec + skip, out, stage, skip});
    };

    conv(12, 64);
    conv(64, 64);
    pool(64);
    conv(64, 128);
    conv(128, 128);
    pool(128);
    conv(128, 256);
    conv(256, 256);
    conv(256, 256);
    pool(256);
    conv(256, 512);
    conv(512, 512);
    conv(512, 512);
    pool(512);
    conv(512, 512);
    conv(512, 512);
    conv(512, 512);

    up(512, 512);
    cat(512, 512, 512, 3);
    conv(512, 512);
    up(512, 512);
    cat(512, 256, 256, 2);
    conv(256, 256);
    up(256, 256);
    cat(256, 128, 128, 1);
    conv(128, 128);
    up(128, 128);
    cat(128, 64, 64, 0);
    conv(64, 64);
    conv(64, 1);
    net.layers.push_back({LayerKind::sigmoid, 0, 1, 1, std::nullopt, 0});
    return net;
}

int NetworkSpec::pool_count() const noexcept {
    int n = 0;
    for (const auto& l : layers) n += l.kind == LayerKind::dropout_maxpool ? 1 : 0;
    return n;
}

void NetworkSpec::validate() const {
    auto fail = [](std::size_t row, const std::string& msg) {
        throw Error(ErrorCode::ShapeMismatch, "layer " + std::to_string(row) + ": " + msg);
    };
    if (layers.empty()) throw Error(ErrorCode::ShapeMismatch, "network has no layers");

    int channels = input_channels;
    std::vector<int> stage_channels;  // pre-pool output per encoder stage
    int pools = 0, upconvs = 0, concats = 0;
    for (std::size_t r = 0; r < layers.size(); ++r) {
        const LayerSpec& l = layers[r];
        const int expected_in = channels + (l.kind == LayerKind::conv_bn_concat ? l.skip_channels : 0);
        if (l.in_channels != expected_in)
            fail(r, "in_channels " + std::to_string(l.in_channels) + " but " + std::to_string(expected_in) + " arrive");
        switch (l.kind) {
            case LayerKind::conv_bn:
            case LayerKind::upconv_bn:
                if (l.kernel != 3) fail(r, "kernel must be 3x3");
                if (l.kind == LayerKind::upconv_bn) ++upconvs;
                break;
            case LayerKind::conv_bn_concat: {
                if (l.kernel != 3) fail(r, "kernel must be 3x3");
                if (!l.skip_source || *l.skip_source < 0 || *l.skip_source >= static_cast<int>(stage_channels.size()))
                    fail(r, "skip source is not an encoder stage");
                if (stage_channels[*l.skip_source] != l.skip_channels)
                    fail(r, "skip carries " + std::to_string(stage_channels[*l.skip_source]) + " channels, spec says " +
                                std::to_string(l.skip_channels));
                ++concats;
                break;
            }
            case LayerKind::dropout_maxpool:
                if (l.kernel != 2) fail(r, "pool kernel must be 2x2");
                if (l.out_channels != l.in_channels) fail(r, "pooling keeps the channel count");
                stage_channels.push_back(channels);
                ++pools;
                break;
            case LayerKind::sigmoid:
                if (l.out_channels != l.in_channels) fail(r, "sigmoid keeps the channel count");
                if (r + 1 != layers.size()) fail(r, "sigmoid must be the last layer");
                break;
        }
        channels = l.out_channels;
    }
    if (channels != output_channels) throw Error(ErrorCode::ShapeMismatch, "final channel count differs from output_channels");
    if (layers.back().kind != LayerKind::sigmoid) throw Error(ErrorCode::ShapeMismatch, "network must end in a sigmoid");
    if (pools != upconvs || concats != upconvs)
        throw Error(ErrorCode::ShapeMismatch, "pools, up-convs and skip concatenations must pair up");
}

std::vector<TraceEntry> NetworkSpec::trace(int height, int width) const {
    std::vector<TraceEntry> out;
    int c = input_channels, h = height, w = width;
    for (std::size_t r = 0; r < layers.size(); ++r) {
        const LayerSpec& l = layers[r];
        if (l.kind == LayerKind::dropout_maxpool) {
            if (h % 2 != 0 || w % 2 != 0)
                throw Error(ErrorCode::ShapeMismatch, "input " + std::to_string(height) + "x" + std::to_string(width) +
                                                          " reaches pool " + std::to_string(r) + " with odd size " +
                                                          std::to_string(h) + "x" + std::to_string(w));
            h /= 2;
            w /= 2;
        } else if (l.kind == LayerKind::upconv_bn) {
            h *= 2;
            w *= 2;
        }
        c = l.out_channels;
        out.push_back({static_cast<int>(r), c, h, w});
    }
    return out;
}

Network::Network(NetworkSpec spec, WeightStore weights) : spec_(std::move(spec)), weights_(std::move(weights)) {
    spec_.validate();
    weights_.validate(spec_);
    for (std::size_t r = 0; r < spec_.layers.size(); ++r) {
        Layer layer{spec_.layers[r], nullptr, nullptr, {}};
        if (layer.spec.has_parameters()) {
            const std::string p = std::to_string(r);
            layer.weight = weights_.at(p + ".weight").data.data();
            layer.bias = weights_.at(p + ".bias").data.data();
            layer.bn.scale = weights_.at(p + ".bn.scale").data;
            layer.bn.shift = weights_.at(p + ".bn.shift").data;
            layer.bn.mean = weights_.at(p + ".bn.mean").data;
            layer.bn.var = weights_.at(p + ".bn.var").data;
        }
        layers_.push_back(std::move(layer));
    }
}

Tensor3 Network::forward(const Tensor3& input, int threads) const {
    if (input.channels() != spec_.input_channels)
        throw Error(ErrorCode::ShapeMismatch, "network expects " + std::to_string(spec_.input_channels) +
                                                  " input channels, got " + std::to_string(input.channels()));
    const int factor = 1 << spec_.pool_count();
    if (input.height() % factor != 0 || input.width() % factor != 0)
        throw Error(ErrorCode::ShapeMismatch, "input " + std::to_string(input.height()) + "x" +
                                                  std::to_string(input.width()) + " is not divisible by " +
                                                  std::to_string(factor));

    std::vector<Tensor3> skips;
    Tensor3 x = input;
    for (std::size_t r = 0; r < layers_.size(); ++r) {
        const Layer& l = layers_[r];
        const bool last_param = r + 2 == layers_.size();
        switch (l.spec.kind) {
            case LayerKind::conv_bn:
            case LayerKind::conv_bn_concat:
            case LayerKind::upconv_bn: {
                if (l.spec.kind == LayerKind::conv_bn_concat) x = concat_channels(skips[*l.spec.skip_source], x);
                const std::size_t wn = static_cast<std::size_t>(l.spec.in_channels) * l.spec.out_channels * 9;
                const std::span<const float> wt(l.weight, wn), bs(l.bias, static_cast<std::size_t>(l.spec.out_channels));
                x = l.spec.kind == LayerKind::upconv_bn ? upconv2(x, wt, bs, l.spec.out_channels, threads)
                                                        : conv2d(x, wt, bs, l.spec.out_channels, threads);
                batchnorm_infer_inplace(x, l.bn);
                if (!last_param) relu_inplace(x);
                break;
            }
            case LayerKind::dropout_maxpool:
                // Spatial dropout is the identity at inference.
                skips.push_back(x);
                x = maxpool2(x);
                break;
            case LayerKind::sigmoid:
                sigmoid_inplace(x);
                break;
        }
    }
    return x;
}

}  // namespace sdbmc
