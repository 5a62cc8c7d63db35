// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The ndtlos Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <array>

#include "ndtlos/deepnet.hpp"

namespace ndt::dl {

namespace {

int conv_bn(NetSpec& net, int x, int width, int kernel, int stride, int pad, bool batch_stats, bool relu,
            bool projection = false) {
    LayerSpec c = LayerSpec::conv(width, kernel, stride, pad);
    c.projection = projection;
    x = net.add(c, x);
    x = net.add(LayerSpec::batchnorm(batch_stats), x);
    return relu ? net.add(LayerSpec::relu(), x) : x;
}

int basic_block(NetSpec& net, int x, int width, int stride, bool batch_stats) {
    const Shape in = net.shape_of(x);
    int branch = conv_bn(net, x, width, 3, stride, 1, batch_stats, true);
    branch = conv_bn(net, branch, width, 3, 1, 1, batch_stats, false);
    int shortcut = x;
    if (stride != 1 || in.c != width) shortcut = conv_bn(net, x, width, 1, stride, 0, batch_stats, false, true);
    const int sum = net.add(LayerSpec::skip_add(), {branch, shortcut});
    return net.add(LayerSpec::relu(), sum);
}

NetSpec resnet(const std::string& name, Shape input, std::array<int, 4> blocks, std::array<int, 4> widths,
               bool batch_stats) {
    NetSpec net(input);
    net.preset = name;
    int x = conv_bn(net, kNetworkInput, widths[0], 7, 2, 3, batch_stats, true);
    x = net.add(LayerSpec::maxpool(3, 2, 1), x);
    for (int stage = 0; stage < 4; ++stage)
        for (int b = 0; b < blocks[stage]; ++b)
            x = basic_block(net, x, widths[stage], (b == 0 && stage > 0) ? 2 : 1, batch_stats);
    x = net.add(LayerSpec::avgpool_global(), x);
    x = net.add(LayerSpec::dense(1), x);
    net.prob_node = net.add(LayerSpec::sigmoid(), x);
    return net;
}

NetSpec segnet_mini(Shape input, bool batch_stats) {
    constexpr std::array<int, 3> widths{16, 32, 64};
    NetSpec net(input);
    net.preset = "segnet_mini";
    net.head = Head::autoencoder_classifier;
    std::array<Shape, 3> before_pool{};
    int x = kNetworkInput;
    for (int s = 0; s < 3; ++s) {
        x = conv_bn(net, x, widths[s], 3, 1, 1, batch_stats, true);
        before_pool[s] = net.shape_of(x);
        x = net.add(LayerSpec::maxpool(2, 2, 0, true), x);
    }
    const int latent = x;

    int c = net.add(LayerSpec::avgpool_global(), latent);
    c = net.add(LayerSpec::dense(1), c);
    net.prob_node = net.add(LayerSpec::sigmoid(), c);

    int d = latent;
    for (int s = 2; s >= 0; --s) {
        d = net.add(LayerSpec::upsample(before_pool[s].h, before_pool[s].w), d);
        d = conv_bn(net, d, widths[s > 0 ? s - 1 : 0], 3, 1, 1, batch_stats, true);
    }
    d = net.add(LayerSpec::conv(input.c, 3, 1, 1, true), d);
    net.recon_node = net.add(LayerSpec::sigmoid(), d);
    return net;
}

}  // namespace

std::vector<std::string> preset_names() { return {"resnet34_reference", "resnet_mini", "segnet_mini"}; }

NetSpec build_preset(const std::string& name, Shape input, const PresetOptions& options) {
    if (input.c <= 0 || input.h <= 0 || input.w <= 0) throw InvalidInput("input dimensions must be positive");
    if (name == "resnet34_reference") return resnet(name, input, {3, 4, 6, 3}, {64, 128, 256, 512}, true);
    if (name == "resnet_mini") return resnet(name, input, {1, 1, 1, 1}, {16, 32, 64, 128}, options.full_batchnorm);
    if (name == "segnet_mini") return segnet_mini(input, options.full_batchnorm);
    throw InvalidInput("unknown preset '" + name + "'");
}

}  // namespace ndt::dl
