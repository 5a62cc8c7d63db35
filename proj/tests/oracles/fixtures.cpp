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

#include "fixtures.hpp"

#include <random>

namespace fixture {

using ndt::dl::kNetworkInput;
using ndt::dl::LayerSpec;
using ndt::dl::NetSpec;
using ndt::dl::Shape;

namespace {

constexpr Shape kInput{2, 5, 6};

// Appends dense(1) + sigmoid as the probability head.
NetSpec finish(NetSpec net, int from) {
    const int d = net.add(LayerSpec::dense(1), from);
    net.prob_node = net.add(LayerSpec::sigmoid(), d);
    return net;
}

NetSpec after_conv(LayerSpec layer, bool conv_bias = true) {
    NetSpec net(kInput);
    const int c = net.add(LayerSpec::conv(3, 3, 1, 1, conv_bias), kNetworkInput);
    return finish(net, net.add(std::move(layer), c));
}

}  // namespace

std::vector<ProbeNet> single_layer_nets() {
    std::vector<ProbeNet> out;
    {
        NetSpec net(kInput);
        out.push_back({"conv2d", finish(net, net.add(LayerSpec::conv(3, 3, 1, 1, true), kNetworkInput)), false});
    }
    {
        NetSpec net(kInput);
        out.push_back({"conv2d_strided", finish(net, net.add(LayerSpec::conv(4, 3, 2, 1), kNetworkInput)), false});
    }
    out.push_back({"batchnorm_batch", after_conv(LayerSpec::batchnorm(true), false), true});
    out.push_back({"batchnorm_running", after_conv(LayerSpec::batchnorm(true), false), false});
    out.push_back({"batchnorm_affine", after_conv(LayerSpec::batchnorm(false), false), true});
    out.push_back({"relu", after_conv(LayerSpec::relu()), false});
    out.push_back({"maxpool", after_conv(LayerSpec::maxpool(3, 2, 1)), false});
    out.push_back({"maxpool_ceil", after_conv(LayerSpec::maxpool(2, 2, 0, true)), false});
    out.push_back({"avgpool_global", after_conv(LayerSpec::avgpool_global()), false});
    out.push_back({"sigmoid", after_conv(LayerSpec::sigmoid()), false});
    {
        NetSpec net(kInput);
        const int d = net.add(LayerSpec::dense(4), kNetworkInput);
        out.push_back({"dense", finish(net, net.add(LayerSpec::relu(), d)), false});
    }
    {
        NetSpec net(kInput);
        const int c = net.add(LayerSpec::conv(3, 3, 1, 1, true), kNetworkInput);
        const int p = net.add(LayerSpec::maxpool(2, 2, 0, true), c);
        out.push_back({"upsample", finish(net, net.add(LayerSpec::upsample(5, 6), p)), false});
    }
    {
        NetSpec net(kInput);
        const int a = net.add(LayerSpec::conv(3, 3, 1, 1, true), kNetworkInput);
        const int b = net.add(LayerSpec::conv(3, 1, 1, 0), kNetworkInput);
        out.push_back({"skip_add", finish(net, net.add(LayerSpec::skip_add(), std::vector<int>{a, b})), false});
    }
    {
        NetSpec net(kInput);
        net.head = ndt::dl::Head::autoencoder_classifier;
        const int c = net.add(LayerSpec::conv(3, 3, 1, 1, true), kNetworkInput);
        const int r = net.add(LayerSpec::conv(kInput.c, 3, 1, 1, true), c);
        net.recon_node = net.add(LayerSpec::sigmoid(), r);
        const int g = net.add(LayerSpec::avgpool_global(), c);
        out.push_back({"autoencoder_head", finish(net, g), false});
    }
    return out;
}

ndt::dl::Tensor random_batch(int n, Shape shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ndt::dl::Tensor t(n, shape);
    for (double& v : t.data) v = u(rng);
    return t;
}

void randomize(ndt::dl::Network& net, std::uint64_t seed) {
    net.init(seed);
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    std::normal_distribution<double> g(0.0, 0.1);
    for (double& p : net.params()) p += g(rng);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    // Running statistics: means anywhere, variances positive.
    for (std::size_t i = 0; i < net.state().size(); ++i) net.state()[i] = u(rng) - 1.0;
    for (const auto& node : net.spec().nodes) {
        if (node.state_count == 0) continue;
        const std::size_t c = node.state_count / 2;
        for (std::size_t k = 0; k < c; ++k) net.state()[node.state_offset + c + k] = u(rng);
    }
}

}  // namespace fixture
