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

#include <cstdio>
#include <fstream>

#include "ndtlos/evalkit.hpp"

namespace ndt::eval {

using dl::LayerKind;

FlopsReport flops(const dl::NetSpec& net, bool inference_only) {
    if (net.nodes.empty()) throw InvalidInput("network has no layers");
    std::vector<bool> used(net.nodes.size(), !inference_only);
    if (inference_only) {
        if (net.prob_node < 0) throw InvalidInput("network has no probability output");
        used[net.prob_node] = true;
        for (std::size_t i = net.nodes.size(); i-- > 0;)
            if (used[i])
                for (int in : net.nodes[i].inputs)
                    if (in != dl::kNetworkInput) used[in] = true;
    }

    FlopsReport r;
    r.model = net.preset;
    r.input = net.input;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        if (!used[i]) continue;
        const dl::Node& n = net.nodes[i];
        const dl::Shape in = net.shape_of(n.inputs[0]);
        const double elems = static_cast<double>(n.out.size());
        if (n.out.size() == 0) throw InvalidInput("layer " + std::to_string(i) + " is unshaped");
        LayerFlops l;
        l.name = n.spec.name.empty() ? std::string(dl::to_string(n.spec.kind)) + "_" + std::to_string(i) : n.spec.name;
        l.kind = n.spec.kind;
        l.out = n.out;
        switch (n.spec.kind) {
            case LayerKind::conv2d:
                l.macs = static_cast<double>(n.spec.kernel_h) * n.spec.kernel_w * in.c * elems;
                l.flops = 2.0 * l.macs + (n.spec.bias ? elems : 0.0);
                break;
            case LayerKind::dense:
                l.macs = static_cast<double>(in.size()) * n.out.c;
                l.flops = 2.0 * l.macs + elems;
                break;
            case LayerKind::upsample:
                break;
            default:
                l.flops = elems;
                break;
        }
        r.total_flops += l.flops;
        r.layers.push_back(std::move(l));
    }
    return r;
}

void write_flops_report(const FlopsReport& report, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write " + path);
    char line[256];
    f << "# model: " << report.model << "\n";
    f << "# input: " << report.input.c << "x" << report.input.h << "x" << report.input.w << "\n";
    f << "# convention: " << kFlopsConvention << "\n";
    f << "layer,kind,out_c,out_h,out_w,macs,flops\n";
    for (const LayerFlops& l : report.layers) {
        std::snprintf(line, sizeof line, "%s,%s,%d,%d,%d,%.0f,%.0f\n", l.name.c_str(), dl::to_string(l.kind), l.out.c,
                      l.out.h, l.out.w, l.macs, l.flops);
        f << line;
    }
    std::snprintf(line, sizeof line, "total_flops,%.0f\ntotal_gflops,%.6f\n", report.total_flops,
                  report.total_flops / 1e9);
    f << line;
}

}  // namespace ndt::eval
