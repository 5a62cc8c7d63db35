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

#include <algorithm>
#include <cmath>

#include "ndtlos/deepnet.hpp"

namespace ndt::dl {

LossResult loss_bce(std::span<const double> prob, std::span<const int> labels, double pos_weight) {
    if (prob.size() != labels.size() || prob.empty()) throw InvalidInput("loss_bce: size mismatch or empty batch");
    const double k = static_cast<double>(prob.size());
    LossResult r;
    r.dprob.resize(prob.size());
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const double p = std::clamp(prob[i], kProbClamp, 1.0 - kProbClamp);
        const double y = labels[i] ? 1.0 : 0.0;
        r.value -= pos_weight * y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        const bool inside = prob[i] > kProbClamp && prob[i] < 1.0 - kProbClamp;
        r.dprob[i] = inside ? (-pos_weight * y / p + (1.0 - y) / (1.0 - p)) / k : 0.0;
    }
    r.value /= k;
    return r;
}

JointLossResult loss_joint(std::span<const double> prob, const Tensor& recon, const Tensor& input,
                           std::span<const int> labels, double w_rec, double pos_weight) {
    if (recon.shape != input.shape || recon.n != input.n || recon.data.size() != input.data.size())
        throw InvalidInput("loss_joint: reconstruction does not match the input");
    if (input.n != static_cast<int>(prob.size())) throw InvalidInput("loss_joint: batch size mismatch");
    LossResult bce = loss_bce(prob, labels, pos_weight);
    const double k = static_cast<double>(input.n);
    JointLossResult r;
    r.drecon = Tensor(input.n, input.shape);
    double sq = 0.0;
    for (std::size_t i = 0; i < input.data.size(); ++i) {
        const double diff = recon.data[i] - input.data[i];
        sq += diff * diff;
        r.drecon.data[i] = 2.0 * w_rec / k * diff;
    }
    r.reconstruction = w_rec / k * sq;
    r.value = r.reconstruction + bce.value;
    r.dprob = std::move(bce.dprob);
    return r;
}

}  // namespace ndt::dl
