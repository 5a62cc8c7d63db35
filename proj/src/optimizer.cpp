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

#include <cmath>

#include "ndtlos/deepnet.hpp"

namespace ndt::dl {

Optimizer::Optimizer(OptimizerConfig cfg, std::size_t n_params, long total_steps)
    : cfg_(cfg), total_(total_steps), m_(n_params, 0.0), v_(cfg.kind == OptimizerKind::adam ? n_params : 0, 0.0) {
    if (!(cfg.learning_rate > 0.0)) throw InvalidInput("learning rate must be positive");
    if (total_steps <= 0) throw InvalidInput("total steps must be positive");
}

double Optimizer::current_lr() const {
    if (!cfg_.cosine_decay) return cfg_.learning_rate;
    const double progress = std::min(1.0, static_cast<double>(t_) / static_cast<double>(total_));
    return cfg_.learning_rate * 0.5 * (1.0 + std::cos(kPi * progress));
}

void Optimizer::step(std::vector<double>& params, const std::vector<double>& grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) throw InvalidInput("optimizer size mismatch");
    const double lr = current_lr();
    ++t_;
    if (cfg_.kind == OptimizerKind::sgd_momentum) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = cfg_.momentum * m_[i] + grad[i];
            params[i] -= lr * m_[i];
        }
        return;
    }
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
        v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
        params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + cfg_.eps);
    }
}

}  // namespace ndt::dl
