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
#include <numeric>
#include <random>

#include "ndtlos/classic_ml.hpp"

namespace ndt::ml {

std::vector<Fold> kfold(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) throw InvalidInput("kfold: k must be >= 2");
    if (static_cast<std::size_t>(k) > n) throw InvalidInput("kfold: k exceeds the number of samples");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Fold> folds(static_cast<std::size_t>(k));
    const std::size_t base = n / k, extra = n % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        folds[f].validation.assign(perm.begin() + static_cast<long>(pos), perm.begin() + static_cast<long>(pos + len));
        std::sort(folds[f].validation.begin(), folds[f].validation.end());
        pos += len;
    }
    for (std::size_t f = 0; f < folds.size(); ++f) {
        for (std::size_t g = 0; g < folds.size(); ++g)
            if (g != f) folds[f].train.insert(folds[f].train.end(), folds[g].validation.begin(), folds[g].validation.end());
        std::sort(folds[f].train.begin(), folds[f].train.end());
    }
    return folds;
}

}  // namespace ndt::ml
