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

#include "ndtlos/classic_ml.hpp"

namespace ndt::ml {

double gini(std::span<const double> class_counts) {
    double total = 0.0;
    for (double c : class_counts) {
        if (c < 0.0) throw InvalidInput("gini: negative class count");
        total += c;
    }
    if (!(total > 0.0)) throw InvalidInput("gini: all class counts are zero");
    double sum_sq = 0.0;
    for (double c : class_counts) sum_sq += (c / total) * (c / total);
    return 1.0 - sum_sq;
}

}  // namespace ndt::ml
