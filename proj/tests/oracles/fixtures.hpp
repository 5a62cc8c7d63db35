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

// Small networks that isolate one layer kind each, for gradient checks.

#ifndef NDTLOS_TESTS_FIXTURES_HPP
#define NDTLOS_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "ndtlos/deepnet.hpp"

namespace fixture {

struct ProbeNet {
    std::string name;
    ndt::dl::NetSpec spec;
    bool training = false;
};

// One network per layer kind (and per notable mode of that kind).
std::vector<ProbeNet> single_layer_nets();

// Deterministic random batch for a network input.
ndt::dl::Tensor random_batch(int n, ndt::dl::Shape shape, std::uint64_t seed);

// Initializes and then jitters every parameter so biases, BN shifts and
// scales are away from their initial values.
void randomize(ndt::dl::Network& net, std::uint64_t seed);

}  // namespace fixture

#endif  // NDTLOS_TESTS_FIXTURES_HPP
