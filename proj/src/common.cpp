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

#include "ndtlos/common.hpp"

#include <cstdlib>
#include <omp.h>

namespace ndt {

double frobenius_sq(const CMatrix& m) {
    double acc = 0.0;
    for (const cd& v : m.values()) acc += std::norm(v);
    return acc;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& text) {
    return fnv1a64(std::span<const unsigned char>(
        reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

int configured_workers() {
    const char* env = std::getenv("NDTLOS_WORKERS");
    if (env == nullptr || *env == '\0') return 0;
    const int n = std::atoi(env);
    return n > 0 ? n : 0;
}

void apply_worker_env() {
    if (const int n = configured_workers(); n > 0) omp_set_num_threads(n);
}

}  // namespace ndt
