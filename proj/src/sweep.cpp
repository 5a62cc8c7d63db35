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

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "ndtlos/evalkit.hpp"

namespace ndt::eval {

std::vector<SweepPoint> eval_sweep(const Scorer& scorer, std::span<const TestSample> test,
                                   std::span<const double> snr_db, std::uint64_t seed) {
    if (test.empty()) throw InvalidInput("empty test set");
    for (const TestSample& t : test)
        if (!t.channel || t.channel->kind != channel::ChannelKind::true_channel)
            throw InvalidInput("test sample needs its true channel");

    std::vector<SweepPoint> out;
    for (double snr : snr_db) {
        const std::uint64_t stream = std::bit_cast<std::uint64_t>(snr);
        std::vector<channel::ChannelMatrix> estimates(test.size());
        const long n = static_cast<long>(test.size());
#pragma omp parallel for schedule(dynamic, 4)
        for (long i = 0; i < n; ++i) {
            const channel::UplinkRecord rx =
                channel::simulate_uplink(*test[i].channel, snr, derive_seed(seed, stream, test[i].id));
            estimates[i] = channel::estimate_channel_ls(rx.received, rx.pilots);
        }
        SweepPoint p;
        p.snr_db = snr;
        p.scores = scorer(estimates);
        if (p.scores.size() != test.size()) throw InvalidInput("scorer returned the wrong number of scores");
        for (const TestSample& t : test) p.labels.push_back(t.label);
        p.accuracy = accuracy(p.scores, p.labels);
        bool both = false;
        for (int y : p.labels) both |= y != p.labels.front();
        p.auc = both ? roc(p.scores, p.labels).auc : std::numeric_limits<double>::quiet_NaN();
        out.push_back(std::move(p));
    }
    return out;
}

void write_sweep_csv(const std::vector<SweepPoint>& sweep, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write " + path);
    f << "snr_db,accuracy,auc\n";
    char line[128];
    for (const SweepPoint& p : sweep) {
        std::snprintf(line, sizeof line, "%g,%.10g,%.10g\n", p.snr_db, p.accuracy, p.auc);
        f << line;
    }
}

}  // namespace ndt::eval
