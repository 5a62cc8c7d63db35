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
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "ndtlos/evalkit.hpp"

namespace ndt::eval {

namespace {

void check(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw InvalidInput("scores and labels differ in length");
    if (scores.empty()) throw InvalidInput("no scores");
    for (int y : labels)
        if (y != 0 && y != 1) throw InvalidInput("labels must be 0 or 1");
}

}  // namespace

Confusion confusion(std::span<const double> scores, std::span<const int> labels, double threshold) {
    check(scores, labels);
    Confusion c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (labels[i] == 1)
            (predicted ? c.tp : c.fn)++;
        else
            (predicted ? c.fp : c.tn)++;
    }
    return c;
}

double accuracy(std::span<const double> scores, std::span<const int> labels, double threshold) {
    const Confusion c = confusion(scores, labels, threshold);
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(scores.size());
}

RocCurve roc(std::span<const double> scores, std::span<const int> labels) {
    check(scores, labels);
    const double pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const double neg = static_cast<double>(labels.size()) - pos;
    if (pos == 0.0 || neg == 0.0) throw InvalidInput("ROC needs both classes");
    for (double s : scores)
        if (std::isnan(s)) throw InvalidInput("NaN score");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve c;
    c.thresholds.push_back(std::numeric_limits<double>::infinity());
    c.fpr.push_back(0.0);
    c.tpr.push_back(0.0);
    std::size_t tp = 0, fp = 0;
    double area = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        std::size_t j = i;
        for (; j < order.size() && scores[order[j]] == s; ++j) (labels[order[j]] == 1 ? tp : fp)++;
        const double x = static_cast<double>(fp) / neg;
        const double y = static_cast<double>(tp) / pos;
        area += (x - c.fpr.back()) * (y + c.tpr.back()) / 2.0;
        c.thresholds.push_back(s);
        c.fpr.push_back(x);
        c.tpr.push_back(y);
        i = j;
    }
    c.auc = area;
    return c;
}

void write_roc_csv(const RocCurve& curve, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write " + path);
    f << "threshold,fpr,tpr\n";
    char line[128];
    for (std::size_t i = 0; i < curve.fpr.size(); ++i) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", curve.thresholds[i], curve.fpr[i], curve.tpr[i]);
        f << line;
    }
}

double reduction_percent(double baseline, double reduced) {
    if (!(baseline > 0.0)) throw InvalidInput("baseline cost must be positive");
    return 100.0 * (1.0 - reduced / baseline);
}

std::vector<double> default_snr_list() { return {-15.0, -10.0, -5.0, 0.0, 5.0, 10.0, 15.0}; }

}  // namespace ndt::eval
