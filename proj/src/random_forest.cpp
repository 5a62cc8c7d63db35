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
#include <limits>
#include <numeric>
#include <random>

#include "ndtlos/classic_ml.hpp"

namespace ndt::ml {

namespace {

constexpr double kMinDecrease = 1e-12;

double gini2(double c0, double c1) {
    const double t = c0 + c1;
    if (!(t > 0.0)) return 0.0;
    const double p0 = c0 / t, p1 = c1 / t;
    return 1.0 - p0 * p0 - p1 * p1;
}

class TreeBuilder {
public:
    TreeBuilder(const RMatrix& x, std::span<const int> y, const RfParams& p, std::vector<double> weight,
                std::uint64_t seed)
        : x_(x), y_(y), p_(p), w_(std::move(weight)), rng_(seed) {
        const int d = static_cast<int>(x.cols());
        mtry_ = p.max_features > 0 ? std::min(p.max_features, d)
                                   : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(d)))));
    }

    DecisionTree build() {
        std::vector<int> rows;
        for (int i = 0; i < static_cast<int>(x_.rows()); ++i)
            if (w_[i] > 0.0) rows.push_back(i);
        grow(rows, 0);
        DecisionTree t;
        t.nodes = std::move(nodes_);
        t.in_bag.resize(w_.size());
        for (std::size_t i = 0; i < w_.size(); ++i) t.in_bag[i] = static_cast<int>(w_[i]);
        return t;
    }

private:
    int grow(const std::vector<int>& rows, int depth) {
        const int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        double c[2] = {0.0, 0.0};
        for (int r : rows) c[y_[r]] += w_[r];
        nodes_[id].counts[0] = c[0];
        nodes_[id].counts[1] = c[1];
        const double total = c[0] + c[1];
        if (depth >= p_.max_depth || total < 2.0 * p_.min_leaf || c[0] == 0.0 || c[1] == 0.0) return id;

        std::vector<int> feats(x_.cols());
        std::iota(feats.begin(), feats.end(), 0);
        for (int k = 0; k < mtry_; ++k) {
            std::uniform_int_distribution<int> pick(k, static_cast<int>(feats.size()) - 1);
            std::swap(feats[k], feats[pick(rng_)]);
        }
        feats.resize(static_cast<std::size_t>(mtry_));
        const BestSplit s = best_gini_split(x_, y_, w_, rows, feats, p_.min_leaf);
        if (s.feature < 0 || !(s.decrease > kMinDecrease)) return id;

        std::vector<int> left, right;
        for (int r : rows) (x_(r, s.feature) <= s.threshold ? left : right).push_back(r);
        nodes_[id].feature = s.feature;
        nodes_[id].threshold = s.threshold;
        nodes_[id].gini_decrease = s.decrease;
        const int l = grow(left, depth + 1);
        nodes_[id].left = l;
        const int r = grow(right, depth + 1);
        nodes_[id].right = r;
        return id;
    }

    const RMatrix& x_;
    std::span<const int> y_;
    const RfParams& p_;
    std::vector<double> w_;
    std::mt19937_64 rng_;
    int mtry_ = 1;
    std::vector<TreeNode> nodes_;
};

}  // namespace

BestSplit best_gini_split(const RMatrix& x, std::span<const int> y, std::span<const double> weight,
                          std::span<const int> rows, std::span<const int> features, int min_leaf) {
    BestSplit best;
    double c[2] = {0.0, 0.0};
    for (int r : rows) c[y[r]] += weight[r];
    const double total = c[0] + c[1];
    if (!(total > 0.0)) return best;
    const double parent = gini2(c[0], c[1]);
    std::vector<int> sorted(rows.begin(), rows.end());
    for (int f : features) {
        std::stable_sort(sorted.begin(), sorted.end(), [&](int a, int b) { return x(a, f) < x(b, f); });
        double left[2] = {0.0, 0.0};
        for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
            const int r = sorted[k];
            left[y[r]] += weight[r];
            const double v = x(r, f), next = x(sorted[k + 1], f);
            if (!(next > v)) continue;
            const double wl = left[0] + left[1];
            const double wr = total - wl;
            if (wl < min_leaf || wr < min_leaf) continue;
            const double dec = parent - (wl / total) * gini2(left[0], left[1]) -
                               (wr / total) * gini2(c[0] - left[0], c[1] - left[1]);
            if (dec > best.decrease) {
                double thr = v + (next - v) / 2.0;
                if (!(thr < next)) thr = v;
                best = {f, thr, dec};
            }
        }
    }
    return best;
}

int DecisionTree::leaf_for(std::span<const double> x) const {
    int n = 0;
    while (nodes[n].feature >= 0) n = x[nodes[n].feature] <= nodes[n].threshold ? nodes[n].left : nodes[n].right;
    return n;
}

int DecisionTree::vote(std::span<const double> x) const {
    const TreeNode& leaf = nodes[leaf_for(x)];
    return leaf.counts[1] >= leaf.counts[0] ? 1 : 0;
}

RfModel rf_train(const RMatrix& x, std::span<const int> y, const RfParams& params) {
    const std::size_t n = x.rows();
    if (y.size() != n) throw InvalidInput("rf_train: label count mismatch");
    if (n < static_cast<std::size_t>(std::max(1, params.min_leaf))) throw InvalidInput("rf_train: fewer samples than min_leaf");
    if (params.n_trees < 1) throw InvalidInput("rf_train: n_trees must be >= 1");
    for (int v : y)
        if (v != 0 && v != 1) throw InvalidInput("rf_train: labels must be 0/1");

    RfModel model;
    model.n_features = static_cast<int>(x.cols());
    model.max_depth = params.max_depth;
    model.seed = params.seed;
    model.trees.resize(static_cast<std::size_t>(params.n_trees));

    // Each tree owns an independent stream, so the forest does not depend on
    // the worker count.
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < params.n_trees; ++t) {
        const std::uint64_t seed = derive_seed(params.seed, 0x72ee, static_cast<std::uint64_t>(t));
        std::vector<double> w(n, 1.0);
        if (params.bootstrap) {
            std::fill(w.begin(), w.end(), 0.0);
            std::mt19937_64 rng(derive_seed(seed, 0xb007, 0));
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (std::size_t k = 0; k < n; ++k) w[pick(rng)] += 1.0;
        }
        model.trees[static_cast<std::size_t>(t)] = TreeBuilder(x, y, params, std::move(w), seed).build();
    }

    std::size_t counted = 0, wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int votes = 0, trees = 0;
        for (const DecisionTree& tree : model.trees) {
            if (tree.in_bag[i] > 0) continue;
            ++trees;
            votes += tree.vote(x.row(i));
        }
        if (trees == 0) continue;
        ++counted;
        const int pred = 2 * votes >= trees ? 1 : 0;
        wrong += pred != y[i] ? 1 : 0;
    }
    model.oob_error = counted ? static_cast<double>(wrong) / static_cast<double>(counted)
                              : std::numeric_limits<double>::quiet_NaN();
    return model;
}

double rf_score(const RfModel& model, std::span<const double> x) {
    if (model.trees.empty()) throw InvalidInput("rf_score: empty forest");
    int votes = 0;
    for (const DecisionTree& t : model.trees) votes += t.vote(x);
    return static_cast<double>(votes) / static_cast<double>(model.trees.size());
}

}  // namespace ndt::ml
