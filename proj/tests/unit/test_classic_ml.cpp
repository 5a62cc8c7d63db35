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
#include <set>

#include <omp.h>

#include "doctest.h"
#include "ndtlos/checkpoint.hpp"
#include "ndtlos/classic_ml.hpp"
#include "oracles.hpp"

using namespace ndt;
using namespace ndt::ml;

namespace {

// Two overlapping Gaussian blobs, labels +-1.
void blobs(std::mt19937_64& rng, std::size_t n, std::size_t d, double sep, RMatrix& x, std::vector<int>& y) {
    std::normal_distribution<double> g(0.0, 1.0);
    x = RMatrix(n, d);
    y.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = i % 2 ? 1 : -1;
        for (std::size_t k = 0; k < d; ++k) x(i, k) = g(rng) + (k == 0 ? sep * y[i] : 0.0);
    }
}

std::vector<int> to01(const std::vector<int>& y) {
    std::vector<int> out(y.size());
    std::transform(y.begin(), y.end(), out.begin(), [](int v) { return v > 0 ? 1 : 0; });
    return out;
}

}  // namespace

TEST_CASE("gini unit values") {
    CHECK(gini(std::vector<double>{4.0, 0.0}) == 0.0);
    CHECK(gini(std::vector<double>{2.0, 2.0}) == 0.5);
    CHECK(gini(std::vector<double>{3.0, 1.0}) == 0.375);
    CHECK_THROWS_AS(gini(std::vector<double>{0.0, 0.0}), InvalidInput);
}

TEST_CASE("kernels") {
    const std::vector<double> a{1.0, 2.0}, b{0.0, 4.0};
    CHECK(Kernel{KernelType::linear, 1.0}(a, b) == 8.0);
    CHECK(Kernel{KernelType::rbf, 0.5}(a, b) == doctest::Approx(std::exp(-2.5)));
}

TEST_CASE("SVM satisfies the dual constraints and KKT conditions") {
    std::mt19937_64 rng(51);
    for (KernelType kt : {KernelType::linear, KernelType::rbf}) {
        RMatrix x;
        std::vector<int> y;
        blobs(rng, 60, 3, 1.0, x, y);
        SvmParams p;
        p.kernel = {kt, 0.3};
        p.C = 2.0;
        p.tol = 1e-4;
        std::vector<double> alpha;
        const SvmModel m = svm_train(x, y, p, &alpha);
        double balance = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            CHECK(alpha[i] >= 0.0);
            CHECK(alpha[i] <= p.C);
            balance += alpha[i] * y[i];
            const double margin = y[i] * svm_score(m, x.row(i));
            const double slack = 10 * p.tol;
            if (alpha[i] == 0.0) CHECK(margin >= 1.0 - slack);
            else if (alpha[i] == p.C) CHECK(margin <= 1.0 + slack);
            else CHECK(std::abs(margin - 1.0) <= slack);
        }
        CHECK(std::abs(balance) <= 1e-6);
    }
}

TEST_CASE("SVM dual objective matches a projected-gradient solve") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 5; ++trial) {
        RMatrix x;
        std::vector<int> y;
        blobs(rng, 20, 2, 0.8, x, y);
        for (const Kernel k : {Kernel{KernelType::linear, 1.0}, Kernel{KernelType::rbf, 0.7}}) {
            SvmParams p;
            p.kernel = k;
            p.C = 1.0;
            p.tol = 1e-6;
            std::vector<double> alpha;
            svm_train(x, y, p, &alpha);
            const double got = svm_dual_objective(x, y, k, alpha);
            const double want =
                oracle::projected_gradient_svm_dual(x, y, p.C, k.type == KernelType::rbf ? k.gamma : 0.0, 20000);
            CHECK(std::abs(got - want) <= 1e-4 * std::abs(want));
        }
    }
}

TEST_CASE("SVM ignores an all-zero feature column") {
    std::mt19937_64 rng(53);
    RMatrix x;
    std::vector<int> y;
    blobs(rng, 40, 2, 1.5, x, y);
    RMatrix wide(x.rows(), 3);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        wide(i, 0) = x(i, 0);
        wide(i, 1) = 0.0;
        wide(i, 2) = x(i, 1);
    }
    SvmParams p;
    p.kernel = {KernelType::rbf, 0.5};
    const SvmModel a = svm_train(x, y, p), b = svm_train(wide, y, p);
    for (std::size_t i = 0; i < x.rows(); ++i)
        CHECK(svm_score(a, x.row(i)) == doctest::Approx(svm_score(b, wide.row(i))).epsilon(1e-9));
}

TEST_CASE("SVM separates separable data and rejects bad labels") {
    RMatrix x(4, 1);
    x.values() = {-2.0, -1.0, 1.0, 2.0};
    const std::vector<int> y{-1, -1, 1, 1};
    SvmParams p;
    p.C = 100.0;
    const SvmModel m = svm_train(x, y, p);
    for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] * svm_score(m, x.row(i)) >= 1.0 - 1e-3);
    CHECK(svm_score(m, std::vector<double>{0.0}) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK_THROWS_AS(svm_train(x, std::vector<int>{1, 1, 1, 1}, p), InvalidInput);
    CHECK_THROWS_AS(svm_train(x, std::vector<int>{0, 0, 1, 1}, p), InvalidInput);
}

TEST_CASE("default RBF gamma") {
    RMatrix x(2, 2);
    x.values() = {0.0, 0.0, 2.0, 2.0};
    CHECK(default_rbf_gamma(x) == doctest::Approx(1.0 / (2.0 * 1.0)));
}

TEST_CASE("best split matches an exhaustive scan on clustered data") {
    std::mt19937_64 rng(54);
    std::uniform_int_distribution<int> q(0, 40);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 60;
        RMatrix x(n, 1);
        std::vector<int> y(n);
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = i < n / 2 ? 0 : 1;
            // quarter-step values keep midpoints exact
            col[i] = x(i, 0) = 0.25 * q(rng) + (y[i] ? 6.0 : 0.0) + (i % 7 == 0 ? 3.0 : 0.0);
        }
        std::vector<double> w(n, 1.0);
        std::vector<int> rows(n), feats{0};
        std::iota(rows.begin(), rows.end(), 0);
        const BestSplit got = best_gini_split(x, y, w, rows, feats, 1);
        const oracle::GiniSplit want = oracle::exhaustive_gini_1d(col, y, 1);
        REQUIRE(want.found);
        CHECK(got.feature == 0);
        CHECK(got.threshold == want.threshold);
        CHECK(got.decrease == doctest::Approx(want.decrease).epsilon(1e-12));
    }
}

TEST_CASE("random forest structure") {
    std::mt19937_64 rng(55);
    RMatrix x;
    std::vector<int> ypm;
    blobs(rng, 200, 4, 1.0, x, ypm);
    const std::vector<int> y = to01(ypm);
    RfParams p;
    p.n_trees = 25;
    p.seed = 9;
    const RfModel m = rf_train(x, y, p);
    CHECK(m.trees.size() == 25);
    CHECK(std::isfinite(m.oob_error));
    CHECK(m.oob_error >= 0.0);
    CHECK(m.oob_error < 0.5);

    for (const DecisionTree& t : m.trees) {
        // Re-route the bootstrap sample and rebuild every node's counts.
        std::vector<std::array<double, 2>> counts(t.nodes.size(), {0.0, 0.0});
        for (std::size_t i = 0; i < x.rows(); ++i) {
            if (t.in_bag[i] == 0) continue;
            int node = 0;
            for (;;) {
                counts[static_cast<std::size_t>(node)][static_cast<std::size_t>(y[i])] += t.in_bag[i];
                const TreeNode& tn = t.nodes[static_cast<std::size_t>(node)];
                if (tn.feature < 0) break;
                node = x(i, static_cast<std::size_t>(tn.feature)) <= tn.threshold ? tn.left : tn.right;
            }
        }
        for (std::size_t k = 0; k < t.nodes.size(); ++k) {
            const TreeNode& tn = t.nodes[k];
            CHECK(tn.counts[0] == counts[k][0]);
            CHECK(tn.counts[1] == counts[k][1]);
            CHECK(tn.counts[0] >= 0.0);
            CHECK(tn.counts[1] >= 0.0);
            if (tn.feature >= 0) CHECK(tn.gini_decrease > 0.0);
        }
    }
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double s = rf_score(m, x.row(i));
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
}

TEST_CASE("random forest does not depend on the worker count") {
    std::mt19937_64 rng(56);
    RMatrix x;
    std::vector<int> ypm;
    blobs(rng, 120, 3, 1.0, x, ypm);
    const std::vector<int> y = to01(ypm);
    RfParams p;
    p.n_trees = 16;
    p.seed = 3;
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const RfModel a = rf_train(x, y, p);
    omp_set_num_threads(4);
    const RfModel b = rf_train(x, y, p);
    omp_set_num_threads(saved);
    io::BinaryWriter wa, wb;
    io::write_rf(wa, a);
    io::write_rf(wb, b);
    CHECK(wa.bytes() == wb.bytes());
}

TEST_CASE("a single unbagged stump splits at the exhaustive optimum") {
    RMatrix x(8, 1);
    x.values() = {0.0, 0.5, 1.0, 1.5, 4.0, 4.5, 5.0, 5.5};
    const std::vector<int> y{0, 0, 0, 1, 1, 1, 1, 1};
    RfParams p;
    p.n_trees = 1;
    p.bootstrap = false;
    p.max_depth = 1;
    p.min_leaf = 1;
    const RfModel m = rf_train(x, y, p);
    const oracle::GiniSplit want = oracle::exhaustive_gini_1d(x.values(), y, 1);
    CHECK(m.trees[0].nodes[0].threshold == want.threshold);
    CHECK(want.threshold == 1.25);
}

TEST_CASE("random forest input checks") {
    RMatrix x(3, 1);
    RfParams p;
    CHECK_THROWS_AS(rf_train(x, std::vector<int>{0, 1}, p), InvalidInput);
    CHECK_THROWS_AS(rf_train(x, std::vector<int>{0, 1, 2}, p), InvalidInput);
    p.n_trees = 0;
    CHECK_THROWS_AS(rf_train(x, std::vector<int>{0, 1, 1}, p), InvalidInput);
}

TEST_CASE("k-fold partitions the index set") {
    const auto folds = kfold(23, 5, 7);
    REQUIRE(folds.size() == 5);
    std::multiset<std::size_t> seen;
    for (const Fold& f : folds) {
        CHECK(f.train.size() + f.validation.size() == 23);
        CHECK((f.validation.size() == 4 || f.validation.size() == 5));
        seen.insert(f.validation.begin(), f.validation.end());
        std::vector<std::size_t> both;
        std::set_intersection(f.train.begin(), f.train.end(), f.validation.begin(), f.validation.end(),
                              std::back_inserter(both));
        CHECK(both.empty());
    }
    CHECK(seen.size() == 23);
    CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == 23);
    CHECK_THROWS_AS(kfold(3, 5, 1), InvalidInput);
    CHECK_THROWS_AS(kfold(10, 1, 1), InvalidInput);
}

TEST_CASE("classic checkpoints round-trip") {
    std::mt19937_64 rng(57);
    RMatrix x;
    std::vector<int> y;
    blobs(rng, 30, 2, 1.0, x, y);
    const SvmModel svm = svm_train(x, y, {});
    io::BinaryWriter w;
    io::write_header(w, io::ModelFamily::svm);
    io::write_svm(w, svm);
    io::BinaryReader r(w.take());
    CHECK(io::read_header(r) == io::ModelFamily::svm);
    CHECK(io::read_svm(r) == svm);
    CHECK(r.at_end());

    RfParams p;
    p.n_trees = 5;
    const RfModel rf = rf_train(x, to01(y), p);
    io::BinaryWriter w2;
    io::write_rf(w2, rf);
    const std::string bytes = w2.bytes();
    io::BinaryReader r2(bytes);
    const RfModel back = io::read_rf(r2);
    io::BinaryWriter w3;
    io::write_rf(w3, back);
    CHECK(w3.bytes() == bytes);
    for (std::size_t i = 0; i < x.rows(); ++i) CHECK(rf_score(back, x.row(i)) == rf_score(rf, x.row(i)));

    io::BinaryReader truncated(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(io::read_rf(truncated), DataError);
    io::BinaryReader junk(std::string("XXXX\x01\x00\x01", 7));
    CHECK_THROWS_AS(io::read_header(junk), DataError);
}
