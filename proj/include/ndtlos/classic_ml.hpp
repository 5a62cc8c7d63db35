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

#ifndef NDTLOS_CLASSIC_ML_HPP
#define NDTLOS_CLASSIC_ML_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ndtlos/common.hpp"

namespace ndt::ml {

// 1 - sum p_z^2. Throws InvalidInput when every count is zero.
double gini(std::span<const double> class_counts);

enum class KernelType { linear, rbf };

struct Kernel {
    KernelType type = KernelType::linear;
    double gamma = 1.0;

    double operator()(std::span<const double> a, std::span<const double> b) const;
};

struct SvmParams {
    Kernel kernel;
    double C = 1.0;
    double tol = 1e-3;
    std::uint64_t seed = 0;  // tie-break order of the working-set search
    long max_iter = 10'000'000;
};

struct SvmModel {
    Kernel kernel;
    double C = 1.0;
    RMatrix support_vectors;    // one row per support vector
    std::vector<double> alpha;  // dual coefficients in [0, C]
    std::vector<int> sv_label;  // +-1
    double bias = 0.0;
    long iterations = 0;

    friend bool operator==(const SvmModel& a, const SvmModel& b) {
        return a.kernel.type == b.kernel.type && a.kernel.gamma == b.kernel.gamma && a.C == b.C &&
               a.support_vectors == b.support_vectors && a.alpha == b.alpha && a.sv_label == b.sv_label &&
               a.bias == b.bias;
    }
};

// Soft-margin dual solved by SMO with second-order working-set selection.
// Labels are +-1; both classes must be present. Also returns the full alpha
// vector (one entry per training sample) when `all_alpha` is given.
SvmModel svm_train(const RMatrix& x, std::span<const int> y, const SvmParams& params,
                   std::vector<double>* all_alpha = nullptr);

double svm_score(const SvmModel& model, std::span<const double> x);

// sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j k(x_i, x_j)
double svm_dual_objective(const RMatrix& x, std::span<const int> y, const Kernel& kernel,
                          std::span<const double> alpha);

// Default RBF gamma 1 / (d * var(X)) over all entries.
double default_rbf_gamma(const RMatrix& x);

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1, right = -1;
    double counts[2] = {0.0, 0.0};
    double gini_decrease = 0.0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // root at index 0
    std::vector<int> in_bag;      // bootstrap multiplicity per training sample

    int leaf_for(std::span<const double> x) const;
    int vote(std::span<const double> x) const;
};

struct RfParams {
    int n_trees = 100;
    int max_depth = 12;
    int min_leaf = 2;
    int max_features = 0;  // 0 selects floor(sqrt(d))
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct RfModel {
    std::vector<DecisionTree> trees;
    int n_features = 0;
    int max_depth = 0;
    std::uint64_t seed = 0;
    double oob_error = 0.0;  // NaN when no sample is ever out of bag
};

// Binary labels 0/1.
RfModel rf_train(const RMatrix& x, std::span<const int> y, const RfParams& params);

// Fraction of trees voting class 1.
double rf_score(const RfModel& model, std::span<const double> x);

struct BestSplit {
    int feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;
};

// Exhaustive midpoint scan over `features` for the weighted samples.
BestSplit best_gini_split(const RMatrix& x, std::span<const int> y, std::span<const double> weight,
                          std::span<const int> rows, std::span<const int> features, int min_leaf);

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

std::vector<Fold> kfold(std::size_t n, int k, std::uint64_t seed);

}  // namespace ndt::ml

#endif  // NDTLOS_CLASSIC_ML_HPP
