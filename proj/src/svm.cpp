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
#include <deque>
#include <limits>
#include <numeric>
#include <random>

#include "ndtlos/classic_ml.hpp"

namespace ndt::ml {

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
    if (type == KernelType::linear) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return std::exp(-gamma * d2);
}

namespace {

constexpr double kTau = 1e-12;

// Q_ij = y_i y_j k(x_i, x_j), rows computed lazily and kept up to a budget.
class QMatrix {
public:
    QMatrix(const RMatrix& x, std::span<const int> y, const Kernel& k)
        : x_(x), y_(y), k_(k), rows_(x.rows()), diag_(x.rows()) {
        const std::size_t n = x.rows();
        capacity_ = std::max<std::size_t>(2, (std::size_t{256} << 20) / (sizeof(double) * std::max<std::size_t>(n, 1)));
        for (std::size_t i = 0; i < n; ++i) diag_[i] = k_(x_.row(i), x_.row(i));
    }

    const std::vector<double>& row(std::size_t i) {
        if (rows_[i].empty()) {
            if (order_.size() >= capacity_) {
                rows_[order_.front()].clear();
                rows_[order_.front()].shrink_to_fit();
                order_.pop_front();
            }
            const std::size_t n = x_.rows();
            rows_[i].resize(n);
            for (std::size_t j = 0; j < n; ++j) rows_[i][j] = y_[i] * y_[j] * k_(x_.row(i), x_.row(j));
            order_.push_back(i);
        }
        return rows_[i];
    }

    double diag(std::size_t i) const { return diag_[i]; }

private:
    const RMatrix& x_;
    std::span<const int> y_;
    Kernel k_;
    std::vector<std::vector<double>> rows_;
    std::vector<double> diag_;
    std::deque<std::size_t> order_;
    std::size_t capacity_;
};

}  // namespace

SvmModel svm_train(const RMatrix& x, std::span<const int> y, const SvmParams& params, std::vector<double>* all_alpha) {
    const std::size_t n = x.rows();
    if (y.size() != n) throw InvalidInput("svm_train: label count mismatch");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v == 1) has_pos = true;
        else if (v == -1) has_neg = true;
        else throw InvalidInput("svm_train: labels must be +-1");
    }
    if (!has_pos || !has_neg) throw InvalidInput("svm_train: both classes are required");
    if (!(params.C > 0.0)) throw InvalidInput("svm_train: C must be positive");

    const double C = params.C;
    QMatrix q(x, y, params.kernel);
    std::vector<double> alpha(n, 0.0), grad(n, -1.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(params.seed);
    std::shuffle(order.begin(), order.end(), rng);

    auto in_up = [&](std::size_t t) { return (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0.0); };
    auto in_low = [&](std::size_t t) { return (y[t] == -1 && alpha[t] < C) || (y[t] == 1 && alpha[t] > 0.0); };

    long iter = 0;
    for (; iter < params.max_iter; ++iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t : order)
            if (in_up(t) && -y[t] * grad[t] > gmax) {
                gmax = -y[t] * grad[t];
                i = t;
            }
        if (i == n) break;
        const std::vector<double>& qi = q.row(i);
        double gmin = std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t : order) {
            if (!in_low(t)) continue;
            const double v = -y[t] * grad[t];
            gmin = std::min(gmin, v);
            const double b = gmax - v;
            if (b > 0.0) {
                double a = q.diag(i) + q.diag(t) - 2.0 * y[i] * y[t] * qi[t];
                if (a <= 0.0) a = kTau;
                const double obj = -(b * b) / a;
                if (obj < best) {
                    best = obj;
                    j = t;
                }
            }
        }
        if (gmax - gmin < params.tol || j == n) break;

        const std::vector<double>& qj = q.row(j);
        const std::vector<double>& qi2 = q.row(i);  // row(j) may have evicted row(i)
        const double old_i = alpha[i], old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = q.diag(i) + q.diag(j) + 2.0 * qi2[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = C - diff;
                }
            } else if (alpha[j] > C) {
                alpha[j] = C;
                alpha[i] = C + diff;
            }
        } else {
            double quad = q.diag(i) + q.diag(j) - 2.0 * qi2[j];
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > C) {
                if (alpha[i] > C) {
                    alpha[i] = C;
                    alpha[j] = sum - C;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > C) {
                if (alpha[j] > C) {
                    alpha[j] = C;
                    alpha[i] = sum - C;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) grad[t] += qi2[t] * di + qj[t] * dj;
    }

    // rho: mean of y G over free vectors, else midpoint of the feasible interval
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
    long n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= C) {
            if (y[t] == -1) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] == 1) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

    SvmModel model;
    model.kernel = params.kernel;
    model.C = C;
    model.bias = -rho;
    model.iterations = iter;
    std::size_t n_sv = 0;
    for (double a : alpha) n_sv += a > 0.0 ? 1 : 0;
    model.support_vectors = RMatrix(n_sv, x.cols());
    std::size_t k = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (!(alpha[t] > 0.0)) continue;
        std::copy(x.row(t).begin(), x.row(t).end(), model.support_vectors.row(k).begin());
        model.alpha.push_back(alpha[t]);
        model.sv_label.push_back(y[t]);
        ++k;
    }
    if (all_alpha) *all_alpha = std::move(alpha);
    return model;
}

double svm_score(const SvmModel& model, std::span<const double> x) {
    double s = model.bias;
    for (std::size_t i = 0; i < model.alpha.size(); ++i)
        s += model.alpha[i] * model.sv_label[i] * model.kernel(model.support_vectors.row(i), x);
    return s;
}

double svm_dual_objective(const RMatrix& x, std::span<const int> y, const Kernel& kernel, std::span<const double> alpha) {
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        lin += alpha[i];
        if (alpha[i] == 0.0) continue;
        for (std::size_t j = 0; j < x.rows(); ++j)
            if (alpha[j] != 0.0) quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel(x.row(i), x.row(j));
    }
    return lin - 0.5 * quad;
}

double default_rbf_gamma(const RMatrix& x) {
    if (x.empty()) return 1.0;
    double mean = 0.0;
    for (double v : x.values()) mean += v;
    mean /= static_cast<double>(x.size());
    double var = 0.0;
    for (double v : x.values()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(x.size());
    if (!(var > 0.0)) return 1.0;
    return 1.0 / (static_cast<double>(x.cols()) * var);
}

}  // namespace ndt::ml
