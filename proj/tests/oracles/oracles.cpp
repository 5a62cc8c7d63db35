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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace oracle {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 6.283185307179586476925;

CMatrix centered(int size) {
    CMatrix v(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            v(i, j) = std::polar(1.0 / std::sqrt(size), -kTwoPi * i * (j - size / 2.0) / size);
    return v;
}

double kernel(const RMatrix& x, std::size_t a, std::size_t b, double gamma) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.cols(); ++k) {
        const double d = gamma > 0.0 ? x(a, k) - x(b, k) : 0.0;
        s += gamma > 0.0 ? d * d : x(a, k) * x(b, k);
    }
    return gamma > 0.0 ? std::exp(-gamma * s) : s;
}

// Euclidean projection onto {0 <= a <= c, y'a = 0} by bisection on the
// multiplier of the equality constraint.
std::vector<double> project(const std::vector<double>& v, std::span<const int> y, double c) {
    auto at = [&](double lambda, std::vector<double>& a) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            a[i] = std::clamp(v[i] - lambda * y[i], 0.0, c);
            s += a[i] * y[i];
        }
        return s;
    };
    std::vector<double> a(v.size());
    double lo = -1e6, hi = 1e6;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (at(mid, a) > 0.0 ? lo : hi) = mid;
    }
    at(0.5 * (lo + hi), a);
    return a;
}

}  // namespace

CMatrix dense_angle_delay(const CMatrix& h, int n, int m, int nc) {
    const CMatrix vn = centered(n), vm = centered(m);
    const int nm = n * m;
    CMatrix kron(nm, nm);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) kron(a * m + c, b * m + d) = vn(a, b) * vm(c, d);
    CMatrix fconj(nc, nc);
    for (int i = 0; i < nc; ++i)
        for (int j = 0; j < nc; ++j) fconj(i, j) = std::polar(1.0 / std::sqrt(nc), kTwoPi * i * j / nc);

    CMatrix left(nm, nc);
    for (int r = 0; r < nm; ++r)
        for (int l = 0; l < nc; ++l) {
            cd s = 0.0;
            for (int k = 0; k < nm; ++k) s += std::conj(kron(k, r)) * h(k, l);
            left(r, l) = s;
        }
    CMatrix g(nm, nc);
    const double scale = 1.0 / std::sqrt(static_cast<double>(nm) * nc);
    for (int r = 0; r < nm; ++r)
        for (int l = 0; l < nc; ++l) {
            cd s = 0.0;
            for (int k = 0; k < nc; ++k) s += left(r, k) * fconj(k, l);
            g(r, l) = s * scale;
        }
    return g;
}

std::optional<ndt::geometry::PathComponent> aligned_path(const ndt::channel::ArrayConfig& array,
                                                         const ndt::channel::OfdmConfig& ofdm, int a, int b, int k) {
    // Column j of the centered DFT carries spatial frequency (j - size/2) / size.
    const double uv = (a - array.rows / 2.0) / array.rows;
    const double uh = (b - array.cols / 2.0) / array.cols;
    const double sin_el = uv / array.dv;
    if (std::abs(sin_el) > 1.0) return std::nullopt;
    const double el = std::asin(sin_el);
    const double sin_az = uh / (array.dh * std::cos(el));
    if (std::abs(sin_az) > 1.0) return std::nullopt;
    ndt::geometry::PathComponent p;
    p.gain = 1e-5;
    p.elevation = el;
    p.azimuth = std::asin(sin_az);
    p.delay = k / ofdm.bandwidth;
    p.bounces = 0;
    return p;
}

double pairwise_auc(std::span<const double> scores, std::span<const int> labels) {
    double num = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1.0;
            num += scores[i] > scores[j] ? 1.0 : (scores[i] == scores[j] ? 0.5 : 0.0);
        }
    }
    return num / pairs;
}

double projected_gradient_svm_dual(const RMatrix& x, std::span<const int> y, double c, double kernel_gamma,
                                   int iterations) {
    const std::size_t n = x.rows();
    RMatrix q(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) = y[i] * y[j] * kernel(x, i, j, kernel_gamma);

    // Step 1 / L with L bounded by the largest row sum.
    double lip = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::abs(q(i, j));
        lip = std::max(lip, s);
    }
    const double step = 1.0 / lip;

    auto objective = [&](const std::vector<double>& a) {
        double lin = 0.0, quad = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lin += a[i];
            for (std::size_t j = 0; j < n; ++j) quad += a[i] * a[j] * q(i, j);
        }
        return lin - 0.5 * quad;
    };

    std::vector<double> a(n, 0.0), prev = a, z = a;
    double t = 1.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            double grad = 1.0;
            for (std::size_t j = 0; j < n; ++j) grad -= q(i, j) * z[j];
            v[i] = z[i] + step * grad;
        }
        prev = a;
        a = project(v, y, c);
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t i = 0; i < n; ++i) z[i] = a[i] + (t - 1.0) / tn * (a[i] - prev[i]);
        t = tn;
    }
    return objective(a);
}

GiniSplit exhaustive_gini_1d(std::span<const double> x, std::span<const int> y, int min_leaf) {
    auto impurity = [](double n0, double n1) {
        const double t = n0 + n1;
        return t > 0.0 ? 1.0 - (n0 / t) * (n0 / t) - (n1 / t) * (n1 / t) : 0.0;
    };
    std::vector<double> values(x.begin(), x.end());
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    double n0 = 0.0, n1 = 0.0;
    for (int v : y) (v ? n1 : n0) += 1.0;
    const double total = n0 + n1;
    const double parent = impurity(n0, n1);

    GiniSplit best;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        const double thr = (values[k] + values[k + 1]) / 2.0;
        double l0 = 0.0, l1 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] <= thr) (y[i] ? l1 : l0) += 1.0;
        const double wl = l0 + l1, wr = total - wl;
        if (wl < min_leaf || wr < min_leaf) continue;
        const double dec = parent - wl / total * impurity(l0, l1) - wr / total * impurity(n0 - l0, n1 - l1);
        if (dec > best.decrease) best = {thr, dec, true};
    }
    return best;
}

GradCheck check_network_gradient(ndt::dl::Network& net, const ndt::dl::Tensor& x, bool training,
                                 std::size_t max_coords, std::uint64_t seed, double step) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto& spec = net.spec();

    std::vector<double> c(static_cast<std::size_t>(x.n));
    for (double& v : c) v = gauss(rng);
    ndt::dl::Tensor d;
    if (spec.recon_node >= 0) {
        d = ndt::dl::Tensor(x.n, spec.nodes[static_cast<std::size_t>(spec.recon_node)].out);
        for (double& v : d.data) v = gauss(rng);
    }

    auto loss = [&]() {
        ndt::dl::Workspace ws;
        net.forward(x, ws, training);
        const std::vector<double> p = net.probabilities(ws);
        double l = std::inner_product(p.begin(), p.end(), c.begin(), 0.0);
        if (const ndt::dl::Tensor* r = net.reconstruction(ws))
            l += std::inner_product(r->data.begin(), r->data.end(), d.data.begin(), 0.0);
        return l;
    };

    ndt::dl::Workspace ws;
    net.forward(x, ws, training);
    std::vector<double> grad(net.params().size(), 0.0);
    net.backward(x, ws, c, spec.recon_node >= 0 ? &d : nullptr, grad);

    std::vector<std::size_t> coords(grad.size());
    std::iota(coords.begin(), coords.end(), 0);
    if (coords.size() > max_coords) {
        std::shuffle(coords.begin(), coords.end(), rng);
        coords.resize(max_coords);
    }

    GradCheck out;
    for (std::size_t k : coords) {
        double& p = net.params()[k];
        const double saved = p;
        p = saved + step;
        const double up = loss();
        p = saved - step;
        const double down = loss();
        p = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double denom = std::max({std::abs(numeric), std::abs(grad[k]), 1e-6});
        out.max_rel_error = std::max(out.max_rel_error, std::abs(numeric - grad[k]) / denom);
        ++out.checked;
    }
    return out;
}

}  // namespace oracle
