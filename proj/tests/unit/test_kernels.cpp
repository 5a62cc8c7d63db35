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

#include <random>
#include <tuple>

#include <omp.h>

#include "doctest.h"
#include "ndtlos/kernels.hpp"

using namespace ndt::dl;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = g(rng);
    return v;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 1e-300, err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(b[i]));
        err = std::max(err, std::abs(a[i] - b[i]));
    }
    return err / scale;
}

ConvGeom geometry(int n, int cin, int h, int w, int cout, int k, int s, int p) {
    ConvGeom g{n, cin, h, w, cout, 0, 0, k, k, s, s, p, p};
    g.hout = (h + 2 * p - k) / s + 1;
    g.wout = (w + 2 * p - k) / s + 1;
    return g;
}

struct ConvRun {
    std::vector<double> out, dw, db, din;
};

ConvRun run_conv(bool reference, const ConvGeom& g, const std::vector<double>& x, const std::vector<double>& w,
                 const std::vector<double>& b, const std::vector<double>& dy) {
    ConvRun r;
    r.out.assign(static_cast<std::size_t>(g.n) * g.cout * g.hout * g.wout, 0.0);
    r.dw.assign(w.size(), 0.5);  // backward accumulates into existing values
    r.db.assign(b.size(), 0.25);
    r.din.assign(x.size(), -1.0);
    if (reference) {
        reference::conv2d_forward(g, x.data(), w.data(), b.data(), r.out.data());
        reference::conv2d_backward(g, x.data(), w.data(), dy.data(), r.dw.data(), r.db.data(), r.din.data());
    } else {
        kernels::conv2d_forward(g, x.data(), w.data(), b.data(), r.out.data());
        kernels::conv2d_backward(g, x.data(), w.data(), dy.data(), r.dw.data(), r.db.data(), r.din.data());
    }
    return r;
}

}  // namespace

TEST_CASE("parallel conv kernels agree with the serial reference") {
    std::mt19937_64 rng(61);
    const ConvGeom cases[] = {
        geometry(2, 1, 8, 32, 4, 7, 2, 3), geometry(3, 5, 6, 9, 7, 3, 1, 1), geometry(4, 16, 1, 1, 32, 3, 1, 1),
        geometry(2, 3, 5, 5, 2, 1, 2, 0),  geometry(1, 2, 7, 4, 3, 3, 2, 1), geometry(32, 32, 2, 8, 32, 3, 1, 1),
    };
    for (const ConvGeom& g : cases) {
        const auto x = random_vec(rng, static_cast<std::size_t>(g.n) * g.cin * g.hin * g.win);
        const auto w = random_vec(rng, static_cast<std::size_t>(g.cout) * g.cin * g.kh * g.kw);
        const auto b = random_vec(rng, static_cast<std::size_t>(g.cout));
        const auto dy = random_vec(rng, static_cast<std::size_t>(g.n) * g.cout * g.hout * g.wout);
        const ConvRun want = run_conv(true, g, x, w, b, dy), got = run_conv(false, g, x, w, b, dy);
        CHECK(max_rel(got.out, want.out) <= 1e-12);
        CHECK(max_rel(got.dw, want.dw) <= 1e-12);
        CHECK(max_rel(got.db, want.db) <= 1e-12);
        CHECK(max_rel(got.din, want.din) <= 1e-12);
    }
}

TEST_CASE("parallel conv kernels are bitwise independent of the worker count") {
    std::mt19937_64 rng(62);
    const ConvGeom g = geometry(16, 16, 4, 16, 32, 3, 1, 1);
    const auto x = random_vec(rng, static_cast<std::size_t>(g.n) * g.cin * g.hin * g.win);
    const auto w = random_vec(rng, static_cast<std::size_t>(g.cout) * g.cin * 9);
    const auto b = random_vec(rng, static_cast<std::size_t>(g.cout));
    const auto dy = random_vec(rng, static_cast<std::size_t>(g.n) * g.cout * g.hout * g.wout);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const ConvRun one = run_conv(false, g, x, w, b, dy);
    omp_set_num_threads(3);
    const ConvRun three = run_conv(false, g, x, w, b, dy);
    omp_set_num_threads(saved);
    CHECK(one.out == three.out);
    CHECK(one.dw == three.dw);
    CHECK(one.db == three.db);
    CHECK(one.din == three.din);
}

TEST_CASE("conv without bias or input gradient") {
    std::mt19937_64 rng(63);
    const ConvGeom g = geometry(2, 3, 4, 4, 2, 3, 1, 1);
    const auto x = random_vec(rng, 2 * 3 * 16), w = random_vec(rng, 2 * 3 * 9), dy = random_vec(rng, 2 * 2 * 16);
    std::vector<double> a(2 * 2 * 16), b(a.size()), dwa(w.size(), 0.0), dwb(w.size(), 0.0);
    kernels::conv2d_forward(g, x.data(), w.data(), nullptr, a.data());
    reference::conv2d_forward(g, x.data(), w.data(), nullptr, b.data());
    CHECK(max_rel(a, b) <= 1e-12);
    kernels::conv2d_backward(g, x.data(), w.data(), dy.data(), dwa.data(), nullptr, nullptr);
    reference::conv2d_backward(g, x.data(), w.data(), dy.data(), dwb.data(), nullptr, nullptr);
    CHECK(max_rel(dwa, dwb) <= 1e-12);
}

TEST_CASE("parallel dense kernels agree with the serial reference") {
    std::mt19937_64 rng(64);
    for (auto [n, fin, fout] : {std::tuple{1, 1, 1}, std::tuple{7, 13, 5}, std::tuple{64, 128, 1}, std::tuple{33, 200, 190}}) {
        const DenseGeom g{n, fin, fout};
        const auto x = random_vec(rng, static_cast<std::size_t>(n) * fin);
        const auto w = random_vec(rng, static_cast<std::size_t>(fin) * fout);
        const auto b = random_vec(rng, static_cast<std::size_t>(fout));
        const auto dy = random_vec(rng, static_cast<std::size_t>(n) * fout);
        std::vector<double> o1(static_cast<std::size_t>(n) * fout), o2(o1.size());
        std::vector<double> dw1(w.size(), 0.1), dw2(w.size(), 0.1), db1(b.size(), 0.0), db2(b.size(), 0.0);
        std::vector<double> dx1(x.size(), 0.0), dx2(x.size(), 0.0);
        kernels::dense_forward(g, x.data(), w.data(), b.data(), o1.data());
        reference::dense_forward(g, x.data(), w.data(), b.data(), o2.data());
        kernels::dense_backward(g, x.data(), w.data(), dy.data(), dw1.data(), db1.data(), dx1.data());
        reference::dense_backward(g, x.data(), w.data(), dy.data(), dw2.data(), db2.data(), dx2.data());
        CHECK(max_rel(o1, o2) <= 1e-12);
        CHECK(max_rel(dw1, dw2) <= 1e-12);
        CHECK(max_rel(db1, db2) <= 1e-12);
        CHECK(max_rel(dx1, dx2) <= 1e-12);
    }
}
