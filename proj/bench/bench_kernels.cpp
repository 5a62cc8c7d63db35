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

// Serial reference vs OpenMP kernels. Set OMP_NUM_THREADS to compare worker
// counts.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "ndtlos/adcpm.hpp"
#include "ndtlos/kernels.hpp"
#include "ndtlos/pipeline.hpp"

using namespace ndt;

namespace {

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v) x = g(rng);
    return v;
}

// Second stage of resnet_mini on a batch of 32 desk-profile images.
dl::ConvGeom stage_conv() {
    dl::ConvGeom g;
    g.n = 32;
    g.cin = g.cout = 16;
    g.hin = g.hout = 2;
    g.win = g.wout = 8;
    g.kh = g.kw = 3;
    g.ph = g.pw = 1;
    return g;
}

// Stem of resnet34_reference at the full-resolution input.
dl::ConvGeom stem_conv() {
    dl::ConvGeom g;
    g.n = 1;
    g.cin = 1;
    g.hin = 128;
    g.win = 512;
    g.cout = 64;
    g.hout = 64;
    g.wout = 256;
    g.kh = g.kw = 7;
    g.sh = g.sw = 2;
    g.ph = g.pw = 3;
    return g;
}

struct ConvData {
    std::vector<double> x, w, b, y, dy, dw, db, dx;
    explicit ConvData(const dl::ConvGeom& g)
        : x(random_vec(static_cast<std::size_t>(g.n) * g.cin * g.hin * g.win, 1)),
          w(random_vec(static_cast<std::size_t>(g.cout) * g.cin * g.kh * g.kw, 2)),
          b(random_vec(static_cast<std::size_t>(g.cout), 3)),
          y(static_cast<std::size_t>(g.n) * g.cout * g.hout * g.wout),
          dy(random_vec(y.size(), 4)),
          dw(w.size()),
          db(b.size()),
          dx(x.size()) {}
};

using ConvForward = void (*)(const dl::ConvGeom&, const double*, const double*, const double*, double*);
using ConvBackward = void (*)(const dl::ConvGeom&, const double*, const double*, const double*, double*, double*,
                              double*);
using DenseForward = void (*)(const dl::DenseGeom&, const double*, const double*, const double*, double*);

void conv_forward(benchmark::State& state, ConvForward forward, dl::ConvGeom g) {
    ConvData d(g);
    for (auto _ : state) {
        forward(g, d.x.data(), d.w.data(), d.b.data(), d.y.data());
        benchmark::DoNotOptimize(d.y.data());
    }
    state.counters["MAC/s"] = benchmark::Counter(
        static_cast<double>(d.y.size()) * g.cin * g.kh * g.kw * static_cast<double>(state.iterations()),
        benchmark::Counter::kIsRate);
}

void conv_backward(benchmark::State& state, ConvBackward backward, dl::ConvGeom g) {
    ConvData d(g);
    for (auto _ : state) {
        backward(g, d.x.data(), d.w.data(), d.dy.data(), d.dw.data(), d.db.data(), d.dx.data());
        benchmark::DoNotOptimize(d.dx.data());
    }
}

void dense_forward(benchmark::State& state, DenseForward forward) {
    const dl::DenseGeom g{64, 512, 256};
    const auto x = random_vec(static_cast<std::size_t>(g.n) * g.fan_in, 5);
    const auto w = random_vec(static_cast<std::size_t>(g.fan_in) * g.fan_out, 6);
    const auto b = random_vec(static_cast<std::size_t>(g.fan_out), 7);
    std::vector<double> y(static_cast<std::size_t>(g.n) * g.fan_out);
    for (auto _ : state) {
        forward(g, x.data(), w.data(), b.data(), y.data());
        benchmark::DoNotOptimize(y.data());
    }
}

void angle_delay(benchmark::State& state, bool parallel, const char* profile) {
    const pipeline::Profile p = pipeline::profile_by_name(profile);
    const adcpm::AngleDelayTransform t(p.array, p.ofdm);
    CMatrix h(static_cast<std::size_t>(p.array.size()), static_cast<std::size_t>(p.ofdm.n_subcarriers));
    const auto re = random_vec(h.size(), 8), im = random_vec(h.size(), 9);
    for (std::size_t i = 0; i < h.size(); ++i) h.values()[i] = {re[i], im[i]};
    for (auto _ : state) {
        CMatrix g = parallel ? t.apply(h) : t.apply_serial(h);
        benchmark::DoNotOptimize(g.values().data());
    }
}

}  // namespace

BENCHMARK_CAPTURE(conv_forward, reference_stage, dl::reference::conv2d_forward, stage_conv());
BENCHMARK_CAPTURE(conv_forward, openmp_stage, dl::kernels::conv2d_forward, stage_conv());
BENCHMARK_CAPTURE(conv_backward, reference_stage, dl::reference::conv2d_backward, stage_conv());
BENCHMARK_CAPTURE(conv_backward, openmp_stage, dl::kernels::conv2d_backward, stage_conv());
BENCHMARK_CAPTURE(conv_forward, reference_stem, dl::reference::conv2d_forward, stem_conv())->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(conv_forward, openmp_stem, dl::kernels::conv2d_forward, stem_conv())->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(dense_forward, reference, dl::reference::dense_forward);
BENCHMARK_CAPTURE(dense_forward, openmp, dl::kernels::dense_forward);
BENCHMARK_CAPTURE(angle_delay, serial_desk, false, "desk");
BENCHMARK_CAPTURE(angle_delay, openmp_desk, true, "desk");
BENCHMARK_CAPTURE(angle_delay, serial_full, false, "full")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(angle_delay, openmp_full, true, "full")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
