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
#include <vector>

#include "ndtlos/kernels.hpp"

namespace ndt::dl::kernels {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr long kParallelWork = 1L << 15;
// Upper bound on the im2col buffer, in doubles.
constexpr long kColBudget = 1L << 21;

long conv_work(const ConvGeom& g) {
    return static_cast<long>(g.n) * g.cout * g.hout * g.wout * g.cin * g.kh * g.kw;
}

struct Chunking {
    int taps;   // cin * kh * kw
    int plane;  // hout * wout
    int per;    // samples per chunk
};

Chunking chunking(const ConvGeom& g) {
    Chunking c{g.cin * g.kh * g.kw, g.hout * g.wout, 1};
    const long per_sample = static_cast<long>(c.taps) * c.plane;
    c.per = static_cast<int>(std::clamp<long>(kColBudget / std::max(1L, per_sample), 1L, g.n));
    return c;
}

// col[k][s * plane + p] for samples [n0, n0 + cnt); padded taps are zero.
void im2col(const ConvGeom& g, const Chunking& c, const double* in, int n0, int cnt, double* col, bool parallel) {
    const long width = static_cast<long>(cnt) * c.plane;
    const long in_plane = static_cast<long>(g.hin) * g.win;
#pragma omp parallel for schedule(static) if (parallel)
    for (int k = 0; k < c.taps; ++k) {
        const int ci = k / (g.kh * g.kw);
        const int i = (k / g.kw) % g.kh;
        const int j = k % g.kw;
        double* row = col + k * width;
        for (int s = 0; s < cnt; ++s) {
            const double* x = in + (static_cast<long>(n0 + s) * g.cin + ci) * in_plane;
            double* dst = row + static_cast<long>(s) * c.plane;
            for (int oh = 0; oh < g.hout; ++oh) {
                const int ih = oh * g.sh - g.ph + i;
                double* d = dst + static_cast<long>(oh) * g.wout;
                if (ih < 0 || ih >= g.hin) {
                    std::fill(d, d + g.wout, 0.0);
                    continue;
                }
                const double* xr = x + static_cast<long>(ih) * g.win;
                for (int ow = 0; ow < g.wout; ++ow) {
                    const int iw = ow * g.sw - g.pw + j;
                    d[ow] = (iw >= 0 && iw < g.win) ? xr[iw] : 0.0;
                }
            }
        }
    }
}

// Adds dcol back into the input gradient; each (sample, channel) plane has one owner.
void col2im(const ConvGeom& g, const Chunking& c, const double* col, int n0, int cnt, double* din, bool parallel) {
    const long width = static_cast<long>(cnt) * c.plane;
    const long in_plane = static_cast<long>(g.hin) * g.win;
    const int kk = g.kh * g.kw;
#pragma omp parallel for collapse(2) schedule(static) if (parallel)
    for (int s = 0; s < cnt; ++s) {
        for (int ci = 0; ci < g.cin; ++ci) {
            double* dx = din + (static_cast<long>(n0 + s) * g.cin + ci) * in_plane;
            for (int t = 0; t < kk; ++t) {
                const int i = t / g.kw, j = t % g.kw;
                const double* src = col + static_cast<long>(ci * kk + t) * width + static_cast<long>(s) * c.plane;
                for (int oh = 0; oh < g.hout; ++oh) {
                    const int ih = oh * g.sh - g.ph + i;
                    if (ih < 0 || ih >= g.hin) continue;
                    double* xr = dx + static_cast<long>(ih) * g.win;
                    const double* d = src + static_cast<long>(oh) * g.wout;
                    for (int ow = 0; ow < g.wout; ++ow) {
                        const int iw = ow * g.sw - g.pw + j;
                        if (iw >= 0 && iw < g.win) xr[iw] += d[ow];
                    }
                }
            }
        }
    }
}

// Gathers dout for a chunk into [cout][cnt * plane].
void gather_dout(const ConvGeom& g, const Chunking& c, const double* dout, int n0, int cnt, double* dst) {
    const long width = static_cast<long>(cnt) * c.plane;
    for (int co = 0; co < g.cout; ++co)
        for (int s = 0; s < cnt; ++s) {
            const double* src = dout + (static_cast<long>(n0 + s) * g.cout + co) * c.plane;
            std::copy(src, src + c.plane, dst + co * width + static_cast<long>(s) * c.plane);
        }
}

}  // namespace

void conv2d_forward(const ConvGeom& g, const double* in, const double* weight, const double* bias, double* out) {
    const Chunking c = chunking(g);
    const bool parallel = conv_work(g) > kParallelWork;
    std::vector<double> col(static_cast<std::size_t>(c.taps) * c.per * c.plane);
    for (int n0 = 0; n0 < g.n; n0 += c.per) {
        const int cnt = std::min(c.per, g.n - n0);
        const long width = static_cast<long>(cnt) * c.plane;
        im2col(g, c, in, n0, cnt, col.data(), parallel);
#pragma omp parallel for schedule(static) if (parallel)
        for (int co = 0; co < g.cout; ++co) {
            std::vector<double> acc(static_cast<std::size_t>(width), bias ? bias[co] : 0.0);
            const double* w = weight + static_cast<long>(co) * c.taps;
            for (int k = 0; k < c.taps; ++k) {
                const double wv = w[k];
                const double* row = col.data() + k * width;
                for (long q = 0; q < width; ++q) acc[q] += wv * row[q];
            }
            for (int s = 0; s < cnt; ++s)
                std::copy(acc.begin() + static_cast<long>(s) * c.plane, acc.begin() + static_cast<long>(s + 1) * c.plane,
                          out + (static_cast<long>(n0 + s) * g.cout + co) * c.plane);
        }
    }
}

void conv2d_backward(const ConvGeom& g, const double* in, const double* weight, const double* dout, double* dweight,
                     double* dbias, double* din) {
    const Chunking c = chunking(g);
    const bool parallel = conv_work(g) > kParallelWork;
    const std::size_t cap = static_cast<std::size_t>(c.per) * c.plane;
    std::vector<double> col(c.taps * cap), dcol(din ? c.taps * cap : 0), dy(g.cout * cap);
    std::vector<double> dw_acc(static_cast<std::size_t>(g.cout) * c.taps, 0.0), db_acc(g.cout, 0.0);

    for (int n0 = 0; n0 < g.n; n0 += c.per) {
        const int cnt = std::min(c.per, g.n - n0);
        const long width = static_cast<long>(cnt) * c.plane;
        im2col(g, c, in, n0, cnt, col.data(), parallel);
        gather_dout(g, c, dout, n0, cnt, dy.data());

#pragma omp parallel for schedule(static) if (parallel)
        for (int co = 0; co < g.cout; ++co) {
            const double* d = dy.data() + co * width;
            double b = 0.0;
            for (long q = 0; q < width; ++q) b += d[q];
            db_acc[co] += b;
            double* dw = dw_acc.data() + static_cast<long>(co) * c.taps;
            for (int k = 0; k < c.taps; ++k) {
                const double* row = col.data() + k * width;
                double a = 0.0;
                for (long q = 0; q < width; ++q) a += d[q] * row[q];
                dw[k] += a;
            }
        }

        if (!din) continue;
#pragma omp parallel for schedule(static) if (parallel)
        for (int k = 0; k < c.taps; ++k) {
            double* dst = dcol.data() + k * width;
            std::fill(dst, dst + width, 0.0);
            for (int co = 0; co < g.cout; ++co) {
                const double wv = weight[static_cast<long>(co) * c.taps + k];
                const double* d = dy.data() + co * width;
                for (long q = 0; q < width; ++q) dst[q] += wv * d[q];
            }
        }
        col2im(g, c, dcol.data(), n0, cnt, din, parallel);
    }

    for (std::size_t k = 0; k < dw_acc.size(); ++k) dweight[k] += dw_acc[k];
    if (dbias)
        for (int co = 0; co < g.cout; ++co) dbias[co] += db_acc[co];
}

void dense_forward(const DenseGeom& g, const double* in, const double* weight, const double* bias, double* out) {
    const long work = static_cast<long>(g.n) * g.fan_in * g.fan_out;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelWork)
    for (int n = 0; n < g.n; ++n) {
        for (int o = 0; o < g.fan_out; ++o) {
            const double* w = weight + static_cast<long>(o) * g.fan_in;
            const double* x = in + static_cast<long>(n) * g.fan_in;
            double acc = bias ? bias[o] : 0.0;
            for (int i = 0; i < g.fan_in; ++i) acc += w[i] * x[i];
            out[static_cast<long>(n) * g.fan_out + o] = acc;
        }
    }
}

void dense_backward(const DenseGeom& g, const double* in, const double* weight, const double* dout, double* dweight,
                    double* dbias, double* din) {
    const long work = static_cast<long>(g.n) * g.fan_in * g.fan_out;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
    for (int o = 0; o < g.fan_out; ++o) {
        double* dw = dweight + static_cast<long>(o) * g.fan_in;
        double bacc = 0.0;
        for (int n = 0; n < g.n; ++n) {
            const double d = dout[static_cast<long>(n) * g.fan_out + o];
            bacc += d;
            const double* x = in + static_cast<long>(n) * g.fan_in;
            for (int i = 0; i < g.fan_in; ++i) dw[i] += d * x[i];
        }
        if (dbias) dbias[o] += bacc;
    }
    if (!din) return;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
    for (int n = 0; n < g.n; ++n) {
        double* dx = din + static_cast<long>(n) * g.fan_in;
        for (int o = 0; o < g.fan_out; ++o) {
            const double d = dout[static_cast<long>(n) * g.fan_out + o];
            const double* w = weight + static_cast<long>(o) * g.fan_in;
            for (int i = 0; i < g.fan_in; ++i) dx[i] += d * w[i];
        }
    }
}

}  // namespace ndt::dl::kernels
