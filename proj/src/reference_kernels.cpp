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

#include "ndtlos/kernels.hpp"

namespace ndt::dl::reference {

namespace {

inline long at(int c, int h, int w, int H, int W) { return (static_cast<long>(c) * H + h) * W + w; }

}  // namespace

void conv2d_forward(const ConvGeom& g, const double* in, const double* weight, const double* bias, double* out) {
    const long in_plane = static_cast<long>(g.cin) * g.hin * g.win;
    const long out_plane = static_cast<long>(g.cout) * g.hout * g.wout;
    for (int n = 0; n < g.n; ++n)
        for (int co = 0; co < g.cout; ++co)
            for (int oh = 0; oh < g.hout; ++oh)
                for (int ow = 0; ow < g.wout; ++ow) {
                    double acc = bias ? bias[co] : 0.0;
                    for (int ci = 0; ci < g.cin; ++ci)
                        for (int i = 0; i < g.kh; ++i)
                            for (int j = 0; j < g.kw; ++j) {
                                const int ih = oh * g.sh - g.ph + i, iw = ow * g.sw - g.pw + j;
                                if (ih < 0 || ih >= g.hin || iw < 0 || iw >= g.win) continue;
                                acc += weight[((static_cast<long>(co) * g.cin + ci) * g.kh + i) * g.kw + j] *
                                       in[n * in_plane + at(ci, ih, iw, g.hin, g.win)];
                            }
                    out[n * out_plane + at(co, oh, ow, g.hout, g.wout)] = acc;
                }
}

void conv2d_backward(const ConvGeom& g, const double* in, const double* weight, const double* dout, double* dweight,
                     double* dbias, double* din) {
    const long in_plane = static_cast<long>(g.cin) * g.hin * g.win;
    const long out_plane = static_cast<long>(g.cout) * g.hout * g.wout;
    for (int n = 0; n < g.n; ++n)
        for (int co = 0; co < g.cout; ++co)
            for (int oh = 0; oh < g.hout; ++oh)
                for (int ow = 0; ow < g.wout; ++ow) {
                    const double d = dout[n * out_plane + at(co, oh, ow, g.hout, g.wout)];
                    if (dbias) dbias[co] += d;
                    for (int ci = 0; ci < g.cin; ++ci)
                        for (int i = 0; i < g.kh; ++i)
                            for (int j = 0; j < g.kw; ++j) {
                                const int ih = oh * g.sh - g.ph + i, iw = ow * g.sw - g.pw + j;
                                if (ih < 0 || ih >= g.hin || iw < 0 || iw >= g.win) continue;
                                const long widx = ((static_cast<long>(co) * g.cin + ci) * g.kh + i) * g.kw + j;
                                const long iidx = n * in_plane + at(ci, ih, iw, g.hin, g.win);
                                dweight[widx] += d * in[iidx];
                                if (din) din[iidx] += d * weight[widx];
                            }
                }
}

void dense_forward(const DenseGeom& g, const double* in, const double* weight, const double* bias, double* out) {
    for (int n = 0; n < g.n; ++n)
        for (int o = 0; o < g.fan_out; ++o) {
            double acc = bias ? bias[o] : 0.0;
            for (int i = 0; i < g.fan_in; ++i) acc += weight[static_cast<long>(o) * g.fan_in + i] * in[static_cast<long>(n) * g.fan_in + i];
            out[static_cast<long>(n) * g.fan_out + o] = acc;
        }
}

void dense_backward(const DenseGeom& g, const double* in, const double* weight, const double* dout, double* dweight,
                    double* dbias, double* din) {
    for (int n = 0; n < g.n; ++n)
        for (int o = 0; o < g.fan_out; ++o) {
            const double d = dout[static_cast<long>(n) * g.fan_out + o];
            if (dbias) dbias[o] += d;
            for (int i = 0; i < g.fan_in; ++i) {
                dweight[static_cast<long>(o) * g.fan_in + i] += d * in[static_cast<long>(n) * g.fan_in + i];
                if (din) din[static_cast<long>(n) * g.fan_in + i] += d * weight[static_cast<long>(o) * g.fan_in + i];
            }
        }
}

}  // namespace ndt::dl::reference
