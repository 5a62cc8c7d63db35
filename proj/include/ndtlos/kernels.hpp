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

#ifndef NDTLOS_KERNELS_HPP
#define NDTLOS_KERNELS_HPP

// Batched NCHW kernels. Every output element is produced by exactly one
// thread with a fixed summation order, so results do not depend on the
// OpenMP worker count. Backward kernels accumulate into their outputs.

namespace ndt::dl {

struct ConvGeom {
    int n = 1;
    int cin = 1, hin = 1, win = 1;
    int cout = 1, hout = 1, wout = 1;
    int kh = 1, kw = 1;
    int sh = 1, sw = 1;
    int ph = 0, pw = 0;
};

struct DenseGeom {
    int n = 1;
    int fan_in = 1;
    int fan_out = 1;
};

namespace kernels {

// bias may be null.
void conv2d_forward(const ConvGeom& g, const double* in, const double* weight, const double* bias, double* out);
// dbias may be null. din may be null when the input gradient is not needed.
void conv2d_backward(const ConvGeom& g, const double* in, const double* weight, const double* dout, double* dweight,
                     double* dbias, double* din);

void dense_forward(const DenseGeom& g, const double* in, const double* weight, const double* bias, double* out);
void dense_backward(const DenseGeom& g, const double* in, const double* weight, const double* dout, double* dweight,
                    double* dbias, double* din);

}  // namespace kernels

// Plain serial loops, kept as the correctness baseline for the kernels above.
namespace reference {

void conv2d_forward(const ConvGeom& g, const double* in, const double* weight, const double* bias, double* out);
void conv2d_backward(const ConvGeom& g, const double* in, const double* weight, const double* dout, double* dweight,
                     double* dbias, double* din);
void dense_forward(const DenseGeom& g, const double* in, const double* weight, const double* bias, double* out);
void dense_backward(const DenseGeom& g, const double* in, const double* weight, const double* dout, double* dweight,
                    double* dbias, double* din);

}  // namespace reference

}  // namespace ndt::dl

#endif  // NDTLOS_KERNELS_HPP
