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

#ifndef NDTLOS_ADCPM_HPP
#define NDTLOS_ADCPM_HPP

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ndtlos/channel.hpp"
#include "ndtlos/common.hpp"

namespace ndt::adcpm {

// [V]_{i,j} = e^{-j 2 pi i (j - size/2) / size} / sqrt(size)
CMatrix centered_dft(int size);
// [F]_{i,j} = e^{-j 2 pi i j / size} / sqrt(size)
CMatrix plain_dft(int size);

// G = (V_N (x) V_M)^H H F^* / sqrt(M N N_c), applied separably. The Kronecker
// order matches the channel's row index n * M + m, so row a * M + b of G is
// vertical angle bin a and horizontal angle bin b.
class AngleDelayTransform {
public:
    AngleDelayTransform(int rows, int cols, int n_subcarriers);
    AngleDelayTransform(const channel::ArrayConfig& array, const channel::OfdmConfig& ofdm)
        : AngleDelayTransform(array.rows, array.cols, ofdm.n_subcarriers) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int n_subcarriers() const { return nc_; }

    // OpenMP kernel: radix-2 FFT on the delay axis when N_c is a power of two.
    CMatrix apply(const CMatrix& h) const;
    // Serial reference: dense DFT matrices on every axis.
    CMatrix apply_serial(const CMatrix& h) const;

private:
    void check(const CMatrix& h) const;
    void delay_row_fft(const cd* in, cd* out) const;
    void angle_column(const cd* in, cd* out, cd* scratch) const;

    int rows_, cols_, nc_;
    CMatrix vn_, vm_, f_;
    std::vector<cd> twiddle_;
    std::vector<int> bitrev_;
    bool pow2_ = false;
};

CMatrix angle_delay_transform(const channel::ChannelMatrix& h, const channel::ArrayConfig& array,
                              const channel::OfdmConfig& ofdm);

struct Adcpm {
    RMatrix data;
    std::optional<std::pair<int, int>> pooled_from;  // pooling kernel (h, w)

    friend bool operator==(const Adcpm&, const Adcpm&) = default;
};

// Elementwise |G|^2, averaged over the supplied realizations.
Adcpm compute_adcpm(const CMatrix& g);
Adcpm compute_adcpm(std::span<const CMatrix> realizations);

// Non-overlapping windows, stride = kernel, ragged edges pooled partially.
Adcpm max_pool(const Adcpm& x, int kernel_h, int kernel_w);

// Scales so the maximum entry is exactly 1; all-zero input is left unchanged.
void normalize_max(Adcpm& x);

void write_csv(const Adcpm& x, const std::string& path);

}  // namespace ndt::adcpm

#endif  // NDTLOS_ADCPM_HPP
