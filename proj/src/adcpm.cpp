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

#include "ndtlos/adcpm.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace ndt::adcpm {

CMatrix centered_dft(int size) {
    if (size < 1) throw InvalidInput("centered_dft: size must be >= 1");
    CMatrix v(static_cast<std::size_t>(size), static_cast<std::size_t>(size));
    const double scale = 1.0 / std::sqrt(static_cast<double>(size));
    const double half = size / 2.0;
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            v(i, j) = std::polar(scale, -2.0 * kPi * i * (j - half) / size);
    return v;
}

CMatrix plain_dft(int size) {
    if (size < 1) throw InvalidInput("plain_dft: size must be >= 1");
    CMatrix f(static_cast<std::size_t>(size), static_cast<std::size_t>(size));
    const double scale = 1.0 / std::sqrt(static_cast<double>(size));
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            // reduce i*j modulo size first to keep the phase argument small
            const long long ij = (static_cast<long long>(i) * j) % size;
            f(i, j) = std::polar(scale, -2.0 * kPi * static_cast<double>(ij) / size);
        }
    return f;
}

AngleDelayTransform::AngleDelayTransform(int rows, int cols, int n_subcarriers)
    : rows_(rows), cols_(cols), nc_(n_subcarriers), vn_(centered_dft(rows)), vm_(centered_dft(cols)),
      f_(plain_dft(n_subcarriers)) {
    pow2_ = n_subcarriers >= 2 && (n_subcarriers & (n_subcarriers - 1)) == 0;
    if (pow2_) {
        twiddle_.resize(static_cast<std::size_t>(nc_ / 2));
        for (int k = 0; k < nc_ / 2; ++k) twiddle_[k] = std::polar(1.0, 2.0 * kPi * k / nc_);
        int bits = 0;
        while ((1 << bits) < nc_) ++bits;
        bitrev_.resize(static_cast<std::size_t>(nc_));
        for (int i = 0; i < nc_; ++i) {
            int r = 0;
            for (int b = 0; b < bits; ++b)
                if (i & (1 << b)) r |= 1 << (bits - 1 - b);
            bitrev_[i] = r;
        }
    }
}

void AngleDelayTransform::check(const CMatrix& h) const {
    if (h.rows() != static_cast<std::size_t>(rows_ * cols_) || h.cols() != static_cast<std::size_t>(nc_))
        throw InvalidInput("angle_delay_transform: channel dimensions do not match the array/OFDM configuration");
}

// out[q] = sum_l in[l] e^{+j 2 pi l q / N_c}, unnormalized.
void AngleDelayTransform::delay_row_fft(const cd* in, cd* out) const {
    for (int i = 0; i < nc_; ++i) out[bitrev_[i]] = in[i];
    for (int len = 2; len <= nc_; len <<= 1) {
        const int half = len / 2;
        const int step = nc_ / len;
        for (int i = 0; i < nc_; i += len) {
            for (int k = 0; k < half; ++k) {
                const cd u = out[i + k];
                const cd v = out[i + k + half] * twiddle_[static_cast<std::size_t>(k * step)];
                out[i + k] = u + v;
                out[i + k + half] = u - v;
            }
        }
    }
}

// One delay column laid out as an N x M block (stride nc_ in the source).
void AngleDelayTransform::angle_column(const cd* in, cd* out, cd* scratch) const {
    // scratch[n, b] = sum_m X[n, m] conj(VM[m, b])
    for (int n = 0; n < rows_; ++n)
        for (int b = 0; b < cols_; ++b) {
            cd acc = 0.0;
            for (int m = 0; m < cols_; ++m) acc += in[static_cast<std::size_t>(n * cols_ + m) * nc_] * std::conj(vm_(m, b));
            scratch[n * cols_ + b] = acc;
        }
    // out[a, b] = sum_n conj(VN[n, a]) scratch[n, b]
    for (int a = 0; a < rows_; ++a)
        for (int b = 0; b < cols_; ++b) {
            cd acc = 0.0;
            for (int n = 0; n < rows_; ++n) acc += std::conj(vn_(n, a)) * scratch[n * cols_ + b];
            out[static_cast<std::size_t>(a * cols_ + b) * nc_] = acc;
        }
}

CMatrix AngleDelayTransform::apply(const CMatrix& h) const {
    check(h);
    const int nr = rows_ * cols_;
    CMatrix delay(h.rows(), h.cols());
    const double fscale = 1.0 / std::sqrt(static_cast<double>(nc_));
#pragma omp parallel for schedule(static)
    for (int r = 0; r < nr; ++r) {
        const cd* in = h.row(static_cast<std::size_t>(r)).data();
        cd* out = delay.row(static_cast<std::size_t>(r)).data();
        if (pow2_) {
            delay_row_fft(in, out);
            for (int q = 0; q < nc_; ++q) out[q] *= fscale;
        } else {
            for (int q = 0; q < nc_; ++q) {
                cd acc = 0.0;
                for (int l = 0; l < nc_; ++l) acc += in[l] * std::conj(f_(l, q));
                out[q] = acc;
            }
        }
    }
    CMatrix g(h.rows(), h.cols());
    const double scale = 1.0 / std::sqrt(static_cast<double>(nr) * nc_);
#pragma omp parallel
    {
        std::vector<cd> scratch(static_cast<std::size_t>(nr));
#pragma omp for schedule(static)
        for (int q = 0; q < nc_; ++q) angle_column(delay.data() + q, g.data() + q, scratch.data());
    }
    for (cd& v : g.values()) v *= scale;
    return g;
}

CMatrix AngleDelayTransform::apply_serial(const CMatrix& h) const {
    check(h);
    const int nr = rows_ * cols_;
    CMatrix delay(h.rows(), h.cols());
    for (int r = 0; r < nr; ++r)
        for (int q = 0; q < nc_; ++q) {
            cd acc = 0.0;
            for (int l = 0; l < nc_; ++l) acc += h(r, l) * std::conj(f_(l, q));
            delay(r, q) = acc;
        }
    CMatrix g(h.rows(), h.cols());
    std::vector<cd> scratch(static_cast<std::size_t>(nr));
    for (int q = 0; q < nc_; ++q) angle_column(delay.data() + q, g.data() + q, scratch.data());
    const double scale = 1.0 / std::sqrt(static_cast<double>(nr) * nc_);
    for (cd& v : g.values()) v *= scale;
    return g;
}

CMatrix angle_delay_transform(const channel::ChannelMatrix& h, const channel::ArrayConfig& array,
                              const channel::OfdmConfig& ofdm) {
    return AngleDelayTransform(array, ofdm).apply(h.data);
}

Adcpm compute_adcpm(const CMatrix& g) {
    Adcpm x{RMatrix(g.rows(), g.cols()), std::nullopt};
    for (std::size_t i = 0; i < g.size(); ++i) x.data.values()[i] = std::norm(g.values()[i]);
    return x;
}

Adcpm compute_adcpm(std::span<const CMatrix> realizations) {
    if (realizations.empty()) throw InvalidInput("compute_adcpm: no realizations");
    Adcpm x{RMatrix(realizations[0].rows(), realizations[0].cols()), std::nullopt};
    for (const CMatrix& g : realizations) {
        if (g.rows() != x.data.rows() || g.cols() != x.data.cols())
            throw InvalidInput("compute_adcpm: realization dimensions differ");
        for (std::size_t i = 0; i < g.size(); ++i) x.data.values()[i] += std::norm(g.values()[i]);
    }
    const double inv = 1.0 / static_cast<double>(realizations.size());
    for (double& v : x.data.values()) v *= inv;
    return x;
}

Adcpm max_pool(const Adcpm& x, int kernel_h, int kernel_w) {
    if (kernel_h < 1 || kernel_w < 1) throw InvalidInput("max_pool: kernel dims must be >= 1");
    const std::size_t kh = static_cast<std::size_t>(kernel_h), kw = static_cast<std::size_t>(kernel_w);
    const std::size_t oh = (x.data.rows() + kh - 1) / kh;
    const std::size_t ow = (x.data.cols() + kw - 1) / kw;
    Adcpm out{RMatrix(oh, ow), std::make_pair(kernel_h, kernel_w)};
    for (std::size_t i = 0; i < oh; ++i)
        for (std::size_t j = 0; j < ow; ++j) {
            double m = x.data(i * kh, j * kw);
            for (std::size_t r = i * kh; r < std::min(x.data.rows(), (i + 1) * kh); ++r)
                for (std::size_t c = j * kw; c < std::min(x.data.cols(), (j + 1) * kw); ++c)
                    m = std::max(m, x.data(r, c));
            out.data(i, j) = m;
        }
    return out;
}

void normalize_max(Adcpm& x) {
    if (x.data.empty()) return;
    const double peak = *std::max_element(x.data.values().begin(), x.data.values().end());
    if (!(peak > 0.0)) return;
    for (double& v : x.data.values()) v /= peak;
}

void write_csv(const Adcpm& x, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    f << "# rows=" << x.data.rows() << " cols=" << x.data.cols() << '\n';
    char buf[32];
    for (std::size_t r = 0; r < x.data.rows(); ++r) {
        for (std::size_t c = 0; c < x.data.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", x.data(r, c));
            f << (c ? "," : "") << buf;
        }
        f << '\n';
    }
}

}  // namespace ndt::adcpm
