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

#include "ndtlos/channel.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace ndt::channel {

void validate(const OfdmConfig& ofdm) {
    if (!(ofdm.fc > 0.0) || !(ofdm.bandwidth > 0.0)) throw InvalidInput("ofdm: fc and bandwidth must be positive");
    if (ofdm.n_subcarriers < 2) throw InvalidInput("ofdm: n_subcarriers must be >= 2");
    if (ofdm.n_guard < 0) throw InvalidInput("ofdm: n_guard must be >= 0");
}

void validate(const ArrayConfig& array) {
    if (array.rows < 1 || array.cols < 1) throw InvalidInput("array: rows and cols must be >= 1");
    if (!(array.dv > 0.0) || !(array.dh > 0.0)) throw InvalidInput("array: spacings must be positive");
}

std::vector<cd> steering_vector(const ArrayConfig& array, double azimuth, double elevation) {
    const double uv = array.dv * std::sin(elevation);
    const double uh = array.dh * std::cos(elevation) * std::sin(azimuth);
    std::vector<cd> e(static_cast<std::size_t>(array.size()));
    for (int n = 0; n < array.rows; ++n)
        for (int m = 0; m < array.cols; ++m)
            e[static_cast<std::size_t>(n * array.cols + m)] = std::polar(1.0, -2.0 * kPi * (n * uv + m * uh));
    return e;
}

double element_gain_3gpp(double azimuth, double elevation) {
    constexpr double beamwidth = 65.0;
    constexpr double side_lobe = 30.0;
    constexpr double max_atten = 30.0;
    constexpr double peak_dbi = 8.0;
    const double zenith_deg = 90.0 - elevation * 180.0 / kPi;
    double az_deg = std::remainder(azimuth, 2.0 * kPi) * 180.0 / kPi;
    const double a_v = -std::min(12.0 * std::pow((zenith_deg - 90.0) / beamwidth, 2), side_lobe);
    const double a_h = -std::min(12.0 * std::pow(az_deg / beamwidth, 2), max_atten);
    const double a = -std::min(-(a_v + a_h), max_atten);
    return std::pow(10.0, (peak_dbi + a) / 20.0);
}

double element_gain(const ArrayConfig& array, double azimuth, double elevation) {
    return array.pattern == ElementPattern::isotropic ? 1.0 : element_gain_3gpp(azimuth, elevation);
}

ChannelMatrix synth_cfr(const geometry::MultipathSet& set, const ArrayConfig& array, const OfdmConfig& ofdm) {
    const int nr = array.size();
    const int nc = ofdm.n_subcarriers;
    ChannelMatrix h{CMatrix(static_cast<std::size_t>(nr), static_cast<std::size_t>(nc)), ChannelKind::true_channel,
                    set.paths.empty()};
    std::vector<cd> freq(static_cast<std::size_t>(nc));
    for (const geometry::PathComponent& p : set.paths) {
        const double amp = p.gain * element_gain(array, p.azimuth, p.elevation);
        for (int l = 0; l < nc; ++l)
            freq[static_cast<std::size_t>(l)] = std::polar(amp, -2.0 * kPi * ofdm.subcarrier_frequency(l) * p.delay);
        const std::vector<cd> e = steering_vector(array, p.azimuth, p.elevation);
        for (int r = 0; r < nr; ++r) {
            const cd er = e[static_cast<std::size_t>(r)];
            cd* row = h.data.row(static_cast<std::size_t>(r)).data();
            for (int l = 0; l < nc; ++l) row[l] += er * freq[static_cast<std::size_t>(l)];
        }
    }
    return h;
}

double noise_variance_for_snr(const CMatrix& h, double snr_db) {
    if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
    const double signal = frobenius_sq(h) / static_cast<double>(h.size());
    return signal / db_to_linear(snr_db);
}

void add_awgn(CMatrix& m, double variance, std::uint64_t seed) {
    if (variance <= 0.0) return;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(variance / 2.0));
    for (cd& v : m.values()) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v += cd(re, im);
    }
}

std::vector<cd> qpsk_pilots(int n_subcarriers, std::uint64_t seed) {
    std::mt19937_64 rng(derive_seed(seed, 0x9170u, 0));
    const double a = 1.0 / std::sqrt(2.0);
    std::vector<cd> s(static_cast<std::size_t>(n_subcarriers));
    for (cd& v : s) {
        const auto bits = rng();
        v = cd((bits & 1u) ? a : -a, (bits & 2u) ? a : -a);
    }
    return s;
}

UplinkRecord simulate_uplink(const ChannelMatrix& h, double snr_db, std::uint64_t seed) {
    // Unit-power pilots: E|h s|^2 = E|h|^2.
    return simulate_uplink_with_variance(h, noise_variance_for_snr(h.data, snr_db), seed);
}

UplinkRecord simulate_uplink_with_variance(const ChannelMatrix& h, double noise_variance, std::uint64_t seed) {
    if (h.kind != ChannelKind::true_channel) throw InvalidInput("simulate_uplink expects a true channel");
    UplinkRecord rec;
    rec.pilots = qpsk_pilots(static_cast<int>(h.data.cols()), seed);
    rec.received = h.data;
    for (std::size_t r = 0; r < rec.received.rows(); ++r) {
        auto row = rec.received.row(r);
        for (std::size_t l = 0; l < row.size(); ++l) row[l] *= rec.pilots[l];
    }
    rec.noise_variance = noise_variance;
    add_awgn(rec.received, rec.noise_variance, derive_seed(seed, 0x2015u, 0));
    return rec;
}

ChannelMatrix estimate_channel_ls(const CMatrix& received, std::span<const cd> pilots) {
    if (pilots.size() != received.cols()) throw InvalidInput("estimate_channel_ls: pilot count mismatch");
    for (const cd& s : pilots)
        if (std::norm(s) == 0.0) throw InvalidInput("estimate_channel_ls: zero-magnitude pilot");
    ChannelMatrix est{received, ChannelKind::estimated, false};
    for (std::size_t r = 0; r < est.data.rows(); ++r) {
        auto row = est.data.row(r);
        for (std::size_t l = 0; l < row.size(); ++l) row[l] = row[l] * std::conj(pilots[l]) / std::norm(pilots[l]);
    }
    return est;
}

}  // namespace ndt::channel
