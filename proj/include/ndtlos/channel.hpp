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

#ifndef NDTLOS_CHANNEL_HPP
#define NDTLOS_CHANNEL_HPP

#include <span>
#include <vector>

#include "ndtlos/common.hpp"
#include "ndtlos/geometry.hpp"

namespace ndt::channel {

struct OfdmConfig {
    double fc = 28e9;         // Hz
    double bandwidth = 400e6; // Hz
    int n_subcarriers = 512;
    int n_guard = 384;

    double sample_interval() const { return 1.0 / bandwidth; }
    double symbol_duration() const { return n_subcarriers * sample_interval(); }
    double cp_duration() const { return n_guard * sample_interval(); }
    double subcarrier_frequency(int l) const { return l / symbol_duration(); }

    friend bool operator==(const OfdmConfig&, const OfdmConfig&) = default;
};

enum class ElementPattern { isotropic, directional_3gpp };

struct ArrayConfig {
    int rows = 8;     // N, vertical
    int cols = 16;    // M, horizontal
    double dv = 0.8;  // wavelengths
    double dh = 0.5;
    ElementPattern pattern = ElementPattern::directional_3gpp;

    int size() const { return rows * cols; }

    friend bool operator==(const ArrayConfig&, const ArrayConfig&) = default;
};

void validate(const OfdmConfig& ofdm);
void validate(const ArrayConfig& array);

enum class ChannelKind { true_channel, estimated };

// NM x N_c frequency response; row index n * M + m (vertical element n outer).
struct ChannelMatrix {
    CMatrix data;
    ChannelKind kind = ChannelKind::true_channel;
    bool outage = false;
};

// Unit-modulus UPA response; entry (n, m) has phase
// -2 pi (n dv sin(el) + m dh cos(el) sin(az)).
std::vector<cd> steering_vector(const ArrayConfig& array, double azimuth, double elevation);

// Amplitude of the 3GPP TR 38.901 single-element pattern (65 deg beamwidths,
// 30 dB floors, 8 dBi peak) at BS-local angles.
double element_gain_3gpp(double azimuth, double elevation);
double element_gain(const ArrayConfig& array, double azimuth, double elevation);

ChannelMatrix synth_cfr(const geometry::MultipathSet& paths, const ArrayConfig& array, const OfdmConfig& ofdm);

// sigma_z^2 that puts the per-antenna SNR (averaged over subcarriers) of a
// unit-power pilot at snr_db. Returns 0 for +inf.
double noise_variance_for_snr(const CMatrix& h, double snr_db);

// Adds i.i.d. CN(0, variance) noise, drawn from `seed`, in place.
void add_awgn(CMatrix& m, double variance, std::uint64_t seed);

struct UplinkRecord {
    CMatrix received;
    std::vector<cd> pilots;  // one per subcarrier, shared by all antennas
    double noise_variance = 0.0;
};

// Deterministic unit-power QPSK pilots.
std::vector<cd> qpsk_pilots(int n_subcarriers, std::uint64_t seed);

UplinkRecord simulate_uplink(const ChannelMatrix& h, double snr_db, std::uint64_t seed);
// Same, with the noise variance given directly instead of through an SNR.
UplinkRecord simulate_uplink_with_variance(const ChannelMatrix& h, double noise_variance, std::uint64_t seed);

ChannelMatrix estimate_channel_ls(const CMatrix& received, std::span<const cd> pilots);

}  // namespace ndt::channel

#endif  // NDTLOS_CHANNEL_HPP
