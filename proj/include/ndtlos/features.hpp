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

#ifndef NDTLOS_FEATURES_HPP
#define NDTLOS_FEATURES_HPP

#include <array>
#include <string>
#include <vector>

#include "ndtlos/adcpm.hpp"
#include "ndtlos/channel.hpp"
#include "ndtlos/geometry.hpp"

namespace ndt::features {

struct FeatureVector {
    double p_rss = 0.0;      // sum of path magnitudes
    double p_max = 0.0;      // strongest path power
    double tau_rms = 0.0;    // s
    double delta_tau = 0.0;  // s
    double theta_rms = 0.0;  // rad
    double phi_rms = 0.0;    // rad

    static constexpr std::size_t kDims = 6;
    std::array<double, kDims> as_array() const { return {p_rss, p_max, tau_rms, delta_tau, theta_rms, phi_rms}; }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Throws InvalidInput for an empty path set.
FeatureVector extract_features(const geometry::MultipathSet& set);

// Scales every path amplitude by the BS element gain in its arrival direction,
// i.e. the amplitudes the array actually observes.
geometry::MultipathSet apply_element_pattern(const geometry::MultipathSet& set, const channel::ArrayConfig& array);

struct MpcEstimatorConfig {
    int max_paths = 8;
    double threshold_db = 20.0;
};

// Peak picking on the single-snapshot ADCPM of an estimated channel.
geometry::MultipathSet estimate_mpc(const channel::ChannelMatrix& h_est, const channel::ArrayConfig& array,
                                    const channel::OfdmConfig& ofdm, const MpcEstimatorConfig& cfg);
geometry::MultipathSet estimate_mpc(const channel::ChannelMatrix& h_est, const channel::ArrayConfig& array,
                                    const channel::OfdmConfig& ofdm, const adcpm::AngleDelayTransform& transform,
                                    const MpcEstimatorConfig& cfg);

struct Scaler {
    std::array<double, FeatureVector::kDims> mean{};
    std::array<double, FeatureVector::kDims> stddev{};  // 0 marks a pass-through column

    std::array<double, FeatureVector::kDims> apply(const FeatureVector& f) const;
};

Scaler fit_scaler(const std::vector<FeatureVector>& rows);
std::vector<std::array<double, FeatureVector::kDims>> standardize(const std::vector<FeatureVector>& rows,
                                                                  const Scaler& scaler);

struct FeatureRow {
    FeatureVector features;
    int label = 0;
    double snr_db = 0.0;  // +inf for ground truth
};

// Header: p_rss,p_max,tau_rms,delta_tau,theta_rms,phi_rms,label,snr_db
void write_feature_csv(const std::vector<FeatureRow>& rows, const std::string& path);

}  // namespace ndt::features

#endif  // NDTLOS_FEATURES_HPP
