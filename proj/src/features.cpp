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

#include "ndtlos/features.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

namespace ndt::features {

namespace {

double wrap(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

// Power-weighted RMS spread of `values` about their weighted mean.
double weighted_spread(const std::vector<double>& values, const std::vector<double>& w, double wsum) {
    double mean = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) mean += w[i] * values[i];
    mean /= wsum;
    double var = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) var += w[i] * (values[i] - mean) * (values[i] - mean);
    return std::sqrt(std::max(0.0, var / wsum));
}

}  // namespace

FeatureVector extract_features(const geometry::MultipathSet& set) {
    const auto& paths = set.paths;
    if (paths.empty()) throw InvalidInput("extract_features: empty path set");
    FeatureVector f;
    std::vector<double> w(paths.size()), tau(paths.size()), el(paths.size());
    double wsum = 0.0;
    std::size_t strongest = 0;
    double min_delay = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const double mag = std::abs(paths[i].gain);
        w[i] = mag * mag;
        wsum += w[i];
        f.p_rss += mag;
        if (w[i] > w[strongest]) strongest = i;
        tau[i] = paths[i].delay;
        el[i] = paths[i].elevation;
        min_delay = std::min(min_delay, paths[i].delay);
    }
    f.p_max = w[strongest];
    f.delta_tau = paths[strongest].delay - min_delay;
    if (!(wsum > 0.0)) return f;  // all-zero gains: spreads stay 0

    f.tau_rms = weighted_spread(tau, w, wsum);
    f.phi_rms = weighted_spread(el, w, wsum);

    // Azimuth unwrapped about the power-weighted circular mean.
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        s += w[i] * std::sin(paths[i].azimuth);
        c += w[i] * std::cos(paths[i].azimuth);
    }
    const double center = std::atan2(s, c);
    std::vector<double> az(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) az[i] = wrap(paths[i].azimuth - center);
    f.theta_rms = weighted_spread(az, w, wsum);
    return f;
}

geometry::MultipathSet apply_element_pattern(const geometry::MultipathSet& set, const channel::ArrayConfig& array) {
    geometry::MultipathSet out = set;
    for (auto& p : out.paths) p.gain *= channel::element_gain(array, p.azimuth, p.elevation);
    return out;
}

geometry::MultipathSet estimate_mpc(const channel::ChannelMatrix& h_est, const channel::ArrayConfig& array,
                                    const channel::OfdmConfig& ofdm, const MpcEstimatorConfig& cfg) {
    return estimate_mpc(h_est, array, ofdm, adcpm::AngleDelayTransform(array, ofdm), cfg);
}

geometry::MultipathSet estimate_mpc(const channel::ChannelMatrix& h_est, const channel::ArrayConfig& array,
                                    const channel::OfdmConfig& ofdm, const adcpm::AngleDelayTransform& transform,
                                    const MpcEstimatorConfig& cfg) {
    for (const cd& v : h_est.data.values())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidInput("estimate_mpc: non-finite channel");
    const adcpm::Adcpm x = adcpm::compute_adcpm(transform.apply(h_est.data));
    const int nv = array.rows, nh = array.cols, nc = ofdm.n_subcarriers;
    geometry::MultipathSet out;
    out.estimated = true;
    if (x.data.empty()) return out;
    const double peak = *std::max_element(x.data.values().begin(), x.data.values().end());
    if (!(peak > 0.0)) return out;
    const double floor = peak * std::pow(10.0, -cfg.threshold_db / 10.0);

    auto value = [&](int a, int b, int q) { return x.data(static_cast<std::size_t>(a * nh + b), static_cast<std::size_t>(q)); };
    auto linear = [&](int a, int b, int q) { return (static_cast<long>(a) * nh + b) * nc + q; };

    struct Peak {
        double power;
        int q, angle, a, b;
    };
    std::vector<Peak> peaks;
    for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nh; ++b)
            for (int q = 0; q < nc; ++q) {
                const double v = value(a, b, q);
                if (v <= 0.0 || v < floor) continue;
                bool is_max = true;
                const long self = linear(a, b, q);
                // cyclic 3x3x3 neighbourhood; plateaus resolve to the lowest index
                for (int da = -1; da <= 1 && is_max; ++da)
                    for (int db = -1; db <= 1 && is_max; ++db)
                        for (int dq = -1; dq <= 1 && is_max; ++dq) {
                            const int na = (a + da + nv) % nv, nb = (b + db + nh) % nh, nq = (q + dq + nc) % nc;
                            const long other = linear(na, nb, nq);
                            if (other == self) continue;
                            const double ov = value(na, nb, nq);
                            if (ov > v || (ov == v && other < self)) is_max = false;
                        }
                if (is_max) peaks.push_back({v, q, a * nh + b, a, b});
            }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& l, const Peak& r) {
        if (l.power != r.power) return l.power > r.power;
        if (l.q != r.q) return l.q < r.q;
        return l.angle < r.angle;
    });
    if (static_cast<int>(peaks.size()) > cfg.max_paths) peaks.resize(static_cast<std::size_t>(std::max(0, cfg.max_paths)));

    for (const Peak& pk : peaks) {
        geometry::PathComponent p;
        p.gain = std::sqrt(pk.power);
        p.delay = pk.q * ofdm.sample_interval();
        const double uv = (pk.a - nv / 2.0) / nv;
        const double sin_el = std::clamp(uv / array.dv, -1.0, 1.0);
        p.elevation = std::asin(sin_el);
        const double cos_el = std::cos(p.elevation);
        const double uh = (pk.b - nh / 2.0) / nh;
        const double sin_az = cos_el > 0.0 ? std::clamp(uh / (array.dh * cos_el), -1.0, 1.0) : 0.0;
        p.azimuth = std::asin(sin_az);
        p.bounces = 0;
        out.paths.push_back(p);
    }
    std::stable_sort(out.paths.begin(), out.paths.end(),
                     [](const geometry::PathComponent& l, const geometry::PathComponent& r) { return l.delay < r.delay; });
    return out;
}

std::array<double, FeatureVector::kDims> Scaler::apply(const FeatureVector& f) const {
    auto v = f.as_array();
    for (std::size_t d = 0; d < v.size(); ++d)
        if (stddev[d] > 0.0) v[d] = (v[d] - mean[d]) / stddev[d];
    return v;
}

Scaler fit_scaler(const std::vector<FeatureVector>& rows) {
    Scaler s;
    if (rows.empty()) return s;
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows) {
        const auto v = r.as_array();
        for (std::size_t d = 0; d < v.size(); ++d) s.mean[d] += v[d];
    }
    for (double& m : s.mean) m /= n;
    std::array<double, FeatureVector::kDims> var{};
    for (const auto& r : rows) {
        const auto v = r.as_array();
        for (std::size_t d = 0; d < v.size(); ++d) var[d] += (v[d] - s.mean[d]) * (v[d] - s.mean[d]);
    }
    for (std::size_t d = 0; d < var.size(); ++d) {
        const double sd = std::sqrt(var[d] / n);
        s.stddev[d] = sd > 1e-12 * std::max(1e-300, std::abs(s.mean[d])) ? sd : 0.0;
    }
    return s;
}

std::vector<std::array<double, FeatureVector::kDims>> standardize(const std::vector<FeatureVector>& rows,
                                                                  const Scaler& scaler) {
    std::vector<std::array<double, FeatureVector::kDims>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(scaler.apply(r));
    return out;
}

void write_feature_csv(const std::vector<FeatureRow>& rows, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw DataError("cannot write " + path);
    f << "p_rss,p_max,tau_rms,delta_tau,theta_rms,phi_rms,label,snr_db\n";
    char buf[48];
    for (const auto& r : rows) {
        for (double v : r.features.as_array()) {
            std::snprintf(buf, sizeof buf, "%.17g,", v);
            f << buf;
        }
        f << r.label << ',';
        if (std::isinf(r.snr_db)) f << "inf\n";
        else {
            std::snprintf(buf, sizeof buf, "%.17g", r.snr_db);
            f << buf << '\n';
        }
    }
}

}  // namespace ndt::features
