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

#include <cmath>
#include <memory>

#include "ndtlos/checkpoint.hpp"
#include "ndtlos/pipeline.hpp"

namespace ndt::pipeline {

features::FeatureVector truth_features(const Sample& s, const channel::ArrayConfig& array) {
    return features::extract_features(features::apply_element_pattern(s.paths, array));
}

features::FeatureVector estimated_features(const channel::ChannelMatrix& h_est, const ModelArtifact& m,
                                           const adcpm::AngleDelayTransform& transform) {
    if (h_est.kind != channel::ChannelKind::estimated) throw InvalidInput("test features need an estimated channel");
    const geometry::MultipathSet mpc =
        features::estimate_mpc(h_est, m.profile.array, m.profile.ofdm, transform, m.mpc);
    if (mpc.paths.empty()) return {};
    return features::extract_features(mpc);
}

namespace {

RMatrix to_matrix(const std::vector<std::array<double, features::FeatureVector::kDims>>& rows) {
    RMatrix x(rows.size(), features::FeatureVector::kDims);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t d = 0; d < features::FeatureVector::kDims; ++d) x(i, d) = rows[i][d];
    return x;
}

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

RMatrix rows_of(const RMatrix& x, std::span<const std::size_t> ids) {
    RMatrix out(ids.size(), x.cols());
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t d = 0; d < x.cols(); ++d) out(i, d) = x(ids[i], d);
    return out;
}

// Mean validation accuracy over folds, one cell per (C, gamma) candidate.
ml::SvmParams tune_svm(const RMatrix& x, std::span<const int> y, ml::SvmParams base, int k, std::uint64_t seed) {
    const std::vector<double> cs{0.1, 1.0, 10.0, 100.0};
    const std::vector<double> gammas =
        base.kernel.type == ml::KernelType::rbf ? std::vector<double>{0.1, 1.0, 10.0} : std::vector<double>{1.0};
    const std::vector<ml::Fold> folds = ml::kfold(x.rows(), k, seed);
    std::vector<std::size_t> usable;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        bool pos = false, neg = false;
        for (std::size_t i : folds[f].train) (y[i] > 0 ? pos : neg) = true;
        if (pos && neg) usable.push_back(f);
    }
    if (usable.empty()) return base;

    const long cells = static_cast<long>(cs.size() * gammas.size() * usable.size());
    std::vector<double> correct(static_cast<std::size_t>(cells), 0.0);
#pragma omp parallel for schedule(dynamic)
    for (long cell = 0; cell < cells; ++cell) {
        const std::size_t f = usable[static_cast<std::size_t>(cell) % usable.size()];
        const std::size_t cand = static_cast<std::size_t>(cell) / usable.size();
        ml::SvmParams p = base;
        p.C = cs[cand / gammas.size()];
        p.kernel.gamma = base.kernel.gamma * gammas[cand % gammas.size()];
        const ml::Fold& fold = folds[f];
        std::vector<int> yt;
        for (std::size_t i : fold.train) yt.push_back(y[i]);
        const ml::SvmModel m = ml::svm_train(rows_of(x, fold.train), yt, p);
        double hits = 0.0;
        for (std::size_t i : fold.validation) hits += (ml::svm_score(m, x.row(i)) >= 0.0) == (y[i] > 0);
        correct[static_cast<std::size_t>(cell)] = hits / static_cast<double>(fold.validation.size());
    }

    ml::SvmParams best = base;
    double best_acc = -1.0;
    for (std::size_t cand = 0; cand < cs.size() * gammas.size(); ++cand) {
        double acc = 0.0;
        for (std::size_t f = 0; f < usable.size(); ++f) acc += correct[cand * usable.size() + f];
        if (acc > best_acc) {
            best_acc = acc;
            best.C = cs[cand / gammas.size()];
            best.kernel.gamma = base.kernel.gamma * gammas[cand % gammas.size()];
        }
    }
    return best;
}

void write_profile(io::BinaryWriter& w, const Profile& p) {
    w.str(p.name);
    w.f64(p.ofdm.fc);
    w.f64(p.ofdm.bandwidth);
    w.i32(p.ofdm.n_subcarriers);
    w.i32(p.ofdm.n_guard);
    w.i32(p.array.rows);
    w.i32(p.array.cols);
    w.f64(p.array.dv);
    w.f64(p.array.dh);
    w.u8(static_cast<std::uint8_t>(p.array.pattern));
}

Profile read_profile(io::BinaryReader& r) {
    Profile p;
    p.name = r.str();
    p.ofdm.fc = r.f64();
    p.ofdm.bandwidth = r.f64();
    p.ofdm.n_subcarriers = r.i32();
    p.ofdm.n_guard = r.i32();
    p.array.rows = r.i32();
    p.array.cols = r.i32();
    p.array.dv = r.f64();
    p.array.dh = r.f64();
    const std::uint8_t pattern = r.u8();
    if (pattern > 1) throw DataError("unknown element pattern tag");
    p.array.pattern = static_cast<channel::ElementPattern>(pattern);
    try {
        channel::validate(p.ofdm);
        channel::validate(p.array);
    } catch (const InvalidInput& e) {
        throw DataError(std::string("checkpoint profile: ") + e.what());
    }
    return p;
}

}  // namespace

TrainOutput train_model(const Dataset& d, std::span<const std::size_t> train_ids, const ExperimentConfig& cfg,
                        const Profile& profile) {
    if (train_ids.empty()) throw InvalidInput("no training samples");
    TrainOutput out;
    ModelArtifact& m = out.model;
    m.family = cfg.family;
    m.profile = profile;
    m.mpc = cfg.mpc;
    std::vector<int> labels;
    for (std::size_t i : train_ids) labels.push_back(d.samples.at(i).label);

    if (!is_cnn(cfg.family)) {
        std::vector<features::FeatureVector> rows(train_ids.size());
        const long n = static_cast<long>(train_ids.size());
#pragma omp parallel for schedule(static)
        for (long k = 0; k < n; ++k) rows[k] = truth_features(d.samples[train_ids[k]], profile.array);
        m.scaler = features::fit_scaler(rows);
        const RMatrix x = to_matrix(features::standardize(rows, m.scaler));
        if (cfg.family == ModelFamily::svm) {
            ml::SvmParams p;
            p.kernel.type = cfg.svm_kernel;
            p.kernel.gamma = cfg.svm_gamma > 0.0 ? cfg.svm_gamma : ml::default_rbf_gamma(x);
            p.C = cfg.svm_c;
            p.seed = cfg.model_seed;
            std::vector<int> pm(labels.size());
            for (std::size_t i = 0; i < labels.size(); ++i) pm[i] = labels[i] ? 1 : -1;
            if (cfg.svm_grid_search && x.rows() >= static_cast<std::size_t>(cfg.svm_folds))
                p = tune_svm(x, pm, p, cfg.svm_folds, derive_seed(cfg.model_seed, 0x5f01, 0));
            m.svm = ml::svm_train(x, pm, p);
        } else {
            ml::RfParams p = cfg.rf;
            p.seed = cfg.model_seed;
            m.rf = ml::rf_train(x, labels, p);
        }
        return out;
    }

    std::vector<const channel::ChannelMatrix*> channels;
    std::vector<std::uint64_t> ids;
    for (std::size_t i : train_ids) {
        channels.push_back(&d.samples[i].channel);
        ids.push_back(i);
    }
    dl::ChannelSource::Options opt;
    opt.input = cfg.input;
    opt.augment_snr_db = cfg.augment_snr_db;
    opt.noise_domain = cfg.noise_domain;
    opt.seed = derive_seed(cfg.model_seed, 0xa6u, 0);
    const dl::ChannelSource source(std::move(channels), std::move(ids), labels, profile.array, profile.ofdm, opt);
    dl::PresetOptions popt;
    popt.full_batchnorm = cfg.full_batchnorm;
    dl::NetSpec spec = dl::build_preset(to_string(cfg.family), source.shape(), popt);
    dl::TrainConfig tc = cfg.train;
    tc.seed = cfg.model_seed;
    dl::TrainResult r = dl::train(std::move(spec), source, tc);
    m.cnn = dl::CnnCheckpoint{std::move(r.net), popt, cfg.input};
    out.log = std::move(r.log);
    return out;
}

eval::Scorer make_scorer(const ModelArtifact& model) {
    auto m = std::make_shared<const ModelArtifact>(model);
    auto transform = std::make_shared<const adcpm::AngleDelayTransform>(m->profile.array, m->profile.ofdm);
    return [m, transform](const std::vector<channel::ChannelMatrix>& estimates) {
        for (const channel::ChannelMatrix& h : estimates)
            if (h.kind != channel::ChannelKind::estimated) throw InvalidInput("scorer received a true channel");
        const long n = static_cast<long>(estimates.size());
        std::vector<double> scores(estimates.size());
        if (!is_cnn(m->family)) {
#pragma omp parallel for schedule(dynamic, 4)
            for (long i = 0; i < n; ++i) {
                const auto x = m->scaler.apply(estimated_features(estimates[i], *m, *transform));
                scores[i] = m->svm ? logistic(ml::svm_score(*m->svm, x)) : ml::rf_score(*m->rf, x);
            }
            return scores;
        }
        const dl::CnnCheckpoint& c = *m->cnn;
        const dl::Shape shape = c.net.spec().input;
        if (dl::input_shape(m->profile.array, m->profile.ofdm, c.input) != shape)
            throw InvalidInput("test images would not match the network input");
        constexpr long kChunk = 64;
        for (long start = 0; start < n; start += kChunk) {
            const long len = std::min(kChunk, n - start);
            dl::Tensor x(static_cast<int>(len), shape);
#pragma omp parallel for schedule(dynamic, 1)
            for (long i = 0; i < len; ++i) {
                const adcpm::Adcpm img = dl::cnn_input(estimates[start + i], *transform, c.input);
                const auto& v = img.data.values();
                std::copy(v.begin(), v.end(), x.sample(static_cast<int>(i)).begin());
            }
            const std::vector<double> p = c.net.predict(x);
            std::copy(p.begin(), p.end(), scores.begin() + start);
        }
        return scores;
    };
}

std::vector<eval::TestSample> test_samples(const Dataset& d, std::span<const std::size_t> ids) {
    std::vector<eval::TestSample> out;
    for (std::size_t i : ids) out.push_back({i, &d.samples.at(i).channel, d.samples[i].label});
    return out;
}

void save_model(const ModelArtifact& m, const std::string& path) {
    io::BinaryWriter w;
    const io::ModelFamily tag = m.svm ? io::ModelFamily::svm : m.rf ? io::ModelFamily::random_forest : io::ModelFamily::cnn;
    if (tag == io::ModelFamily::cnn && !m.cnn) throw InvalidInput("model artifact is empty");
    io::write_header(w, tag);
    write_profile(w, m.profile);
    for (std::size_t d = 0; d < features::FeatureVector::kDims; ++d) {
        w.f64(m.scaler.mean[d]);
        w.f64(m.scaler.stddev[d]);
    }
    w.i32(m.mpc.max_paths);
    w.f64(m.mpc.threshold_db);
    switch (tag) {
        case io::ModelFamily::svm: io::write_svm(w, *m.svm); break;
        case io::ModelFamily::random_forest: io::write_rf(w, *m.rf); break;
        case io::ModelFamily::cnn: dl::write_cnn(w, *m.cnn); break;
    }
    io::write_file(path, w.take());
}

ModelArtifact load_model(const std::string& path) {
    io::BinaryReader r(io::read_file(path));
    const io::ModelFamily tag = io::read_header(r);
    ModelArtifact m;
    m.profile = read_profile(r);
    for (std::size_t d = 0; d < features::FeatureVector::kDims; ++d) {
        m.scaler.mean[d] = r.f64();
        m.scaler.stddev[d] = r.f64();
    }
    m.mpc.max_paths = r.i32();
    m.mpc.threshold_db = r.f64();
    switch (tag) {
        case io::ModelFamily::svm:
            m.family = ModelFamily::svm;
            m.svm = io::read_svm(r);
            break;
        case io::ModelFamily::random_forest:
            m.family = ModelFamily::random_forest;
            m.rf = io::read_rf(r);
            break;
        case io::ModelFamily::cnn:
            m.cnn = dl::read_cnn(r);
            m.family = family_from_string(m.cnn->net.spec().preset);
            break;
    }
    if (!r.at_end()) throw DataError("trailing bytes in model checkpoint");
    return m;
}

}  // namespace ndt::pipeline
