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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "fixtures.hpp"
#include "ndtlos/adcpm.hpp"
#include "ndtlos/classic_ml.hpp"
#include "ndtlos/evalkit.hpp"
#include "ndtlos/pipeline.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace ndt;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [violated]");
    }
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median3(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// 1: analytic FLOPs of the reference network and the reductions built on them.
Outcome flops_reproduction() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const double big = eval::flops(dl::build_preset("resnet34_reference", {1, 128, 512})).total_flops;
    const double small = eval::flops(dl::build_preset("resnet34_reference", {1, 32, 128})).total_flops;
    const double cut = eval::reduction_percent(big, small);
    const double vs_segnet = eval::reduction_percent(eval::kSegnetEncoderGflops * 1e9, small);
    o.require(std::abs(big / 9.36e9 - 1.0) <= 0.02, fmt("(128,512) %.4f GFLOPs", big / 1e9));
    o.require(std::abs(small / 0.58e9 - 1.0) <= 0.02, fmt("(32,128) %.4f GFLOPs", small / 1e9));
    o.require(std::abs(cut - 93.8) <= 0.5, fmt("reduction %.3f%%", cut));
    o.require(vs_segnet >= 98.5, fmt("vs SegNet encoder %.3f%%", vs_segnet));
    const double secs = seconds_since(t0);
    o.require(secs < 1.0, fmt("%.3f s", secs));
    return o;
}

// 2: Parseval scale and the dense Kronecker oracle.
Outcome transform_invariants() {
    Outcome o;
    std::mt19937_64 rng(2002);
    std::normal_distribution<double> g(0.0, 1.0);
    const pipeline::Profile desk = pipeline::profile_by_name("desk");
    const adcpm::AngleDelayTransform t(desk.array, desk.ofdm);
    const double scale = static_cast<double>(desk.array.size()) * desk.ofdm.n_subcarriers;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        CMatrix h(static_cast<std::size_t>(desk.array.size()), static_cast<std::size_t>(desk.ofdm.n_subcarriers));
        for (cd& v : h.values()) v = {g(rng), g(rng)};
        const double want = frobenius_sq(h) / scale;
        worst = std::max(worst, std::abs(frobenius_sq(t.apply(h)) - want) / want);
    }
    o.require(worst <= 1e-10, fmt("Parseval worst rel %.2e over 100 channels", worst));

    const adcpm::AngleDelayTransform small(2, 2, 8);
    double err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        CMatrix h(4, 8);
        for (cd& v : h.values()) v = {g(rng), g(rng)};
        const CMatrix a = small.apply(h), b = oracle::dense_angle_delay(h, 2, 2, 8);
        for (std::size_t i = 0; i < a.size(); ++i) err = std::max(err, std::abs(a.values()[i] - b.values()[i]));
    }
    o.require(err <= 1e-12, fmt("Kronecker oracle max abs diff %.2e", err));
    return o;
}

// 3: bin-aligned single paths peak where predicted, before and after pooling.
Outcome single_path_localization() {
    Outcome o;
    const pipeline::Profile desk = pipeline::profile_by_name("desk");
    const auto& array = desk.array;
    const auto& ofdm = desk.ofdm;
    const adcpm::AngleDelayTransform t(array, ofdm);
    std::mt19937_64 rng(3003);
    std::uniform_int_distribution<int> ra(0, array.rows - 1), rb(0, array.cols - 1), rk(1, ofdm.n_guard - 1);
    std::uniform_real_distribution<double> gain(1e-7, 1e-4);
    int hits = 0, pooled_hits = 0, trials = 0;
    while (trials < 100) {
        const int a = ra(rng), b = rb(rng), k = rk(rng);
        auto path = oracle::aligned_path(array, ofdm, a, b, k);
        if (!path) continue;
        path->gain = gain(rng);
        ++trials;
        geometry::MultipathSet set;
        set.paths.push_back(*path);
        const adcpm::Adcpm x = adcpm::compute_adcpm(t.apply(channel::synth_cfr(set, array, ofdm).data));
        const auto& v = x.data.values();
        const auto at = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
        const std::size_t row = at / x.data.cols(), col = at % x.data.cols();
        const std::size_t want_row = static_cast<std::size_t>(a * array.cols + b);
        hits += row == want_row && col == static_cast<std::size_t>(k);

        const adcpm::Adcpm p = adcpm::max_pool(x, 4, 4);
        const auto& pv = p.data.values();
        const auto pat = static_cast<std::size_t>(std::max_element(pv.begin(), pv.end()) - pv.begin());
        pooled_hits += pat / p.data.cols() == row / 4 && pat % p.data.cols() == col / 4;
    }
    o.require(hits == 100, std::to_string(hits) + "/100 argmax at predicted (angle, delay) bin");
    o.require(pooled_hits == 100, std::to_string(pooled_hits) + "/100 pooled argmax at bin / kernel");
    return o;
}

// 4: finite differences on every layer kind and on the two small presets.
Outcome gradient_correctness() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::size_t coords = 0;
    std::string worst_name;
    for (const fixture::ProbeNet& probe : fixture::single_layer_nets()) {
        dl::Network net(probe.spec);
        fixture::randomize(net, 4004);
        const dl::Tensor x = fixture::random_batch(3, probe.spec.input, 4005);
        const oracle::GradCheck g = oracle::check_network_gradient(net, x, probe.training, 10000, 4006);
        coords += g.checked;
        if (g.max_rel_error >= worst) {
            worst = g.max_rel_error;
            worst_name = probe.name;
        }
    }
    o.require(worst < 1e-4, fmt("layer kinds: worst rel %.2e", worst) + " (" + worst_name + ")");

    struct Composite {
        const char* preset;
        bool full_bn;
        bool training;
    };
    for (const Composite c : {Composite{"resnet_mini", false, true}, Composite{"resnet_mini", true, true},
                              Composite{"resnet_mini", true, false}, Composite{"segnet_mini", false, true}}) {
        dl::Network net(dl::build_preset(c.preset, {1, 8, 32}, {c.full_bn}));
        fixture::randomize(net, 4007);
        const dl::Tensor x = fixture::random_batch(4, {1, 8, 32}, 4008);
        const oracle::GradCheck g = oracle::check_network_gradient(net, x, c.training, 2000, 4009);
        coords += g.checked;
        std::string name = std::string(c.preset) + (c.full_bn ? (c.training ? "/batch-bn" : "/running-bn") : "");
        o.require(g.max_rel_error < 1e-4, name + fmt(" worst rel %.2e", g.max_rel_error));
    }
    const double secs = seconds_since(t0);
    o.require(secs < 120.0, std::to_string(coords) + " coordinates in " + fmt("%.1f s", secs));
    return o;
}

// 5: SMO against projected gradient, tree splits against brute force, Gini units.
Outcome classic_ml_oracles() {
    Outcome o;
    std::mt19937_64 rng(5005);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        RMatrix x(20, 2);
        std::vector<int> y(20);
        for (std::size_t i = 0; i < 20; ++i) {
            y[i] = i % 2 ? 1 : -1;
            x(i, 0) = g(rng) + 0.8 * y[i];
            x(i, 1) = g(rng);
        }
        const ml::Kernel k = trial % 2 ? ml::Kernel{ml::KernelType::rbf, 0.5} : ml::Kernel{ml::KernelType::linear, 1.0};
        ml::SvmParams p;
        p.kernel = k;
        p.C = 1.0;
        p.tol = 1e-6;
        std::vector<double> alpha;
        ml::svm_train(x, y, p, &alpha);
        const double got = ml::svm_dual_objective(x, y, k, alpha);
        const double want =
            oracle::projected_gradient_svm_dual(x, y, p.C, k.type == ml::KernelType::rbf ? k.gamma : 0.0, 20000);
        worst = std::max(worst, std::abs(got - want) / std::abs(want));
    }
    o.require(worst <= 1e-4, fmt("SVM dual worst rel %.2e over 10 problems", worst));

    std::uniform_int_distribution<int> q(0, 20);
    int same = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 40 + static_cast<std::size_t>(trial);
        RMatrix x(n, 1);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = i % 3 == 0 ? 1 : 0;
            x(i, 0) = 0.5 * q(rng) + (y[i] ? 8.0 : 0.0) + (i % 11 == 0 ? 4.0 : 0.0);
        }
        ml::RfParams p;
        p.n_trees = 1;
        p.bootstrap = false;
        p.min_leaf = 1;
        const ml::RfModel m = ml::rf_train(x, y, p);
        const oracle::GiniSplit want = oracle::exhaustive_gini_1d(x.values(), y, 1);
        const ml::TreeNode& root = m.trees[0].nodes[0];
        same += want.found && root.feature == 0 && root.threshold == want.threshold;
    }
    o.require(same == 20, std::to_string(same) + "/20 RF root splits equal the exhaustive scan");

    const bool units = ml::gini(std::vector<double>{5.0, 0.0}) == 0.0 && ml::gini(std::vector<double>{1.0, 1.0}) == 0.5 &&
                       ml::gini(std::vector<double>{3.0, 1.0}) == 0.375;
    o.require(units, "Gini 0 / 0.5 / 0.375 exact");
    return o;
}

// 6: AUC against brute-force concordance.
Outcome metric_correctness() {
    Outcome o;
    std::mt19937_64 rng(6006);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> len(2, 200);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = static_cast<std::size_t>(len(rng));
        std::vector<double> s(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = u(rng) < 0.5;
            s[i] = trial % 3 == 0 ? std::floor(u(rng) * 5.0) : u(rng) + 0.2 * y[i];
        }
        y[0] = 1;
        y[1] = 0;
        worst = std::max(worst, std::abs(eval::roc(s, y).auc - oracle::pairwise_auc(s, y)));
    }
    o.require(worst <= 1e-12, fmt("worst |AUC - pairwise| %.2e over 1000 sets", worst));
    const std::vector<int> y{0, 1, 0, 1, 1};
    const std::vector<double> perfect{0.1, 0.7, 0.2, 0.8, 0.9}, reversed{0.9, 0.3, 0.8, 0.2, 0.1};
    const double p = eval::roc(perfect, y).auc, r = eval::roc(reversed, y).auc;
    o.require(p == 1.0 && r == 0.0, fmt("perfect %.17g, reversed %.17g", p, r));
    return o;
}

// 7: desk-scale ordering of the augmented CNN, its ablation and the classic models.
Outcome desk_scale_ordering(const fs::path& work) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const pipeline::ExperimentConfig base;
    const pipeline::Profile profile = pipeline::profile_by_name(base.profile);
    pipeline::GenerationStats stats;
    const pipeline::GenerationConfig gen = pipeline::generation_config_for(base);
    const pipeline::Dataset d = pipeline::generate_dataset(pipeline::scene_for(base), gen, &stats);
    pipeline::DatasetManifest m = pipeline::make_manifest(pipeline::scene_for(base), gen, stats, d);
    std::vector<int> labels;
    for (const auto& s : d.samples) labels.push_back(s.label);
    pipeline::split(m, labels, pipeline::test_count_for(base, d.samples.size()), base.split_seed, base.stratify);
    const auto train_ids = pipeline::indices_with_role(m, pipeline::SplitRole::train);
    const auto test = pipeline::test_samples(d, pipeline::indices_with_role(m, pipeline::SplitRole::test));
    const std::vector<double> snrs{-15.0, 15.0};

    std::ofstream log(work / "desk_scale_ordering.csv");
    log << "model,seed,augmented,auc_m15,auc_p15\n";
    auto run = [&](pipeline::ExperimentConfig cfg, const std::string& name, bool augmented) {
        const pipeline::TrainOutput out = pipeline::train_model(d, train_ids, cfg, profile);
        const auto sweep = eval::eval_sweep(pipeline::make_scorer(out.model), test, snrs, cfg.eval_seed);
        log << name << ',' << cfg.model_seed << ',' << augmented << ',' << fmt("%.6f,%.6f", sweep[0].auc, sweep[1].auc)
            << '\n';
        return std::pair{sweep[0].auc, sweep[1].auc};
    };

    std::vector<double> aug_lo, aug_hi, plain_lo;
    for (std::uint64_t seed : {base.model_seed, base.model_seed + 10, base.model_seed + 20}) {
        pipeline::ExperimentConfig cfg = base;
        cfg.family = pipeline::ModelFamily::resnet_mini;
        cfg.model_seed = seed;
        const auto [lo, hi] = run(cfg, "resnet_mini", true);
        aug_lo.push_back(lo);
        aug_hi.push_back(hi);
        cfg.augment_snr_db.reset();
        plain_lo.push_back(run(cfg, "resnet_mini", false).first);
    }
    pipeline::ExperimentConfig cfg = base;
    cfg.family = pipeline::ModelFamily::svm;
    const double svm_lo = run(cfg, "svm", false).first;
    cfg.family = pipeline::ModelFamily::random_forest;
    const double rf_lo = run(cfg, "random_forest", false).first;

    const double a = median3(aug_lo), p = median3(plain_lo), h = median3(aug_hi);
    o.detail = std::to_string(d.samples.size()) + " samples, " + fmt("LoS %.3f", m.los_fraction);
    o.require(a >= p, fmt("(a) -15 dB AUC augmented %.4f vs plain %.4f", a, p));
    o.require(h >= 0.95, fmt("(b) +15 dB AUC %.4f", h));
    o.require(a >= svm_lo && a >= rf_lo, fmt("(c) -15 dB CNN %.4f vs SVM %.4f", a, svm_lo) + fmt(" / RF %.4f", rf_lo));
    const double secs = seconds_since(t0);
    o.require(secs <= 1800.0, fmt("%.0f s", secs));
    return o;
}

pipeline::ExperimentConfig small_config(pipeline::ModelFamily f) {
    pipeline::ExperimentConfig cfg;
    cfg.max_samples = 300;
    cfg.family = f;
    cfg.train.epochs = 2;
    cfg.rf.n_trees = 20;
    cfg.snr_db = {-10.0, 0.0, 10.0};
    cfg.roc_snr_db = {0.0};
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// 8: two full runs with different worker counts produce identical files.
Outcome determinism(const fs::path& work) {
    Outcome o;
    const int saved = omp_get_max_threads();
    std::size_t files = 0, differing = 0;
    std::string which;
    for (auto f : {pipeline::ModelFamily::svm, pipeline::ModelFamily::random_forest, pipeline::ModelFamily::resnet_mini,
                   pipeline::ModelFamily::segnet_mini}) {
        const std::string name = pipeline::to_string(f);
        const fs::path a = work / "determinism" / ("a_" + name), b = work / "determinism" / ("b_" + name);
        fs::remove_all(a);
        fs::remove_all(b);
        omp_set_num_threads(1);
        pipeline::run_experiment(small_config(f), a.string(), true);
        omp_set_num_threads(3);
        pipeline::run_experiment(small_config(f), b.string(), true);
        for (const auto& entry : fs::directory_iterator(a)) {
            ++files;
            const fs::path other = b / entry.path().filename();
            if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
                ++differing;
                which += " " + name + "/" + entry.path().filename().string();
            }
        }
        for (const auto& entry : fs::directory_iterator(b))
            if (!fs::exists(a / entry.path().filename())) ++differing;
    }
    omp_set_num_threads(saved);
    o.require(differing == 0 && files > 0,
              std::to_string(files) + " artifacts compared across 1 and 3 workers, " + std::to_string(differing) +
                  " differ" + which);
    return o;
}

// 9: scrambling the ground-truth paths of test samples changes no score.
Outcome leakage_guard() {
    Outcome o;
    const pipeline::ExperimentConfig base = small_config(pipeline::ModelFamily::svm);
    const pipeline::Profile profile = pipeline::profile_by_name(base.profile);
    const pipeline::GenerationConfig gen = pipeline::generation_config_for(base);
    pipeline::GenerationStats stats;
    const pipeline::Dataset d = pipeline::generate_dataset(pipeline::scene_for(base), gen, &stats);
    pipeline::DatasetManifest m = pipeline::make_manifest(pipeline::scene_for(base), gen, stats, d);
    std::vector<int> labels;
    for (const auto& s : d.samples) labels.push_back(s.label);
    pipeline::split(m, labels, pipeline::test_count_for(base, d.samples.size()), base.split_seed);
    const auto train_ids = pipeline::indices_with_role(m, pipeline::SplitRole::train);
    const auto test_ids = pipeline::indices_with_role(m, pipeline::SplitRole::test);

    pipeline::Dataset mutated = d;
    std::mt19937_64 rng(9009);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (std::size_t i : test_ids) {
        auto& set = mutated.samples[i].paths;
        for (auto& p : set.paths) {
            p.gain *= u(rng);
            p.delay *= u(rng);
            p.azimuth = -p.azimuth;
            p.elevation *= 0.5;
            p.bounces = 2 - p.bounces % 3;
        }
        set.paths.resize(set.paths.size() / 2);
        set.is_los = !set.is_los;
    }
    const auto clean = pipeline::test_samples(d, test_ids);
    const auto dirty = pipeline::test_samples(mutated, test_ids);

    int identical = 0, families = 0;
    bool only_estimates = true, rejects_truth = true;
    for (auto f : {pipeline::ModelFamily::svm, pipeline::ModelFamily::random_forest, pipeline::ModelFamily::resnet_mini}) {
        pipeline::ExperimentConfig cfg = base;
        cfg.family = f;
        const pipeline::TrainOutput out = pipeline::train_model(d, train_ids, cfg, profile);
        const eval::Scorer inner = pipeline::make_scorer(out.model);
        const eval::Scorer guarded = [&](const std::vector<channel::ChannelMatrix>& est) {
            for (const auto& h : est) only_estimates &= h.kind == channel::ChannelKind::estimated;
            return inner(est);
        };
        const auto a = eval::eval_sweep(guarded, clean, base.snr_db, base.eval_seed);
        const auto b = eval::eval_sweep(guarded, dirty, base.snr_db, base.eval_seed);
        bool same = true;
        for (std::size_t k = 0; k < a.size(); ++k) same &= a[k].scores == b[k].scores;
        identical += same;
        ++families;
        try {
            inner({d.samples[test_ids.front()].channel});
            rejects_truth = false;
        } catch (const InvalidInput&) {
        }
    }
    o.require(identical == families, std::to_string(identical) + "/" + std::to_string(families) +
                                         " model families score identically after path mutation");
    o.require(only_estimates, "scorers saw estimated channels only");
    o.require(rejects_truth, "scorers reject true channels");
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::string work_dir = (fs::temp_directory_path() / "ndtlos_acceptance").string();
    std::vector<int> only;
    app.add_option("--work-dir", work_dir, "scratch directory for experiment artifacts");
    app.add_option("--only", only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);
    apply_worker_env();
    const fs::path work(work_dir);
    fs::create_directories(work);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"FLOPs reproduction", flops_reproduction},
        {"transform invariants", transform_invariants},
        {"single-path localization", single_path_localization},
        {"gradient correctness", gradient_correctness},
        {"classic-ML oracle equivalence", classic_ml_oracles},
        {"metric correctness", metric_correctness},
        {"desk-scale ordering", [&] { return desk_scale_ordering(work); }},
        {"determinism", [&] { return determinism(work); }},
        {"leakage guard", leakage_guard},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Outcome r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        failures += !r.pass;
        std::printf("%s %d %s: %s\n", r.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), r.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
