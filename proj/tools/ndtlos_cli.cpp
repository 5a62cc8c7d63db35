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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ndtlos/checkpoint.hpp"
#include "ndtlos/pipeline.hpp"

namespace fs = std::filesystem;
using namespace ndt;

namespace {

enum Exit { kOk = 0, kConfig = 2, kData = 3, kNumerical = 4 };

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    bool force = false;
};

pipeline::ExperimentConfig load_config(const Globals& g) {
    pipeline::ExperimentConfig cfg =
        g.config.empty() ? pipeline::ExperimentConfig{} : pipeline::load_experiment_config(g.config);
    if (g.seed) {
        cfg.data_seed = *g.seed;
        cfg.split_seed = *g.seed + 1;
        cfg.model_seed = *g.seed + 2;
        cfg.eval_seed = *g.seed + 3;
    }
    return cfg;
}

std::string path_in(const Globals& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

struct Loaded {
    pipeline::Dataset data;
    pipeline::DatasetManifest manifest;
};

Loaded load_data(const Globals& g) {
    Loaded l;
    l.manifest = pipeline::load_manifest(path_in(g, "manifest.json"));
    l.data = pipeline::load_dataset(path_in(g, "dataset.ndtl"));
    if (pipeline::hash_hex(fnv1a64(pipeline::encode_dataset(l.data))) != l.manifest.dataset_hash)
        throw DataError("dataset.ndtl does not match manifest.json");
    return l;
}

std::vector<double> parse_snr_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(item == "inf" ? INFINITY : std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("--snr-list: bad value '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("--snr-list: empty");
    return out;
}

int cmd_generate(const Globals& g, const std::string& scene_file) {
    pipeline::ExperimentConfig cfg = load_config(g);
    if (!scene_file.empty()) cfg.scene = scene_file;
    const std::string data_path = path_in(g, "dataset.ndtl");
    if (!g.force && fs::exists(data_path)) {
        std::cout << data_path << " exists; pass --force to regenerate\n";
        return kOk;
    }
    fs::create_directories(g.out);
    const geometry::Scene scene = pipeline::scene_for(cfg);
    const pipeline::GenerationConfig gen = pipeline::generation_config_for(cfg);
    pipeline::GenerationStats stats;
    const pipeline::Dataset data = pipeline::generate_dataset(scene, gen, &stats);
    geometry::save_scene(scene, path_in(g, "scene.txt"));
    pipeline::save_dataset(data, data_path);
    const pipeline::DatasetManifest m = pipeline::make_manifest(scene, gen, stats, data);
    pipeline::save_manifest(m, path_in(g, "manifest.json"));
    std::printf("grid %zu  outage %zu  cp-rejected %zu  kept %zu  los %.3f\n", stats.grid_points, stats.outage,
                stats.cp_violations, stats.kept, m.los_fraction);
    return kOk;
}

int cmd_split(const Globals& g) {
    const pipeline::ExperimentConfig cfg = load_config(g);
    Loaded l = load_data(g);
    std::vector<int> labels;
    for (const pipeline::Sample& s : l.data.samples) labels.push_back(s.label);
    const std::size_t test = pipeline::test_count_for(cfg, l.data.samples.size());
    pipeline::split(l.manifest, labels, test, cfg.split_seed, cfg.stratify);
    pipeline::save_manifest(l.manifest, path_in(g, "manifest.json"));
    std::printf("train %zu  test %zu\n", l.data.samples.size() - test, test);
    return kOk;
}

int cmd_features(const Globals& g, std::optional<double> snr) {
    const pipeline::ExperimentConfig cfg = load_config(g);
    const Loaded l = load_data(g);
    const pipeline::Profile& profile = l.manifest.profile;
    std::vector<features::FeatureRow> rows;
    if (!snr) {
        for (const pipeline::Sample& s : l.data.samples)
            rows.push_back({pipeline::truth_features(s, profile.array), s.label, INFINITY});
        features::write_feature_csv(rows, path_in(g, "features_truth.csv"));
        std::printf("%zu ground-truth rows\n", rows.size());
        return kOk;
    }
    pipeline::ModelArtifact view;
    view.profile = profile;
    view.mpc = cfg.mpc;
    const adcpm::AngleDelayTransform transform(profile.array, profile.ofdm);
    const std::vector<std::size_t> test = pipeline::indices_with_role(l.manifest, pipeline::SplitRole::test);
    for (std::size_t i : test) {
        const channel::UplinkRecord rx = channel::simulate_uplink(
            l.data.samples[i].channel, *snr, derive_seed(cfg.eval_seed, std::bit_cast<std::uint64_t>(*snr), i));
        const channel::ChannelMatrix est = channel::estimate_channel_ls(rx.received, rx.pilots);
        rows.push_back({pipeline::estimated_features(est, view, transform), l.data.samples[i].label, *snr});
    }
    char name[64];
    std::snprintf(name, sizeof name, "features_test_%g.csv", *snr);
    features::write_feature_csv(rows, path_in(g, name));
    std::printf("%zu estimated rows at %g dB\n", rows.size(), *snr);
    return kOk;
}

int cmd_train(const Globals& g) {
    const pipeline::ExperimentConfig cfg = load_config(g);
    const Loaded l = load_data(g);
    const std::string name = pipeline::to_string(cfg.family);
    const std::string model_path = path_in(g, "model_" + name + ".ndtm");
    if (!g.force && fs::exists(model_path)) {
        std::cout << model_path << " exists; pass --force to retrain\n";
        return kOk;
    }
    const std::vector<std::size_t> train = pipeline::indices_with_role(l.manifest, pipeline::SplitRole::train);
    const pipeline::TrainOutput out = pipeline::train_model(l.data, train, cfg, l.manifest.profile);
    pipeline::save_model(out.model, model_path);
    if (!out.log.empty()) {
        dl::write_training_log(out.log, path_in(g, "train_log_" + name + ".csv"));
        std::printf("final train loss %.4f  acc %.4f\n", out.log.back().train_loss, out.log.back().train_acc);
    }
    std::cout << "wrote " << model_path << "\n";
    return kOk;
}

std::vector<eval::SweepPoint> sweep_model(const Globals& g, const pipeline::ExperimentConfig& cfg,
                                          const std::vector<double>& snrs) {
    const Loaded l = load_data(g);
    const std::string name = pipeline::to_string(cfg.family);
    const pipeline::ModelArtifact model = pipeline::load_model(path_in(g, "model_" + name + ".ndtm"));
    const std::vector<std::size_t> ids = pipeline::indices_with_role(l.manifest, pipeline::SplitRole::test);
    const std::vector<eval::TestSample> test = pipeline::test_samples(l.data, ids);
    return eval::eval_sweep(pipeline::make_scorer(model), test, snrs, cfg.eval_seed);
}

void print_sweep(const std::vector<eval::SweepPoint>& sweep) {
    std::printf("%8s %9s %9s\n", "snr_db", "accuracy", "auc");
    for (const eval::SweepPoint& p : sweep) std::printf("%8g %9.4f %9.4f\n", p.snr_db, p.accuracy, p.auc);
}

int cmd_eval(const Globals& g, double snr) {
    const pipeline::ExperimentConfig cfg = load_config(g);
    const std::vector<eval::SweepPoint> sweep = sweep_model(g, cfg, {snr});
    const eval::SweepPoint& p = sweep.front();
    if (!std::isnan(p.auc)) {
        char name[96];
        std::snprintf(name, sizeof name, "roc_%s_%g.csv", pipeline::to_string(cfg.family).c_str(), snr);
        eval::write_roc_csv(eval::roc(p.scores, p.labels), path_in(g, name));
    }
    print_sweep(sweep);
    return kOk;
}

int cmd_sweep(const Globals& g, const std::string& snr_list) {
    pipeline::ExperimentConfig cfg = load_config(g);
    if (!snr_list.empty()) cfg.snr_db = parse_snr_list(snr_list);
    const std::vector<eval::SweepPoint> sweep = sweep_model(g, cfg, cfg.snr_db);
    eval::write_sweep_csv(sweep, path_in(g, "sweep_" + pipeline::to_string(cfg.family) + ".csv"));
    print_sweep(sweep);
    return kOk;
}

int cmd_flops(const Globals& g, const std::string& preset, int height, int width, bool table) {
    fs::create_directories(g.out);
    if (table) {
        const double full = eval::flops(dl::build_preset("resnet34_reference", {1, 128, 512})).total_flops / 1e9;
        const double pooled = eval::flops(dl::build_preset("resnet34_reference", {1, 32, 128})).total_flops / 1e9;
        std::printf("%-28s %10s\n", "model", "GFLOPs");
        std::printf("%-28s %10.2f\n", "SegNet (full)", eval::kSegnetFullGflops);
        std::printf("%-28s %10.2f\n", "SegNet (encoder only)", eval::kSegnetEncoderGflops);
        std::printf("%-28s %10.2f\n", "ResNet34 (128, 512)", full);
        std::printf("%-28s %10.2f\n", "ResNet34 (32, 128)", pooled);
        std::printf("reduction vs ResNet34 (128, 512): %.2f%%\n", eval::reduction_percent(full, pooled));
        std::printf("reduction vs SegNet encoder:      %.2f%%\n",
                    eval::reduction_percent(eval::kSegnetEncoderGflops, pooled));
        std::printf("convention: %s\n", eval::kFlopsConvention);
        return kOk;
    }
    const pipeline::ExperimentConfig cfg = load_config(g);
    std::string name = preset;
    if (name.empty()) name = pipeline::is_cnn(cfg.family) ? pipeline::to_string(cfg.family) : "resnet34_reference";
    dl::Shape in{1, height, width};
    if (height <= 0 || width <= 0) {
        const pipeline::Profile p = pipeline::profile_by_name(cfg.profile);
        in = dl::input_shape(p.array, p.ofdm, cfg.input);
    }
    dl::PresetOptions opt;
    opt.full_batchnorm = cfg.full_batchnorm;
    const eval::FlopsReport r = eval::flops(dl::build_preset(name, in, opt));
    eval::write_flops_report(r, path_in(g, "flops_" + name + ".txt"));
    std::printf("%s (%d, %d): %.4f GFLOPs\n", name.c_str(), in.h, in.w, r.total_flops / 1e9);
    return kOk;
}

int cmd_report(const Globals& g) {
    const std::string path = path_in(g, "summary.csv");
    if (!fs::exists(path)) throw DataError("no summary.csv in " + g.out + "; run an experiment first");
    std::ifstream f(path);
    std::string line;
    std::getline(f, line);
    std::printf("%-12s %8s %9s %9s\n", "model", "snr_db", "accuracy", "auc");
    while (std::getline(f, line)) {
        std::stringstream ss(line);
        std::string model, snr, acc, auc;
        std::getline(ss, model, ',');
        std::getline(ss, snr, ',');
        std::getline(ss, acc, ',');
        std::getline(ss, auc, ',');
        std::printf("%-12s %8s %9.4f %9.4f\n", model.c_str(), snr.c_str(), std::stod(acc), std::stod(auc));
    }
    return kOk;
}

int cmd_run(const Globals& g) {
    const pipeline::ExperimentConfig cfg = load_config(g);
    const pipeline::ExperimentResult r = pipeline::run_experiment(cfg, g.out, g.force);
    if (r.skipped) {
        std::cout << "experiment in " << g.out << " is complete; pass --force to rerun\n";
        return kOk;
    }
    print_sweep(r.sweep);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    apply_worker_env();
    CLI::App app{"LoS/NLoS identification on a synthetic city twin"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "experiment config (key = value with [sections])");
    app.add_option("--seed", g.seed, "master seed; overrides the config's data/split/model/eval seeds");
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_flag("--force", g.force, "overwrite existing artifacts");

    std::string scene_file;
    auto* generate = app.add_subcommand("generate", "trace the scene and write dataset.ndtl + manifest.json");
    generate->add_option("--scene", scene_file, "scene file (default: seeded toy city)");

    auto* split = app.add_subcommand("split", "assign train/test roles in the manifest");

    std::optional<double> feature_snr;
    auto* feats = app.add_subcommand("features", "write ground-truth or estimated classic features as CSV");
    feats->add_option("--snr", feature_snr, "estimate test-set features at this SNR instead");

    auto* train = app.add_subcommand("train", "train the configured model family");

    double eval_snr = 0.0;
    auto* evaluate = app.add_subcommand("eval", "evaluate the trained model at one SNR");
    evaluate->add_option("--snr", eval_snr, "uplink SNR in dB")->required();

    std::string snr_list;
    auto* sweep = app.add_subcommand("sweep", "accuracy and AUC over an SNR list");
    sweep->add_option("--snr-list", snr_list, "comma-separated dB values (default: from config)");

    std::string preset;
    int height = 0, width = 0;
    bool table = false;
    auto* flops = app.add_subcommand("flops", "analytic inference cost of a network preset");
    flops->add_option("--preset", preset, "resnet34_reference, resnet_mini or segnet_mini");
    flops->add_option("--height", height, "input height");
    flops->add_option("--width", width, "input width");
    flops->add_flag("--table", table, "print the ResNet34 / SegNet comparison");

    auto* report = app.add_subcommand("report", "print summary.csv of a finished experiment");
    auto* run = app.add_subcommand("run", "generate, split, train and sweep in one go");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*generate) return cmd_generate(g, scene_file);
        if (*split) return cmd_split(g);
        if (*feats) return cmd_features(g, feature_snr);
        if (*train) return cmd_train(g);
        if (*evaluate) return cmd_eval(g, eval_snr);
        if (*sweep) return cmd_sweep(g, snr_list);
        if (*flops) return cmd_flops(g, preset, height, width, table);
        if (*report) return cmd_report(g);
        if (*run) return cmd_run(g);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    }
    return kOk;
}
