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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ndtlos/checkpoint.hpp"
#include "ndtlos/pipeline.hpp"

namespace ndt::pipeline {

namespace fs = std::filesystem;

namespace {

std::string read_or_empty(const fs::path& p) {
    if (!fs::exists(p)) return {};
    return io::read_file(p.string());
}

std::string snr_tag(double snr) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", snr);
    return buf;
}

void write_scores(const std::vector<eval::SweepPoint>& sweep, std::span<const eval::TestSample> test,
                  const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write " + path);
    f << "snr_db,sample,label,score\n";
    char line[128];
    for (const eval::SweepPoint& p : sweep)
        for (std::size_t i = 0; i < test.size(); ++i) {
            std::snprintf(line, sizeof line, "%g,%zu,%d,%.17g\n", p.snr_db, test[i].id, p.labels[i], p.scores[i]);
            f << line;
        }
}

bool manifest_matches(const DatasetManifest& m, const std::string& hash, const GenerationConfig& g) {
    return m.scene_hash == hash && m.profile.name == g.profile.name && m.profile.ofdm == g.profile.ofdm &&
           m.profile.array == g.profile.array && m.cell_size == g.cell_size && m.ue_height == g.ue_height &&
           m.max_samples == g.max_samples && m.seed == g.seed;
}

}  // namespace

geometry::Scene scene_for(const ExperimentConfig& cfg) {
    if (cfg.scene.empty()) return geometry::make_toy_city(geometry::CityParams{}, cfg.city_seed);
    try {
        return geometry::load_scene(cfg.scene);
    } catch (const DataError& e) {
        throw DataError(std::string("data.scene: ") + e.what());
    }
}

GenerationConfig generation_config_for(const ExperimentConfig& cfg) {
    GenerationConfig gen;
    gen.profile = profile_by_name(cfg.profile);
    gen.cell_size = cfg.cell_size;
    gen.ue_height = cfg.ue_height;
    gen.max_samples = cfg.max_samples;
    gen.seed = cfg.data_seed;
    return gen;
}

std::size_t test_count_for(const ExperimentConfig& cfg, std::size_t total) {
    return cfg.test_count ? cfg.test_count : test_count_for_fraction(total, cfg.test_fraction);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, bool force) {
    ExperimentResult result;
    result.out_dir = out_dir;
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const std::string cfg_text = experiment_config_to_text(cfg);
    const fs::path cfg_path = dir / "experiment.ini";
    const fs::path summary_path = dir / "summary.csv";
    if (!force && fs::exists(summary_path) && read_or_empty(cfg_path) == cfg_text) {
        result.skipped = true;
        return result;
    }
    fs::remove(summary_path);

    const geometry::Scene scene = scene_for(cfg);
    geometry::save_scene(scene, (dir / "scene.txt").string());
    const GenerationConfig gen = generation_config_for(cfg);

    const fs::path data_path = dir / "dataset.ndtl";
    const fs::path manifest_path = dir / "manifest.json";
    const std::string hash = scene_hash(scene);
    Dataset data;
    DatasetManifest manifest;
    bool reuse = !force && fs::exists(data_path) && fs::exists(manifest_path);
    if (reuse) {
        manifest = load_manifest(manifest_path.string());
        reuse = manifest_matches(manifest, hash, gen);
        if (reuse) {
            data = load_dataset(data_path.string());
            reuse = hash_hex(fnv1a64(encode_dataset(data))) == manifest.dataset_hash;
        }
    }
    if (!reuse) {
        GenerationStats stats;
        data = generate_dataset(scene, gen, &stats);
        if (data.samples.size() < 2) throw DataError("scene produced fewer than two usable samples");
        save_dataset(data, data_path.string());
        manifest = make_manifest(scene, gen, stats, data);
    }

    std::vector<int> labels;
    for (const Sample& s : data.samples) labels.push_back(s.label);
    const std::size_t test_count = test_count_for(cfg, data.samples.size());
    const bool resplit = manifest.split.empty() || manifest.split_seed != cfg.split_seed ||
                         manifest.stratified != cfg.stratify ||
                         static_cast<std::size_t>(std::count(manifest.split.begin(), manifest.split.end(),
                                                             SplitRole::test)) != test_count;
    if (resplit) split(manifest, labels, test_count, cfg.split_seed, cfg.stratify);
    save_manifest(manifest, manifest_path.string());

    const std::vector<std::size_t> train_ids = indices_with_role(manifest, SplitRole::train);
    const std::vector<std::size_t> test_ids = indices_with_role(manifest, SplitRole::test);

    const std::string name = to_string(cfg.family);
    TrainOutput trained = train_model(data, train_ids, cfg, gen.profile);
    save_model(trained.model, (dir / ("model_" + name + ".ndtm")).string());
    if (!trained.log.empty()) dl::write_training_log(trained.log, (dir / ("train_log_" + name + ".csv")).string());

    const std::vector<eval::TestSample> test = test_samples(data, test_ids);
    const eval::Scorer scorer = make_scorer(trained.model);
    result.sweep = eval::eval_sweep(scorer, test, cfg.snr_db, cfg.eval_seed);
    eval::write_sweep_csv(result.sweep, (dir / ("sweep_" + name + ".csv")).string());
    write_scores(result.sweep, test, (dir / ("scores_" + name + ".csv")).string());

    for (double snr : cfg.roc_snr_db) {
        auto it = std::find_if(result.sweep.begin(), result.sweep.end(),
                               [&](const eval::SweepPoint& p) { return p.snr_db == snr; });
        std::vector<eval::SweepPoint> extra;
        if (it == result.sweep.end()) {
            const double one[] = {snr};
            extra = eval::eval_sweep(scorer, test, one, cfg.eval_seed);
            it = extra.begin();
        }
        if (std::isnan(it->auc)) continue;
        eval::write_roc_csv(eval::roc(it->scores, it->labels),
                            (dir / ("roc_" + name + "_" + snr_tag(snr) + ".csv")).string());
    }

    if (trained.model.cnn) {
        eval::write_flops_report(eval::flops(trained.model.cnn->net.spec()),
                                 (dir / ("flops_" + name + ".txt")).string());
    }

    {
        std::ofstream f(summary_path, std::ios::trunc);
        if (!f) throw DataError("cannot write " + summary_path.string());
        f << "model,snr_db,accuracy,auc,n_train,n_test,los_fraction\n";
        char line[256];
        for (const eval::SweepPoint& p : result.sweep) {
            std::snprintf(line, sizeof line, "%s,%g,%.10g,%.10g,%zu,%zu,%.10g\n", name.c_str(), p.snr_db, p.accuracy,
                          p.auc, train_ids.size(), test_ids.size(), manifest.los_fraction);
            f << line;
        }
    }
    io::write_file(cfg_path.string(), cfg_text);
    return result;
}

}  // namespace ndt::pipeline
