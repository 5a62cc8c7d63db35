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

#ifndef NDTLOS_PIPELINE_HPP
#define NDTLOS_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ndtlos/channel.hpp"
#include "ndtlos/classic_ml.hpp"
#include "ndtlos/deepnet.hpp"
#include "ndtlos/evalkit.hpp"
#include "ndtlos/features.hpp"
#include "ndtlos/geometry.hpp"

namespace ndt::pipeline {

struct Profile {
    std::string name;
    channel::OfdmConfig ofdm;
    channel::ArrayConfig array;
    friend bool operator==(const Profile&, const Profile&) = default;
};

// "full": 28 GHz, 400 MHz, 512 subcarriers, 8 x 16 array.
// "desk": 28 GHz, 100 MHz, 128 subcarriers, 4 x 8 array.
Profile profile_by_name(const std::string& name);

struct Sample {
    Vec3 ue_position;
    geometry::MultipathSet paths;  // ground truth
    channel::ChannelMatrix channel;
    int label = 0;
};

struct Dataset {
    std::vector<Sample> samples;
    friend bool operator==(const Dataset& a, const Dataset& b);
};

struct GenerationConfig {
    Profile profile;
    double cell_size = 2.0;  // UE grid pitch, meters
    double ue_height = 1.5;
    std::size_t max_samples = 0;  // 0 keeps every usable grid point
    std::uint64_t seed = 0;
};

struct GenerationStats {
    std::size_t grid_points = 0;
    std::size_t outage = 0;
    std::size_t cp_violations = 0;
    std::size_t kept = 0;
};

// Channels are rounded to single precision so the in-memory dataset equals
// its stored form.
Dataset generate_dataset(const geometry::Scene& scene, const GenerationConfig& cfg, GenerationStats* stats = nullptr);
// Single-threaded reference producing the same dataset.
Dataset generate_dataset_serial(const geometry::Scene& scene, const GenerationConfig& cfg,
                                GenerationStats* stats = nullptr);

// "NDTL" container, little-endian.
std::string encode_dataset(const Dataset& d);
Dataset decode_dataset(const std::string& bytes);
void save_dataset(const Dataset& d, const std::string& path);
Dataset load_dataset(const std::string& path);

enum class SplitRole : std::uint8_t { train = 0, test = 1 };

struct DatasetManifest {
    int version = 1;
    std::string scene_hash;  // FNV-1a of the canonical scene text, hex
    std::string dataset_hash;
    Profile profile;
    double cell_size = 0.0;
    double ue_height = 0.0;
    std::size_t max_samples = 0;
    std::uint64_t seed = 0;
    std::size_t grid_points = 0;
    std::size_t sample_count = 0;
    std::size_t los_count = 0;
    double los_fraction = 0.0;
    std::size_t outage_count = 0;
    std::size_t cp_violation_count = 0;
    std::vector<SplitRole> split;  // empty until split() runs
    std::uint64_t split_seed = 0;
    bool stratified = false;
    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

std::string hash_hex(std::uint64_t h);
std::string scene_hash(const geometry::Scene& scene);

DatasetManifest make_manifest(const geometry::Scene& scene, const GenerationConfig& cfg, const GenerationStats& stats,
                              const Dataset& d);
std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const std::string& text);
void save_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

// Uniform draw of test_count samples without replacement. With stratify the
// LoS share of the test set matches the dataset's within one sample.
void split(DatasetManifest& m, std::span<const int> labels, std::size_t test_count, std::uint64_t seed,
           bool stratify = false);
std::size_t test_count_for_fraction(std::size_t total, double fraction);
std::vector<std::size_t> indices_with_role(const DatasetManifest& m, SplitRole role);

enum class ModelFamily { svm, random_forest, resnet_mini, segnet_mini };
ModelFamily family_from_string(const std::string& s);
std::string to_string(ModelFamily f);
bool is_cnn(ModelFamily f);

struct ExperimentConfig {
    int schema_version = 1;
    // [data]
    std::string scene;  // scene file; empty generates the toy city
    std::uint64_t city_seed = 4;
    std::string profile = "desk";
    double cell_size = 1.0;
    double ue_height = 1.5;
    std::size_t max_samples = 2000;
    std::uint64_t data_seed = 1;
    // [split]
    double test_fraction = 0.2;
    std::size_t test_count = 0;  // overrides test_fraction when nonzero
    bool stratify = false;
    std::uint64_t split_seed = 2;
    // [model]
    ModelFamily family = ModelFamily::resnet_mini;
    std::uint64_t model_seed = 3;
    // [cnn]
    dl::TrainConfig train;
    dl::InputConfig input;
    bool full_batchnorm = false;
    std::optional<double> augment_snr_db = 0.0;
    dl::NoiseDomain noise_domain = dl::NoiseDomain::channel;
    // [svm]
    ml::KernelType svm_kernel = ml::KernelType::rbf;
    double svm_c = 1.0;
    double svm_gamma = 0.0;  // 0 selects the data-driven default
    // k-fold search over C in {0.1, 1, 10, 100} and {0.1, 1, 10} x gamma;
    // svm_c is then ignored.
    bool svm_grid_search = true;
    int svm_folds = 5;
    // [rf]
    ml::RfParams rf;
    // [features]
    features::MpcEstimatorConfig mpc;
    // [eval]
    std::vector<double> snr_db = eval::default_snr_list();
    std::vector<double> roc_snr_db = {-15.0, 0.0, 15.0};
    std::uint64_t eval_seed = 4;
};

// Key = value with [sections]. Unknown or malformed keys raise ConfigError
// naming section.key.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_text(const ExperimentConfig& cfg);

struct ModelArtifact {
    ModelFamily family = ModelFamily::svm;
    Profile profile;
    features::Scaler scaler;
    features::MpcEstimatorConfig mpc;
    std::optional<ml::SvmModel> svm;
    std::optional<ml::RfModel> rf;
    std::optional<dl::CnnCheckpoint> cnn;
};

void save_model(const ModelArtifact& m, const std::string& path);
ModelArtifact load_model(const std::string& path);

// Ground-truth classic features: path amplitudes as seen through the BS
// element pattern.
features::FeatureVector truth_features(const Sample& s, const channel::ArrayConfig& array);
// Test-time features from an estimated channel only.
features::FeatureVector estimated_features(const channel::ChannelMatrix& h_est, const ModelArtifact& m,
                                           const adcpm::AngleDelayTransform& transform);

struct TrainOutput {
    ModelArtifact model;
    std::vector<dl::EpochLog> log;  // CNN families only
};

// Trains on the ground truth of the given samples.
TrainOutput train_model(const Dataset& d, std::span<const std::size_t> train_ids, const ExperimentConfig& cfg,
                        const Profile& profile);

// Scorer over estimated channels. Rejects true channels.
eval::Scorer make_scorer(const ModelArtifact& m);

std::vector<eval::TestSample> test_samples(const Dataset& d, std::span<const std::size_t> ids);

// Scene named by the config, or the seeded toy city when none is given.
geometry::Scene scene_for(const ExperimentConfig& cfg);
GenerationConfig generation_config_for(const ExperimentConfig& cfg);
std::size_t test_count_for(const ExperimentConfig& cfg, std::size_t total);

struct ExperimentResult {
    bool skipped = false;  // already complete with the same config
    std::vector<eval::SweepPoint> sweep;
    std::string out_dir;
};

// generate (or reuse) dataset -> split -> train -> sweep -> reports.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, bool force);

}  // namespace ndt::pipeline

#endif  // NDTLOS_PIPELINE_HPP
