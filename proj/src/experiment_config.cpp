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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ndtlos/checkpoint.hpp"
#include "ndtlos/pipeline.hpp"

namespace ndt::pipeline {

namespace pt = boost::property_tree;

ModelFamily family_from_string(const std::string& s) {
    if (s == "svm") return ModelFamily::svm;
    if (s == "rf" || s == "random_forest") return ModelFamily::random_forest;
    if (s == "resnet_mini") return ModelFamily::resnet_mini;
    if (s == "segnet_mini") return ModelFamily::segnet_mini;
    throw ConfigError("unknown model family '" + s + "'");
}

std::string to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::svm: return "svm";
        case ModelFamily::random_forest: return "rf";
        case ModelFamily::resnet_mini: return "resnet_mini";
        case ModelFamily::segnet_mini: return "segnet_mini";
    }
    return "?";
}

bool is_cnn(ModelFamily f) { return f == ModelFamily::resnet_mini || f == ModelFamily::segnet_mini; }

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

double to_double(const std::string& v) {
    const std::string t = trim(v);
    if (t == "inf" || t == "+inf") return INFINITY;
    if (t == "-inf") return -INFINITY;
    std::size_t used = 0;
    const double d = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing characters");
    return d;
}

template <class T>
T to_integer(const std::string& v) {
    const std::string t = trim(v);
    T out{};
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || p != t.data() + t.size()) throw std::invalid_argument("not an integer");
    return out;
}

bool to_bool(const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw std::invalid_argument("not a boolean");
}

std::vector<double> to_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(item));
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"schema_version", [](ExperimentConfig& c, const std::string& v) { c.schema_version = to_integer<int>(v); }},
        {"data.scene", [](ExperimentConfig& c, const std::string& v) { c.scene = trim(v); }},
        {"data.city_seed", [](ExperimentConfig& c, const std::string& v) { c.city_seed = to_integer<std::uint64_t>(v); }},
        {"data.profile",
         [](ExperimentConfig& c, const std::string& v) {
             c.profile = trim(v);
             profile_by_name(c.profile);
         }},
        {"data.cell_size", [](ExperimentConfig& c, const std::string& v) { c.cell_size = to_double(v); }},
        {"data.ue_height", [](ExperimentConfig& c, const std::string& v) { c.ue_height = to_double(v); }},
        {"data.max_samples",
         [](ExperimentConfig& c, const std::string& v) { c.max_samples = to_integer<std::size_t>(v); }},
        {"data.seed", [](ExperimentConfig& c, const std::string& v) { c.data_seed = to_integer<std::uint64_t>(v); }},
        {"split.test_fraction", [](ExperimentConfig& c, const std::string& v) { c.test_fraction = to_double(v); }},
        {"split.test_count", [](ExperimentConfig& c, const std::string& v) { c.test_count = to_integer<std::size_t>(v); }},
        {"split.stratify", [](ExperimentConfig& c, const std::string& v) { c.stratify = to_bool(v); }},
        {"split.seed", [](ExperimentConfig& c, const std::string& v) { c.split_seed = to_integer<std::uint64_t>(v); }},
        {"model.family", [](ExperimentConfig& c, const std::string& v) { c.family = family_from_string(trim(v)); }},
        {"model.seed", [](ExperimentConfig& c, const std::string& v) { c.model_seed = to_integer<std::uint64_t>(v); }},
        {"cnn.epochs", [](ExperimentConfig& c, const std::string& v) { c.train.epochs = to_integer<int>(v); }},
        {"cnn.batch_size", [](ExperimentConfig& c, const std::string& v) { c.train.batch_size = to_integer<int>(v); }},
        {"cnn.learning_rate",
         [](ExperimentConfig& c, const std::string& v) { c.train.optimizer.learning_rate = to_double(v); }},
        {"cnn.optimizer",
         [](ExperimentConfig& c, const std::string& v) {
             const std::string t = trim(v);
             if (t == "adam")
                 c.train.optimizer.kind = dl::OptimizerKind::adam;
             else if (t == "sgd_momentum")
                 c.train.optimizer.kind = dl::OptimizerKind::sgd_momentum;
             else
                 throw std::invalid_argument("expected adam or sgd_momentum");
         }},
        {"cnn.cosine_decay",
         [](ExperimentConfig& c, const std::string& v) { c.train.optimizer.cosine_decay = to_bool(v); }},
        {"cnn.momentum", [](ExperimentConfig& c, const std::string& v) { c.train.optimizer.momentum = to_double(v); }},
        {"cnn.augment_snr_db",
         [](ExperimentConfig& c, const std::string& v) {
             if (trim(v) == "none")
                 c.augment_snr_db.reset();
             else
                 c.augment_snr_db = to_double(v);
         }},
        {"cnn.noise_domain",
         [](ExperimentConfig& c, const std::string& v) {
             const std::string t = trim(v);
             if (t == "channel")
                 c.noise_domain = dl::NoiseDomain::channel;
             else if (t == "adcpm")
                 c.noise_domain = dl::NoiseDomain::adcpm;
             else
                 throw std::invalid_argument("expected channel or adcpm");
         }},
        {"cnn.w_rec", [](ExperimentConfig& c, const std::string& v) { c.train.w_rec = to_double(v); }},
        {"cnn.pos_weight", [](ExperimentConfig& c, const std::string& v) { c.train.pos_weight = to_double(v); }},
        {"cnn.full_batchnorm", [](ExperimentConfig& c, const std::string& v) { c.full_batchnorm = to_bool(v); }},
        {"cnn.pool_h", [](ExperimentConfig& c, const std::string& v) { c.input.pool_h = to_integer<int>(v); }},
        {"cnn.pool_w", [](ExperimentConfig& c, const std::string& v) { c.input.pool_w = to_integer<int>(v); }},
        {"svm.kernel",
         [](ExperimentConfig& c, const std::string& v) {
             const std::string t = trim(v);
             if (t == "rbf")
                 c.svm_kernel = ml::KernelType::rbf;
             else if (t == "linear")
                 c.svm_kernel = ml::KernelType::linear;
             else
                 throw std::invalid_argument("expected rbf or linear");
         }},
        {"svm.c", [](ExperimentConfig& c, const std::string& v) { c.svm_c = to_double(v); }},
        {"svm.gamma", [](ExperimentConfig& c, const std::string& v) { c.svm_gamma = to_double(v); }},
        {"svm.grid_search", [](ExperimentConfig& c, const std::string& v) { c.svm_grid_search = to_bool(v); }},
        {"svm.folds", [](ExperimentConfig& c, const std::string& v) { c.svm_folds = to_integer<int>(v); }},
        {"rf.n_trees", [](ExperimentConfig& c, const std::string& v) { c.rf.n_trees = to_integer<int>(v); }},
        {"rf.max_depth", [](ExperimentConfig& c, const std::string& v) { c.rf.max_depth = to_integer<int>(v); }},
        {"rf.min_leaf", [](ExperimentConfig& c, const std::string& v) { c.rf.min_leaf = to_integer<int>(v); }},
        {"rf.max_features", [](ExperimentConfig& c, const std::string& v) { c.rf.max_features = to_integer<int>(v); }},
        {"features.max_paths", [](ExperimentConfig& c, const std::string& v) { c.mpc.max_paths = to_integer<int>(v); }},
        {"features.threshold_db", [](ExperimentConfig& c, const std::string& v) { c.mpc.threshold_db = to_double(v); }},
        {"eval.snr_db", [](ExperimentConfig& c, const std::string& v) { c.snr_db = to_list(v); }},
        {"eval.roc_snr_db", [](ExperimentConfig& c, const std::string& v) { c.roc_snr_db = to_list(v); }},
        {"eval.seed", [](ExperimentConfig& c, const std::string& v) { c.eval_seed = to_integer<std::uint64_t>(v); }},
    };
    return table;
}

void check_ranges(const ExperimentConfig& c) {
    auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
    if (c.schema_version != 1) fail("schema_version", "unsupported version " + std::to_string(c.schema_version));
    if (!(c.cell_size > 0.0)) fail("data.cell_size", "must be positive");
    if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0)) fail("split.test_fraction", "must lie in (0, 1)");
    if (c.train.epochs <= 0) fail("cnn.epochs", "must be positive");
    if (c.train.batch_size <= 0) fail("cnn.batch_size", "must be positive");
    if (!(c.train.optimizer.learning_rate > 0.0)) fail("cnn.learning_rate", "must be positive");
    if (!(c.train.w_rec >= 0.0)) fail("cnn.w_rec", "must be non-negative");
    if (!(c.train.pos_weight > 0.0)) fail("cnn.pos_weight", "must be positive");
    if (c.input.pool_h < 1) fail("cnn.pool_h", "must be at least 1");
    if (c.input.pool_w < 1) fail("cnn.pool_w", "must be at least 1");
    if (!(c.svm_c > 0.0)) fail("svm.c", "must be positive");
    if (c.svm_gamma < 0.0) fail("svm.gamma", "must be non-negative");
    if (c.svm_folds < 2) fail("svm.folds", "must be at least 2");
    if (c.rf.n_trees <= 0) fail("rf.n_trees", "must be positive");
    if (c.rf.max_depth <= 0) fail("rf.max_depth", "must be positive");
    if (c.rf.min_leaf <= 0) fail("rf.min_leaf", "must be positive");
    if (c.mpc.max_paths <= 0) fail("features.max_paths", "must be positive");
}

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + num(v[i]);
    return out;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.message() + " at line " + std::to_string(e.line()));
    }
    ExperimentConfig cfg;
    bool saw_version = false;
    for (const auto& [section, node] : tree) {
        std::vector<std::pair<std::string, std::string>> entries;
        if (node.empty())
            entries.emplace_back(section, node.data());
        else
            for (const auto& [key, leaf] : node) {
                if (!leaf.empty()) throw ConfigError(section + "." + key + ": nested keys are not allowed");
                entries.emplace_back(section + "." + key, leaf.data());
            }
        for (const auto& [path, value] : entries) {
            const auto it = setters().find(path);
            if (it == setters().end()) throw ConfigError(path + ": unknown key");
            try {
                it->second(cfg, value);
            } catch (const ConfigError& e) {
                throw ConfigError(path + ": " + e.what());
            } catch (const std::exception& e) {
                throw ConfigError(path + ": invalid value '" + value + "' (" + e.what() + ")");
            }
            saw_version |= path == "schema_version";
        }
    }
    if (!saw_version) throw ConfigError("schema_version: missing");
    check_ranges(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
    return parse_experiment_config(text);
}

std::string experiment_config_to_text(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "schema_version = " << c.schema_version << "\n\n";
    o << "[data]\n";
    if (!c.scene.empty()) o << "scene = " << c.scene << "\n";
    o << "city_seed = " << c.city_seed << "\nprofile = " << c.profile << "\ncell_size = " << num(c.cell_size)
      << "\nue_height = " << num(c.ue_height) << "\nmax_samples = " << c.max_samples << "\nseed = " << c.data_seed
      << "\n\n";
    o << "[split]\ntest_fraction = " << num(c.test_fraction) << "\ntest_count = " << c.test_count
      << "\nstratify = " << (c.stratify ? "true" : "false") << "\nseed = " << c.split_seed << "\n\n";
    o << "[model]\nfamily = " << to_string(c.family) << "\nseed = " << c.model_seed << "\n\n";
    o << "[cnn]\nepochs = " << c.train.epochs << "\nbatch_size = " << c.train.batch_size
      << "\nlearning_rate = " << num(c.train.optimizer.learning_rate)
      << "\noptimizer = " << (c.train.optimizer.kind == dl::OptimizerKind::adam ? "adam" : "sgd_momentum")
      << "\ncosine_decay = " << (c.train.optimizer.cosine_decay ? "true" : "false")
      << "\nmomentum = " << num(c.train.optimizer.momentum)
      << "\naugment_snr_db = " << (c.augment_snr_db ? num(*c.augment_snr_db) : "none")
      << "\nnoise_domain = " << (c.noise_domain == dl::NoiseDomain::channel ? "channel" : "adcpm")
      << "\nw_rec = " << num(c.train.w_rec) << "\npos_weight = " << num(c.train.pos_weight)
      << "\nfull_batchnorm = " << (c.full_batchnorm ? "true" : "false") << "\npool_h = " << c.input.pool_h
      << "\npool_w = " << c.input.pool_w << "\n\n";
    o << "[svm]\nkernel = " << (c.svm_kernel == ml::KernelType::rbf ? "rbf" : "linear") << "\nc = " << num(c.svm_c)
      << "\ngamma = " << num(c.svm_gamma) << "\ngrid_search = " << (c.svm_grid_search ? "true" : "false")
      << "\nfolds = " << c.svm_folds << "\n\n";
    o << "[rf]\nn_trees = " << c.rf.n_trees << "\nmax_depth = " << c.rf.max_depth << "\nmin_leaf = " << c.rf.min_leaf
      << "\nmax_features = " << c.rf.max_features << "\n\n";
    o << "[features]\nmax_paths = " << c.mpc.max_paths << "\nthreshold_db = " << num(c.mpc.threshold_db) << "\n\n";
    o << "[eval]\nsnr_db = " << list(c.snr_db) << "\nroc_snr_db = " << list(c.roc_snr_db) << "\nseed = " << c.eval_seed
      << "\n";
    return o.str();
}

}  // namespace ndt::pipeline
