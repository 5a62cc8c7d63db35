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
#include <cstdio>
#include <numeric>
#include <random>

#include <json.hpp>

#include "ndtlos/checkpoint.hpp"
#include "ndtlos/pipeline.hpp"

namespace ndt::pipeline {

using nlohmann::json;

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string scene_hash(const geometry::Scene& scene) { return hash_hex(fnv1a64(geometry::scene_to_text(scene))); }

DatasetManifest make_manifest(const geometry::Scene& scene, const GenerationConfig& cfg, const GenerationStats& stats,
                              const Dataset& d) {
    DatasetManifest m;
    m.scene_hash = scene_hash(scene);
    m.dataset_hash = hash_hex(fnv1a64(encode_dataset(d)));
    m.profile = cfg.profile;
    m.cell_size = cfg.cell_size;
    m.ue_height = cfg.ue_height;
    m.max_samples = cfg.max_samples;
    m.seed = cfg.seed;
    m.grid_points = stats.grid_points;
    m.sample_count = d.samples.size();
    for (const Sample& s : d.samples) m.los_count += s.label;
    m.los_fraction = m.sample_count ? static_cast<double>(m.los_count) / static_cast<double>(m.sample_count) : 0.0;
    m.outage_count = stats.outage;
    m.cp_violation_count = stats.cp_violations;
    return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
    json j;
    j["version"] = m.version;
    j["scene_hash"] = m.scene_hash;
    j["dataset_hash"] = m.dataset_hash;
    j["profile"] = {
        {"name", m.profile.name},
        {"fc_hz", m.profile.ofdm.fc},
        {"bandwidth_hz", m.profile.ofdm.bandwidth},
        {"n_subcarriers", m.profile.ofdm.n_subcarriers},
        {"n_guard", m.profile.ofdm.n_guard},
        {"array_rows", m.profile.array.rows},
        {"array_cols", m.profile.array.cols},
        {"spacing_v", m.profile.array.dv},
        {"spacing_h", m.profile.array.dh},
        {"element_pattern",
         m.profile.array.pattern == channel::ElementPattern::isotropic ? "isotropic" : "directional_3gpp"},
    };
    j["cell_size"] = m.cell_size;
    j["ue_height"] = m.ue_height;
    j["max_samples"] = m.max_samples;
    j["seed"] = m.seed;
    j["grid_points"] = m.grid_points;
    j["sample_count"] = m.sample_count;
    j["los_count"] = m.los_count;
    j["los_fraction"] = m.los_fraction;
    j["outage_count"] = m.outage_count;
    j["cp_violation_count"] = m.cp_violation_count;
    std::string roles;
    for (SplitRole r : m.split) roles.push_back(r == SplitRole::test ? 'T' : 'R');
    j["split"] = roles;
    j["split_seed"] = m.split_seed;
    j["stratified"] = m.stratified;
    return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        DatasetManifest m;
        m.version = j.at("version").get<int>();
        if (m.version != 1) throw DataError("unsupported manifest version " + std::to_string(m.version));
        m.scene_hash = j.at("scene_hash").get<std::string>();
        m.dataset_hash = j.at("dataset_hash").get<std::string>();
        const json& p = j.at("profile");
        m.profile.name = p.at("name").get<std::string>();
        m.profile.ofdm.fc = p.at("fc_hz").get<double>();
        m.profile.ofdm.bandwidth = p.at("bandwidth_hz").get<double>();
        m.profile.ofdm.n_subcarriers = p.at("n_subcarriers").get<int>();
        m.profile.ofdm.n_guard = p.at("n_guard").get<int>();
        m.profile.array.rows = p.at("array_rows").get<int>();
        m.profile.array.cols = p.at("array_cols").get<int>();
        m.profile.array.dv = p.at("spacing_v").get<double>();
        m.profile.array.dh = p.at("spacing_h").get<double>();
        const std::string pattern = p.at("element_pattern").get<std::string>();
        if (pattern == "isotropic")
            m.profile.array.pattern = channel::ElementPattern::isotropic;
        else if (pattern == "directional_3gpp")
            m.profile.array.pattern = channel::ElementPattern::directional_3gpp;
        else
            throw DataError("unknown element pattern '" + pattern + "'");
        m.cell_size = j.at("cell_size").get<double>();
        m.ue_height = j.at("ue_height").get<double>();
        m.max_samples = j.at("max_samples").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.grid_points = j.at("grid_points").get<std::size_t>();
        m.sample_count = j.at("sample_count").get<std::size_t>();
        m.los_count = j.at("los_count").get<std::size_t>();
        m.los_fraction = j.at("los_fraction").get<double>();
        m.outage_count = j.at("outage_count").get<std::size_t>();
        m.cp_violation_count = j.at("cp_violation_count").get<std::size_t>();
        for (char c : j.at("split").get<std::string>()) {
            if (c != 'T' && c != 'R') throw DataError("bad split code");
            m.split.push_back(c == 'T' ? SplitRole::test : SplitRole::train);
        }
        if (!m.split.empty() && m.split.size() != m.sample_count) throw DataError("split length differs from count");
        m.split_seed = j.at("split_seed").get<std::uint64_t>();
        m.stratified = j.at("stratified").get<bool>();
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed manifest: ") + e.what());
    }
}

void save_manifest(const DatasetManifest& m, const std::string& path) { io::write_file(path, manifest_to_json(m)); }

DatasetManifest load_manifest(const std::string& path) { return manifest_from_json(io::read_file(path)); }

std::size_t test_count_for_fraction(std::size_t total, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidInput("test fraction must lie in (0, 1)");
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
}

void split(DatasetManifest& m, std::span<const int> labels, std::size_t test_count, std::uint64_t seed,
           bool stratify) {
    const std::size_t n = m.sample_count;
    if (labels.size() != n) throw InvalidInput("label count differs from the manifest sample count");
    if (test_count == 0 || test_count >= n) throw InvalidInput("test count must lie in [1, sample count)");
    std::mt19937_64 rng(derive_seed(seed, 0x5b17u, 0));
    std::vector<SplitRole> roles(n, SplitRole::train);
    if (!stratify) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t k = 0; k < test_count; ++k) roles[idx[k]] = SplitRole::test;
    } else {
        std::vector<std::size_t> cls[2];
        for (std::size_t i = 0; i < n; ++i) cls[labels[i] == 1 ? 1 : 0].push_back(i);
        const std::size_t want_pos = static_cast<std::size_t>(
            std::llround(static_cast<double>(test_count) * static_cast<double>(cls[1].size()) / static_cast<double>(n)));
        const std::size_t take[2] = {test_count - std::min(want_pos, test_count), std::min(want_pos, test_count)};
        for (int c = 0; c < 2; ++c) {
            if (take[c] > cls[c].size()) throw InvalidInput("stratified split oversubscribes a class");
            std::shuffle(cls[c].begin(), cls[c].end(), rng);
            for (std::size_t k = 0; k < take[c]; ++k) roles[cls[c][k]] = SplitRole::test;
        }
    }
    m.split = std::move(roles);
    m.split_seed = seed;
    m.stratified = stratify;
}

std::vector<std::size_t> indices_with_role(const DatasetManifest& m, SplitRole role) {
    if (m.split.empty()) throw DataError("dataset has not been split");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m.split.size(); ++i)
        if (m.split[i] == role) out.push_back(i);
    return out;
}

}  // namespace ndt::pipeline
