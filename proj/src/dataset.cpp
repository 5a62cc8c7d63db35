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
#include <random>

#include "ndtlos/checkpoint.hpp"
#include "ndtlos/pipeline.hpp"

namespace ndt::pipeline {

Profile profile_by_name(const std::string& name) {
    Profile p;
    p.name = name;
    if (name == "full") return p;
    if (name == "desk") {
        p.ofdm.bandwidth = 100e6;
        p.ofdm.n_subcarriers = 128;
        p.ofdm.n_guard = 96;
        p.array.rows = 4;
        p.array.cols = 8;
        return p;
    }
    throw ConfigError("unknown profile '" + name + "' (expected desk or full)");
}

bool operator==(const Dataset& a, const Dataset& b) {
    if (a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const Sample& x = a.samples[i];
        const Sample& y = b.samples[i];
        if (!(x.ue_position == y.ue_position && x.paths == y.paths && x.label == y.label &&
              x.channel.data == y.channel.data && x.channel.kind == y.channel.kind))
            return false;
    }
    return true;
}

namespace {

enum class Outcome : std::uint8_t { kept, outage, cp_violation };

Dataset generate(const geometry::Scene& scene, const GenerationConfig& cfg, GenerationStats* stats, bool parallel) {
    geometry::validate(scene);
    channel::validate(cfg.profile.ofdm);
    channel::validate(cfg.profile.array);
    if (!(cfg.cell_size > 0.0)) throw InvalidInput("cell size must be positive");

    const std::vector<Vec3> grid = geometry::ue_grid(scene, cfg.cell_size, cfg.ue_height);
    const double max_delay = cfg.profile.ofdm.cp_duration();
    std::vector<Sample> slots(grid.size());
    std::vector<Outcome> outcome(grid.size(), Outcome::kept);
    const long n = static_cast<long>(grid.size());

#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (long i = 0; i < n; ++i) {
        Sample s;
        s.ue_position = grid[i];
        s.paths = geometry::trace_paths(scene, grid[i], scene.bs_position, cfg.profile.ofdm.fc);
        if (s.paths.paths.empty()) {
            outcome[i] = Outcome::outage;
            continue;
        }
        for (const geometry::PathComponent& p : s.paths.paths)
            if (p.delay > max_delay) outcome[i] = Outcome::cp_violation;
        if (outcome[i] != Outcome::kept) continue;
        s.channel = channel::synth_cfr(s.paths, cfg.profile.array, cfg.profile.ofdm);
        for (cd& v : s.channel.data.values())
            v = cd(static_cast<float>(v.real()), static_cast<float>(v.imag()));
        s.label = s.paths.is_los ? 1 : 0;
        slots[i] = std::move(s);
    }

    std::vector<std::size_t> usable;
    GenerationStats st;
    st.grid_points = grid.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (outcome[i] == Outcome::outage) ++st.outage;
        if (outcome[i] == Outcome::cp_violation) ++st.cp_violations;
        if (outcome[i] == Outcome::kept) usable.push_back(i);
    }
    if (cfg.max_samples > 0 && usable.size() > cfg.max_samples) {
        std::mt19937_64 rng(derive_seed(cfg.seed, 0xd5e7u, 0));
        std::shuffle(usable.begin(), usable.end(), rng);
        usable.resize(cfg.max_samples);
        std::sort(usable.begin(), usable.end());
    }
    Dataset d;
    d.samples.reserve(usable.size());
    for (std::size_t i : usable) d.samples.push_back(std::move(slots[i]));
    st.kept = d.samples.size();
    if (stats) *stats = st;
    return d;
}

constexpr char kMagic[4] = {'N', 'D', 'T', 'L'};
constexpr std::uint16_t kDatasetVersion = 1;

}  // namespace

Dataset generate_dataset(const geometry::Scene& scene, const GenerationConfig& cfg, GenerationStats* stats) {
    return generate(scene, cfg, stats, true);
}

Dataset generate_dataset_serial(const geometry::Scene& scene, const GenerationConfig& cfg, GenerationStats* stats) {
    return generate(scene, cfg, stats, false);
}

std::string encode_dataset(const Dataset& d) {
    io::BinaryWriter w;
    w.raw(std::string_view(kMagic, 4));
    w.u16(kDatasetVersion);
    w.u32(static_cast<std::uint32_t>(d.samples.size()));
    for (const Sample& s : d.samples) {
        w.f64(s.ue_position.x);
        w.f64(s.ue_position.y);
        w.f64(s.ue_position.z);
        w.u32(static_cast<std::uint32_t>(s.paths.paths.size()));
        for (const geometry::PathComponent& p : s.paths.paths) {
            w.f64(p.gain);
            w.f64(p.delay);
            w.f64(p.azimuth);
            w.f64(p.elevation);
            w.f64(static_cast<double>(p.bounces));
        }
        w.u32(static_cast<std::uint32_t>(s.channel.data.rows()));
        w.u32(static_cast<std::uint32_t>(s.channel.data.cols()));
        for (const cd& v : s.channel.data.values()) {
            w.f32(static_cast<float>(v.real()));
            w.f32(static_cast<float>(v.imag()));
        }
        w.u8(static_cast<std::uint8_t>(s.label));
    }
    return w.take();
}

Dataset decode_dataset(const std::string& bytes) {
    io::BinaryReader r(bytes);
    if (r.raw(4) != std::string(kMagic, 4)) throw DataError("not an NDTL dataset");
    const std::uint16_t version = r.u16();
    if (version != kDatasetVersion) throw DataError("unsupported dataset version " + std::to_string(version));
    const std::uint32_t count = r.u32();
    Dataset d;
    for (std::uint32_t k = 0; k < count; ++k) {
        Sample s;
        s.ue_position.x = r.f64();
        s.ue_position.y = r.f64();
        s.ue_position.z = r.f64();
        const std::uint32_t np = r.u32();
        if (np > 1u << 16) throw DataError("path count out of range");
        for (std::uint32_t j = 0; j < np; ++j) {
            geometry::PathComponent p;
            p.gain = r.f64();
            p.delay = r.f64();
            p.azimuth = r.f64();
            p.elevation = r.f64();
            p.bounces = static_cast<int>(r.f64());
            s.paths.paths.push_back(p);
        }
        const std::uint32_t rows = r.u32(), cols = r.u32();
        if (static_cast<std::uint64_t>(rows) * cols > (1ull << 26)) throw DataError("channel block out of range");
        s.channel.data = CMatrix(rows, cols);
        for (cd& v : s.channel.data.values()) {
            const float re = r.f32();
            const float im = r.f32();
            v = cd(re, im);
        }
        const std::uint8_t label = r.u8();
        if (label > 1) throw DataError("label out of range");
        s.label = label;
        s.paths.is_los = label == 1;
        s.paths.ue_position = s.ue_position;
        d.samples.push_back(std::move(s));
    }
    if (!r.at_end()) throw DataError("trailing bytes after dataset records");
    return d;
}

void save_dataset(const Dataset& d, const std::string& path) { io::write_file(path, encode_dataset(d)); }

Dataset load_dataset(const std::string& path) { return decode_dataset(io::read_file(path)); }

}  // namespace ndt::pipeline
