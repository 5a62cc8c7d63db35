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

#include "ndtlos/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

namespace ndt::io {

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
void BinaryWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void BinaryWriter::str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.append(s);
}

void BinaryWriter::f64s(std::span<const double> v) {
    u64(v.size());
    for (double d : v) f64(d);
}

std::uint64_t BinaryReader::get(int n) {
    if (pos_ + static_cast<std::size_t>(n) > buf_.size()) throw DataError("binary container truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }
float BinaryReader::f32() { return std::bit_cast<float>(u32()); }

std::string BinaryReader::raw(std::size_t n) {
    if (pos_ + n > buf_.size()) throw DataError("binary container truncated");
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
}

std::string BinaryReader::str() { return raw(u32()); }

std::vector<double> BinaryReader::f64s() {
    const std::uint64_t n = u64();
    if (n > (buf_.size() - pos_) / 8) throw DataError("binary container truncated");
    std::vector<double> v(n);
    for (double& d : v) d = f64();
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write " + path);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw DataError("short write to " + path);
}

void write_header(BinaryWriter& w, ModelFamily family) {
    w.raw("NDTM");
    w.u16(kCheckpointVersion);
    w.u8(static_cast<std::uint8_t>(family));
}

ModelFamily read_header(BinaryReader& r) {
    if (r.raw(4) != "NDTM") throw DataError("not a model checkpoint (bad magic)");
    if (const auto v = r.u16(); v != kCheckpointVersion)
        throw DataError("unsupported checkpoint version " + std::to_string(v));
    const auto tag = r.u8();
    if (tag < 1 || tag > 3) throw DataError("unknown model family tag " + std::to_string(tag));
    return static_cast<ModelFamily>(tag);
}

void write_svm(BinaryWriter& w, const ml::SvmModel& m) {
    w.u8(static_cast<std::uint8_t>(m.kernel.type));
    w.f64(m.kernel.gamma);
    w.f64(m.C);
    w.f64(m.bias);
    w.u64(m.support_vectors.rows());
    w.u64(m.support_vectors.cols());
    for (double v : m.support_vectors.values()) w.f64(v);
    for (double a : m.alpha) w.f64(a);
    for (int y : m.sv_label) w.i32(y);
}

ml::SvmModel read_svm(BinaryReader& r) {
    ml::SvmModel m;
    m.kernel.type = static_cast<ml::KernelType>(r.u8());
    m.kernel.gamma = r.f64();
    m.C = r.f64();
    m.bias = r.f64();
    const auto rows = r.u64(), cols = r.u64();
    if (rows > (1u << 28) || cols > 4096) throw DataError("svm block dimensions out of range");
    m.support_vectors = RMatrix(rows, cols);
    for (double& v : m.support_vectors.values()) v = r.f64();
    m.alpha.resize(rows);
    for (double& a : m.alpha) a = r.f64();
    m.sv_label.resize(rows);
    for (int& y : m.sv_label) y = r.i32();
    return m;
}

void write_rf(BinaryWriter& w, const ml::RfModel& m) {
    w.u32(static_cast<std::uint32_t>(m.n_features));
    w.u32(static_cast<std::uint32_t>(m.max_depth));
    w.u64(m.seed);
    w.f64(m.oob_error);
    w.u32(static_cast<std::uint32_t>(m.trees.size()));
    for (const ml::DecisionTree& t : m.trees) {
        w.u32(static_cast<std::uint32_t>(t.nodes.size()));
        for (const ml::TreeNode& n : t.nodes) {
            w.i32(n.feature);
            w.f64(n.threshold);
            w.i32(n.left);
            w.i32(n.right);
            w.f64(n.counts[0]);
            w.f64(n.counts[1]);
            w.f64(n.gini_decrease);
        }
    }
}

ml::RfModel read_rf(BinaryReader& r) {
    ml::RfModel m;
    m.n_features = static_cast<int>(r.u32());
    m.max_depth = static_cast<int>(r.u32());
    m.seed = r.u64();
    m.oob_error = r.f64();
    m.trees.resize(r.u32());
    for (ml::DecisionTree& t : m.trees) {
        t.nodes.resize(r.u32());
        for (ml::TreeNode& n : t.nodes) {
            n.feature = r.i32();
            n.threshold = r.f64();
            n.left = r.i32();
            n.right = r.i32();
            n.counts[0] = r.f64();
            n.counts[1] = r.f64();
            n.gini_decrease = r.f64();
            const auto count = static_cast<int>(t.nodes.size());
            if (n.feature >= m.n_features || n.left >= count || n.right >= count)
                throw DataError("random forest node index out of range");
        }
    }
    return m;
}

}  // namespace ndt::io
