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

#ifndef NDTLOS_CHECKPOINT_HPP
#define NDTLOS_CHECKPOINT_HPP

// Model checkpoint container:
//   magic "NDTM" | u16 version | u8 family tag | family-specific blocks
// All integers and doubles little-endian; doubles as IEEE-754 bit patterns.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ndtlos/classic_ml.hpp"
#include "ndtlos/common.hpp"

namespace ndt::io {

enum class ModelFamily : std::uint8_t { svm = 1, random_forest = 2, cnn = 3 };

inline constexpr std::uint16_t kCheckpointVersion = 1;

class BinaryWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
    void f64(double v);
    void f32(float v);
    void raw(std::string_view bytes) { buf_.append(bytes); }
    void str(const std::string& s);
    void f64s(std::span<const double> v);

    const std::string& bytes() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    void put(std::uint64_t v, int n) {
        for (int i = 0; i < n; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
    std::string buf_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::string bytes) : buf_(std::move(bytes)) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(get(4))); }
    double f64();
    float f32();
    std::string raw(std::size_t n);
    std::string str();
    std::vector<double> f64s();

    bool at_end() const { return pos_ == buf_.size(); }
    std::size_t position() const { return pos_; }

private:
    std::uint64_t get(int n);
    std::string buf_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

void write_header(BinaryWriter& w, ModelFamily family);
ModelFamily read_header(BinaryReader& r);

void write_svm(BinaryWriter& w, const ml::SvmModel& m);
ml::SvmModel read_svm(BinaryReader& r);
void write_rf(BinaryWriter& w, const ml::RfModel& m);
ml::RfModel read_rf(BinaryReader& r);

}  // namespace ndt::io

#endif  // NDTLOS_CHECKPOINT_HPP
