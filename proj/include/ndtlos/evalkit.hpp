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

#ifndef NDTLOS_EVALKIT_HPP
#define NDTLOS_EVALKIT_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ndtlos/channel.hpp"
#include "ndtlos/deepnet.hpp"

namespace ndt::eval {

// Fraction correct with score >= threshold predicting class 1.
double accuracy(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

struct Confusion {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};
Confusion confusion(std::span<const double> scores, std::span<const int> labels, double threshold = 0.5);

struct RocCurve {
    std::vector<double> thresholds;  // descending; the first entry is +inf
    std::vector<double> fpr;
    std::vector<double> tpr;
    double auc = 0.0;
};

// Exact ROC over every distinct score, equal scores moving together.
// Throws InvalidInput unless both classes are present.
RocCurve roc(std::span<const double> scores, std::span<const int> labels);
void write_roc_csv(const RocCurve& curve, const std::string& path);

struct LayerFlops {
    std::string name;
    dl::LayerKind kind = dl::LayerKind::relu;
    dl::Shape out;
    double macs = 0.0;
    double flops = 0.0;
};

struct FlopsReport {
    std::string model;
    dl::Shape input;
    std::vector<LayerFlops> layers;
    double total_flops = 0.0;
};

inline constexpr const char* kFlopsConvention =
    "1 MAC = 2 FLOPs; conv = 2*Kh*Kw*Cin*Cout*Hout*Wout; dense = 2*in*out; "
    "bias, batchnorm, activation, pooling and skip-add = 1 per output element; upsampling = 0";

// Layers feeding the probability output only when inference_only is set, so
// an autoencoder is costed by its encoder and classifier.
FlopsReport flops(const dl::NetSpec& net, bool inference_only = true);
void write_flops_report(const FlopsReport& report, const std::string& path);

// Published SegNet costs used for the comparison table.
inline constexpr double kSegnetFullGflops = 80.0;
inline constexpr double kSegnetEncoderGflops = 40.0;

// 1 - reduced / baseline, in percent.
double reduction_percent(double baseline, double reduced);

std::vector<double> default_snr_list();

struct TestSample {
    std::size_t id = 0;  // drives the per-sample noise seed
    const channel::ChannelMatrix* channel = nullptr;
    int label = 0;
};

// Scores a batch of estimated channels. This is the only view a model gets
// of a test sample.
using Scorer = std::function<std::vector<double>(const std::vector<channel::ChannelMatrix>& estimates)>;

struct SweepPoint {
    double snr_db = 0.0;
    double accuracy = 0.0;
    double auc = 0.0;  // NaN when the test set has a single class
    std::vector<double> scores;
    std::vector<int> labels;
};

// One uplink realization per (sample, SNR); seeds depend on (seed, snr, id)
// only, so every model sees the same noisy estimates.
std::vector<SweepPoint> eval_sweep(const Scorer& scorer, std::span<const TestSample> test,
                                   std::span<const double> snr_db, std::uint64_t seed);

// Header: snr_db,accuracy,auc
void write_sweep_csv(const std::vector<SweepPoint>& sweep, const std::string& path);

}  // namespace ndt::eval

#endif  // NDTLOS_EVALKIT_HPP
