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

#ifndef NDTLOS_DEEPNET_HPP
#define NDTLOS_DEEPNET_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ndtlos/adcpm.hpp"
#include "ndtlos/channel.hpp"
#include "ndtlos/checkpoint.hpp"
#include "ndtlos/common.hpp"
#include "ndtlos/kernels.hpp"

namespace ndt::dl {

struct Shape {
    int c = 1, h = 1, w = 1;
    std::size_t size() const { return static_cast<std::size_t>(c) * h * w; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

// NCHW batch.
struct Tensor {
    int n = 0;
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int batch, Shape s) : n(batch), shape(s), data(static_cast<std::size_t>(batch) * s.size(), 0.0) {}
    std::span<double> sample(int i) { return {data.data() + static_cast<std::size_t>(i) * shape.size(), shape.size()}; }
    std::span<const double> sample(int i) const {
        return {data.data() + static_cast<std::size_t>(i) * shape.size(), shape.size()};
    }
};

enum class LayerKind { conv2d, batchnorm, relu, maxpool, avgpool_global, dense, sigmoid, upsample, skip_add };

const char* to_string(LayerKind kind);

struct LayerSpec {
    LayerKind kind = LayerKind::relu;
    int kernel_h = 1, kernel_w = 1;
    int stride_h = 1, stride_w = 1;
    int pad_h = 0, pad_w = 0;
    int out_channels = 0;       // conv2d, dense
    bool bias = false;          // conv2d; dense always has one
    bool ceil_mode = false;     // maxpool
    bool batch_stats = false;   // batchnorm: normalize with batch statistics
    bool projection = false;    // conv2d on a shortcut branch
    Shape target;               // upsample
    std::string name;

    static LayerSpec conv(int out_channels, int kernel, int stride, int pad, bool bias = false);
    static LayerSpec batchnorm(bool batch_stats);
    static LayerSpec relu();
    static LayerSpec maxpool(int kernel, int stride, int pad, bool ceil_mode = false);
    static LayerSpec avgpool_global();
    static LayerSpec dense(int out_features);
    static LayerSpec sigmoid();
    static LayerSpec upsample(int h, int w);
    static LayerSpec skip_add();
};

inline constexpr int kNetworkInput = -1;

struct Node {
    LayerSpec spec;
    std::vector<int> inputs;  // node indices, kNetworkInput for the image
    Shape out;
    std::size_t param_offset = 0, param_count = 0;
    std::size_t state_offset = 0, state_count = 0;
};

enum class Head { classifier, autoencoder_classifier };

struct NetSpec {
    std::string preset;
    Shape input;
    Head head = Head::classifier;
    std::vector<Node> nodes;
    int prob_node = -1;
    int recon_node = -1;
    std::size_t param_count = 0;
    std::size_t state_count = 0;

    NetSpec() = default;
    explicit NetSpec(Shape in) : input(in) {}

    // Appends a node, propagating shapes. Throws InvalidInput when the layer
    // does not fit its inputs.
    int add(LayerSpec spec, std::vector<int> inputs);
    int add(LayerSpec spec, int input) { return add(std::move(spec), std::vector<int>{input}); }
    Shape shape_of(int node) const { return node == kNetworkInput ? input : nodes.at(node).out; }
    // conv2d + dense layers, shortcut projections excluded.
    int weighted_layers() const;
};

struct PresetOptions {
    bool full_batchnorm = false;
};

// resnet34_reference, resnet_mini, segnet_mini.
NetSpec build_preset(const std::string& name, Shape input, const PresetOptions& options = {});
std::vector<std::string> preset_names();

// Scratch buffers for one batch; reusable across calls with the same batch size.
struct Workspace {
    int batch = 0;
    bool training = false;
    std::vector<Tensor> act;
    std::vector<Tensor> grad;
    std::vector<std::vector<int>> argmax;  // maxpool winners
    std::vector<std::vector<double>> aux;  // batchnorm mean / inv-std / x-hat
};

class Network {
public:
    explicit Network(NetSpec spec);

    const NetSpec& spec() const { return spec_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    std::vector<double>& state() { return state_; }
    const std::vector<double>& state() const { return state_; }

    // He-normal weights, zero biases, unit scales.
    void init(std::uint64_t seed);

    // training selects batch statistics in batchnorm layers that use them.
    void forward(const Tensor& x, Workspace& ws, bool training) const;
    std::vector<double> probabilities(const Workspace& ws) const;
    const Tensor* reconstruction(const Workspace& ws) const;

    // Seeds dL/dp per sample and, for autoencoders, dL/dreconstruction, then
    // accumulates parameter gradients into `grad` (size params().size()).
    void backward(const Tensor& x, Workspace& ws, std::span<const double> dprob, const Tensor* drecon,
                  std::vector<double>& grad) const;

    void update_running_stats(const Workspace& ws, double momentum);

    // Inference-mode probabilities.
    std::vector<double> predict(const Tensor& x) const;

    friend bool operator==(const Network& a, const Network& b) {
        return a.spec_.preset == b.spec_.preset && a.spec_.input == b.spec_.input && a.params_ == b.params_ &&
               a.state_ == b.state_;
    }

private:
    NetSpec spec_;
    std::vector<double> params_;
    std::vector<double> state_;
};

inline constexpr double kProbClamp = 1e-7;
inline constexpr double kBatchNormEps = 1e-5;

struct LossResult {
    double value = 0.0;
    std::vector<double> dprob;  // per sample
};

// Mean binary cross-entropy on probabilities clamped to [eps, 1 - eps].
// pos_weight scales the positive-class term.
LossResult loss_bce(std::span<const double> prob, std::span<const int> labels, double pos_weight = 1.0);

struct JointLossResult {
    double value = 0.0;
    double reconstruction = 0.0;
    std::vector<double> dprob;
    Tensor drecon;
};

// (w_rec / K) sum_k ||X_k - Xhat_k||^2 + mean BCE.
JointLossResult loss_joint(std::span<const double> prob, const Tensor& recon, const Tensor& input,
                           std::span<const int> labels, double w_rec, double pos_weight = 1.0);

enum class OptimizerKind { adam, sgd_momentum };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 1e-3;
    bool cosine_decay = true;
    double momentum = 0.9;  // sgd
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

class Optimizer {
public:
    Optimizer(OptimizerConfig cfg, std::size_t n_params, long total_steps);
    double current_lr() const;
    void step(std::vector<double>& params, const std::vector<double>& grad);
    long steps_taken() const { return t_; }

private:
    OptimizerConfig cfg_;
    long total_;
    long t_ = 0;
    std::vector<double> m_, v_;
};

enum class NoiseDomain { channel, adcpm };

struct InputConfig {
    int pool_h = 4, pool_w = 4;  // 1 x 1 disables downsampling
    friend bool operator==(const InputConfig&, const InputConfig&) = default;
};

Shape input_shape(const channel::ArrayConfig& array, const channel::OfdmConfig& ofdm, const InputConfig& in);

// Channel -> max-normalized (pooled) ADCPM image.
adcpm::Adcpm cnn_input(const channel::ChannelMatrix& h, const adcpm::AngleDelayTransform& transform,
                       const InputConfig& in);

// Fresh AWGN at snr_db on H, then transform, power and max-normalization.
adcpm::Adcpm augment_awgn(const channel::ChannelMatrix& h, double snr_db, std::uint64_t seed,
                          const adcpm::AngleDelayTransform& transform);
// Ablation: noise added to the normalized image instead, clipped at zero.
adcpm::Adcpm augment_awgn_image(const adcpm::Adcpm& clean, double snr_db, std::uint64_t seed);

// Training data provider. fill() must be thread-safe and depend only on
// (index, epoch).
class SampleSource {
public:
    virtual ~SampleSource() = default;
    virtual std::size_t size() const = 0;
    virtual Shape shape() const = 0;
    virtual int label(std::size_t i) const = 0;
    virtual void fill(std::size_t i, int epoch, std::span<double> out) const = 0;
};

// Fixed, already preprocessed images.
class TensorSource : public SampleSource {
public:
    TensorSource(Tensor images, std::vector<int> labels);
    std::size_t size() const override { return labels_.size(); }
    Shape shape() const override { return images_.shape; }
    int label(std::size_t i) const override { return labels_[i]; }
    void fill(std::size_t i, int epoch, std::span<double> out) const override;

private:
    Tensor images_;
    std::vector<int> labels_;
};

// True channels, preprocessed on demand with optional per-epoch augmentation.
class ChannelSource : public SampleSource {
public:
    struct Options {
        InputConfig input;
        std::optional<double> augment_snr_db;
        NoiseDomain noise_domain = NoiseDomain::channel;
        std::uint64_t seed = 0;
    };
    // ids key the per-sample augmentation seeds.
    ChannelSource(std::vector<const channel::ChannelMatrix*> channels, std::vector<std::uint64_t> ids,
                  std::vector<int> labels, const channel::ArrayConfig& array, const channel::OfdmConfig& ofdm,
                  Options options);
    std::size_t size() const override { return channels_.size(); }
    Shape shape() const override { return shape_; }
    int label(std::size_t i) const override { return labels_[i]; }
    void fill(std::size_t i, int epoch, std::span<double> out) const override;

private:
    std::vector<const channel::ChannelMatrix*> channels_;
    std::vector<std::uint64_t> ids_;
    std::vector<int> labels_;
    adcpm::AngleDelayTransform transform_;
    Options opt_;
    Shape shape_;
    std::vector<adcpm::Adcpm> clean_;  // cache when no augmentation is drawn
};

struct TrainConfig {
    int epochs = 30;
    int batch_size = 32;
    OptimizerConfig optimizer;
    std::uint64_t seed = 0;
    double w_rec = 0.1;
    double pos_weight = 1.0;  // 1 is plain BCE
};

void validate(const TrainConfig& cfg);

struct EpochLog {
    int epoch = 0;
    double train_loss = 0.0, train_acc = 0.0;
    double val_loss = 0.0, val_acc = 0.0;  // NaN without validation data
};

struct TrainResult {
    Network net;
    std::vector<EpochLog> log;
};

// Mini-batch training with a seeded per-epoch shuffle. Throws NumericalError
// when the loss stops being finite.
TrainResult train(NetSpec spec, const SampleSource& train_set, const TrainConfig& cfg,
                  const SampleSource* validation = nullptr);

// Header: epoch,train_loss,train_acc,val_loss,val_acc
void write_training_log(const std::vector<EpochLog>& log, const std::string& path);

// Inference over a source at epoch 0, in batches.
std::vector<double> predict(const Network& net, const SampleSource& source, int batch_size = 64);

struct CnnCheckpoint {
    Network net;
    PresetOptions options;
    InputConfig input;
};

void write_cnn(io::BinaryWriter& w, const CnnCheckpoint& c);
CnnCheckpoint read_cnn(io::BinaryReader& r);

}  // namespace ndt::dl

#endif  // NDTLOS_DEEPNET_HPP
