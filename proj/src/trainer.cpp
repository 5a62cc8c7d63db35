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
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "ndtlos/deepnet.hpp"

namespace ndt::dl {

void validate(const TrainConfig& cfg) {
    if (cfg.epochs <= 0) throw InvalidInput("epochs must be positive");
    if (cfg.batch_size <= 0) throw InvalidInput("batch size must be positive");
    if (!(cfg.w_rec >= 0.0)) throw InvalidInput("w_rec must be non-negative");
    if (!(cfg.pos_weight > 0.0)) throw InvalidInput("pos_weight must be positive");
    if (!(cfg.optimizer.learning_rate > 0.0)) throw InvalidInput("learning rate must be positive");
}

namespace {

Tensor gather(const SampleSource& src, std::span<const std::size_t> ids, int epoch) {
    Tensor x(static_cast<int>(ids.size()), src.shape());
    const long n = static_cast<long>(ids.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) src.fill(ids[i], epoch, x.sample(static_cast<int>(i)));
    return x;
}

struct Eval {
    double loss = 0.0;
    double acc = 0.0;
};

Eval evaluate(const Network& net, const SampleSource& src, int batch_size) {
    const std::vector<double> p = predict(net, src, batch_size);
    std::vector<int> y(src.size());
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = src.label(i);
        correct += (p[i] >= 0.5) == (y[i] == 1);
    }
    return {loss_bce(p, y).value, static_cast<double>(correct) / static_cast<double>(y.size())};
}

}  // namespace

std::vector<double> predict(const Network& net, const SampleSource& source, int batch_size) {
    if (source.shape() != net.spec().input) throw InvalidInput("source shape does not match the network input");
    std::vector<double> out;
    out.reserve(source.size());
    std::vector<std::size_t> ids;
    Workspace ws;
    for (std::size_t start = 0; start < source.size(); start += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(source.size(), start + static_cast<std::size_t>(batch_size));
        ids.resize(end - start);
        std::iota(ids.begin(), ids.end(), start);
        const Tensor x = gather(source, ids, 0);
        net.forward(x, ws, false);
        const std::vector<double> p = net.probabilities(ws);
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

TrainResult train(NetSpec spec, const SampleSource& train_set, const TrainConfig& cfg,
                  const SampleSource* validation) {
    validate(cfg);
    if (train_set.size() == 0) throw InvalidInput("training set is empty");
    if (train_set.shape() != spec.input) throw InvalidInput("training images do not match the network input");
    for (std::size_t i = 0; i < train_set.size(); ++i)
        if (train_set.label(i) != 0 && train_set.label(i) != 1) throw InvalidInput("labels must be 0 or 1");

    TrainResult result{Network(std::move(spec)), {}};
    Network& net = result.net;
    net.init(derive_seed(cfg.seed, 0x1417u, 0));

    const std::size_t n = train_set.size();
    const std::size_t bs = static_cast<std::size_t>(cfg.batch_size);
    const long steps_per_epoch = static_cast<long>((n + bs - 1) / bs);
    Optimizer opt(cfg.optimizer, net.params().size(), steps_per_epoch * cfg.epochs);
    const bool joint = net.spec().recon_node >= 0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> grad(net.params().size());
    std::vector<int> labels;
    Workspace ws;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::mt19937_64 rng(derive_seed(cfg.seed, 0x5a0fu, static_cast<std::uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        std::size_t correct = 0;
        for (std::size_t start = 0; start < n; start += bs) {
            const std::span<const std::size_t> ids(order.data() + start, std::min(bs, n - start));
            const Tensor x = gather(train_set, ids, epoch);
            labels.resize(ids.size());
            for (std::size_t i = 0; i < ids.size(); ++i) labels[i] = train_set.label(ids[i]);

            net.forward(x, ws, true);
            const std::vector<double> p = net.probabilities(ws);
            std::fill(grad.begin(), grad.end(), 0.0);
            double loss = 0.0;
            if (joint) {
                const JointLossResult l = loss_joint(p, *net.reconstruction(ws), x, labels, cfg.w_rec, cfg.pos_weight);
                loss = l.value;
                net.backward(x, ws, l.dprob, &l.drecon, grad);
            } else {
                const LossResult l = loss_bce(p, labels, cfg.pos_weight);
                loss = l.value;
                net.backward(x, ws, l.dprob, nullptr, grad);
            }
            if (!std::isfinite(loss))
                throw NumericalError("training diverged: loss is " + std::to_string(loss) + " at epoch " +
                                     std::to_string(epoch + 1) + ", step " + std::to_string(opt.steps_taken()));
            opt.step(net.params(), grad);
            net.update_running_stats(ws, 0.1);
            loss_sum += loss * static_cast<double>(ids.size());
            for (std::size_t i = 0; i < ids.size(); ++i) correct += (p[i] >= 0.5) == (labels[i] == 1);
        }
        EpochLog row;
        row.epoch = epoch + 1;
        row.train_loss = loss_sum / static_cast<double>(n);
        row.train_acc = static_cast<double>(correct) / static_cast<double>(n);
        row.val_loss = row.val_acc = std::numeric_limits<double>::quiet_NaN();
        if (validation && validation->size() > 0) {
            const Eval e = evaluate(net, *validation, cfg.batch_size);
            row.val_loss = e.loss;
            row.val_acc = e.acc;
        }
        result.log.push_back(row);
    }
    return result;
}

void write_training_log(const std::vector<EpochLog>& log, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write " + path);
    f << "epoch,train_loss,train_acc,val_loss,val_acc\n";
    char line[256];
    for (const EpochLog& e : log) {
        std::snprintf(line, sizeof line, "%d,%.10g,%.10g,%.10g,%.10g\n", e.epoch, e.train_loss, e.train_acc,
                      e.val_loss, e.val_acc);
        f << line;
    }
}

void write_cnn(io::BinaryWriter& w, const CnnCheckpoint& c) {
    const NetSpec& s = c.net.spec();
    w.str(s.preset);
    w.i32(s.input.c);
    w.i32(s.input.h);
    w.i32(s.input.w);
    w.u8(c.options.full_batchnorm ? 1 : 0);
    w.i32(c.input.pool_h);
    w.i32(c.input.pool_w);
    w.f64s(c.net.params());
    w.f64s(c.net.state());
}

CnnCheckpoint read_cnn(io::BinaryReader& r) {
    const std::string preset = r.str();
    Shape in;
    in.c = r.i32();
    in.h = r.i32();
    in.w = r.i32();
    PresetOptions options;
    options.full_batchnorm = r.u8() != 0;
    InputConfig input;
    input.pool_h = r.i32();
    input.pool_w = r.i32();
    if (in.c <= 0 || in.h <= 0 || in.w <= 0 || in.size() > (1u << 24)) throw DataError("cnn input dims out of range");
    NetSpec spec;
    try {
        spec = build_preset(preset, in, options);
    } catch (const InvalidInput& e) {
        throw DataError(std::string("cnn checkpoint: ") + e.what());
    }
    CnnCheckpoint c{Network(std::move(spec)), options, input};
    std::vector<double> params = r.f64s();
    std::vector<double> state = r.f64s();
    if (params.size() != c.net.params().size() || state.size() != c.net.state().size())
        throw DataError("cnn checkpoint parameter count does not match its preset");
    c.net.params() = std::move(params);
    c.net.state() = std::move(state);
    return c;
}

}  // namespace ndt::dl
