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
#include <limits>
#include <random>

#include "ndtlos/deepnet.hpp"

namespace ndt::dl {

const char* to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::conv2d: return "conv2d";
        case LayerKind::batchnorm: return "batchnorm";
        case LayerKind::relu: return "relu";
        case LayerKind::maxpool: return "maxpool";
        case LayerKind::avgpool_global: return "avgpool_global";
        case LayerKind::dense: return "dense";
        case LayerKind::sigmoid: return "sigmoid";
        case LayerKind::upsample: return "upsample";
        case LayerKind::skip_add: return "skip_add";
    }
    return "?";
}

LayerSpec LayerSpec::conv(int out_channels, int kernel, int stride, int pad, bool bias) {
    LayerSpec s;
    s.kind = LayerKind::conv2d;
    s.out_channels = out_channels;
    s.kernel_h = s.kernel_w = kernel;
    s.stride_h = s.stride_w = stride;
    s.pad_h = s.pad_w = pad;
    s.bias = bias;
    return s;
}

LayerSpec LayerSpec::batchnorm(bool batch_stats) {
    LayerSpec s;
    s.kind = LayerKind::batchnorm;
    s.batch_stats = batch_stats;
    return s;
}

LayerSpec LayerSpec::relu() {
    LayerSpec s;
    s.kind = LayerKind::relu;
    return s;
}

LayerSpec LayerSpec::maxpool(int kernel, int stride, int pad, bool ceil_mode) {
    LayerSpec s;
    s.kind = LayerKind::maxpool;
    s.kernel_h = s.kernel_w = kernel;
    s.stride_h = s.stride_w = stride;
    s.pad_h = s.pad_w = pad;
    s.ceil_mode = ceil_mode;
    return s;
}

LayerSpec LayerSpec::avgpool_global() {
    LayerSpec s;
    s.kind = LayerKind::avgpool_global;
    return s;
}

LayerSpec LayerSpec::dense(int out_features) {
    LayerSpec s;
    s.kind = LayerKind::dense;
    s.out_channels = out_features;
    s.bias = true;
    return s;
}

LayerSpec LayerSpec::sigmoid() {
    LayerSpec s;
    s.kind = LayerKind::sigmoid;
    return s;
}

LayerSpec LayerSpec::upsample(int h, int w) {
    LayerSpec s;
    s.kind = LayerKind::upsample;
    s.target = {0, h, w};
    return s;
}

LayerSpec LayerSpec::skip_add() {
    LayerSpec s;
    s.kind = LayerKind::skip_add;
    return s;
}

namespace {

int pooled_extent(int in, int k, int s, int p, bool ceil_mode) {
    const int span = in + 2 * p - k;
    if (span < 0) return 0;
    int out = (ceil_mode ? (span + s - 1) / s : span / s) + 1;
    // The last window has to start inside the input or its left padding.
    if (ceil_mode && (out - 1) * s >= in + p) --out;
    return out;
}

[[noreturn]] void bad_layer(const LayerSpec& spec, std::size_t index, const std::string& why) {
    throw InvalidInput("layer " + std::to_string(index) + " (" + to_string(spec.kind) + "): " + why);
}

}  // namespace

int NetSpec::add(LayerSpec spec, std::vector<int> inputs) {
    const std::size_t index = nodes.size();
    const std::size_t wanted = spec.kind == LayerKind::skip_add ? 2 : 1;
    if (inputs.size() != wanted) bad_layer(spec, index, "wrong number of inputs");
    for (int i : inputs)
        if (i < kNetworkInput || i >= static_cast<int>(index)) bad_layer(spec, index, "input refers forward");

    const Shape in = shape_of(inputs[0]);
    Node node;
    node.inputs = inputs;
    std::size_t params = 0, state = 0;
    Shape out = in;
    switch (spec.kind) {
        case LayerKind::conv2d: {
            if (spec.out_channels <= 0 || spec.kernel_h <= 0 || spec.kernel_w <= 0 || spec.stride_h <= 0 ||
                spec.stride_w <= 0 || spec.pad_h < 0 || spec.pad_w < 0)
                bad_layer(spec, index, "bad geometry");
            out.c = spec.out_channels;
            out.h = (in.h + 2 * spec.pad_h - spec.kernel_h) / spec.stride_h + 1;
            out.w = (in.w + 2 * spec.pad_w - spec.kernel_w) / spec.stride_w + 1;
            if (in.h + 2 * spec.pad_h < spec.kernel_h || in.w + 2 * spec.pad_w < spec.kernel_w)
                bad_layer(spec, index, "kernel larger than padded input");
            params = static_cast<std::size_t>(out.c) * in.c * spec.kernel_h * spec.kernel_w +
                     (spec.bias ? out.c : 0);
            break;
        }
        case LayerKind::batchnorm:
            params = 2 * static_cast<std::size_t>(in.c);
            state = spec.batch_stats ? 2 * static_cast<std::size_t>(in.c) : 0;
            break;
        case LayerKind::relu:
        case LayerKind::sigmoid:
            break;
        case LayerKind::maxpool:
            if (spec.kernel_h <= 0 || spec.stride_h <= 0 || spec.pad_h * 2 > spec.kernel_h ||
                spec.pad_w * 2 > spec.kernel_w)
                bad_layer(spec, index, "bad geometry");
            out.h = pooled_extent(in.h, spec.kernel_h, spec.stride_h, spec.pad_h, spec.ceil_mode);
            out.w = pooled_extent(in.w, spec.kernel_w, spec.stride_w, spec.pad_w, spec.ceil_mode);
            if (out.h <= 0 || out.w <= 0) bad_layer(spec, index, "window larger than input");
            break;
        case LayerKind::avgpool_global:
            out.h = out.w = 1;
            break;
        case LayerKind::dense:
            if (spec.out_channels <= 0) bad_layer(spec, index, "no outputs");
            out = {spec.out_channels, 1, 1};
            params = static_cast<std::size_t>(spec.out_channels) * in.size() + spec.out_channels;
            break;
        case LayerKind::upsample:
            if (spec.target.h <= 0 || spec.target.w <= 0) bad_layer(spec, index, "bad target");
            out.h = spec.target.h;
            out.w = spec.target.w;
            break;
        case LayerKind::skip_add:
            if (shape_of(inputs[1]) != in) bad_layer(spec, index, "operand shapes differ");
            break;
    }
    node.spec = std::move(spec);
    node.out = out;
    node.param_offset = param_count;
    node.param_count = params;
    node.state_offset = state_count;
    node.state_count = state;
    param_count += params;
    state_count += state;
    nodes.push_back(std::move(node));
    return static_cast<int>(index);
}

int NetSpec::weighted_layers() const {
    int count = 0;
    for (const Node& n : nodes) {
        if (n.spec.kind == LayerKind::dense) ++count;
        if (n.spec.kind == LayerKind::conv2d && !n.spec.projection) ++count;
    }
    return count;
}

Network::Network(NetSpec spec) : spec_(std::move(spec)) {
    if (spec_.prob_node < 0 || spec_.prob_node >= static_cast<int>(spec_.nodes.size()))
        throw InvalidInput("network has no probability output");
    if (spec_.nodes[spec_.prob_node].out.size() != 1) throw InvalidInput("probability output must be scalar");
    if (spec_.recon_node >= 0 && spec_.nodes.at(spec_.recon_node).out != spec_.input)
        throw InvalidInput("reconstruction output must match the input shape");
    params_.assign(spec_.param_count, 0.0);
    state_.assign(spec_.state_count, 0.0);
    for (const Node& n : spec_.nodes) {
        if (n.spec.kind == LayerKind::batchnorm) {
            const Shape in = spec_.shape_of(n.inputs[0]);
            std::fill_n(params_.begin() + n.param_offset, in.c, 1.0);
            if (n.state_count) std::fill_n(state_.begin() + n.state_offset + in.c, in.c, 1.0);
        }
    }
}

void Network::init(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (const Node& n : spec_.nodes) {
        const Shape in = spec_.shape_of(n.inputs[0]);
        double* p = params_.data() + n.param_offset;
        if (n.spec.kind == LayerKind::conv2d || n.spec.kind == LayerKind::dense) {
            const std::size_t fan_in = n.spec.kind == LayerKind::dense
                                           ? in.size()
                                           : static_cast<std::size_t>(in.c) * n.spec.kernel_h * n.spec.kernel_w;
            const std::size_t weights = fan_in * n.out.c;
            std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
            for (std::size_t i = 0; i < weights; ++i) p[i] = dist(rng);
            std::fill(p + weights, p + n.param_count, 0.0);
        } else if (n.spec.kind == LayerKind::batchnorm) {
            std::fill_n(p, in.c, 1.0);
            std::fill_n(p + in.c, in.c, 0.0);
        }
    }
}

namespace {

ConvGeom conv_geom(const Node& n, Shape in, int batch) {
    ConvGeom g;
    g.n = batch;
    g.cin = in.c;
    g.hin = in.h;
    g.win = in.w;
    g.cout = n.out.c;
    g.hout = n.out.h;
    g.wout = n.out.w;
    g.kh = n.spec.kernel_h;
    g.kw = n.spec.kernel_w;
    g.sh = n.spec.stride_h;
    g.sw = n.spec.stride_w;
    g.ph = n.spec.pad_h;
    g.pw = n.spec.pad_w;
    return g;
}

void prepare(const NetSpec& spec, Workspace& ws, int batch) {
    if (ws.batch == batch && ws.act.size() == spec.nodes.size()) return;
    ws.batch = batch;
    ws.act.clear();
    ws.grad.clear();
    ws.argmax.assign(spec.nodes.size(), {});
    ws.aux.assign(spec.nodes.size(), {});
    for (const Node& n : spec.nodes) {
        ws.act.emplace_back(batch, n.out);
        ws.grad.emplace_back(batch, n.out);
    }
}

}  // namespace

void Network::forward(const Tensor& x, Workspace& ws, bool training) const {
    if (x.shape != spec_.input || x.n <= 0 || x.data.size() != static_cast<std::size_t>(x.n) * x.shape.size())
        throw InvalidInput("input batch does not match the network input shape");
    prepare(spec_, ws, x.n);
    ws.training = training;
    const int batch = x.n;

    for (std::size_t idx = 0; idx < spec_.nodes.size(); ++idx) {
        const Node& node = spec_.nodes[idx];
        const Tensor& in = node.inputs[0] == kNetworkInput ? x : ws.act[node.inputs[0]];
        Tensor& out = ws.act[idx];
        const Shape is = in.shape;
        const double* p = params_.data() + node.param_offset;
        const long plane_in = static_cast<long>(is.h) * is.w;
        const long plane_out = static_cast<long>(node.out.h) * node.out.w;

        switch (node.spec.kind) {
            case LayerKind::conv2d: {
                const ConvGeom g = conv_geom(node, is, batch);
                const std::size_t wsize = static_cast<std::size_t>(g.cout) * g.cin * g.kh * g.kw;
                kernels::conv2d_forward(g, in.data.data(), p, node.spec.bias ? p + wsize : nullptr, out.data.data());
                break;
            }
            case LayerKind::batchnorm: {
                const int C = is.c;
                const double* gamma = p;
                const double* beta = p + C;
                const bool batch_mode = node.spec.batch_stats && training;
                std::vector<double>& aux = ws.aux[idx];
                if (batch_mode) aux.assign(3 * static_cast<std::size_t>(C) + in.data.size(), 0.0);
                const double count = static_cast<double>(batch) * plane_in;
#pragma omp parallel for schedule(static) if (in.data.size() > 65536)
                for (int c = 0; c < C; ++c) {
                    double scale = gamma[c], shift = beta[c];
                    if (batch_mode) {
                        double mean = 0.0;
                        for (int n = 0; n < batch; ++n) {
                            const double* src = in.data.data() + (static_cast<long>(n) * C + c) * plane_in;
                            for (long k = 0; k < plane_in; ++k) mean += src[k];
                        }
                        mean /= count;
                        double var = 0.0;
                        for (int n = 0; n < batch; ++n) {
                            const double* src = in.data.data() + (static_cast<long>(n) * C + c) * plane_in;
                            for (long k = 0; k < plane_in; ++k) var += (src[k] - mean) * (src[k] - mean);
                        }
                        var /= count;
                        const double inv = 1.0 / std::sqrt(var + kBatchNormEps);
                        aux[c] = mean;
                        aux[C + c] = var;
                        aux[2 * C + c] = inv;
                        double* xhat = aux.data() + 3 * C;
                        for (int n = 0; n < batch; ++n) {
                            const long off = (static_cast<long>(n) * C + c) * plane_in;
                            for (long k = 0; k < plane_in; ++k) {
                                xhat[off + k] = (in.data[off + k] - mean) * inv;
                                out.data[off + k] = gamma[c] * xhat[off + k] + beta[c];
                            }
                        }
                        continue;
                    }
                    if (node.spec.batch_stats) {
                        const double* st = state_.data() + node.state_offset;
                        const double inv = 1.0 / std::sqrt(st[C + c] + kBatchNormEps);
                        scale = gamma[c] * inv;
                        shift = beta[c] - st[c] * scale;
                    }
                    for (int n = 0; n < batch; ++n) {
                        const long off = (static_cast<long>(n) * C + c) * plane_in;
                        for (long k = 0; k < plane_in; ++k) out.data[off + k] = scale * in.data[off + k] + shift;
                    }
                }
                break;
            }
            case LayerKind::relu:
                for (std::size_t k = 0; k < in.data.size(); ++k) out.data[k] = in.data[k] > 0.0 ? in.data[k] : 0.0;
                break;
            case LayerKind::sigmoid:
                for (std::size_t k = 0; k < in.data.size(); ++k) out.data[k] = 1.0 / (1.0 + std::exp(-in.data[k]));
                break;
            case LayerKind::maxpool: {
                std::vector<int>& arg = ws.argmax[idx];
                arg.resize(out.data.size());
                const LayerSpec& s = node.spec;
                const int planes = batch * is.c;
#pragma omp parallel for schedule(static) if (in.data.size() > 65536)
                for (int pl = 0; pl < planes; ++pl) {
                    const double* src = in.data.data() + pl * plane_in;
                    double* dst = out.data.data() + pl * plane_out;
                    int* am = arg.data() + pl * plane_out;
                    for (int oh = 0; oh < node.out.h; ++oh) {
                        const int h0 = std::max(0, oh * s.stride_h - s.pad_h);
                        const int h1 = std::min(is.h, oh * s.stride_h - s.pad_h + s.kernel_h);
                        for (int ow = 0; ow < node.out.w; ++ow) {
                            const int w0 = std::max(0, ow * s.stride_w - s.pad_w);
                            const int w1 = std::min(is.w, ow * s.stride_w - s.pad_w + s.kernel_w);
                            double best = -std::numeric_limits<double>::infinity();
                            int where = h0 * is.w + w0;
                            for (int ih = h0; ih < h1; ++ih)
                                for (int iw = w0; iw < w1; ++iw)
                                    if (src[ih * is.w + iw] > best) {
                                        best = src[ih * is.w + iw];
                                        where = ih * is.w + iw;
                                    }
                            dst[oh * node.out.w + ow] = best;
                            am[oh * node.out.w + ow] = where;
                        }
                    }
                }
                break;
            }
            case LayerKind::avgpool_global: {
                const int planes = batch * is.c;
                for (int pl = 0; pl < planes; ++pl) {
                    double acc = 0.0;
                    for (long k = 0; k < plane_in; ++k) acc += in.data[pl * plane_in + k];
                    out.data[pl] = acc / static_cast<double>(plane_in);
                }
                break;
            }
            case LayerKind::dense: {
                DenseGeom g{batch, static_cast<int>(is.size()), node.out.c};
                kernels::dense_forward(g, in.data.data(), p, p + static_cast<std::size_t>(g.fan_in) * g.fan_out,
                                       out.data.data());
                break;
            }
            case LayerKind::upsample: {
                const int planes = batch * is.c;
                for (int pl = 0; pl < planes; ++pl) {
                    const double* src = in.data.data() + pl * plane_in;
                    double* dst = out.data.data() + pl * plane_out;
                    for (int oh = 0; oh < node.out.h; ++oh) {
                        const int ih = static_cast<int>(static_cast<long>(oh) * is.h / node.out.h);
                        for (int ow = 0; ow < node.out.w; ++ow) {
                            const int iw = static_cast<int>(static_cast<long>(ow) * is.w / node.out.w);
                            dst[oh * node.out.w + ow] = src[ih * is.w + iw];
                        }
                    }
                }
                break;
            }
            case LayerKind::skip_add: {
                const Tensor& other = node.inputs[1] == kNetworkInput ? x : ws.act[node.inputs[1]];
                for (std::size_t k = 0; k < in.data.size(); ++k) out.data[k] = in.data[k] + other.data[k];
                break;
            }
        }
    }
}

std::vector<double> Network::probabilities(const Workspace& ws) const { return ws.act.at(spec_.prob_node).data; }

const Tensor* Network::reconstruction(const Workspace& ws) const {
    return spec_.recon_node >= 0 ? &ws.act.at(spec_.recon_node) : nullptr;
}

void Network::backward(const Tensor& x, Workspace& ws, std::span<const double> dprob, const Tensor* drecon,
                       std::vector<double>& grad) const {
    const int batch = ws.batch;
    if (x.n != batch || ws.act.size() != spec_.nodes.size()) throw InvalidInput("backward without matching forward");
    if (dprob.size() != static_cast<std::size_t>(batch)) throw InvalidInput("dprob size differs from batch");
    if (grad.size() != params_.size()) throw InvalidInput("gradient buffer size differs from parameter count");
    for (Tensor& g : ws.grad) std::fill(g.data.begin(), g.data.end(), 0.0);
    std::copy(dprob.begin(), dprob.end(), ws.grad[spec_.prob_node].data.begin());
    if (drecon) {
        if (spec_.recon_node < 0 || drecon->data.size() != ws.grad[spec_.recon_node].data.size())
            throw InvalidInput("reconstruction gradient does not match the network");
        Tensor& g = ws.grad[spec_.recon_node];
        for (std::size_t k = 0; k < g.data.size(); ++k) g.data[k] += drecon->data[k];
    }

    for (std::size_t idx = spec_.nodes.size(); idx-- > 0;) {
        const Node& node = spec_.nodes[idx];
        const int src = node.inputs[0];
        const Tensor& in = src == kNetworkInput ? x : ws.act[src];
        double* din = src == kNetworkInput ? nullptr : ws.grad[src].data.data();
        const Tensor& out = ws.act[idx];
        const Tensor& dout = ws.grad[idx];
        const Shape is = in.shape;
        const double* p = params_.data() + node.param_offset;
        double* gp = grad.data() + node.param_offset;
        const long plane_in = static_cast<long>(is.h) * is.w;
        const long plane_out = static_cast<long>(node.out.h) * node.out.w;

        switch (node.spec.kind) {
            case LayerKind::conv2d: {
                const ConvGeom g = conv_geom(node, is, batch);
                const std::size_t wsize = static_cast<std::size_t>(g.cout) * g.cin * g.kh * g.kw;
                kernels::conv2d_backward(g, in.data.data(), p, dout.data.data(), gp,
                                         node.spec.bias ? gp + wsize : nullptr, din);
                break;
            }
            case LayerKind::batchnorm: {
                const int C = is.c;
                const double* gamma = p;
                const bool batch_mode = node.spec.batch_stats && ws.training;
                const std::vector<double>& aux = ws.aux[idx];
                const double count = static_cast<double>(batch) * plane_in;
#pragma omp parallel for schedule(static) if (in.data.size() > 65536)
                for (int c = 0; c < C; ++c) {
                    double sum_dy = 0.0, sum_dy_xhat = 0.0;
                    if (batch_mode) {
                        const double* xhat = aux.data() + 3 * C;
                        for (int n = 0; n < batch; ++n) {
                            const long off = (static_cast<long>(n) * C + c) * plane_in;
                            for (long k = 0; k < plane_in; ++k) {
                                sum_dy += dout.data[off + k];
                                sum_dy_xhat += dout.data[off + k] * xhat[off + k];
                            }
                        }
                        gp[c] += sum_dy_xhat;
                        gp[C + c] += sum_dy;
                        if (!din) continue;
                        const double inv = aux[2 * C + c];
                        for (int n = 0; n < batch; ++n) {
                            const long off = (static_cast<long>(n) * C + c) * plane_in;
                            for (long k = 0; k < plane_in; ++k)
                                din[off + k] += gamma[c] * inv *
                                                (dout.data[off + k] - sum_dy / count - xhat[off + k] * sum_dy_xhat / count);
                        }
                        continue;
                    }
                    double scale = gamma[c], shift = 0.0, inv = 1.0;
                    if (node.spec.batch_stats) {
                        const double* st = state_.data() + node.state_offset;
                        inv = 1.0 / std::sqrt(st[C + c] + kBatchNormEps);
                        scale = gamma[c] * inv;
                        shift = -st[c] * inv;
                    }
                    for (int n = 0; n < batch; ++n) {
                        const long off = (static_cast<long>(n) * C + c) * plane_in;
                        for (long k = 0; k < plane_in; ++k) {
                            sum_dy += dout.data[off + k];
                            sum_dy_xhat += dout.data[off + k] * (in.data[off + k] * inv + shift);
                            if (din) din[off + k] += scale * dout.data[off + k];
                        }
                    }
                    gp[c] += sum_dy_xhat;
                    gp[C + c] += sum_dy;
                }
                break;
            }
            case LayerKind::relu:
                if (din)
                    for (std::size_t k = 0; k < in.data.size(); ++k)
                        if (in.data[k] > 0.0) din[k] += dout.data[k];
                break;
            case LayerKind::sigmoid:
                if (din)
                    for (std::size_t k = 0; k < in.data.size(); ++k)
                        din[k] += dout.data[k] * out.data[k] * (1.0 - out.data[k]);
                break;
            case LayerKind::maxpool: {
                if (!din) break;
                const std::vector<int>& arg = ws.argmax[idx];
                const int planes = batch * is.c;
                for (int pl = 0; pl < planes; ++pl)
                    for (long k = 0; k < plane_out; ++k)
                        din[pl * plane_in + arg[pl * plane_out + k]] += dout.data[pl * plane_out + k];
                break;
            }
            case LayerKind::avgpool_global: {
                if (!din) break;
                const int planes = batch * is.c;
                for (int pl = 0; pl < planes; ++pl) {
                    const double share = dout.data[pl] / static_cast<double>(plane_in);
                    for (long k = 0; k < plane_in; ++k) din[pl * plane_in + k] += share;
                }
                break;
            }
            case LayerKind::dense: {
                DenseGeom g{batch, static_cast<int>(is.size()), node.out.c};
                kernels::dense_backward(g, in.data.data(), p, dout.data.data(), gp,
                                        gp + static_cast<std::size_t>(g.fan_in) * g.fan_out, din);
                break;
            }
            case LayerKind::upsample: {
                if (!din) break;
                const int planes = batch * is.c;
                for (int pl = 0; pl < planes; ++pl) {
                    double* dst = din + pl * plane_in;
                    const double* d = dout.data.data() + pl * plane_out;
                    for (int oh = 0; oh < node.out.h; ++oh) {
                        const int ih = static_cast<int>(static_cast<long>(oh) * is.h / node.out.h);
                        for (int ow = 0; ow < node.out.w; ++ow) {
                            const int iw = static_cast<int>(static_cast<long>(ow) * is.w / node.out.w);
                            dst[ih * is.w + iw] += d[oh * node.out.w + ow];
                        }
                    }
                }
                break;
            }
            case LayerKind::skip_add: {
                if (din)
                    for (std::size_t k = 0; k < dout.data.size(); ++k) din[k] += dout.data[k];
                const int other = node.inputs[1];
                if (other != kNetworkInput) {
                    double* d2 = ws.grad[other].data.data();
                    for (std::size_t k = 0; k < dout.data.size(); ++k) d2[k] += dout.data[k];
                }
                break;
            }
        }
    }
}

void Network::update_running_stats(const Workspace& ws, double momentum) {
    if (!ws.training) return;
    for (std::size_t idx = 0; idx < spec_.nodes.size(); ++idx) {
        const Node& node = spec_.nodes[idx];
        if (node.spec.kind != LayerKind::batchnorm || !node.spec.batch_stats) continue;
        const int C = spec_.shape_of(node.inputs[0]).c;
        const Shape is = spec_.shape_of(node.inputs[0]);
        const double count = static_cast<double>(ws.batch) * is.h * is.w;
        const double unbias = count > 1.0 ? count / (count - 1.0) : 1.0;
        double* st = state_.data() + node.state_offset;
        const std::vector<double>& aux = ws.aux[idx];
        for (int c = 0; c < C; ++c) {
            st[c] = (1.0 - momentum) * st[c] + momentum * aux[c];
            st[C + c] = (1.0 - momentum) * st[C + c] + momentum * aux[C + c] * unbias;
        }
    }
}

std::vector<double> Network::predict(const Tensor& x) const {
    Workspace ws;
    forward(x, ws, false);
    return probabilities(ws);
}

}  // namespace ndt::dl
