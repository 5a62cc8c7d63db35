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
#include <random>

#include "ndtlos/deepnet.hpp"

namespace ndt::dl {

Shape input_shape(const channel::ArrayConfig& array, const channel::OfdmConfig& ofdm, const InputConfig& in) {
    if (in.pool_h < 1 || in.pool_w < 1) throw InvalidInput("pooling kernel must be at least 1x1");
    return {1, (array.size() + in.pool_h - 1) / in.pool_h, (ofdm.n_subcarriers + in.pool_w - 1) / in.pool_w};
}

namespace {

adcpm::Adcpm pooled(adcpm::Adcpm x, const InputConfig& in) {
    if (in.pool_h == 1 && in.pool_w == 1) return x;
    return adcpm::max_pool(x, in.pool_h, in.pool_w);
}

void copy_into(const adcpm::Adcpm& x, std::span<double> out) {
    const auto& v = x.data.values();
    if (v.size() != out.size()) throw InvalidInput("preprocessed image does not match the network input");
    std::copy(v.begin(), v.end(), out.begin());
}

}  // namespace

adcpm::Adcpm cnn_input(const channel::ChannelMatrix& h, const adcpm::AngleDelayTransform& transform,
                       const InputConfig& in) {
    adcpm::Adcpm x = adcpm::compute_adcpm(transform.apply(h.data));
    adcpm::normalize_max(x);
    return pooled(std::move(x), in);
}

adcpm::Adcpm augment_awgn(const channel::ChannelMatrix& h, double snr_db, std::uint64_t seed,
                          const adcpm::AngleDelayTransform& transform) {
    CMatrix noisy = h.data;
    channel::add_awgn(noisy, channel::noise_variance_for_snr(h.data, snr_db), seed);
    adcpm::Adcpm x = adcpm::compute_adcpm(transform.apply(noisy));
    adcpm::normalize_max(x);
    return x;
}

// Per-bin noise power of white channel noise is mean(X) / snr after the
// unitary transform, so the image-domain variant adds exponential power at
// that mean.
adcpm::Adcpm augment_awgn_image(const adcpm::Adcpm& clean, double snr_db, std::uint64_t seed) {
    adcpm::Adcpm x = clean;
    if (std::isinf(snr_db) && snr_db > 0.0) return x;
    const auto& v = x.data.values();
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= static_cast<double>(std::max<std::size_t>(1, v.size()));
    if (mean <= 0.0) return x;
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> power(db_to_linear(snr_db) / mean);
    for (double& e : x.data.values()) e += power(rng);
    adcpm::normalize_max(x);
    return x;
}

TensorSource::TensorSource(Tensor images, std::vector<int> labels)
    : images_(std::move(images)), labels_(std::move(labels)) {
    if (static_cast<std::size_t>(images_.n) != labels_.size()) throw InvalidInput("image and label counts differ");
}

void TensorSource::fill(std::size_t i, int, std::span<double> out) const {
    const auto s = images_.sample(static_cast<int>(i));
    std::copy(s.begin(), s.end(), out.begin());
}

ChannelSource::ChannelSource(std::vector<const channel::ChannelMatrix*> channels, std::vector<std::uint64_t> ids,
                             std::vector<int> labels, const channel::ArrayConfig& array,
                             const channel::OfdmConfig& ofdm, Options options)
    : channels_(std::move(channels)),
      ids_(std::move(ids)),
      labels_(std::move(labels)),
      transform_(array, ofdm),
      opt_(options),
      shape_(input_shape(array, ofdm, options.input)) {
    if (channels_.size() != labels_.size() || ids_.size() != labels_.size())
        throw InvalidInput("channel, id and label counts differ");
    for (const channel::ChannelMatrix* h : channels_)
        if (!h) throw InvalidInput("null channel");

    const bool channel_noise = opt_.augment_snr_db && opt_.noise_domain == NoiseDomain::channel;
    if (channel_noise) return;
    // Clean images are fixed, so compute them once. The image-domain variant
    // keeps them unpooled and adds noise at fill time.
    const bool keep_full = opt_.augment_snr_db.has_value();
    clean_.resize(channels_.size());
    const long n = static_cast<long>(channels_.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < n; ++i)
        clean_[i] = keep_full ? cnn_input(*channels_[i], transform_, InputConfig{1, 1})
                              : cnn_input(*channels_[i], transform_, opt_.input);
}

void ChannelSource::fill(std::size_t i, int epoch, std::span<double> out) const {
    if (!opt_.augment_snr_db) {
        copy_into(clean_[i], out);
        return;
    }
    const std::uint64_t seed = derive_seed(opt_.seed, static_cast<std::uint64_t>(epoch), ids_[i]);
    if (opt_.noise_domain == NoiseDomain::channel) {
        copy_into(pooled(augment_awgn(*channels_[i], *opt_.augment_snr_db, seed, transform_), opt_.input), out);
    } else {
        copy_into(pooled(augment_awgn_image(clean_[i], *opt_.augment_snr_db, seed), opt_.input), out);
    }
}

}  // namespace ndt::dl
