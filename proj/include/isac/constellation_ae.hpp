// SPDX-License-Identifier: Apache-2.0
//
// isac-toolkit: design and evaluation of integrated sensing and communication
// Copyright (C) 2026 isac-toolkit contributors
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
#ifndef ISAC_CONSTELLATION_AE_HPP
#define ISAC_CONSTELLATION_AE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isac/neural.hpp"
#include "isac/rng.hpp"
#include "isac/types.hpp"

// End-to-end constellation learning with a shared encoder, a communication
// decoder and a radar presence detector.
namespace isac::ae
{
    struct Constellation
    {
        CVector points;
        std::vector<int> labels;
        double avg_power = 1.0;

        int size() const { return static_cast<int>(points.size()); }
        // std(|x|) / mean(|x|)
        double amplitude_spread() const;
        double min_distance() const;
        void validate() const;
    };

    // Scales to unit average power and records the labels 0..M-1.
    Constellation make_constellation(CVector points);

    enum class BaselineKind
    {
        qam,
        psk,
    };

    // Cross 32-QAM for M = 32, square QAM for even powers of two, uniform PSK otherwise.
    Constellation baseline_constellation(BaselineKind kind, int size);

    enum class CommHead
    {
        softmax,         // M-way message classifier
        per_bit_sigmoid, // K independent bit estimates
    };

    struct AeConfig
    {
        int bits = 5;
        double eta = 0.5;
        double comm_noise_var = 0.02;
        double radar_noise_var = 0.1;
        std::vector<int> hidden{16, 32, 16};
        CommHead head = CommHead::softmax;
        int epochs = 50;
        int samples_per_epoch = 100000;
        int batch_size = 1000;
        double lr = 1e-3;
        std::uint64_t seed = 0;

        void validate() const;
    };

    struct IsacAutoencoder
    {
        nn::MlpModel encoder;        // K bits -> (Re x, Im x)
        nn::MlpModel comm_decoder;   // (Re y, Im y) -> M softmax or K sigmoids
        nn::MlpModel radar_detector; // (Re z, Im z) -> 1 sigmoid
        AeConfig config;

        int num_messages() const { return 1 << config.bits; }
        static IsacAutoencoder create(const AeConfig &config, Rng &rng);
    };

    // Bits of message m, least significant first, as 0/1.
    RMatrix message_bits(std::span<const int> messages, int bits);

    struct AeBatch
    {
        std::vector<int> messages;
        std::vector<double> flags; // target present
        RMatrix comm_noise;        // B x 2
        RMatrix radar_noise;       // B x 2
        RMatrix y, z;              // filled by observe()
    };

    // Messages uniform over 2^K, T ~ Bernoulli(1/2), and complex Gaussian noise with
    // the given total variances.
    AeBatch sample_training_batch(int bits, int batch, double comm_noise_var, double radar_noise_var, Rng &rng);

    // y = x + n_c, z = T x + n_r for encoder outputs x (B x 2).
    void observe(const RMatrix &x, AeBatch &batch);

    // Mean categorical cross-entropy; gradient w.r.t. the softmax pre-activation.
    double comm_loss(const RMatrix &probs, std::span<const int> messages, RMatrix *grad_pre);
    // Per-bit binary cross-entropy summed over bits, averaged over the batch.
    double comm_loss_bits(const RMatrix &probs, std::span<const int> messages, int bits, RMatrix *grad_pre);
    // Mean binary cross-entropy with probabilities clamped to [1e-12, 1 - 1e-12].
    double radar_loss(const RMatrix &probs, std::span<const double> flags, RMatrix *grad_pre);

    struct AeStepLoss
    {
        double total = 0.0;
        double comm = 0.0;
        double radar = 0.0;
    };

    // Combined loss and parameter gradients for one batch; encoder outputs are
    // normalized to unit average power over the batch.
    struct AeGradients
    {
        nn::Gradients encoder, comm, radar;
    };

    AeStepLoss ae_loss(const IsacAutoencoder &model, AeBatch &batch, AeGradients *grads);

    struct AeHistory
    {
        std::vector<double> loss, comm_loss, radar_loss; // per epoch means
    };

    IsacAutoencoder train_isac_ae(const AeConfig &config, AeHistory *history = nullptr);

    Constellation extract_constellation(const IsacAutoencoder &model);

    struct IsacMetrics
    {
        double ser = 0.0;
        double pd = 0.0;
        double pfa = 0.0;
    };

    // Trained decoder and detector (detector output compared to the threshold).
    IsacMetrics evaluate_autoencoder(const IsacAutoencoder &model, double threshold, std::size_t trials, Rng &rng);

    // Minimum-distance decoding and the likelihood-ratio detector written as the
    // posterior P(T = 1 | z) with equal priors.
    IsacMetrics evaluate_constellation(const Constellation &c, double comm_noise_var, double radar_noise_var,
                                       double threshold, std::size_t trials, Rng &rng);

    double target_posterior(const Constellation &c, cdouble z, double radar_noise_var);

    struct CalibrationTarget
    {
        double ser = 0.32359365692962827; // 10^-0.49
        double pd = 0.935;
        double pfa = 0.0085;
        int size = 32;
        std::size_t trials = 200000;
        std::uint64_t seed = 7;
    };

    struct Calibration
    {
        double comm_noise_var = 0.0;
        double radar_noise_var = 0.0;
        double energy_threshold = 0.0;    // on |z|^2
        double posterior_threshold = 0.0; // on P(T = 1 | z)
    };

    // Noise levels at which the PSK baseline reproduces the target SER / Pd / Pfa,
    // solved by bisection on Monte-Carlo curves with common random numbers.
    Calibration calibrate_psk(const CalibrationTarget &target = {});
}

#endif
