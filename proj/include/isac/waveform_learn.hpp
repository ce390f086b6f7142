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
#ifndef ISAC_WAVEFORM_LEARN_HPP
#define ISAC_WAVEFORM_LEARN_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "isac/channel.hpp"
#include "isac/classical_design.hpp"
#include "isac/neural.hpp"
#include "isac/types.hpp"

// Unsupervised waveform network: maps (H, D, X0) to a power-limited waveform by
// minimizing the weighted MUI / reference-mismatch loss directly.
namespace isac::wavenet
{
    struct WaveformSample
    {
        CMatrix H;  // K x M
        CMatrix D;  // K x tau_d
        CMatrix X0; // M x tau_d

        int num_users() const { return static_cast<int>(H.rows()); }
        int num_antennas() const { return static_cast<int>(H.cols()); }
        int frame_length() const { return static_cast<int>(D.cols()); }
        void validate() const;
    };

    struct WaveformNetSpec
    {
        int num_antennas = 8;
        int num_users = 2;
        int frame_length = 8;

        // N = K (M + tau_d) + M tau_d
        int n() const { return num_users * (num_antennas + frame_length) + num_antennas * frame_length; }
        std::vector<int> widths() const; // [2N, 20N, 10N, 2 M tau_d]
        std::vector<nn::Activation> activations() const;
        nn::MlpModel create(Rng &rng) const;
    };

    // [Re vec H, Im vec H, Re vec D, Im vec D, Re vec X0, Im vec X0], column-major vec.
    RVector build_features(const WaveformSample &sample);

    // Inverse of the [Re vec X, Im vec X] stacking used for the network output.
    CMatrix unstack_waveform(std::span<const double> raw, int num_antennas, int frame_length);
    RVector stack_waveform(const CMatrix &X);

    // Scales onto the ball ||X||^2 <= tau_d P_T.
    CMatrix power_projection(std::span<const double> raw, int num_antennas, int frame_length, double total_power);

    // (1/Ns) sum_n eta ||H_n X_n - D_n||^2 + (1 - eta) ||X_n - X0_n||^2. grads (if
    // given) receives (2/Ns)[eta H^H (H X - D) + (1 - eta)(X - X0)] per sample.
    double isac_waveform_loss(std::span<const CMatrix> X, std::span<const WaveformSample> samples, double eta,
                              std::vector<CMatrix> *grads);

    // Same loss evaluated on raw network outputs (one row per sample) through the
    // projection; grad receives d loss / d raw.
    double raw_output_loss(const RMatrix &raw, std::span<const WaveformSample *const> samples, double eta,
                           double total_power, RMatrix *grad);

    enum class ReferenceKind
    {
        omni,
        directional,
    };

    struct WaveformScenario
    {
        int num_antennas = 8;
        int num_users = 2;
        int frame_length = 8;
        double total_power = 1.0;
        double rician_lo = 1.0;
        double rician_hi = 3.0;
        double large_scale_gain = 1.0;
        double angle_lo = -0.5 * pi;
        double angle_hi = 0.5 * pi;
        ReferenceKind reference = ReferenceKind::omni;
        std::vector<double> target_angles{-pi / 3.0, 0.0, pi / 3.0};
        design::DirectionalOptions directional;

        void validate() const;
    };

    class WaveformGenerator
    {
    public:
        explicit WaveformGenerator(WaveformScenario scenario);

        const WaveformScenario &scenario() const { return scenario_; }
        const design::CovarianceTemplate &reference() const { return reference_; }

        // Rician users with K_h and angle drawn uniformly, QPSK D, Procrustes X0.
        WaveformSample draw(Rng &rng) const;
        std::vector<channel::RicianParams> draw_users(Rng &rng) const;
        WaveformSample complete(const CMatrix &H, Rng &rng) const; // draws D, builds X0
        WaveformSample with_symbols(const CMatrix &H, const CMatrix &D) const;

        std::vector<WaveformSample> dataset(std::size_t count, std::uint64_t seed, int threads) const;

    private:
        WaveformScenario scenario_;
        design::CovarianceTemplate reference_;
    };

    CMatrix qpsk_symbols(int rows, int cols, Rng &rng);

    // Binary cache: magic, version, count, M, K, tau_d, then per sample H, D, X0 as
    // contiguous column-major complex doubles.
    void save_dataset(const std::string &path, std::span<const WaveformSample> samples);
    std::vector<WaveformSample> load_dataset(const std::string &path);

    struct WaveformTrainOptions
    {
        nn::TrainConfig train{500, 32, 1e-3, 20, 0};
        double total_power = 1.0;
        // Random symbol relabelings (column permutation and quarter-turn phases of
        // D, X0; user permutation and quarter-turn phases of H, D) applied to each
        // training mini-batch. The loss and the exact optimum are equivariant under
        // all of them.
        bool augment = false;
    };

    struct WaveformTrainResult
    {
        nn::MlpModel model;
        nn::TrainHistory history;
        std::vector<std::size_t> train_rows, val_rows, test_rows; // 60 / 20 / 20
    };

    WaveformTrainResult train_waveform_net(std::span<const WaveformSample> dataset, double eta,
                                           const WaveformTrainOptions &options);

    design::WaveformDesign predict_waveform(const nn::MlpModel &model, const WaveformSample &sample, double total_power);
    std::vector<design::WaveformDesign> predict_waveforms(const nn::MlpModel &model,
                                                          std::span<const WaveformSample> samples, double total_power);
}

#endif
