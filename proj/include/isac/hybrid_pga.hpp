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
#ifndef ISAC_HYBRID_PGA_HPP
#define ISAC_HYBRID_PGA_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "isac/metrics.hpp"
#include "isac/rng.hpp"
#include "isac/types.hpp"

// Projected gradient ascent for hybrid analog/digital precoding and its unrolled
// version with learned per-layer step sizes. Channels are N x K with column k = h_k.
namespace isac::hybrid
{
    struct HybridBeamformer
    {
        CMatrix F; // N x L, unit modulus
        CMatrix W; // L x K
        double power = 1.0;

        // Throws unless |F_ij| = 1 (1e-9) and ||F W||^2 = P (1e-6 relative).
        void validate() const;
    };

    struct StepSchedule
    {
        RMatrix steps; // I x 2: column 0 mu_F, column 1 mu_W

        static StepSchedule constant(int layers, double mu_f, double mu_w);
        int layers() const { return static_cast<int>(steps.rows()); }
        void validate() const;
    };

    // Literal per-user blocks of the closed-form gradients.
    struct GradWorkspace
    {
        CMatrix Z, Z_bar;         // F V F^H, F V_k F^H
        CMatrix V, V_bar;         // W W^H, W_k W_k^H
        CMatrix H_tilde, H_bar;   // h h^H, F^H h h^H F
        CMatrix W_bar;            // W with column k zeroed

        GradWorkspace(const CVector &h, const CMatrix &F, const CMatrix &W, int k);
    };

    // Conjugate-Wirtinger gradients of the sum rate in bits. grad_F / grad_W use a
    // rank-one factorization; the *_workspace variants evaluate the matrix blocks
    // literally and agree to rounding.
    CMatrix grad_F(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var);
    CMatrix grad_W(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var);
    CMatrix grad_F_workspace(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var);
    CMatrix grad_W_workspace(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var);

    // Entry-wise F / |F|; exact zeros map to 1.
    CMatrix project_unit_modulus(const CMatrix &F);

    // sqrt(P) W / ||F W||_F.
    CMatrix normalize_power(const CMatrix &F, const CMatrix &W, double power);

    HybridBeamformer random_init(int num_antennas, int num_rf, int num_users, double power, Rng &rng);

    struct PgaTrace
    {
        HybridBeamformer result;
        std::vector<double> rates; // nats, after each layer
    };

    PgaTrace pga_run(const CMatrix &channels, const HybridBeamformer &init, const StepSchedule &schedule,
                     double noise_var);

    struct PgaProblem
    {
        CMatrix channels; // N x K
        HybridBeamformer init;
    };

    std::vector<PgaProblem> rayleigh_problems(std::size_t count, int num_antennas, int num_rf, int num_users,
                                              double power, std::uint64_t seed);

    enum class LayerWeighting
    {
        log_natural, // log(1 + i)
        log2,        // log2(1 + i)
        uniform,
    };

    std::vector<double> layer_weights(int layers, LayerWeighting weighting);

    // -(1/|D|) sum_d (1/I) sum_i w_i R_i
    double unrolled_loss(const StepSchedule &schedule, std::span<const PgaProblem> data, double noise_var,
                         LayerWeighting weighting = LayerWeighting::log_natural, int threads = 1);

    struct StepTrainOptions
    {
        int layers = 10;
        double lr = 0.005;
        int epochs = 20;
        int batch_size = 50;
        double init_step = 0.05;
        double fd_epsilon = 1e-4;
        double max_grad_norm = 1.0; // SGD steps are clipped to lr * max_grad_norm
        LayerWeighting weighting = LayerWeighting::log_natural;
        std::uint64_t seed = 0;
        int threads = 1;
    };

    struct StepTrainResult
    {
        StepSchedule schedule; // best on validation
        std::vector<double> train_loss;
        std::vector<double> val_loss; // index 0 is the initial schedule
    };

    StepTrainResult train_step_sizes(std::span<const PgaProblem> train, std::span<const PgaProblem> validation,
                                     double noise_var, const StepTrainOptions &options);
}

#endif
