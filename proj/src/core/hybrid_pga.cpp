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
#include "isac/hybrid_pga.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace isac::hybrid
{
    void HybridBeamformer::validate() const
    {
        if (F.cols() != W.rows() || F.size() == 0 || W.size() == 0)
            fail("analog and digital precoders do not chain");
        for (Eigen::Index i = 0; i < F.size(); ++i)
            if (std::abs(std::abs(F.data()[i]) - 1.0) > 1e-9)
                fail("analog precoder violates the unit-modulus constraint");
        if (std::abs((F * W).squaredNorm() - power) > 1e-6 * std::max(1.0, power))
            fail("hybrid precoder violates the power constraint");
    }

    StepSchedule StepSchedule::constant(int layers, double mu_f, double mu_w)
    {
        if (layers < 1)
            fail("schedule needs at least one layer");
        StepSchedule s;
        s.steps.resize(layers, 2);
        s.steps.col(0).setConstant(mu_f);
        s.steps.col(1).setConstant(mu_w);
        return s;
    }

    void StepSchedule::validate() const
    {
        if (steps.rows() < 1 || steps.cols() != 2)
            fail("step schedule must be I x 2 with I >= 1");
        if (!steps.allFinite())
            fail("step schedule has non-finite entries");
    }

    GradWorkspace::GradWorkspace(const CVector &h, const CMatrix &F, const CMatrix &W, int k)
    {
        W_bar = W;
        W_bar.col(k).setZero();
        V = W * W.adjoint();
        V_bar = W_bar * W_bar.adjoint();
        Z = F * V * F.adjoint();
        Z_bar = F * V_bar * F.adjoint();
        H_tilde = h * h.adjoint();
        H_bar = F.adjoint() * H_tilde * F;
    }

    namespace
    {
        void check_inputs(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var)
        {
            if (!(noise_var > 0.0))
                fail("noise variance must be positive");
            if (channels.rows() != F.rows() || F.cols() != W.rows() || W.cols() != channels.cols())
                fail("dimension mismatch in hybrid gradient");
        }

        // Row k: e_k / ||e_k||^2 + s - e_k^(k) / (||e_k||^2 - |e_kk|^2 + s), e_k = h_k^H F W.
        CMatrix rate_weights(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var)
        {
            const CMatrix E = channels.adjoint() * F * W; // K x K
            CMatrix out(E.rows(), E.cols());
            for (Eigen::Index k = 0; k < E.rows(); ++k)
            {
                const double total = E.row(k).squaredNorm() + noise_var;
                const double interference = total - std::norm(E(k, k));
                out.row(k) = E.row(k) * (1.0 / total - 1.0 / interference);
                out(k, k) = E(k, k) / total;
            }
            return out;
        }
    }

    CMatrix grad_F(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var)
    {
        check_inputs(channels, F, W, noise_var);
        const CMatrix R = rate_weights(channels, F, W, noise_var);
        return channels * R * W.adjoint() / std::numbers::ln2;
    }

    CMatrix grad_W(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var)
    {
        check_inputs(channels, F, W, noise_var);
        const CMatrix R = rate_weights(channels, F, W, noise_var);
        return F.adjoint() * channels * R / std::numbers::ln2;
    }

    CMatrix grad_F_workspace(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var)
    {
        check_inputs(channels, F, W, noise_var);
        CMatrix g = CMatrix::Zero(F.rows(), F.cols());
        for (Eigen::Index k = 0; k < channels.cols(); ++k)
        {
            const GradWorkspace ws(channels.col(k), F, W, static_cast<int>(k));
            const double a = (ws.Z * ws.H_tilde).trace().real() + noise_var;
            const double b = (ws.Z_bar * ws.H_tilde).trace().real() + noise_var;
            g += ws.H_tilde * F * ws.V / a - ws.H_tilde * F * ws.V_bar / b;
        }
        return g / std::numbers::ln2;
    }

    CMatrix grad_W_workspace(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var)
    {
        check_inputs(channels, F, W, noise_var);
        CMatrix g = CMatrix::Zero(W.rows(), W.cols());
        for (Eigen::Index k = 0; k < channels.cols(); ++k)
        {
            const GradWorkspace ws(channels.col(k), F, W, static_cast<int>(k));
            const double a = (ws.V * ws.H_bar).trace().real() + noise_var;
            const double b = (ws.V_bar * ws.H_bar).trace().real() + noise_var;
            g += ws.H_bar * W / a - ws.H_bar * ws.W_bar / b;
        }
        return g / std::numbers::ln2;
    }

    CMatrix project_unit_modulus(const CMatrix &F)
    {
        CMatrix out(F.rows(), F.cols());
        for (Eigen::Index i = 0; i < F.size(); ++i)
        {
            const double mag = std::abs(F.data()[i]);
            out.data()[i] = mag > 0.0 ? F.data()[i] / mag : cdouble{1.0, 0.0};
        }
        return out;
    }

    CMatrix normalize_power(const CMatrix &F, const CMatrix &W, double power)
    {
        if (!(power > 0.0))
            fail("power budget must be positive");
        const double norm = (F * W).norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            fail_numerical("degenerate beamformer");
        return W * (std::sqrt(power) / norm);
    }

    HybridBeamformer random_init(int num_antennas, int num_rf, int num_users, double power, Rng &rng)
    {
        if (num_antennas < 1 || num_rf < 1 || num_users < 1)
            fail("beamformer dimensions must be positive");
        HybridBeamformer b;
        b.power = power;
        b.F.resize(num_antennas, num_rf);
        for (Eigen::Index i = 0; i < b.F.size(); ++i)
            b.F.data()[i] = std::polar(1.0, rng.uniform(-pi, pi));
        b.W.resize(num_rf, num_users);
        for (Eigen::Index i = 0; i < b.W.size(); ++i)
            b.W.data()[i] = rng.complex_normal();
        b.W = normalize_power(b.F, b.W, power);
        return b;
    }

    PgaTrace pga_run(const CMatrix &channels, const HybridBeamformer &init, const StepSchedule &schedule,
                     double noise_var)
    {
        schedule.validate();
        PgaTrace trace;
        trace.result = init;
        CMatrix &F = trace.result.F;
        CMatrix &W = trace.result.W;
        trace.rates.reserve(static_cast<std::size_t>(schedule.layers()));
        for (int i = 0; i < schedule.layers(); ++i)
        {
            const double mu_f = schedule.steps(i, 0);
            const double mu_w = schedule.steps(i, 1);
            if (mu_f != 0.0)
                F = project_unit_modulus(F + mu_f * grad_F(channels, F, W, noise_var));
            if (mu_w != 0.0)
                W = normalize_power(F, W + mu_w * grad_W(channels, F, W, noise_var), init.power);
            trace.rates.push_back(metrics::hybrid_sum_rate(channels, F, W, noise_var).nats);
        }
        return trace;
    }

    std::vector<PgaProblem> rayleigh_problems(std::size_t count, int num_antennas, int num_rf, int num_users,
                                              double power, std::uint64_t seed)
    {
        std::vector<PgaProblem> out(count);
        const Rng master(seed);
        for (std::size_t i = 0; i < count; ++i)
        {
            Rng rng = master.child(i);
            out[i].channels.resize(num_antennas, num_users);
            for (int k = 0; k < num_users; ++k)
                out[i].channels.col(k) = channel::sample_rayleigh(num_antennas, rng);
            out[i].init = random_init(num_antennas, num_rf, num_users, power, rng);
        }
        return out;
    }

    std::vector<double> layer_weights(int layers, LayerWeighting weighting)
    {
        std::vector<double> w(static_cast<std::size_t>(layers));
        for (int i = 1; i <= layers; ++i)
        {
            switch (weighting)
            {
            case LayerWeighting::log_natural:
                w[i - 1] = std::log(1.0 + i);
                break;
            case LayerWeighting::log2:
                w[i - 1] = std::log2(1.0 + i);
                break;
            case LayerWeighting::uniform:
                w[i - 1] = 1.0;
                break;
            }
        }
        return w;
    }

    double unrolled_loss(const StepSchedule &schedule, std::span<const PgaProblem> data, double noise_var,
                         LayerWeighting weighting, int threads)
    {
        if (data.empty())
            fail("unrolled loss needs at least one channel realization");
        schedule.validate();
        const auto w = layer_weights(schedule.layers(), weighting);
        std::vector<double> per(data.size());
        parallel_for(data.size(), threads, [&](std::size_t d)
                     {
            const auto trace = pga_run(data[d].channels, data[d].init, schedule, noise_var);
            double s = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i)
                s += w[i] * trace.rates[i];
            per[d] = s / static_cast<double>(w.size()); });
        double total = 0.0;
        for (double v : per)
            total += v;
        return -total / static_cast<double>(data.size());
    }

    StepTrainResult train_step_sizes(std::span<const PgaProblem> train, std::span<const PgaProblem> validation,
                                     double noise_var, const StepTrainOptions &options)
    {
        if (options.layers < 1)
            fail("unrolled network needs at least one layer");
        if (train.empty())
            fail("training set is empty");
        if (!(options.lr > 0.0) || options.epochs < 1 || options.batch_size < 1 || !(options.fd_epsilon > 0.0))
            fail("invalid step-size training options");

        StepTrainResult result;
        StepSchedule phi = StepSchedule::constant(options.layers, options.init_step, options.init_step);
        auto val_of = [&](const StepSchedule &s)
        {
            return validation.empty() ? unrolled_loss(s, train, noise_var, options.weighting, options.threads)
                                      : unrolled_loss(s, validation, noise_var, options.weighting, options.threads);
        };
        result.schedule = phi;
        result.val_loss.push_back(val_of(phi));
        double best = result.val_loss.back();

        Rng rng(options.seed);
        std::vector<std::size_t> order(train.size());
        std::iota(order.begin(), order.end(), 0);
        std::vector<PgaProblem> batch;
        const double eps = options.fd_epsilon;
        for (int epoch = 0; epoch < options.epochs; ++epoch)
        {
            std::shuffle(order.begin(), order.end(), rng.engine());
            double epoch_loss = 0.0;
            std::size_t seen = 0;
            for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(options.batch_size))
            {
                const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));
                batch.clear();
                for (std::size_t i = start; i < end; ++i)
                    batch.push_back(train[order[i]]);
                RMatrix grad(phi.steps.rows(), 2);
                for (Eigen::Index i = 0; i < grad.rows(); ++i)
                    for (Eigen::Index j = 0; j < 2; ++j)
                    {
                        StepSchedule plus = phi, minus = phi;
                        plus.steps(i, j) += eps;
                        minus.steps(i, j) -= eps;
                        grad(i, j) = (unrolled_loss(plus, batch, noise_var, options.weighting, options.threads) -
                                      unrolled_loss(minus, batch, noise_var, options.weighting, options.threads)) /
                                     (2.0 * eps);
                    }
                const double norm = grad.norm();
                if (norm > options.max_grad_norm)
                    grad *= options.max_grad_norm / norm;
                phi.steps -= options.lr * grad;
                phi.steps = phi.steps.cwiseMax(0.0);
                epoch_loss += unrolled_loss(phi, batch, noise_var, options.weighting, options.threads) *
                              static_cast<double>(batch.size());
                seen += batch.size();
            }
            result.train_loss.push_back(epoch_loss / static_cast<double>(seen));
            result.val_loss.push_back(val_of(phi));
            if (result.val_loss.back() < best)
            {
                best = result.val_loss.back();
                result.schedule = phi;
            }
        }
        return result;
    }
}
