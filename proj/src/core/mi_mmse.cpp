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
#include "isac/mi_mmse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace isac::metrics
{
    DiscreteInput DiscreteInput::uniform(std::string name, std::vector<cdouble> points)
    {
        DiscreteInput in;
        in.name = std::move(name);
        in.probs.assign(points.size(), 1.0 / static_cast<double>(points.size()));
        in.points = std::move(points);
        return in;
    }

    DiscreteInput DiscreteInput::bpsk() { return uniform("bpsk", {{1.0, 0.0}, {-1.0, 0.0}}); }

    DiscreteInput DiscreteInput::qpsk()
    {
        const double a = std::sqrt(0.5);
        return uniform("qpsk", {{a, a}, {-a, a}, {-a, -a}, {a, -a}});
    }

    void DiscreteInput::validate() const
    {
        if (points.empty() || points.size() != probs.size())
            fail("constellation needs matching points and probabilities");
        double total = 0.0;
        double power = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
        {
            if (probs[i] < 0.0)
                fail("negative symbol probability");
            total += probs[i];
            power += probs[i] * std::norm(points[i]);
        }
        if (std::abs(total - 1.0) > 1e-9)
            fail("symbol probabilities do not sum to one");
        if (std::abs(power - 1.0) > 1e-9)
            fail("constellation is not normalized to unit average power");
    }

    MiMmsePoint gaussian_mi_mmse(double snr)
    {
        if (!(snr >= 0.0))
            fail("SNR must be nonnegative");
        return {snr, std::log1p(snr), 1.0 / (1.0 + snr)};
    }

    void gauss_hermite(int order, std::vector<double> &nodes, std::vector<double> &weights)
    {
        if (order < 1)
            fail("quadrature order must be positive");
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(order, order);
        for (int k = 1; k < order; ++k)
            J(k, k - 1) = J(k - 1, k) = std::sqrt(0.5 * k);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
        nodes.resize(order);
        weights.resize(order);
        for (int i = 0; i < order; ++i)
        {
            nodes[i] = eig.eigenvalues()(i);
            const double v0 = eig.eigenvectors()(0, i);
            weights[i] = std::sqrt(pi) * v0 * v0;
        }
    }

    namespace
    {
        // Contribution of one (x_i, n) pair: returns -log of the likelihood ratio
        // denominator and accumulates the posterior-mean error.
        struct PairTerms
        {
            double info = 0.0;
            double sq_err = 0.0;
        };

        PairTerms pair_terms(const DiscreteInput &in, std::size_t i, cdouble n, double root_snr,
                             std::vector<double> &scratch)
        {
            const cdouble xi = in.points[i];
            const std::size_t m = in.points.size();
            double top = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j)
            {
                // log p_j - (|sqrt(snr)(x_i - x_j) + n|^2 - |n|^2)
                const cdouble d = root_snr * (xi - in.points[j]) + n;
                scratch[j] = (in.probs[j] > 0.0 ? std::log(in.probs[j]) : -std::numeric_limits<double>::infinity()) -
                             (std::norm(d) - std::norm(n));
                top = std::max(top, scratch[j]);
            }
            double denom = 0.0;
            cdouble mean{0.0, 0.0};
            for (std::size_t j = 0; j < m; ++j)
            {
                const double w = std::exp(scratch[j] - top);
                denom += w;
                mean += w * in.points[j];
            }
            mean /= denom;
            return {-(top + std::log(denom)), std::norm(xi - mean)};
        }
    }

    MiMmsePoint awgn_mi_mmse(const DiscreteInput &input, double snr, const MiMmseOptions &opts)
    {
        input.validate();
        if (!(snr >= 0.0))
            fail("SNR must be nonnegative");
        if (input.points.size() > opts.mc_threshold)
        {
            Rng rng(opts.mc_seed);
            return awgn_mi_mmse_monte_carlo(input, snr, opts.mc_samples, rng);
        }

        std::vector<double> t;
        std::vector<double> w;
        gauss_hermite(opts.gh_order, t, w);
        // n = a + jb with a, b ~ N(0, 1/2): density exp(-a^2 - b^2) / pi.
        const double root_snr = std::sqrt(snr);
        std::vector<double> scratch(input.points.size());
        double info = 0.0;
        double mmse = 0.0;
        for (std::size_t i = 0; i < input.points.size(); ++i)
        {
            if (input.probs[i] == 0.0)
                continue;
            double info_i = 0.0;
            double mmse_i = 0.0;
            for (std::size_t a = 0; a < t.size(); ++a)
                for (std::size_t b = 0; b < t.size(); ++b)
                {
                    const PairTerms pt = pair_terms(input, i, {t[a], t[b]}, root_snr, scratch);
                    const double wab = w[a] * w[b] / pi;
                    info_i += wab * pt.info;
                    mmse_i += wab * pt.sq_err;
                }
            info += input.probs[i] * info_i;
            mmse += input.probs[i] * mmse_i;
        }
        return {snr, std::max(0.0, info), std::clamp(mmse, 0.0, 1.0)};
    }

    MiMmsePoint awgn_mi_mmse_monte_carlo(const DiscreteInput &input, double snr, std::size_t samples, Rng &rng)
    {
        input.validate();
        if (samples == 0)
            fail("Monte-Carlo estimate needs samples");
        std::vector<double> cdf(input.probs.size());
        double acc = 0.0;
        for (std::size_t j = 0; j < cdf.size(); ++j)
            cdf[j] = (acc += input.probs[j]);

        const double root_snr = std::sqrt(snr);
        std::vector<double> scratch(input.points.size());
        double info = 0.0;
        double mmse = 0.0;
        for (std::size_t s = 0; s < samples; ++s)
        {
            const double u = rng.uniform() * acc;
            const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
                std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1));
            const PairTerms pt = pair_terms(input, i, rng.complex_normal(), root_snr, scratch);
            info += pt.info;
            mmse += pt.sq_err;
        }
        const double n = static_cast<double>(samples);
        return {snr, std::max(0.0, info / n), std::clamp(mmse / n, 0.0, 1.0)};
    }
}
