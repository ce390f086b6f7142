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

#include "isac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace isac::metrics
{
    namespace
    {
        void require_product_shape(const CMatrix &H, const CMatrix &X, const CMatrix &D)
        {
            if (H.cols() != X.rows() || H.rows() != D.rows() || X.cols() != D.cols())
                fail("dimension mismatch: H is " + std::to_string(H.rows()) + "x" + std::to_string(H.cols()) +
                     ", X is " + std::to_string(X.rows()) + "x" + std::to_string(X.cols()) + ", D is " +
                     std::to_string(D.rows()) + "x" + std::to_string(D.cols()));
        }
    }

    double mui_power(const CMatrix &H, const CMatrix &X, const CMatrix &D)
    {
        require_product_shape(H, X, D);
        return (H * X - D).squaredNorm();
    }

    RVector per_user_sinr(const CMatrix &H, const CMatrix &X, const CMatrix &D, double noise_var)
    {
        if (!(noise_var > 0.0))
            fail("noise variance must be positive");
        require_product_shape(H, X, D);
        const CMatrix residual = H * X - D;
        const double frame = static_cast<double>(D.cols());
        RVector sinr(D.rows());
        for (Eigen::Index k = 0; k < D.rows(); ++k)
        {
            const double signal = D.row(k).squaredNorm() / frame;
            const double interference = residual.row(k).squaredNorm() / frame;
            sinr(k) = signal / (interference + noise_var);
        }
        return sinr;
    }

    double sum_rate(std::span<const double> sinrs)
    {
        double r = 0.0;
        for (double g : sinrs)
        {
            if (g < 0.0)
                fail("SINR must be nonnegative");
            r += std::log2(1.0 + g);
        }
        return r;
    }

    RateReport rate_report(const RVector &sinrs)
    {
        RateReport out;
        out.per_user_sinr = sinrs;
        out.sum_rate = sum_rate(std::span<const double>(sinrs.data(), static_cast<std::size_t>(sinrs.size())));
        return out;
    }

    HybridRate hybrid_sum_rate(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var)
    {
        if (!(noise_var > 0.0))
            fail("noise variance must be positive");
        if (channels.rows() != F.rows() || F.cols() != W.rows() || W.cols() != channels.cols())
            fail("dimension mismatch in hybrid beamformer");
        // G(k, j) = h_k^H F w_j
        const CMatrix G = channels.adjoint() * F * W;
        double nats = 0.0;
        for (Eigen::Index k = 0; k < G.rows(); ++k)
        {
            const double total = G.row(k).squaredNorm();
            const double desired = std::norm(G(k, k));
            nats += std::log1p(desired / (total - desired + noise_var));
        }
        return {nats, nats / std::numbers::ln2};
    }

    CMatrix waveform_covariance(const CMatrix &X)
    {
        if (X.cols() == 0)
            fail("waveform has no columns");
        CMatrix cov = X * X.adjoint() / static_cast<double>(X.cols());
        return 0.5 * (cov + cov.adjoint());
    }

    BeampatternCurve transmit_beampattern(const CMatrix &cov, std::span<const double> angles,
                                          const channel::ArrayGeometry &geom)
    {
        if (cov.rows() != geom.num_antennas || cov.cols() != geom.num_antennas)
            fail("covariance size does not match the array");
        const CMatrix herm = 0.5 * (cov + cov.adjoint());
        BeampatternCurve out;
        out.angles.assign(angles.begin(), angles.end());
        out.gains.reserve(angles.size());
        for (double theta : angles)
        {
            const CVector v = channel::steering_vector(theta, geom);
            out.gains.push_back(v.dot(herm * v).real());
        }
        return out;
    }

    std::vector<double> angle_grid_deg(double lo_deg, double hi_deg, double step_deg)
    {
        if (!(step_deg > 0.0) || hi_deg < lo_deg)
            fail("invalid angle grid");
        const auto n = static_cast<std::size_t>(std::floor((hi_deg - lo_deg) / step_deg + 1e-9)) + 1;
        std::vector<double> grid(n);
        for (std::size_t i = 0; i < n; ++i)
            grid[i] = (lo_deg + step_deg * static_cast<double>(i)) * pi / 180.0;
        return grid;
    }

    std::vector<std::size_t> local_maxima(std::span<const double> values)
    {
        std::vector<std::size_t> peaks;
        for (std::size_t i = 1; i + 1 < values.size(); ++i)
            if (values[i] > values[i - 1] && values[i] >= values[i + 1])
                peaks.push_back(i);
        std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b)
                         { return values[a] > values[b]; });
        return peaks;
    }

    double glrt_statistic(const CMatrix &echo, double target_angle, const CMatrix &X, double noise_var,
                          const channel::ArrayGeometry &geom)
    {
        if (!(noise_var > 0.0))
            fail("noise variance must be positive");
        if (echo.rows() != geom.num_antennas || X.rows() != geom.num_antennas || echo.cols() != X.cols())
            fail("echo and waveform dimensions disagree");
        const CVector v = channel::steering_vector(target_angle, geom);
        const Eigen::RowVectorXcd s = v.transpose() * X; // probing sequence toward the target
        const double s_energy = s.squaredNorm();
        if (!(s_energy > 0.0))
            fail("waveform has no energy toward target");
        const cdouble matched = (v.adjoint() * echo * s.adjoint())(0, 0);
        return std::norm(matched) / (noise_var * v.squaredNorm() * s_energy);
    }

    CMatrix simulate_echo(const CMatrix &X, double target_angle, cdouble amplitude, double noise_var, bool target_present,
                          const channel::ArrayGeometry &geom, Rng &rng)
    {
        CMatrix Z(X.rows(), X.cols());
        for (Eigen::Index j = 0; j < Z.cols(); ++j)
            for (Eigen::Index i = 0; i < Z.rows(); ++i)
                Z(i, j) = rng.complex_normal(noise_var);
        if (target_present)
        {
            const CVector v = channel::steering_vector(target_angle, geom);
            const Eigen::RowVectorXcd s = v.transpose() * X;
            Z.noalias() += amplitude * (v * s);
        }
        return Z;
    }

    RocCurve roc_curve(std::span<const double> stats_h0, std::span<const double> stats_h1, int num_thresholds)
    {
        if (stats_h0.empty() || stats_h1.empty())
            fail("ROC needs samples under both hypotheses");
        if (num_thresholds < 2)
            fail("ROC needs at least two thresholds");

        std::vector<double> h0(stats_h0.begin(), stats_h0.end());
        std::vector<double> h1(stats_h1.begin(), stats_h1.end());
        std::sort(h0.begin(), h0.end());
        std::sort(h1.begin(), h1.end());
        const double lo = std::min(h0.front(), h1.front());
        const double hi = std::max(h0.back(), h1.back());

        auto exceed = [](const std::vector<double> &sorted, double t)
        {
            const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
            return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
        };

        RocCurve roc;
        roc.thresholds.push_back(-std::numeric_limits<double>::infinity());
        roc.pfa.push_back(1.0);
        roc.pd.push_back(1.0);
        for (int i = 0; i < num_thresholds - 1; ++i)
        {
            const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(num_thresholds - 2);
            roc.thresholds.push_back(t);
            roc.pfa.push_back(exceed(h0, t));
            roc.pd.push_back(exceed(h1, t));
        }
        return roc;
    }

    double pd_at_pfa(std::span<const double> stats_h0, std::span<const double> stats_h1, double pfa)
    {
        if (stats_h0.empty() || stats_h1.empty())
            fail("detection probability needs samples under both hypotheses");
        if (!(pfa > 0.0 && pfa < 1.0))
            fail("false-alarm level must lie in (0, 1)");
        std::vector<double> h0(stats_h0.begin(), stats_h0.end());
        const auto rank = static_cast<std::size_t>(std::floor((1.0 - pfa) * static_cast<double>(h0.size())));
        std::nth_element(h0.begin(), h0.begin() + static_cast<std::ptrdiff_t>(std::min(rank, h0.size() - 1)), h0.end());
        const double threshold = h0[std::min(rank, h0.size() - 1)];
        const auto hits = std::count_if(stats_h1.begin(), stats_h1.end(), [&](double s)
                                        { return s > threshold; });
        return static_cast<double>(hits) / static_cast<double>(stats_h1.size());
    }

    double interpolate_pd(const RocCurve &roc, double pfa)
    {
        // pfa is nonincreasing along the curve; walk until we bracket the level.
        for (std::size_t i = 1; i < roc.pfa.size(); ++i)
        {
            const double a = roc.pfa[i - 1];
            const double b = roc.pfa[i];
            if (a >= pfa && b <= pfa)
            {
                if (a == b)
                    return std::max(roc.pd[i - 1], roc.pd[i]);
                const double w = (a - pfa) / (a - b);
                return roc.pd[i - 1] + w * (roc.pd[i] - roc.pd[i - 1]);
            }
        }
        return roc.pd.back();
    }

    double mcrb_phase(double es_over_n0, int num_samples)
    {
        if (!(es_over_n0 > 0.0) || num_samples < 1)
            fail("MCRB needs positive Es/N0 and at least one sample");
        return 1.0 / (2.0 * es_over_n0) / static_cast<double>(num_samples);
    }

    double mcrb_freq(double es_over_n0, int num_samples)
    {
        if (!(es_over_n0 > 0.0))
            fail("MCRB needs positive Es/N0");
        if (num_samples < 2)
            fail("frequency MCRB needs at least two samples");
        const double L = static_cast<double>(num_samples);
        return 1.0 / (2.0 * es_over_n0) * 3.0 / (pi * pi * L * (L * L - 1.0));
    }

    RadarResolution radar_resolutions(double bandwidth_hz, double wavelength_m, int pulses, double pri_s,
                                      double aperture_m)
    {
        if (!(bandwidth_hz > 0.0) || !(wavelength_m > 0.0) || pulses < 1 || !(pri_s > 0.0) || !(aperture_m > 0.0))
            fail("radar resolution inputs must be positive");
        return {speed_of_light / (2.0 * bandwidth_hz),
                wavelength_m / (2.0 * pulses * pri_s),
                0.886 * wavelength_m / aperture_m};
    }

    EstimationRateBounds estimation_rate_bounds(double prior_var, double distortion)
    {
        if (!(prior_var > 0.0) || !(distortion > 0.0))
            fail("prior variance and distortion must be positive");
        EstimationRateBounds out;
        out.mi_lower_bound = 0.5 * std::log2(prior_var / distortion);
        if (out.mi_lower_bound < 0.0)
        {
            out.mi_lower_bound = 0.0;
            out.clamped = true;
        }
        out.rate_from_distortion = -std::log2(distortion);
        return out;
    }

    double ser(std::span<const int> true_labels, std::span<const int> decisions)
    {
        if (true_labels.size() != decisions.size() || true_labels.empty())
            fail("label sequences must be nonempty and of equal length");
        std::size_t errors = 0;
        for (std::size_t i = 0; i < true_labels.size(); ++i)
            errors += true_labels[i] != decisions[i];
        return static_cast<double>(errors) / static_cast<double>(true_labels.size());
    }

    double ber(std::span<const std::uint8_t> true_bits, std::span<const std::uint8_t> decided_bits)
    {
        if (true_bits.size() != decided_bits.size() || true_bits.empty())
            fail("bit sequences must be nonempty and of equal length");
        std::size_t errors = 0;
        for (std::size_t i = 0; i < true_bits.size(); ++i)
            errors += (true_bits[i] != 0) != (decided_bits[i] != 0);
        return static_cast<double>(errors) / static_cast<double>(true_bits.size());
    }

    double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }
}
