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
#include "isac/classical_design.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace isac::design
{
    void CovarianceTemplate::validate() const
    {
        if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
            fail("covariance template must be square and nonempty");
        if (!(power > 0.0))
            fail("covariance template power must be positive");
        if (std::abs(matrix.trace().real() - power) > 1e-8 * std::max(1.0, power))
            fail("covariance template trace does not equal its power");
    }

    const char *provenance_name(Provenance p)
    {
        switch (p)
        {
        case Provenance::omni:
            return "omni";
        case Provenance::directional:
            return "directional";
        case Provenance::tradeoff:
            return "tradeoff";
        case Provenance::epsilon_comm:
            return "epsilon_comm";
        case Provenance::epsilon_sens:
            return "epsilon_sens";
        case Provenance::learned:
            return "learned";
        case Provenance::genie:
            return "genie";
        }
        return "unknown";
    }

    CovarianceTemplate reference_covariance_omni(double total_power, int num_antennas)
    {
        if (!(total_power > 0.0) || num_antennas < 1)
            fail("omni template needs positive power and at least one antenna");
        return {CMatrix::Identity(num_antennas, num_antennas) * (total_power / num_antennas), total_power};
    }

    namespace
    {
        CMatrix grid_steering(const DirectionalOptions &opts, int num_antennas, std::vector<double> &grid)
        {
            grid = metrics::angle_grid_deg(opts.grid_lo_deg, opts.grid_hi_deg, opts.grid_step_deg);
            const channel::ArrayGeometry geom{num_antennas, 0.5};
            CMatrix V(static_cast<Eigen::Index>(grid.size()), num_antennas);
            for (std::size_t g = 0; g < grid.size(); ++g)
                V.row(static_cast<Eigen::Index>(g)) = channel::steering_vector(grid[g], geom).transpose();
            return V;
        }

        // Row g of V is v(theta_g)^T, so v^H C v = conj(V_g) C V_g^T.
        RVector grid_pattern(const CMatrix &V, const CMatrix &C)
        {
            const CMatrix VC = V.conjugate() * C;
            return VC.cwiseProduct(V).rowwise().sum().real();
        }

        // Euclidean projection onto {C Hermitian PSD, trace C = power}.
        CMatrix project_psd_trace(const CMatrix &C, double power)
        {
            const CMatrix herm = 0.5 * (C + C.adjoint());
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
            RVector w = eig.eigenvalues();
            RVector sorted = w;
            std::sort(sorted.data(), sorted.data() + sorted.size(), std::greater<>());
            double cumulative = 0.0;
            double theta = 0.0;
            for (Eigen::Index r = 0; r < sorted.size(); ++r)
            {
                cumulative += sorted(r);
                const double t = (cumulative - power) / static_cast<double>(r + 1);
                if (sorted(r) - t > 0.0)
                    theta = t;
            }
            w = (w.array() - theta).cwiseMax(0.0);
            return eig.eigenvectors() * w.asDiagonal() * eig.eigenvectors().adjoint();
        }
    }

    std::vector<double> directional_mask(std::span<const double> target_angles, double total_power, int num_antennas,
                                         const DirectionalOptions &opts)
    {
        if (target_angles.empty())
            fail("directional design needs at least one target");
        const auto grid = metrics::angle_grid_deg(opts.grid_lo_deg, opts.grid_hi_deg, opts.grid_step_deg);
        const double height = opts.mask_height.value_or(num_antennas * total_power / static_cast<double>(target_angles.size()));
        const double half = 0.5 * opts.mask_width_deg * pi / 180.0 + 1e-12;
        std::vector<double> mask(grid.size(), 0.0);
        for (std::size_t g = 0; g < grid.size(); ++g)
            for (double t : target_angles)
                if (std::abs(grid[g] - t) <= half)
                    mask[g] = height;
        return mask;
    }

    double directional_objective(const CMatrix &cov, std::span<const double> target_angles, double total_power,
                                 const DirectionalOptions &opts)
    {
        std::vector<double> grid;
        const CMatrix V = grid_steering(opts, static_cast<int>(cov.rows()), grid);
        const auto mask = directional_mask(target_angles, total_power, static_cast<int>(cov.rows()), opts);
        const RVector p = grid_pattern(V, cov);
        double obj = 0.0;
        for (std::size_t g = 0; g < mask.size(); ++g)
            obj += (mask[g] - p(static_cast<Eigen::Index>(g))) * (mask[g] - p(static_cast<Eigen::Index>(g)));
        return obj;
    }

    CovarianceTemplate directional_covariance(std::span<const double> target_angles, double total_power, int num_antennas,
                                              const DirectionalOptions &opts)
    {
        if (!(total_power > 0.0) || num_antennas < 1)
            fail("directional design needs positive power and at least one antenna");
        std::vector<double> grid;
        const CMatrix V = grid_steering(opts, num_antennas, grid);
        const auto mask_vec = directional_mask(target_angles, total_power, num_antennas, opts);
        const RVector mask = Eigen::Map<const RVector>(mask_vec.data(), static_cast<Eigen::Index>(mask_vec.size()));

        // Gradient of sum_g (mask_g - v_g^H C v_g)^2 is -2 sum_g r_g v_g v_g^H; each
        // v v^H has Frobenius norm M, which bounds the Lipschitz constant.
        const double lipschitz = 2.0 * static_cast<double>(grid.size()) * num_antennas * num_antennas;
        CMatrix C = CMatrix::Identity(num_antennas, num_antennas) * (total_power / num_antennas);
        CMatrix Y = C;
        double t = 1.0;
        double step_norm = 0.0;
        for (int it = 0; it < opts.max_iterations; ++it)
        {
            const RVector r = mask - grid_pattern(V, Y);
            // sum_g r_g v_g v_g^H with v_g = V_g^T
            const CMatrix G = -2.0 * V.transpose() * r.asDiagonal() * V.conjugate();
            const CMatrix next = project_psd_trace(Y - G / lipschitz, total_power);
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            step_norm = (next - C).norm();
            Y = next + ((t - 1.0) / t_next) * (next - C);
            C = next;
            t = t_next;
            if (step_norm <= opts.tolerance * total_power)
                return {0.5 * (C + C.adjoint()), total_power};
        }
        std::ostringstream msg;
        msg << "directional covariance did not converge after " << opts.max_iterations
            << " iterations (last step " << step_norm << ")";
        fail_numerical(msg.str());
    }

    CMatrix hermitian_sqrt(const CMatrix &A)
    {
        if (A.rows() != A.cols())
            fail("square root needs a square matrix");
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (A + A.adjoint()));
        const RVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
    }

    WaveformDesign procrustes_waveform(const CovarianceTemplate &cov, const CMatrix &H, const CMatrix &D, int frame_length,
                                       Provenance provenance)
    {
        cov.validate();
        const Eigen::Index M = cov.matrix.rows();
        if (frame_length < M)
            fail("frame length tau_d = " + std::to_string(frame_length) + " is shorter than the array size M = " +
                 std::to_string(M));
        if (H.cols() != M || H.rows() != D.rows() || D.cols() != frame_length)
            fail("dimension mismatch in Procrustes design");

        const CMatrix F = hermitian_sqrt(cov.matrix);
        const CMatrix A = F.adjoint() * H.adjoint() * D; // M x tau_d
        Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const CMatrix &V = svd.matrixV(); // tau_d x tau_d
        WaveformDesign out;
        out.X = std::sqrt(static_cast<double>(frame_length)) * F * svd.matrixU() * V.leftCols(M).adjoint();
        out.power = cov.power;
        out.provenance = provenance;
        return out;
    }

    TradeoffTerms tradeoff_terms(const CMatrix &H, const CMatrix &D, const CMatrix &X0, const CMatrix &X)
    {
        return {metrics::mui_power(H, X, D), (X - X0).squaredNorm()};
    }

    WaveformDesign tradeoff_design(const CMatrix &H, const CMatrix &D, const CMatrix &X0, double eta, double total_power,
                                   int frame_length)
    {
        if (!(eta >= 0.0 && eta <= 1.0))
            fail("trade-off weight must lie in [0, 1]");
        if (!(total_power > 0.0) || frame_length < 1)
            fail("trade-off design needs positive power and frame length");
        const Eigen::Index M = H.cols();
        if (H.rows() != D.rows() || D.cols() != frame_length || X0.rows() != M || X0.cols() != frame_length)
            fail("dimension mismatch in trade-off design");

        const CMatrix A = eta * (H.adjoint() * H) + (1.0 - eta) * CMatrix::Identity(M, M);
        const CMatrix B = eta * (H.adjoint() * D) + (1.0 - eta) * X0;
        const double c = static_cast<double>(frame_length) * total_power;

        Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (A + A.adjoint()));
        const RVector lam = eig.eigenvalues(); // ascending
        const CMatrix &U = eig.eigenvectors();
        const CMatrix Bt = U.adjoint() * B;
        const RVector beta = Bt.rowwise().squaredNorm();
        const double beta_total = beta.sum();
        const double lam_min = lam(0);
        const double lam_tol = 1e-10 * std::max(1.0, std::abs(lam(M - 1)));
        const double beta_tol = 1e-24 * (beta_total + 1.0);

        WaveformDesign out;
        out.power = total_power;
        out.provenance = Provenance::tradeoff;
        out.weight = eta;

        if (beta_total <= beta_tol)
        {
            out.X = CMatrix::Zero(M, frame_length);
            out.X.col(0) = std::sqrt(c) * U.col(0);
            out.warnings.push_back("degenerate linear term; returned a minimum-curvature feasible waveform");
            return out;
        }

        // Secular function in s = mu + lam_min > 0.
        auto secular = [&](double s, bool skip_bottom)
        {
            double f = 0.0;
            for (Eigen::Index i = 0; i < M; ++i)
            {
                const double gap = lam(i) - lam_min;
                if (skip_bottom && gap <= lam_tol)
                    continue;
                f += beta(i) / ((gap + s) * (gap + s));
            }
            return f;
        };

        bool bottom_excited = false;
        for (Eigen::Index i = 0; i < M; ++i)
            if (lam(i) - lam_min <= lam_tol && beta(i) > beta_tol)
                bottom_excited = true;

        RVector scale(M);
        if (!bottom_excited && secular(0.0, true) <= c)
        {
            // Hard case: mu = -lam_min, remaining norm carried by the bottom eigenspace.
            const double residual = c - secular(0.0, true);
            CMatrix Xt = CMatrix::Zero(M, frame_length);
            for (Eigen::Index i = 0; i < M; ++i)
                if (lam(i) - lam_min > lam_tol)
                    Xt.row(i) = Bt.row(i) / (lam(i) - lam_min);
            // Fill with the part of X0 that lives in the bottom eigenspace when there is one.
            CMatrix Z = CMatrix::Zero(M, frame_length);
            const CMatrix X0t = U.adjoint() * X0;
            for (Eigen::Index i = 0; i < M; ++i)
                if (lam(i) - lam_min <= lam_tol)
                    Z.row(i) = X0t.row(i);
            if (Z.squaredNorm() <= 1e-24)
                Z(0, 0) = 1.0;
            Xt += std::sqrt(residual) * Z / Z.norm();
            out.X = U * Xt;
            out.warnings.push_back("hard case: solution includes a component in the bottom eigenspace");
        }
        else
        {
            double lo = 0.0;
            double hi = std::sqrt(beta_total / c);
            if (secular(hi, false) > c * (1.0 + 1e-12))
                fail_numerical("secular equation bisection failed to bracket the multiplier");
            for (int it = 0; it < 300 && hi - lo > 1e-16 * std::max(1.0, hi); ++it)
            {
                const double mid = 0.5 * (lo + hi);
                if (secular(mid, false) > c)
                    lo = mid;
                else
                    hi = mid;
            }
            const double s = 0.5 * (lo + hi);
            for (Eigen::Index i = 0; i < M; ++i)
                scale(i) = 1.0 / (lam(i) - lam_min + s);
            out.X = U * (scale.asDiagonal() * Bt);
        }
        // Remove the residual bisection error from the power equality.
        out.X *= std::sqrt(c) / out.X.norm();
        return out;
    }

    WaveformDesign epsilon_design(const CMatrix &H, const CMatrix &D, const CMatrix &X0, double epsilon, EpsilonMode mode,
                                  double total_power, int frame_length)
    {
        if (!(epsilon > 0.0))
            fail("epsilon bound must be positive");
        const bool comm = mode == EpsilonMode::comm_priority;
        // comm_priority constrains ||X - X0||^2 (nondecreasing in eta);
        // sens_priority constrains the MUI (nonincreasing in eta).
        auto constrained = [&](const WaveformDesign &w)
        {
            const auto t = tradeoff_terms(H, D, X0, w.X);
            return comm ? t.mismatch : t.mui;
        };
        auto ok = [&](double value)
        { return value <= epsilon * (1.0 + 1e-12) + 1e-12; };

        WaveformDesign at0 = tradeoff_design(H, D, X0, 0.0, total_power, frame_length);
        WaveformDesign at1 = tradeoff_design(H, D, X0, 1.0, total_power, frame_length);
        const double v0 = constrained(at0);
        const double v1 = constrained(at1);

        WaveformDesign best;
        if (comm)
        {
            if (!ok(v0))
            {
                std::ostringstream msg;
                msg << "epsilon infeasible: minimal achievable ||X - X0||^2 is " << v0;
                fail(msg.str());
            }
            if (ok(v1))
                best = at1;
            else
            {
                double lo = 0.0, hi = 1.0;
                best = at0;
                for (int it = 0; it < 60; ++it)
                {
                    const double mid = 0.5 * (lo + hi);
                    WaveformDesign w = tradeoff_design(H, D, X0, mid, total_power, frame_length);
                    if (ok(constrained(w)))
                    {
                        lo = mid;
                        best = std::move(w);
                    }
                    else
                        hi = mid;
                }
            }
        }
        else
        {
            if (!ok(v1))
            {
                std::ostringstream msg;
                msg << "epsilon infeasible: minimal achievable MUI is " << v1;
                fail(msg.str());
            }
            if (ok(v0))
                best = at0;
            else
            {
                double lo = 0.0, hi = 1.0;
                best = at1;
                for (int it = 0; it < 60; ++it)
                {
                    const double mid = 0.5 * (lo + hi);
                    WaveformDesign w = tradeoff_design(H, D, X0, mid, total_power, frame_length);
                    if (ok(constrained(w)))
                    {
                        hi = mid;
                        best = std::move(w);
                    }
                    else
                        lo = mid;
                }
            }
        }
        best.provenance = comm ? Provenance::epsilon_comm : Provenance::epsilon_sens;
        best.slack = epsilon - constrained(best);
        return best;
    }

    metrics::RateReport genie_rate(const CMatrix &D, double noise_var)
    {
        if (!(noise_var > 0.0))
            fail("noise variance must be positive");
        if (D.cols() == 0)
            fail("symbol matrix has no columns");
        const RVector sinr = D.rowwise().squaredNorm() / (static_cast<double>(D.cols()) * noise_var);
        return metrics::rate_report(sinr);
    }
}
