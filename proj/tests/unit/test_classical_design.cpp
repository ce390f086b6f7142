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
#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "isac/classical_design.hpp"

using namespace isac;
using namespace isac::design;
using Catch::Approx;

namespace
{
    double weighted(const CMatrix &H, const CMatrix &D, const CMatrix &X0, const CMatrix &X, double eta)
    {
        const auto t = tradeoff_terms(H, D, X0, X);
        return eta * t.mui + (1 - eta) * t.mismatch;
    }

    // Random X with (1/tau) X X^H = C.
    CMatrix random_feasible(const CMatrix &C, int tau, Rng &rng)
    {
        const int M = static_cast<int>(C.rows());
        const CMatrix G = testing::random_cmatrix(tau, M, rng);
        Eigen::HouseholderQR<CMatrix> qr(G);
        const CMatrix Q = qr.householderQ() * CMatrix::Identity(tau, M); // tau x M, orthonormal columns
        return std::sqrt(double(tau)) * hermitian_sqrt(C) * Q.adjoint();
    }
}

TEST_CASE("omnidirectional reference", "[classical_design]")
{
    const auto c = reference_covariance_omni(1.0, 4);
    CHECK((c.matrix - 0.25 * CMatrix::Identity(4, 4)).norm() < 1e-15);
    CHECK(c.matrix.trace().real() == Approx(1.0));
    const auto grid = metrics::angle_grid_deg(-90, 90, 2);
    for (double g : metrics::transmit_beampattern(c.matrix, grid, {4, 0.5}).gains)
        CHECK(g == Approx(1.0));
}

TEST_CASE("directional covariance", "[classical_design]")
{
    SECTION("single target, large array")
    {
        const std::vector<double> t{0.35};
        const auto c = directional_covariance(t, 1.0, 32);
        const auto grid = metrics::angle_grid_deg(-90, 90, 1);
        const auto bp = metrics::transmit_beampattern(c.matrix, grid, {32, 0.5});
        const auto best = std::max_element(bp.gains.begin(), bp.gains.end()) - bp.gains.begin();
        // Flat-topped mask: the peak may sit anywhere inside its width.
        CHECK(std::abs(grid[static_cast<std::size_t>(best)] - 0.35) <= 5 * pi / 180);
    }
    SECTION("three targets")
    {
        const std::vector<double> t{-pi / 3, 0.0, pi / 3};
        const auto c = directional_covariance(t, 1.0, 16);
        CHECK(c.matrix.trace().real() == Approx(1.0).epsilon(1e-9));
        Eigen::SelfAdjointEigenSolver<CMatrix> es(c.matrix);
        CHECK(es.eigenvalues().minCoeff() > -1e-10);
        const auto grid = metrics::angle_grid_deg(-90, 90, 0.1);
        const auto bp = metrics::transmit_beampattern(c.matrix, grid, {16, 0.5});
        const auto idx = metrics::local_maxima(bp.gains);
        REQUIRE(idx.size() >= 3);
        std::vector<double> peaks;
        for (int i = 0; i < 3; ++i)
            peaks.push_back(grid[idx[static_cast<std::size_t>(i)]] * 180 / pi);
        std::sort(peaks.begin(), peaks.end());
        CHECK(peaks[0] == Approx(-60).margin(2));
        CHECK(peaks[1] == Approx(0).margin(2));
        CHECK(peaks[2] == Approx(60).margin(2));
    }
    SECTION("M = 2 against a PSD grid search")
    {
        // C = [[a, c e^{j phi}], [c e^{-j phi}, 1 - a]] with c^2 <= a (1 - a).
        const std::vector<double> t{0.4};
        DirectionalOptions o;
        const auto c = directional_covariance(t, 1.0, 2, o);
        const double solver = directional_objective(c.matrix, t, 1.0, o);
        double best = std::numeric_limits<double>::infinity();
        CMatrix arg;
        auto eval = [&](double a, double r, double phi)
        {
            const double cmax = std::sqrt(std::max(0.0, a * (1 - a)));
            CMatrix C(2, 2);
            C << a, std::polar(r * cmax, phi), std::polar(r * cmax, -phi), 1 - a;
            const double f = directional_objective(C, t, 1.0, o);
            if (f < best)
            {
                best = f;
                arg = C;
            }
        };
        const int n = 60;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                for (int k = 0; k < 2 * n; ++k)
                    eval(double(i) / n, double(j) / n, pi * k / n);
        // Local refinement of the best grid point.
        double a = arg(0, 0).real(), phi = std::arg(arg(0, 1));
        double r = std::abs(arg(0, 1)) / std::max(1e-12, std::sqrt(a * (1 - a)));
        double step = 1.0 / n;
        for (int it = 0; it < 200; ++it, step *= 0.9)
            for (double da : {-step, 0.0, step})
                for (double dr : {-step, 0.0, step})
                    for (double dp : {-step, 0.0, step})
                    {
                        const double aa = std::clamp(a + da, 0.0, 1.0), rr = std::clamp(r + dr, 0.0, 1.0);
                        const double before = best;
                        eval(aa, rr, phi + dp);
                        if (best < before)
                        {
                            a = aa;
                            r = rr;
                            phi += dp;
                        }
                    }
        CHECK(solver <= best + 1e-6);
        CHECK(solver == Approx(best).margin(1e-6));
    }
}

TEST_CASE("Procrustes waveform", "[classical_design]")
{
    Rng rng(12);
    SECTION("zero channel keeps the covariance")
    {
        const auto c = reference_covariance_omni(1.0, 3);
        const auto w = procrustes_waveform(c, CMatrix::Zero(2, 3), testing::random_cmatrix(2, 4, rng), 4);
        CHECK((metrics::waveform_covariance(w.X) - c.matrix).norm() < 1e-12);
    }
    SECTION("beats random feasible points")
    {
        for (int inst = 0; inst < 3; ++inst)
        {
            const auto c = reference_covariance_omni(1.0, 2);
            const CMatrix H = testing::random_cmatrix(1, 2, rng), D = testing::random_cmatrix(1, 2, rng);
            const auto w = procrustes_waveform(c, H, D, 2);
            const double best = metrics::mui_power(H, w.X, D);
            int beaten = 0;
            for (int i = 0; i < 10000; ++i)
                beaten += metrics::mui_power(H, random_feasible(c.matrix, 2, rng), D) < best - 1e-12;
            CHECK(beaten == 0);
        }
    }
    SECTION("precondition tau >= M")
    {
        const auto c = reference_covariance_omni(1.0, 16);
        CHECK_THROWS(procrustes_waveform(c, testing::random_cmatrix(4, 16, rng), testing::random_cmatrix(4, 10, rng), 10));
    }
}

TEST_CASE("trade-off design", "[classical_design]")
{
    Rng rng(13);
    const int M = 3, K = 2, tau = 4;
    const double P = 1.5;
    const CMatrix H = testing::random_cmatrix(K, M, rng), D = testing::random_cmatrix(K, tau, rng);
    const CMatrix X0 = testing::random_cmatrix(M, tau, rng);

    SECTION("eta = 0 projects X0 onto the power sphere")
    {
        const auto w = tradeoff_design(H, D, X0, 0.0, P, tau);
        const CMatrix expect = X0 * std::sqrt(tau * P) / X0.norm();
        CHECK((w.X - expect).norm() < 1e-8);
    }
    SECTION("eta = 1 with an invertible channel reaches zero MUI")
    {
        const CMatrix Hs = testing::random_cmatrix(2, 2, rng);
        CMatrix Ds = testing::random_cmatrix(2, 3, rng);
        const double scale = std::sqrt(3 * P) / (Hs.inverse() * Ds).norm();
        Ds *= scale;
        const auto w = tradeoff_design(Hs, Ds, testing::random_cmatrix(2, 3, rng), 1.0, P, 3);
        CHECK((w.X - Hs.inverse() * Ds).norm() < 1e-6);
    }
    SECTION("scalar real instance matches the two feasible points")
    {
        CMatrix h(1, 1), d(1, 1), x0(1, 1);
        h << 0.7;
        d << -0.4;
        x0 << 0.9;
        for (double eta : {0.1, 0.5, 0.9})
        {
            const auto w = tradeoff_design(h, d, x0, eta, 2.0, 1);
            CMatrix plus(1, 1), minus(1, 1);
            plus << std::sqrt(2.0);
            minus << -std::sqrt(2.0);
            const double best = std::min(weighted(h, d, x0, plus, eta), weighted(h, d, x0, minus, eta));
            CHECK(weighted(h, d, x0, w.X, eta) == Approx(best).margin(1e-9));
        }
    }
    SECTION("power equality and Pareto sweep")
    {
        double prev_mui = std::numeric_limits<double>::infinity(), prev_mis = -1.0;
        for (int i = 0; i <= 10; ++i)
        {
            const double eta = i / 10.0;
            const auto w = tradeoff_design(H, D, X0, eta, P, tau);
            CHECK(w.X.squaredNorm() == Approx(tau * P).epsilon(1e-6));
            const auto t = tradeoff_terms(H, D, X0, w.X);
            CHECK(t.mui <= prev_mui + 1e-8);
            CHECK(t.mismatch >= prev_mis - 1e-8);
            prev_mui = t.mui;
            prev_mis = t.mismatch;
            for (double g : metrics::transmit_beampattern(metrics::waveform_covariance(w.X),
                                                          metrics::angle_grid_deg(-90, 90, 5), {M, 0.5})
                                .gains)
                CHECK(g >= 0.0);
        }
    }
    SECTION("never beaten by random points on the sphere")
    {
        const auto w = tradeoff_design(H, D, X0, 0.6, P, tau);
        const double f = weighted(H, D, X0, w.X, 0.6);
        for (int i = 0; i < 5000; ++i)
        {
            CMatrix X = testing::random_cmatrix(M, tau, rng);
            X *= std::sqrt(tau * P) / X.norm();
            CHECK(weighted(H, D, X0, X, 0.6) >= f - 1e-9);
        }
    }
}

TEST_CASE("epsilon-constraint design", "[classical_design]")
{
    Rng rng(14);
    const int M = 2, K = 2, tau = 2;
    const double P = 1.0;
    const CMatrix H = testing::random_cmatrix(K, M, rng), D = testing::random_cmatrix(K, tau, rng);
    const CMatrix X0 = testing::random_cmatrix(M, tau, rng);

    SECTION("inactive bound equals the communication optimum")
    {
        const auto e = epsilon_design(H, D, X0, std::numeric_limits<double>::infinity(), EpsilonMode::comm_priority, P, tau);
        const auto t = tradeoff_design(H, D, X0, 1.0, P, tau);
        CHECK(metrics::mui_power(H, e.X, D) == Approx(metrics::mui_power(H, t.X, D)).margin(1e-6));
    }
    SECTION("mid-range bound against an eta grid")
    {
        const auto lo = tradeoff_terms(H, D, X0, tradeoff_design(H, D, X0, 0.0, P, tau).X).mismatch;
        const auto hi = tradeoff_terms(H, D, X0, tradeoff_design(H, D, X0, 1.0, P, tau).X).mismatch;
        const double eps = 0.5 * (lo + hi);
        const auto e = epsilon_design(H, D, X0, eps, EpsilonMode::comm_priority, P, tau);
        const auto te = tradeoff_terms(H, D, X0, e.X);
        CHECK(te.mismatch == Approx(eps).margin(1e-4));
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 20000; ++i)
        {
            const auto t = tradeoff_terms(H, D, X0, tradeoff_design(H, D, X0, i / 20000.0, P, tau).X);
            if (t.mismatch <= eps)
                best = std::min(best, t.mui);
        }
        CHECK(te.mui <= best + 1e-9);
        CHECK(te.mui == Approx(best).margin(1e-3));
    }
    SECTION("minimal bound reproduces the single-objective optimum")
    {
        const auto t1 = tradeoff_design(H, D, X0, 1.0, P, tau);
        const double mui_min = metrics::mui_power(H, t1.X, D);
        const auto e = epsilon_design(H, D, X0, mui_min + 1e-12, EpsilonMode::sens_priority, P, tau);
        CHECK(metrics::mui_power(H, e.X, D) == Approx(mui_min).margin(1e-6));
    }
    SECTION("infeasible bound")
    {
        CHECK_THROWS(epsilon_design(H, D, X0, -1.0, EpsilonMode::sens_priority, P, tau));
    }
}

TEST_CASE("genie rate", "[classical_design]")
{
    CMatrix D(3, 4);
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 3; ++i)
            D(i, j) = std::polar(1.0, 0.3 * (i + j));
    const auto r = genie_rate(D, 1.0);
    CHECK(r.sum_rate == Approx(3.0));
    CHECK(genie_rate(D, 0.1).per_user_sinr(0) == Approx(10.0));

    Rng rng(15);
    const CMatrix H = testing::random_cmatrix(3, 5, rng);
    const CMatrix X = H.completeOrthogonalDecomposition().pseudoInverse() * D;
    const RVector s = metrics::per_user_sinr(H, X, D, 0.1);
    CHECK(s(1) == Approx(10.0).epsilon(1e-8));
}
