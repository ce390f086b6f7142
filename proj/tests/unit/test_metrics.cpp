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

#include <algorithm>

#include "helpers.hpp"
#include "isac/metrics.hpp"

using namespace isac;
using namespace isac::metrics;
using Catch::Approx;

TEST_CASE("MUI power", "[metrics]")
{
    Rng rng(1);
    const CMatrix H = testing::random_cmatrix(2, 4, rng);
    const CMatrix D = testing::random_cmatrix(2, 3, rng);
    const CMatrix X = H.completeOrthogonalDecomposition().pseudoInverse() * D;
    CHECK(mui_power(H, X, D) < 1e-9);

    const CMatrix I = CMatrix::Identity(3, 3);
    CMatrix Du(3, 5);
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 3; ++i)
            Du(i, j) = std::polar(1.0, rng.uniform(-pi, pi));
    CHECK(mui_power(I, CMatrix::Zero(3, 5), Du) == Approx(15.0));

    const CMatrix H3 = testing::random_cmatrix(3, 5, rng), X3 = testing::random_cmatrix(5, 4, rng),
                  D3 = testing::random_cmatrix(3, 4, rng);
    double naive = 0.0;
    for (int k = 0; k < 3; ++k)
        for (int q = 0; q < 4; ++q)
        {
            cdouble s = 0.0;
            for (int m = 0; m < 5; ++m)
                s += H3(k, m) * X3(m, q);
            naive += std::norm(s - D3(k, q));
        }
    CHECK(mui_power(H3, X3, D3) == Approx(naive).epsilon(1e-12));
}

TEST_CASE("per-user SINR", "[metrics]")
{
    Rng rng(2);
    CMatrix D(2, 6);
    for (int j = 0; j < 6; ++j)
        for (int i = 0; i < 2; ++i)
            D(i, j) = std::polar(1.0, rng.uniform(-pi, pi));
    const CMatrix H = testing::random_cmatrix(2, 4, rng);
    const CMatrix X = H.completeOrthogonalDecomposition().pseudoInverse() * D;
    const RVector s = per_user_sinr(H, X, D, 0.5);
    CHECK(s(0) == Approx(2.0).epsilon(1e-9));
    CHECK(s(1) == Approx(2.0).epsilon(1e-9));

    const RVector z = per_user_sinr(H, CMatrix::Zero(4, 6), D, 0.5);
    CHECK(z(0) == Approx(1.0 / 1.5));

    const CMatrix Xr = testing::random_cmatrix(4, 6, rng);
    const RVector sr = per_user_sinr(H, Xr, D, 0.3);
    for (int k = 0; k < 2; ++k)
    {
        double sig = 0.0, err = 0.0;
        for (int q = 0; q < 6; ++q)
        {
            cdouble y = 0.0;
            for (int m = 0; m < 4; ++m)
                y += H(k, m) * Xr(m, q);
            sig += std::norm(D(k, q));
            err += std::norm(y - D(k, q));
        }
        CHECK(sr(k) == Approx((sig / 6) / (err / 6 + 0.3)).epsilon(1e-12));
    }
}

TEST_CASE("sum rate", "[metrics]")
{
    CHECK(sum_rate(std::vector<double>{1, 1, 1, 1}) == Approx(4.0));
    CHECK(sum_rate(std::vector<double>{0}) == 0.0);
    CHECK(sum_rate(std::vector<double>{3, 15}) == Approx(6.0));
}

TEST_CASE("hybrid sum rate", "[metrics]")
{
    Rng rng(3);
    const CMatrix h = testing::random_cmatrix(4, 1, rng), F = testing::random_cmatrix(4, 2, rng),
                  w = testing::random_cmatrix(2, 1, rng);
    const cdouble g = (h.adjoint() * F * w)(0, 0);
    CHECK(hybrid_sum_rate(h, F, w, 0.7).nats == Approx(std::log(1 + std::norm(g) / 0.7)));

    const CMatrix I = CMatrix::Identity(3, 3);
    CHECK(hybrid_sum_rate(I, I, I, 1.0).nats == Approx(3 * std::log(2.0)));

    const CMatrix Hs = testing::random_cmatrix(4, 2, rng), Fs = testing::random_cmatrix(4, 2, rng),
                  Ws = testing::random_cmatrix(2, 2, rng);
    double oracle = 0.0;
    for (int k = 0; k < 2; ++k)
    {
        double sig = 0.0, intf = 0.0;
        for (int j = 0; j < 2; ++j)
        {
            cdouble acc = 0.0;
            for (int n = 0; n < 4; ++n)
                for (int l = 0; l < 2; ++l)
                    acc += std::conj(Hs(n, k)) * Fs(n, l) * Ws(l, j);
            (j == k ? sig : intf) += std::norm(acc);
        }
        oracle += std::log(1 + sig / (intf + 0.4));
    }
    const auto r = hybrid_sum_rate(Hs, Fs, Ws, 0.4);
    CHECK(r.nats == Approx(oracle).epsilon(1e-12));
    CHECK(r.bits == Approx(oracle / std::log(2.0)));
}

TEST_CASE("waveform covariance and beampattern", "[metrics]")
{
    Rng rng(4);
    const int M = 4;
    // Rows of a scaled unitary DFT matrix are orthogonal.
    CMatrix U(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j)
            U(i, j) = std::polar(1.0, 2 * pi * i * j / M);
    const double P = 2.0;
    const CMatrix X = std::sqrt(P / M) * U;
    CHECK((waveform_covariance(X) - (P / M) * CMatrix::Identity(M, M)).norm() < 1e-12);

    const CMatrix x = testing::random_cmatrix(M, 1, rng);
    const CMatrix c1 = waveform_covariance(x);
    CHECK((c1 - x * x.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(c1);
    CHECK(es.eigenvalues()(M - 2) < 1e-10);

    const CMatrix Xr = testing::random_cmatrix(M, 5, rng);
    const CMatrix cr = waveform_covariance(Xr);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b)
        {
            cdouble s = 0.0;
            for (int q = 0; q < 5; ++q)
                s += Xr(a, q) * std::conj(Xr(b, q));
            CHECK(std::abs(cr(a, b) - s / 5.0) < 1e-12);
        }

    const channel::ArrayGeometry g{M, 0.5};
    const auto grid = angle_grid_deg(-90, 90, 1);
    const auto flat = transmit_beampattern((P / M) * CMatrix::Identity(M, M), grid, g);
    for (double v : flat.gains)
        CHECK(v == Approx(P));
    const CVector v0 = channel::steering_vector(0.3, g);
    const std::vector<double> at{0.3};
    CHECK(transmit_beampattern(v0 * v0.adjoint(), at, g).gains[0] == Approx(double(M * M)));
    const std::vector<double> ang{-0.7, 0.1, 1.2};
    const auto bp = transmit_beampattern(cr, ang, g);
    for (std::size_t i = 0; i < ang.size(); ++i)
    {
        const CVector v = channel::steering_vector(ang[i], g);
        CHECK(bp.gains[i] == Approx((v.adjoint() * cr * v)(0, 0).real()).epsilon(1e-12));
    }
}

TEST_CASE("local maxima ordering", "[metrics]")
{
    const std::vector<double> y{0, 1, 0, 3, 0, 2, 0};
    const auto idx = local_maxima(y);
    REQUIRE(idx.size() == 3);
    CHECK(idx[0] == 3);
    CHECK(idx[1] == 5);
    CHECK(idx[2] == 1);
}

TEST_CASE("GLRT statistic", "[metrics]")
{
    Rng rng(5);
    const channel::ArrayGeometry g{4, 0.5};
    const CMatrix X = testing::random_cmatrix(4, 8, rng, 0.25);
    CHECK(glrt_statistic(CMatrix::Zero(4, 8), 0.2, X, 1.0, g) == 0.0);

    // Noise-free echo: statistic scales as 1 / sigma^2.
    Rng r1(6);
    const CMatrix z = simulate_echo(X, 0.2, {1.0, 0.5}, 0.0, true, g, r1);
    const double t1 = glrt_statistic(z, 0.2, X, 1e-2, g);
    const double t2 = glrt_statistic(z, 0.2, X, 1e-4, g);
    CHECK(t2 / t1 == Approx(100.0).epsilon(1e-9));

    const int n = 100000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += glrt_statistic(simulate_echo(X, 0.2, 1.0, 2.0, false, g, rng), 0.2, X, 2.0, g);
    CHECK(acc / n > 0.95);
    CHECK(acc / n < 1.05);
}

TEST_CASE("ROC curve", "[metrics]")
{
    Rng rng(7);
    std::vector<double> a(20000), b(20000);
    for (auto &x : a)
        x = rng.normal();
    for (auto &x : b)
        x = 3.0 + rng.normal();
    const auto roc = roc_curve(a, b, 400);
    CHECK(roc.pfa.front() == 1.0);
    CHECK(roc.pd.front() == 1.0);
    CHECK(std::is_sorted(roc.thresholds.begin(), roc.thresholds.end()));
    // pd at pfa 0.1 for unit Gaussians 3 apart: Q(Q^-1(0.1) - 3)
    const double z = 1.2815515655446004;
    CHECK(interpolate_pd(roc, 0.1) == Approx(qfunc(z - 3.0)).margin(0.02));
    CHECK(pd_at_pfa(a, b, 0.1) == Approx(qfunc(z - 3.0)).margin(0.02));

    const auto chance = roc_curve(a, a, 50);
    for (std::size_t i = 0; i < chance.pd.size(); ++i)
        CHECK(chance.pd[i] == Approx(chance.pfa[i]).margin(1e-12));
}

TEST_CASE("MCRB and resolution arithmetic", "[metrics]")
{
    CHECK(mcrb_phase(0.5, 1) == Approx(1.0));
    CHECK(mcrb_phase(10.0, 10) == Approx(0.005));
    CHECK(mcrb_freq(1.0, 2) == Approx(3.0 / (pi * pi * 2 * 3 * 2)));

    CHECK(radar_resolutions(speed_of_light / 2, 0.1, 10, 1e-3, 1.0).range_m == Approx(1.0));
    CHECK(radar_resolutions(1e6, 0.1, 10, 1e-3, 1.0).velocity_mps == Approx(5.0));
    CHECK(radar_resolutions(1e6, 0.0937, 10, 1e-3, 1.0).angle_rad == Approx(0.0830).margin(1e-4));

    auto b = estimation_rate_bounds(1.0, 0.25);
    CHECK(b.mi_lower_bound == Approx(1.0));
    CHECK(b.rate_from_distortion == Approx(2.0));
    b = estimation_rate_bounds(0.3, 0.3);
    CHECK(b.mi_lower_bound == Approx(0.0).margin(1e-15));
    CHECK(b.rate_from_distortion == Approx(-std::log2(0.3)));
    b = estimation_rate_bounds(4.0, 1.0);
    CHECK(b.mi_lower_bound == Approx(1.0));
    CHECK(b.rate_from_distortion == Approx(0.0).margin(1e-15));
    CHECK(estimation_rate_bounds(1.0, 2.0).clamped);
}

TEST_CASE("SER and BER", "[metrics]")
{
    const std::vector<int> l{0, 1, 2, 3};
    CHECK(ser(l, l) == 0.0);
    const std::vector<std::uint8_t> b0{0, 1, 1, 0}, b1{1, 0, 0, 1};
    CHECK(ber(b0, b0) == 0.0);
    CHECK(ber(b0, b1) == 1.0);

    // QPSK at Es/N0 = 10 dB with nearest-point decisions.
    Rng rng(9);
    const double es_n0 = 10.0;
    const double a = std::sqrt(0.5);
    const int n = 200000;
    std::vector<int> truth(n), dec(n);
    for (int i = 0; i < n; ++i)
    {
        truth[i] = static_cast<int>(rng.integer(4));
        const cdouble x{truth[i] & 1 ? a : -a, truth[i] & 2 ? a : -a};
        const cdouble y = x + rng.complex_normal(1.0 / es_n0);
        dec[i] = (y.real() > 0 ? 1 : 0) | (y.imag() > 0 ? 2 : 0);
    }
    const double q = qfunc(std::sqrt(es_n0));
    const double p = 2 * q - q * q;
    CHECK(ser(truth, dec) == Approx(p).margin(3 * std::sqrt(p * (1 - p) / n)));
}
