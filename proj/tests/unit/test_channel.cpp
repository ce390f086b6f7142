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
#include "isac/channel.hpp"

using namespace isac;
using namespace isac::channel;
using Catch::Approx;

TEST_CASE("steering vector closed forms", "[channel]")
{
    const auto v0 = steering_vector(0.0, {4, 0.5});
    for (int m = 0; m < 4; ++m)
        CHECK(std::abs(v0(m) - cdouble(1, 0)) < 1e-15);
    const auto v90 = steering_vector(pi / 2, {4, 0.5});
    for (int m = 0; m < 4; ++m)
        CHECK(std::abs(v90(m) - cdouble(m % 2 ? -1.0 : 1.0, 0)) < 1e-12);
    const auto v30 = steering_vector(pi / 6, {8, 0.5});
    for (int m = 0; m < 8; ++m)
    {
        const double ph = pi * m * std::sin(pi / 6);
        CHECK(std::abs(v30(m) - cdouble(std::cos(ph), std::sin(ph))) < 1e-12);
    }
}

TEST_CASE("Rician channel limits and moments", "[channel]")
{
    const ArrayGeometry g{4, 0.5};
    Rng rng(11);
    SECTION("LoS dominated")
    {
        const auto h = sample_user_channel({1e12, 1.0, 0.3}, g, rng);
        CHECK((h - steering_vector(0.3, g)).norm() < 1e-5);
    }
    const int n = 100000;
    SECTION("pure scatter second moment")
    {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += std::norm(sample_user_channel({0.0, 4.0, 0.0}, g, rng)(1));
        // |h|^2 ~ Exp(4): sd 4 / sqrt(n)
        CHECK(std::abs(acc / n - 4.0) < 3 * 4.0 / std::sqrt(double(n)));
    }
    SECTION("mean is the scaled LoS part")
    {
        const double theta = 0.4;
        cdouble acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += sample_user_channel({1.0, 1.0, theta}, g, rng)(2);
        const cdouble expect = std::sqrt(0.5) * steering_vector(theta, g)(2);
        const double sd = std::sqrt(0.5 / n);
        CHECK(std::abs(acc / double(n) - expect) < 3 * sd * std::sqrt(2.0));
    }
}

TEST_CASE("channel matrix composition and determinism", "[channel]")
{
    const ArrayGeometry g{16, 0.5};
    std::vector<RicianParams> one{{2.0, 1.0, 0.1}};
    Rng a(5), b(5);
    const auto m = sample_channel_matrix(one, g, a);
    const auto h = sample_user_channel(one[0], g, b);
    REQUIRE(m.entries.rows() == 1);
    CHECK((m.entries.row(0).transpose() - h).norm() == 0.0);

    std::vector<RicianParams> four(4, RicianParams{1.0, 1.0, 0.0});
    Rng c(9), d(9);
    const auto m1 = sample_channel_matrix(four, g, c);
    const auto m2 = sample_channel_matrix(four, g, d);
    CHECK(m1.entries.rows() == 4);
    CHECK(m1.entries.cols() == 16);
    CHECK((m1.entries - m2.entries).norm() == 0.0);
}

TEST_CASE("Rayleigh vectors", "[channel]")
{
    Rng a(3), b(3);
    CHECK(sample_rayleigh(16, a).size() == 16);
    Rng c(4), d(4);
    CHECK((sample_rayleigh(16, c) - sample_rayleigh(16, d)).norm() == 0.0);
    cdouble acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        acc += sample_rayleigh(1, a)(0);
    CHECK(std::abs(acc / double(n)) < 3 * std::sqrt(2.0 / n));
}

TEST_CASE("Bessel J0 and Jakes correlation", "[channel]")
{
    AgingParams a;
    a.user_speed = 0.0;
    CHECK(jakes_correlation(a) == Approx(1.0).margin(1e-15));

    // Speed that puts the argument at the first zero of J0.
    const double zero = 2.404825557695773;
    a.user_speed = zero * speed_of_light / (2 * pi * a.carrier_freq * a.sample_period);
    CHECK(std::abs(jakes_correlation(a)) < 1e-4);

    a.user_speed = 2.0;
    a.carrier_freq = 3.2e9;
    a.sample_period = 1e-4;
    const double arg = 2 * pi * a.user_speed * a.carrier_freq / speed_of_light * a.sample_period;
    REQUIRE(arg < 0.1);
    CHECK(jakes_correlation(a) == Approx(1 - arg * arg / 4).margin(1e-6));

    // Large argument branch against a tabulated value.
    CHECK(bessel_j0(10.0) == Approx(-0.2459357644513483).margin(1e-7));
    CHECK(bessel_j0(5.0) == Approx(-0.1775967713143383).margin(1e-9));
}

TEST_CASE("channel aging", "[channel]")
{
    const ArrayGeometry g{4, 0.5};
    const RicianParams p{2.0, 1.0, 0.2};
    Rng rng(8);
    const CVector prev = sample_user_channel(p, g, rng);
    CHECK((age_channel_with(prev, p, 1.0, 0.0, rng, g) - prev).norm() == 0.0);

    AgingParams fixed;
    fixed.mobility_phase = 0.0;
    fixed.user_speed = 0.0;
    CHECK((age_channel(prev, p, fixed, rng, g) - prev).norm() < 1e-15);

    // chi = 0: the scattered part decorrelates from the previous one.
    const int n = 100000;
    const RicianParams scatter{0.0, 1.0, 0.0};
    cdouble cross = 0.0;
    double pa = 0.0, pb = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const CVector a = sample_user_channel(scatter, g, rng);
        const CVector b = age_channel_with(a, scatter, 0.0, 0.0, rng, g);
        cross += a(0) * std::conj(b(0));
        pa += std::norm(a(0));
        pb += std::norm(b(0));
    }
    CHECK(std::abs(cross) / std::sqrt(pa * pb) < 0.02);
}
