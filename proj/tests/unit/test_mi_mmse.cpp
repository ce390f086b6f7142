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
#include "isac/mi_mmse.hpp"

using namespace isac;
using namespace isac::metrics;
using Catch::Approx;

TEST_CASE("Gaussian input closed form", "[mi_mmse]")
{
    const auto p = gaussian_mi_mmse(1.0);
    CHECK(p.mutual_info == Approx(std::log(2.0)));
    CHECK(p.mmse == Approx(0.5));
}

TEST_CASE("Gauss-Hermite rule integrates polynomials", "[mi_mmse]")
{
    std::vector<double> t, w;
    gauss_hermite(12, t, w);
    double m0 = 0, m2 = 0, m4 = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        m0 += w[i];
        m2 += w[i] * t[i] * t[i];
        m4 += w[i] * std::pow(t[i], 4);
    }
    CHECK(m0 == Approx(std::sqrt(pi)));
    CHECK(m2 == Approx(std::sqrt(pi) / 2));
    CHECK(m4 == Approx(3 * std::sqrt(pi) / 4));
}

TEST_CASE("discrete inputs: limits and Monte-Carlo oracle", "[mi_mmse]")
{
    const auto hi = awgn_mi_mmse(DiscreteInput::bpsk(), 1e4);
    CHECK(hi.mutual_info == Approx(std::log(2.0)).margin(1e-9));
    CHECK(hi.mmse < 1e-9);

    const auto q = awgn_mi_mmse(DiscreteInput::qpsk(), 1.0);
    // Independent Monte-Carlo oracle written against the definitions.
    Rng rng(21);
    const auto in = DiscreteInput::qpsk();
    const int n = 1000000;
    double info = 0.0, err = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const cdouble x = in.points[rng.integer(4)];
        const cdouble y = x + rng.complex_normal(1.0);
        double den = 0.0;
        cdouble num = 0.0;
        for (const auto &s : in.points)
        {
            const double l = std::exp(-std::norm(y - s));
            den += 0.25 * l;
            num += 0.25 * l * s;
        }
        info += std::log(std::exp(-std::norm(y - x)) / den);
        err += std::norm(x - num / den);
    }
    CHECK(q.mutual_info == Approx(info / n).margin(1e-3));
    CHECK(q.mmse == Approx(err / n).margin(1e-3));
}

TEST_CASE("I-MMSE identity for complex AWGN", "[mi_mmse]")
{
    for (double snr : {0.3, 1.0, 4.0})
    {
        const double h = 1e-4;
        const auto in = DiscreteInput::qpsk();
        MiMmseOptions opts;
        opts.gh_order = 60;
        const double d = (awgn_mi_mmse(in, snr * (1 + h), opts).mutual_info -
                          awgn_mi_mmse(in, snr * (1 - h), opts).mutual_info) /
                         (2 * h * snr);
        CHECK(d == Approx(awgn_mi_mmse(in, snr, opts).mmse).margin(1e-4));
    }
}

TEST_CASE("input validation", "[mi_mmse]")
{
    auto bad = DiscreteInput::uniform("bad", {cdouble(2, 0), cdouble(-2, 0)});
    CHECK_THROWS(bad.validate());
    CHECK_NOTHROW(DiscreteInput::bpsk().validate());
}
