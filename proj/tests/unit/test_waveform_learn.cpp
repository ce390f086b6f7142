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

#include <filesystem>

#include "helpers.hpp"
#include "isac/waveform_learn.hpp"

using namespace isac;
using namespace isac::wavenet;
using Catch::Approx;

namespace
{
    WaveformSample random_sample(int M, int K, int tau, Rng &rng)
    {
        return {testing::random_cmatrix(K, M, rng), testing::random_cmatrix(K, tau, rng),
                testing::random_cmatrix(M, tau, rng, 1.0 / M)};
    }
}

TEST_CASE("feature layout", "[waveform_learn]")
{
    Rng rng(1);
    const WaveformNetSpec spec{16, 4, 10};
    CHECK(spec.n() == 264);
    const auto s = random_sample(16, 4, 10, rng);
    const RVector f = build_features(s);
    REQUIRE(f.size() == 2 * spec.n());
    CHECK(f(0) == s.H(0, 0).real());
    CHECK(f(1) == s.H(1, 0).real());
    CHECK(f(64) == s.H(0, 0).imag());
    CHECK(f(128) == s.D(0, 0).real());
    CHECK(f(168) == s.D(0, 0).imag());
    CHECK(f(208) == s.X0(0, 0).real());
    CHECK(f(208 + 160) == s.X0(0, 0).imag());
    CHECK(f(527) == s.X0(15, 9).imag());

    const auto w = spec.widths();
    CHECK(w == std::vector<int>{528, 5280, 2640, 320});
    const CMatrix X = testing::random_cmatrix(3, 4, rng);
    const RVector r = stack_waveform(X);
    CHECK(unstack_waveform({r.data(), std::size_t(r.size())}, 3, 4) == X);
}

TEST_CASE("power projection", "[waveform_learn]")
{
    Rng rng(2);
    const CMatrix big = 10.0 * testing::random_cmatrix(4, 5, rng);
    RVector r = stack_waveform(big);
    const CMatrix p = power_projection({r.data(), std::size_t(r.size())}, 4, 5, 2.0);
    CHECK(p.squaredNorm() == Approx(10.0));
    CHECK((p / p.norm() - big / big.norm()).norm() < 1e-12);
    const CMatrix small = 0.01 * big;
    r = stack_waveform(small);
    CHECK(power_projection({r.data(), std::size_t(r.size())}, 4, 5, 2.0) == small);
}

TEST_CASE("loss and its gradient", "[waveform_learn]")
{
    Rng rng(3);
    const int M = 3, K = 2, tau = 4;
    std::vector<WaveformSample> samples{random_sample(M, K, tau, rng), random_sample(M, K, tau, rng)};
    std::vector<const WaveformSample *> ptrs{&samples[0], &samples[1]};

    std::vector<CMatrix> X{samples[0].X0, samples[1].X0};
    CHECK(isac_waveform_loss(X, samples, 0.0, nullptr) == Approx(0.0).margin(1e-15));

    for (double scale : {0.1, 3.0}) // inside and outside the power ball
    {
        RMatrix raw = scale * testing::random_rmatrix(2, 2 * M * tau, rng);
        RMatrix g;
        raw_output_loss(raw, ptrs, 0.3, 1.0, &g);
        const double h = 1e-6;
        for (Eigen::Index i = 0; i < raw.size(); ++i)
        {
            RMatrix rp = raw, rm = raw;
            rp.data()[i] += h;
            rm.data()[i] -= h;
            const double fd = (raw_output_loss(rp, ptrs, 0.3, 1.0, nullptr) - raw_output_loss(rm, ptrs, 0.3, 1.0, nullptr)) / (2 * h);
            CHECK(g.data()[i] == Approx(fd).margin(1e-6));
        }
        // Matches the projected-waveform loss.
        std::vector<CMatrix> P;
        for (int n = 0; n < 2; ++n)
        {
            const RVector row = raw.row(n).transpose();
            P.push_back(power_projection({row.data(), std::size_t(row.size())}, M, tau, 1.0));
        }
        CHECK(raw_output_loss(raw, ptrs, 0.3, 1.0, nullptr) == Approx(isac_waveform_loss(P, samples, 0.3, nullptr)));
    }
    CHECK_THROWS(isac_waveform_loss(X, samples, 1.5, nullptr));
}

TEST_CASE("sample generation", "[waveform_learn]")
{
    WaveformScenario sc;
    sc.num_antennas = 4;
    sc.num_users = 2;
    sc.frame_length = 4;
    WaveformGenerator gen(sc);
    const auto data = gen.dataset(20, 99, 1);
    REQUIRE(data.size() == 20);
    for (const auto &s : data)
    {
        CHECK((metrics::waveform_covariance(s.X0) - gen.reference().matrix).norm() < 1e-10);
        for (Eigen::Index i = 0; i < s.D.size(); ++i)
            CHECK(std::abs(s.D.data()[i]) == Approx(1.0));
    }
    const auto again = gen.dataset(20, 99, 1);
    CHECK(again[7].H == data[7].H);
    CHECK(again[7].X0 == data[7].X0);

    const auto path = (std::filesystem::temp_directory_path() / "isac_test_dataset.bin").string();
    save_dataset(path, data);
    const auto back = load_dataset(path);
    REQUIRE(back.size() == data.size());
    CHECK(back[19].D == data[19].D);
    CHECK(back[19].H == data[19].H);
    std::filesystem::resize_file(path, 64);
    CHECK_THROWS(load_dataset(path));
    std::filesystem::remove(path);

    sc.frame_length = 3;
    CHECK_THROWS(WaveformGenerator(sc));
}

TEST_CASE("training reduces the loss", "[waveform_learn]")
{
    WaveformScenario sc;
    sc.num_antennas = 2;
    sc.num_users = 1;
    sc.frame_length = 2;
    WaveformGenerator gen(sc);
    const auto data = gen.dataset(200, 5, 1);
    WaveformTrainOptions opt;
    opt.train = {30, 16, 1e-3, std::nullopt, 3};
    const auto res = train_waveform_net(data, 0.5, opt);
    CHECK(res.train_rows.size() == 120);
    CHECK(res.val_rows.size() == 40);
    CHECK(res.test_rows.size() == 40);
    CHECK(res.history.train_loss.back() < res.history.train_loss.front());
    const auto designs = predict_waveforms(res.model, data, 1.0);
    for (const auto &d : designs)
        CHECK(d.X.squaredNorm() <= 2.0 + 1e-9);
}
