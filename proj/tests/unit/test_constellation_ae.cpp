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
#include "isac/constellation_ae.hpp"
#include "isac/metrics.hpp"

using namespace isac;
using namespace isac::ae;
using Catch::Approx;

TEST_CASE("baseline constellations", "[constellation_ae]")
{
    const auto psk = baseline_constellation(BaselineKind::psk, 32);
    CHECK(psk.size() == 32);
    CHECK(psk.amplitude_spread() == Approx(0.0).margin(1e-12));
    CHECK(psk.min_distance() == Approx(2 * std::sin(pi / 32)));
    const auto qam = baseline_constellation(BaselineKind::qam, 32);
    CHECK(qam.size() == 32);
    double p = 0;
    for (Eigen::Index i = 0; i < qam.points.size(); ++i)
        p += std::norm(qam.points(i));
    CHECK(p / 32 == Approx(1.0));
    CHECK(qam.amplitude_spread() > 0.1);
    // Cross 32-QAM on the odd grid has average energy 20 before scaling.
    CHECK(qam.min_distance() == Approx(2 / std::sqrt(20.0)));
    const auto q16 = baseline_constellation(BaselineKind::qam, 16);
    CHECK(q16.min_distance() == Approx(2 / std::sqrt(10.0)));
}

TEST_CASE("PSK evaluation against closed forms", "[constellation_ae]")
{
    const auto qpsk = baseline_constellation(BaselineKind::psk, 4);
    Rng rng(1);
    const double s2 = 0.25;
    const auto m = evaluate_constellation(qpsk, s2, 0.5, 0.5, 200000, rng);
    const double q = metrics::qfunc(std::sqrt(1.0 / s2));
    CHECK(m.ser == Approx(2 * q - q * q).margin(0.004));
    // Posterior above 1/2 is the likelihood-ratio test at unit ratio: |z|^2 > t with
    // t solving exp(-1/s) I0(2|z|/s) = 1 for constant-modulus points.
    CHECK(m.pd > m.pfa);
    const double post = target_posterior(qpsk, cdouble(0, 0), 0.5);
    CHECK(post == Approx(std::exp(-2.0) / (1 + std::exp(-2.0))).epsilon(1e-9));
    CHECK(target_posterior(qpsk, cdouble(5, 0), 0.5) > 0.99);
}

TEST_CASE("losses and batches", "[constellation_ae]")
{
    const std::vector<int> msgs{0, 5, 31};
    const RMatrix b = message_bits(msgs, 5);
    CHECK(b.row(0).sum() == 0);
    CHECK(b(1, 0) == 1);
    CHECK(b(1, 1) == 0);
    CHECK(b(1, 2) == 1);
    CHECK(b.row(2).sum() == 5);

    RMatrix probs(2, 1);
    probs << 0.0, 1.0;
    const std::vector<double> flags{1.0, 1.0};
    CHECK(std::isfinite(radar_loss(probs, flags, nullptr)));
    CHECK(radar_loss(probs, flags, nullptr) == Approx(0.5 * -std::log(1e-12)).epsilon(1e-6));

    Rng rng(2);
    const auto batch = sample_training_batch(5, 20000, 0.02, 0.1, rng);
    double present = 0;
    for (double f : batch.flags)
        present += f;
    CHECK(present / 20000 == Approx(0.5).margin(0.02));
    CHECK(batch.comm_noise.squaredNorm() / 20000 == Approx(0.02).epsilon(0.05));
    CHECK(batch.radar_noise.squaredNorm() / 20000 == Approx(0.1).epsilon(0.05));
    CHECK(*std::max_element(batch.messages.begin(), batch.messages.end()) == 31);
}

TEST_CASE("autoencoder gradients", "[constellation_ae]")
{
    for (CommHead head : {CommHead::softmax, CommHead::per_bit_sigmoid})
    {
        AeConfig cfg;
        cfg.bits = 2;
        cfg.eta = 0.4;
        cfg.hidden = {4};
        cfg.head = head;
        Rng rng(3);
        auto model = IsacAutoencoder::create(cfg, rng);
        Rng brng(4);
        auto batch = sample_training_batch(2, 8, 0.1, 0.2, brng);
        AeGradients g;
        const auto base = ae_loss(model, batch, &g);
        CHECK(base.total == Approx(cfg.eta * base.radar + (1 - cfg.eta) * base.comm));
        const double h = 1e-6;
        auto check_net = [&](nn::MlpModel &net, const nn::Gradients &gr)
        {
            for (std::size_t l = 0; l < net.layers().size(); ++l)
            {
                auto &W = net.layers()[l].weight;
                for (Eigen::Index i = 0; i < W.size(); ++i)
                {
                    const double keep = W.data()[i];
                    W.data()[i] = keep + h;
                    const double fp = ae_loss(model, batch, nullptr).total;
                    W.data()[i] = keep - h;
                    const double fm = ae_loss(model, batch, nullptr).total;
                    W.data()[i] = keep;
                    CHECK(gr.weight[l].data()[i] == Approx((fp - fm) / (2 * h)).margin(1e-6));
                }
            }
        };
        check_net(model.encoder, g.encoder);
        check_net(model.comm_decoder, g.comm);
        check_net(model.radar_detector, g.radar);
    }
}

TEST_CASE("small autoencoder training", "[constellation_ae]")
{
    AeConfig cfg;
    cfg.bits = 2;
    cfg.eta = 0.9;
    cfg.hidden = {8};
    cfg.epochs = 6;
    cfg.samples_per_epoch = 20000;
    cfg.batch_size = 200;
    cfg.lr = 5e-3;
    cfg.comm_noise_var = 0.05;
    cfg.seed = 5;
    AeHistory hist;
    const auto model = train_isac_ae(cfg, &hist);
    CHECK(hist.loss.size() == 6);
    CHECK(hist.loss.back() < hist.loss.front());
    const auto c = extract_constellation(model);
    c.validate();
    CHECK(c.size() == 4);
    double p = 0;
    for (Eigen::Index i = 0; i < c.points.size(); ++i)
        p += std::norm(c.points(i));
    CHECK(p / 4 == Approx(1.0).epsilon(1e-9));
    Rng rng(6);
    const auto m = evaluate_autoencoder(model, 0.5, 20000, rng);
    CHECK(m.ser < 0.2);
    CHECK(m.pd >= 0.0);
    CHECK(m.pd <= 1.0);
    const auto again = train_isac_ae(cfg);
    CHECK(extract_constellation(again).points == c.points);
}
