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
#include "isac/constellation_ae.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace isac::ae
{
    double Constellation::amplitude_spread() const
    {
        if (points.size() == 0)
            fail("empty constellation");
        const RVector a = points.cwiseAbs();
        const double mean = a.mean();
        const double var = (a.array() - mean).square().mean();
        return std::sqrt(var) / mean;
    }

    double Constellation::min_distance() const
    {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < points.size(); ++i)
            for (Eigen::Index j = i + 1; j < points.size(); ++j)
                best = std::min(best, std::abs(points(i) - points(j)));
        return best;
    }

    void Constellation::validate() const
    {
        if (points.size() == 0 || static_cast<std::size_t>(points.size()) != labels.size())
            fail("constellation needs one label per point");
        std::vector<int> sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != static_cast<int>(i))
                fail("constellation labels must be a permutation of 0..M-1");
        if (std::abs(points.squaredNorm() / static_cast<double>(points.size()) - avg_power) > 1e-6)
            fail("constellation average power does not match its record");
    }

    Constellation make_constellation(CVector points)
    {
        if (points.size() == 0)
            fail("empty constellation");
        const double power = points.squaredNorm() / static_cast<double>(points.size());
        if (!(power > 0.0))
            fail("constellation has zero power");
        Constellation c;
        c.points = points / std::sqrt(power);
        c.labels.resize(static_cast<std::size_t>(points.size()));
        std::iota(c.labels.begin(), c.labels.end(), 0);
        c.avg_power = c.points.squaredNorm() / static_cast<double>(c.points.size());
        return c;
    }

    Constellation baseline_constellation(BaselineKind kind, int size)
    {
        if (size < 2)
            fail("constellation needs at least two points");
        std::vector<cdouble> pts;
        if (kind == BaselineKind::psk)
        {
            for (int m = 0; m < size; ++m)
                pts.push_back(std::polar(1.0, 2.0 * pi * m / size));
        }
        else if (size == 32)
        {
            // 6 x 6 grid without its four corners
            for (int x = -5; x <= 5; x += 2)
                for (int y = -5; y <= 5; y += 2)
                    if (!(std::abs(x) == 5 && std::abs(y) == 5))
                        pts.emplace_back(x, y);
        }
        else
        {
            const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(size))));
            if (side * side != size)
                fail("QAM baseline supports square sizes and 32");
            for (int x = 0; x < side; ++x)
                for (int y = 0; y < side; ++y)
                    pts.emplace_back(2 * x - side + 1, 2 * y - side + 1);
        }
        return make_constellation(Eigen::Map<const CVector>(pts.data(), static_cast<Eigen::Index>(pts.size())));
    }

    void AeConfig::validate() const
    {
        if (bits < 1 || bits > 12)
            fail("message size K must lie in [1, 12]");
        if (!(eta >= 0.0 && eta <= 1.0))
            fail("trade-off weight must lie in [0, 1]");
        if (!(comm_noise_var >= 0.0) || !(radar_noise_var > 0.0))
            fail("noise variances must be nonnegative (radar: positive)");
        if (epochs < 1 || samples_per_epoch < 1 || batch_size < 1 || !(lr > 0.0))
            fail("invalid autoencoder training schedule");
        for (int h : hidden)
            if (h < 1)
                fail("hidden widths must be positive");
    }

    namespace
    {
        nn::MlpModel make_mlp(int in, const std::vector<int> &hidden, int out, nn::Activation last, Rng &rng)
        {
            std::vector<int> widths{in};
            widths.insert(widths.end(), hidden.begin(), hidden.end());
            widths.push_back(out);
            std::vector<nn::Activation> acts(hidden.size(), nn::Activation::relu);
            acts.push_back(last);
            return nn::MlpModel::create(widths, acts, rng);
        }

        int decide_message(const RMatrix &out, Eigen::Index row, CommHead head)
        {
            if (head == CommHead::softmax)
            {
                Eigen::Index best;
                out.row(row).maxCoeff(&best);
                return static_cast<int>(best);
            }
            int m = 0;
            for (Eigen::Index b = 0; b < out.cols(); ++b)
                if (out(row, b) > 0.5)
                    m |= 1 << b;
            return m;
        }
    }

    IsacAutoencoder IsacAutoencoder::create(const AeConfig &config, Rng &rng)
    {
        config.validate();
        IsacAutoencoder m;
        m.config = config;
        const int M = 1 << config.bits;
        m.encoder = make_mlp(config.bits, config.hidden, 2, nn::Activation::linear, rng);
        m.comm_decoder = config.head == CommHead::softmax
                             ? make_mlp(2, config.hidden, M, nn::Activation::softmax, rng)
                             : make_mlp(2, config.hidden, config.bits, nn::Activation::sigmoid, rng);
        m.radar_detector = make_mlp(2, config.hidden, 1, nn::Activation::sigmoid, rng);
        return m;
    }

    RMatrix message_bits(std::span<const int> messages, int bits)
    {
        RMatrix out(static_cast<Eigen::Index>(messages.size()), bits);
        for (std::size_t i = 0; i < messages.size(); ++i)
            for (int b = 0; b < bits; ++b)
                out(static_cast<Eigen::Index>(i), b) = (messages[i] >> b) & 1;
        return out;
    }

    AeBatch sample_training_batch(int bits, int batch, double comm_noise_var, double radar_noise_var, Rng &rng)
    {
        if (bits < 1 || batch < 1)
            fail("batch needs positive message size and count");
        AeBatch b;
        b.messages.resize(static_cast<std::size_t>(batch));
        b.flags.resize(static_cast<std::size_t>(batch));
        b.comm_noise.resize(batch, 2);
        b.radar_noise.resize(batch, 2);
        const double sc = std::sqrt(0.5 * comm_noise_var);
        const double sr = std::sqrt(0.5 * radar_noise_var);
        const auto M = static_cast<std::uint64_t>(1) << bits;
        for (int i = 0; i < batch; ++i)
        {
            b.messages[i] = static_cast<int>(rng.integer(M));
            b.flags[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
            b.comm_noise(i, 0) = sc * rng.normal();
            b.comm_noise(i, 1) = sc * rng.normal();
            b.radar_noise(i, 0) = sr * rng.normal();
            b.radar_noise(i, 1) = sr * rng.normal();
        }
        return b;
    }

    void observe(const RMatrix &x, AeBatch &batch)
    {
        if (x.rows() != batch.comm_noise.rows() || x.cols() != 2)
            fail("encoder output does not match the batch");
        batch.y = x + batch.comm_noise;
        batch.z = batch.radar_noise;
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            batch.z.row(i) += batch.flags[static_cast<std::size_t>(i)] * x.row(i);
    }

    double comm_loss(const RMatrix &probs, std::span<const int> messages, RMatrix *grad_pre)
    {
        return nn::softmax_cross_entropy(probs, messages, grad_pre);
    }

    double comm_loss_bits(const RMatrix &probs, std::span<const int> messages, int bits, RMatrix *grad_pre)
    {
        if (probs.cols() != bits || static_cast<std::size_t>(probs.rows()) != messages.size() || probs.rows() == 0)
            fail("bit estimates do not match the batch");
        const RMatrix target = message_bits(messages, bits);
        const double n = static_cast<double>(probs.rows());
        double total = 0.0;
        for (Eigen::Index i = 0; i < probs.rows(); ++i)
            for (int b = 0; b < bits; ++b)
            {
                const double p = std::clamp(probs(i, b), 1e-12, 1.0 - 1e-12);
                total -= target(i, b) * std::log(p) + (1.0 - target(i, b)) * std::log(1.0 - p);
            }
        if (grad_pre)
            *grad_pre = (probs - target) / n;
        return total / n;
    }

    double radar_loss(const RMatrix &probs, std::span<const double> flags, RMatrix *grad_pre)
    {
        return nn::sigmoid_binary_cross_entropy(probs, flags, grad_pre);
    }

    AeStepLoss ae_loss(const IsacAutoencoder &model, AeBatch &batch, AeGradients *grads)
    {
        const auto &cfg = model.config;
        const RMatrix u = message_bits(batch.messages, cfg.bits);
        const nn::ForwardCache enc = nn::forward(model.encoder, u);
        const double B = static_cast<double>(u.rows());
        const double scale = std::sqrt(enc.output.squaredNorm() / B);
        if (!(scale > 0.0))
            fail_numerical("encoder collapsed to zero power");
        const RMatrix x = enc.output / scale;
        observe(x, batch);

        const nn::ForwardCache dec = nn::forward(model.comm_decoder, batch.y);
        const nn::ForwardCache det = nn::forward(model.radar_detector, batch.z);
        RMatrix g_dec, g_det;
        AeStepLoss loss;
        loss.comm = cfg.head == CommHead::softmax ? comm_loss(dec.output, batch.messages, grads ? &g_dec : nullptr)
                                                  : comm_loss_bits(dec.output, batch.messages, cfg.bits, grads ? &g_dec : nullptr);
        loss.radar = radar_loss(det.output, batch.flags, grads ? &g_det : nullptr);
        loss.total = cfg.eta * loss.radar + (1.0 - cfg.eta) * loss.comm;
        if (!grads)
            return loss;

        g_dec *= 1.0 - cfg.eta;
        g_det *= cfg.eta;
        grads->comm = nn::backward(model.comm_decoder, dec, g_dec, nn::Upstream::preactivation);
        grads->radar = nn::backward(model.radar_detector, det, g_det, nn::Upstream::preactivation);

        // d/dx of the combined loss, then through x = x_raw / scale.
        RMatrix g_x = grads->comm.input;
        for (Eigen::Index i = 0; i < g_x.rows(); ++i)
            g_x.row(i) += batch.flags[static_cast<std::size_t>(i)] * grads->radar.input.row(i);
        const double inner = g_x.cwiseProduct(x).sum() / B;
        const RMatrix g_raw = (g_x - inner * x) / scale;
        grads->encoder = nn::backward(model.encoder, enc, g_raw, nn::Upstream::activation);
        return loss;
    }

    IsacAutoencoder train_isac_ae(const AeConfig &config, AeHistory *history)
    {
        config.validate();
        Rng init(Rng::split_seed(config.seed, 0xae));
        IsacAutoencoder model = IsacAutoencoder::create(config, init);
        Rng rng(config.seed);
        nn::Adam opt_enc(model.encoder, config.lr), opt_dec(model.comm_decoder, config.lr),
            opt_det(model.radar_detector, config.lr);
        const int steps = std::max(1, config.samples_per_epoch / config.batch_size);
        AeGradients grads;
        for (int epoch = 0; epoch < config.epochs; ++epoch)
        {
            AeStepLoss acc;
            for (int s = 0; s < steps; ++s)
            {
                AeBatch batch = sample_training_batch(config.bits, config.batch_size, config.comm_noise_var,
                                                      config.radar_noise_var, rng);
                const AeStepLoss l = ae_loss(model, batch, &grads);
                if (!std::isfinite(l.total))
                    fail_numerical("autoencoder loss is not finite at epoch " + std::to_string(epoch));
                opt_enc.step(model.encoder, grads.encoder);
                opt_dec.step(model.comm_decoder, grads.comm);
                opt_det.step(model.radar_detector, grads.radar);
                acc.total += l.total;
                acc.comm += l.comm;
                acc.radar += l.radar;
            }
            if (history)
            {
                history->loss.push_back(acc.total / steps);
                history->comm_loss.push_back(acc.comm / steps);
                history->radar_loss.push_back(acc.radar / steps);
            }
        }
        return model;
    }

    namespace
    {
        CVector encode_all(const IsacAutoencoder &model)
        {
            std::vector<int> all(static_cast<std::size_t>(model.num_messages()));
            std::iota(all.begin(), all.end(), 0);
            const RMatrix x = model.encoder.predict(message_bits(all, model.config.bits));
            CVector pts(x.rows());
            for (Eigen::Index i = 0; i < x.rows(); ++i)
                pts(i) = {x(i, 0), x(i, 1)};
            return pts;
        }
    }

    Constellation extract_constellation(const IsacAutoencoder &model) { return make_constellation(encode_all(model)); }

    IsacMetrics evaluate_autoencoder(const IsacAutoencoder &model, double threshold, std::size_t trials, Rng &rng)
    {
        if (trials == 0)
            fail("evaluation needs trials");
        // Messages are equiprobable, so the batch normalization of training reduces to
        // the average power over the full message set.
        const Constellation c = extract_constellation(model);
        const double sc = std::sqrt(0.5 * model.config.comm_noise_var);
        const double sr = std::sqrt(0.5 * model.config.radar_noise_var);
        constexpr std::size_t chunk = 50000;
        std::size_t errors = 0, detections = 0, false_alarms = 0;
        for (std::size_t start = 0; start < trials; start += chunk)
        {
            const auto n = static_cast<Eigen::Index>(std::min(chunk, trials - start));
            std::vector<int> msg(static_cast<std::size_t>(n));
            RMatrix y(n, 2), z1(n, 2), z0(n, 2);
            for (Eigen::Index i = 0; i < n; ++i)
            {
                const int m = static_cast<int>(rng.integer(static_cast<std::uint64_t>(c.size())));
                msg[static_cast<std::size_t>(i)] = m;
                const cdouble x = c.points(m);
                y(i, 0) = x.real() + sc * rng.normal();
                y(i, 1) = x.imag() + sc * rng.normal();
                z1(i, 0) = x.real() + sr * rng.normal();
                z1(i, 1) = x.imag() + sr * rng.normal();
                z0(i, 0) = sr * rng.normal();
                z0(i, 1) = sr * rng.normal();
            }
            const RMatrix dec = model.comm_decoder.predict(y);
            const RMatrix p1 = model.radar_detector.predict(z1);
            const RMatrix p0 = model.radar_detector.predict(z0);
            for (Eigen::Index i = 0; i < n; ++i)
            {
                errors += decide_message(dec, i, model.config.head) != msg[static_cast<std::size_t>(i)];
                detections += p1(i, 0) > threshold;
                false_alarms += p0(i, 0) > threshold;
            }
        }
        const double t = static_cast<double>(trials);
        return {static_cast<double>(errors) / t, static_cast<double>(detections) / t, static_cast<double>(false_alarms) / t};
    }

    double target_posterior(const Constellation &c, cdouble z, double radar_noise_var)
    {
        // l = mean_j p(z | x_j) / p(z | absent), posterior = l / (1 + l)
        double top = -std::numeric_limits<double>::infinity();
        std::vector<double> e(static_cast<std::size_t>(c.size()));
        for (int j = 0; j < c.size(); ++j)
        {
            e[j] = -(std::norm(z - c.points(j)) - std::norm(z)) / radar_noise_var;
            top = std::max(top, e[j]);
        }
        double s = 0.0;
        for (double v : e)
            s += std::exp(v - top);
        const double log_l = top + std::log(s / static_cast<double>(c.size()));
        return 1.0 / (1.0 + std::exp(-log_l));
    }

    namespace
    {
        int nearest(const Constellation &c, cdouble y)
        {
            int best = 0;
            double dist = std::numeric_limits<double>::infinity();
            for (int j = 0; j < c.size(); ++j)
            {
                const double d = std::norm(y - c.points(j));
                if (d < dist)
                {
                    dist = d;
                    best = j;
                }
            }
            return best;
        }
    }

    IsacMetrics evaluate_constellation(const Constellation &c, double comm_noise_var, double radar_noise_var,
                                       double threshold, std::size_t trials, Rng &rng)
    {
        if (trials == 0)
            fail("evaluation needs trials");
        if (!(radar_noise_var > 0.0) || !(comm_noise_var >= 0.0))
            fail("invalid noise variances");
        std::size_t errors = 0, detections = 0, false_alarms = 0;
        for (std::size_t t = 0; t < trials; ++t)
        {
            const int m = static_cast<int>(rng.integer(static_cast<std::uint64_t>(c.size())));
            const cdouble x = c.points(m);
            errors += nearest(c, x + rng.complex_normal(comm_noise_var)) != m;
            detections += target_posterior(c, x + rng.complex_normal(radar_noise_var), radar_noise_var) > threshold;
            false_alarms += target_posterior(c, rng.complex_normal(radar_noise_var), radar_noise_var) > threshold;
        }
        const double n = static_cast<double>(trials);
        return {static_cast<double>(errors) / n, static_cast<double>(detections) / n, static_cast<double>(false_alarms) / n};
    }

    Calibration calibrate_psk(const CalibrationTarget &target)
    {
        if (!(target.ser > 0.0 && target.ser < 1.0) || !(target.pd > 0.0 && target.pd < 1.0) ||
            !(target.pfa > 0.0 && target.pfa < 1.0) || target.trials < 1000)
            fail("invalid calibration target");
        const Constellation psk = baseline_constellation(BaselineKind::psk, target.size);

        // Common random numbers: one set of symbols and unit noise draws for every trial level.
        Rng rng(target.seed);
        const std::size_t n = target.trials;
        std::vector<int> msg(n);
        std::vector<cdouble> unit(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            msg[i] = static_cast<int>(rng.integer(static_cast<std::uint64_t>(psk.size())));
            unit[i] = rng.complex_normal();
        }
        auto ser_at = [&](double sigma)
        {
            std::size_t errors = 0;
            for (std::size_t i = 0; i < n; ++i)
                errors += nearest(psk, psk.points(msg[i]) + sigma * unit[i]) != msg[i];
            return static_cast<double>(errors) / static_cast<double>(n);
        };
        // PSK has constant modulus, so the likelihood ratio is monotone in |z| and the
        // detector is an energy test with Pfa = exp(-t / sigma^2).
        const double log_inv_pfa = std::log(1.0 / target.pfa);
        auto pd_at = [&](double sigma)
        {
            const double t = sigma * sigma * log_inv_pfa;
            std::size_t hits = 0;
            for (std::size_t i = 0; i < n; ++i)
                hits += std::norm(psk.points(msg[i]) + sigma * unit[i]) > t;
            return static_cast<double>(hits) / static_cast<double>(n);
        };
        auto bisect = [](auto &&f, double lo, double hi, double goal)
        {
            // f increasing in sigma on [lo, hi]
            for (int it = 0; it < 80; ++it)
            {
                const double mid = 0.5 * (lo + hi);
                if (f(mid) < goal)
                    lo = mid;
                else
                    hi = mid;
            }
            return 0.5 * (lo + hi);
        };

        Calibration cal;
        const double sc = bisect(ser_at, 1e-3, 3.0, target.ser);
        cal.comm_noise_var = sc * sc;
        const double sr = bisect([&](double s)
                                 { return 1.0 - pd_at(s); },
                                 1e-3, 3.0, 1.0 - target.pd);
        cal.radar_noise_var = sr * sr;
        cal.energy_threshold = cal.radar_noise_var * log_inv_pfa;
        cal.posterior_threshold = target_posterior(psk, {std::sqrt(cal.energy_threshold), 0.0}, cal.radar_noise_var);
        return cal;
    }
}
