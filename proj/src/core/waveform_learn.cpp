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
#include "isac/waveform_learn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace isac::wavenet
{
    void WaveformSample::validate() const
    {
        if (H.rows() < 1 || H.cols() < 1 || D.rows() != H.rows() || D.cols() < 1 || X0.rows() != H.cols() ||
            X0.cols() != D.cols())
            fail("waveform sample has inconsistent shapes");
    }

    std::vector<int> WaveformNetSpec::widths() const
    {
        const int N = n();
        return {2 * N, 20 * N, 10 * N, 2 * num_antennas * frame_length};
    }

    std::vector<nn::Activation> WaveformNetSpec::activations() const
    {
        return {nn::Activation::relu, nn::Activation::relu, nn::Activation::tanh};
    }

    nn::MlpModel WaveformNetSpec::create(Rng &rng) const
    {
        if (num_antennas < 1 || num_users < 1 || frame_length < 1)
            fail("network dimensions must be positive");
        const auto w = widths();
        const auto a = activations();
        return nn::MlpModel::create(w, a, rng);
    }

    namespace
    {
        void put_complex(RVector &out, Eigen::Index &pos, const CMatrix &m)
        {
            const Eigen::Index n = m.size();
            for (Eigen::Index i = 0; i < n; ++i)
                out(pos + i) = m.data()[i].real();
            for (Eigen::Index i = 0; i < n; ++i)
                out(pos + n + i) = m.data()[i].imag();
            pos += 2 * n;
        }
    }

    RVector build_features(const WaveformSample &sample)
    {
        sample.validate();
        RVector f(2 * (sample.H.size() + sample.D.size() + sample.X0.size()));
        Eigen::Index pos = 0;
        put_complex(f, pos, sample.H);
        put_complex(f, pos, sample.D);
        put_complex(f, pos, sample.X0);
        return f;
    }

    CMatrix unstack_waveform(std::span<const double> raw, int num_antennas, int frame_length)
    {
        const auto n = static_cast<std::size_t>(num_antennas) * static_cast<std::size_t>(frame_length);
        if (raw.size() != 2 * n)
            fail("raw waveform has length " + std::to_string(raw.size()) + ", expected " + std::to_string(2 * n));
        CMatrix X(num_antennas, frame_length);
        for (std::size_t i = 0; i < n; ++i)
            X.data()[i] = {raw[i], raw[n + i]};
        return X;
    }

    RVector stack_waveform(const CMatrix &X)
    {
        RVector out(2 * X.size());
        Eigen::Index pos = 0;
        put_complex(out, pos, X);
        return out;
    }

    CMatrix power_projection(std::span<const double> raw, int num_antennas, int frame_length, double total_power)
    {
        if (!(total_power > 0.0))
            fail("power budget must be positive");
        CMatrix X = unstack_waveform(raw, num_antennas, frame_length);
        const double budget = frame_length * total_power;
        const double energy = X.squaredNorm();
        if (energy > budget)
            X *= std::sqrt(budget / energy);
        return X;
    }

    double isac_waveform_loss(std::span<const CMatrix> X, std::span<const WaveformSample> samples, double eta,
                              std::vector<CMatrix> *grads)
    {
        if (!(eta >= 0.0 && eta <= 1.0))
            fail("trade-off weight must lie in [0, 1]");
        if (X.size() != samples.size() || X.empty())
            fail("prediction and sample counts differ");
        const double ns = static_cast<double>(samples.size());
        double total = 0.0;
        if (grads)
            grads->resize(samples.size());
        for (std::size_t n = 0; n < samples.size(); ++n)
        {
            const auto &s = samples[n];
            const CMatrix residual = s.H * X[n] - s.D;
            const CMatrix offset = X[n] - s.X0;
            total += eta * residual.squaredNorm() + (1.0 - eta) * offset.squaredNorm();
            if (grads)
                (*grads)[n] = (2.0 / ns) * (eta * s.H.adjoint() * residual + (1.0 - eta) * offset);
        }
        return total / ns;
    }

    double raw_output_loss(const RMatrix &raw, std::span<const WaveformSample *const> samples, double eta,
                           double total_power, RMatrix *grad)
    {
        if (!(eta >= 0.0 && eta <= 1.0))
            fail("trade-off weight must lie in [0, 1]");
        if (static_cast<std::size_t>(raw.rows()) != samples.size() || samples.empty())
            fail("output rows and sample count differ");
        const double ns = static_cast<double>(samples.size());
        if (grad)
            grad->resize(raw.rows(), raw.cols());
        double total = 0.0;
        RVector r(raw.cols());
        for (std::size_t n = 0; n < samples.size(); ++n)
        {
            const auto &s = *samples[n];
            const int M = s.num_antennas();
            const int tau = s.frame_length();
            r = raw.row(static_cast<Eigen::Index>(n)).transpose();
            const double budget = tau * total_power;
            const double energy = r.squaredNorm();
            const bool scaled = energy > budget;
            const double scale = scaled ? std::sqrt(budget / energy) : 1.0;
            const CMatrix X = unstack_waveform({r.data(), static_cast<std::size_t>(r.size())}, M, tau) * scale;

            const CMatrix residual = s.H * X - s.D;
            const CMatrix offset = X - s.X0;
            total += eta * residual.squaredNorm() + (1.0 - eta) * offset.squaredNorm();
            if (!grad)
                continue;
            // d/dRe + j d/dIm of the per-sample term, then through X = scale * r.
            const CMatrix G = (2.0 / ns) * (eta * s.H.adjoint() * residual + (1.0 - eta) * offset);
            RVector g = stack_waveform(G);
            if (scaled)
                g = scale * (g - r * (r.dot(g) / energy));
            grad->row(static_cast<Eigen::Index>(n)) = g.transpose();
        }
        return total / ns;
    }

    void WaveformScenario::validate() const
    {
        if (num_antennas < 1 || num_users < 1 || frame_length < 1)
            fail("scenario dimensions must be positive");
        if (frame_length < num_antennas)
            fail("the reference waveform needs tau_d >= M");
        if (!(total_power > 0.0) || !(large_scale_gain > 0.0))
            fail("power and gain must be positive");
        if (!(rician_lo >= 0.0) || rician_hi < rician_lo)
            fail("invalid Rician factor range");
        if (angle_lo < -0.5 * pi - 1e-12 || angle_hi > 0.5 * pi + 1e-12 || angle_hi < angle_lo)
            fail("invalid user angle range");
        if (reference == ReferenceKind::directional && target_angles.empty())
            fail("directional reference needs target angles");
    }

    WaveformGenerator::WaveformGenerator(WaveformScenario scenario) : scenario_(std::move(scenario))
    {
        scenario_.validate();
        reference_ = scenario_.reference == ReferenceKind::omni
                         ? design::reference_covariance_omni(scenario_.total_power, scenario_.num_antennas)
                         : design::directional_covariance(scenario_.target_angles, scenario_.total_power,
                                                          scenario_.num_antennas, scenario_.directional);
    }

    CMatrix qpsk_symbols(int rows, int cols, Rng &rng)
    {
        const double a = std::sqrt(0.5);
        CMatrix D(rows, cols);
        for (int j = 0; j < cols; ++j)
            for (int i = 0; i < rows; ++i)
            {
                const double re = rng.bernoulli(0.5) ? a : -a;
                const double im = rng.bernoulli(0.5) ? a : -a;
                D(i, j) = {re, im};
            }
        return D;
    }

    std::vector<channel::RicianParams> WaveformGenerator::draw_users(Rng &rng) const
    {
        std::vector<channel::RicianParams> users(static_cast<std::size_t>(scenario_.num_users));
        for (auto &u : users)
        {
            u.rician_factor = rng.uniform(scenario_.rician_lo, scenario_.rician_hi);
            u.large_scale_gain = scenario_.large_scale_gain;
            u.departure_angle = rng.uniform(scenario_.angle_lo, scenario_.angle_hi);
        }
        return users;
    }

    WaveformSample WaveformGenerator::with_symbols(const CMatrix &H, const CMatrix &D) const
    {
        WaveformSample s;
        s.H = H;
        s.D = D;
        s.X0 = design::procrustes_waveform(reference_, H, D, scenario_.frame_length).X;
        return s;
    }

    WaveformSample WaveformGenerator::complete(const CMatrix &H, Rng &rng) const
    {
        return with_symbols(H, qpsk_symbols(static_cast<int>(H.rows()), scenario_.frame_length, rng));
    }

    WaveformSample WaveformGenerator::draw(Rng &rng) const
    {
        const auto users = draw_users(rng);
        const channel::ArrayGeometry geom{scenario_.num_antennas, 0.5};
        const auto H = channel::sample_channel_matrix(users, geom, rng);
        return complete(H.entries, rng);
    }

    std::vector<WaveformSample> WaveformGenerator::dataset(std::size_t count, std::uint64_t seed, int threads) const
    {
        std::vector<WaveformSample> out(count);
        const Rng master(seed);
        parallel_for(count, threads, [&](std::size_t i)
                     {
            Rng rng = master.child(i);
            out[i] = draw(rng); });
        return out;
    }

    namespace
    {
        constexpr char kDatasetMagic[8] = {'I', 'S', 'A', 'C', 'W', 'D', 'S', '1'};
        constexpr std::uint32_t kDatasetVersion = 1;
    }

    void save_dataset(const std::string &path, std::span<const WaveformSample> samples)
    {
        if (samples.empty())
            fail("refusing to write an empty dataset");
        const auto &first = samples.front();
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error(ErrorKind::io, "cannot open " + path + " for writing");
        out.write(kDatasetMagic, sizeof kDatasetMagic);
        const std::uint32_t version = kDatasetVersion;
        const std::uint64_t count = samples.size();
        const std::uint32_t dims[3] = {static_cast<std::uint32_t>(first.num_antennas()),
                                       static_cast<std::uint32_t>(first.num_users()),
                                       static_cast<std::uint32_t>(first.frame_length())};
        out.write(reinterpret_cast<const char *>(&version), sizeof version);
        out.write(reinterpret_cast<const char *>(&count), sizeof count);
        out.write(reinterpret_cast<const char *>(dims), sizeof dims);
        for (const auto &s : samples)
        {
            if (s.num_antennas() != first.num_antennas() || s.num_users() != first.num_users() ||
                s.frame_length() != first.frame_length())
                fail("dataset samples must share dimensions");
            for (const CMatrix *m : {&s.H, &s.D, &s.X0})
                out.write(reinterpret_cast<const char *>(m->data()), static_cast<std::streamsize>(sizeof(cdouble) * m->size()));
        }
        if (!out)
            throw Error(ErrorKind::io, "write failed for " + path);
    }

    std::vector<WaveformSample> load_dataset(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorKind::io, "cannot open " + path);
        char magic[8];
        std::uint32_t version = 0;
        std::uint64_t count = 0;
        std::uint32_t dims[3] = {0, 0, 0};
        in.read(magic, sizeof magic);
        in.read(reinterpret_cast<char *>(&version), sizeof version);
        in.read(reinterpret_cast<char *>(&count), sizeof count);
        in.read(reinterpret_cast<char *>(dims), sizeof dims);
        if (!in || std::memcmp(magic, kDatasetMagic, sizeof magic) != 0)
            throw Error(ErrorKind::io, path + " is not a waveform dataset");
        if (version != kDatasetVersion)
            throw Error(ErrorKind::io, "unsupported dataset version in " + path);
        if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0 || dims[0] > 4096 || dims[1] > 4096 || dims[2] > 4096 ||
            count > (1ull << 32))
            throw Error(ErrorKind::io, "corrupt dataset header in " + path);
        const int M = static_cast<int>(dims[0]), K = static_cast<int>(dims[1]), tau = static_cast<int>(dims[2]);
        std::vector<WaveformSample> out(count);
        for (auto &s : out)
        {
            s.H.resize(K, M);
            s.D.resize(K, tau);
            s.X0.resize(M, tau);
            for (CMatrix *m : {&s.H, &s.D, &s.X0})
                in.read(reinterpret_cast<char *>(m->data()), static_cast<std::streamsize>(sizeof(cdouble) * m->size()));
            if (!in)
                throw Error(ErrorKind::io, "truncated dataset " + path);
        }
        return out;
    }

    namespace
    {
        WaveformSample relabel(const WaveformSample &s, Rng &rng)
        {
            const int K = s.num_users();
            const int tau = s.frame_length();
            std::vector<int> cols(static_cast<std::size_t>(tau));
            std::iota(cols.begin(), cols.end(), 0);
            std::shuffle(cols.begin(), cols.end(), rng.engine());
            std::vector<int> users(static_cast<std::size_t>(K));
            std::iota(users.begin(), users.end(), 0);
            std::shuffle(users.begin(), users.end(), rng.engine());
            static const cdouble quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            const bool mirror = rng.bernoulli(0.5);

            WaveformSample out;
            out.H.resize(K, s.num_antennas());
            out.D.resize(K, tau);
            out.X0.resize(s.num_antennas(), tau);
            std::vector<cdouble> row_phase(static_cast<std::size_t>(K)), col_phase(static_cast<std::size_t>(tau));
            for (auto &p : row_phase)
                p = quarter[rng.integer(4)];
            for (auto &p : col_phase)
                p = quarter[rng.integer(4)];
            for (int k = 0; k < K; ++k)
                out.H.row(k) = row_phase[k] * s.H.row(users[k]);
            for (int q = 0; q < tau; ++q)
            {
                out.X0.col(q) = col_phase[q] * s.X0.col(cols[q]);
                for (int k = 0; k < K; ++k)
                    out.D(k, q) = row_phase[k] * col_phase[q] * s.D(users[k], cols[q]);
            }
            if (mirror)
            {
                // Conjugation maps the steering vector at theta to the one at -theta.
                out.H = out.H.conjugate().eval();
                out.D = out.D.conjugate().eval();
                out.X0 = out.X0.conjugate().eval();
            }
            return out;
        }
    }

    WaveformTrainResult train_waveform_net(std::span<const WaveformSample> dataset, double eta,
                                           const WaveformTrainOptions &options)
    {
        if (!(eta >= 0.0 && eta <= 1.0))
            fail("trade-off weight must lie in [0, 1]");
        const std::size_t n = dataset.size();
        if (n < static_cast<std::size_t>(options.train.batch_size) || n < 5)
            fail("dataset is smaller than one batch");
        const auto &first = dataset.front();
        WaveformNetSpec spec{first.num_antennas(), first.num_users(), first.frame_length()};
        for (const auto &s : dataset)
        {
            s.validate();
            if (s.num_antennas() != spec.num_antennas || s.num_users() != spec.num_users ||
                s.frame_length() != spec.frame_length)
                fail("dataset samples must share dimensions");
        }

        WaveformTrainResult result;
        Rng rng(options.train.seed);
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng.engine());
        const std::size_t n_train = n * 6 / 10;
        const std::size_t n_val = n * 2 / 10;
        result.train_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
        result.val_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                               order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
        result.test_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());

        RMatrix features(static_cast<Eigen::Index>(n), 2 * spec.n());
        for (std::size_t i = 0; i < n; ++i)
            features.row(static_cast<Eigen::Index>(i)) = build_features(dataset[i]).transpose();

        // Augmented copies of the current training batch; consumed by the next loss call.
        std::vector<WaveformSample> relabeled;
        bool pending = false;
        nn::BatchHook hook;
        if (options.augment)
            hook = [&](RMatrix &x, std::span<const std::size_t> rows, Rng &r)
            {
                relabeled.resize(rows.size());
                for (std::size_t i = 0; i < rows.size(); ++i)
                {
                    relabeled[i] = relabel(dataset[rows[i]], r);
                    x.row(static_cast<Eigen::Index>(i)) = build_features(relabeled[i]).transpose();
                }
                pending = true;
            };

        std::vector<const WaveformSample *> ptrs;
        const nn::LossFn loss = [&](const RMatrix &out, std::span<const std::size_t> rows, RMatrix *grad)
        {
            ptrs.resize(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                ptrs[i] = pending ? &relabeled[i] : &dataset[rows[i]];
            pending = false;
            return raw_output_loss(out, ptrs, eta, options.total_power, grad);
        };

        Rng init(Rng::split_seed(options.train.seed, 0x5eed));
        result.model = spec.create(init);
        result.history = nn::train(result.model, features, result.train_rows, result.val_rows, loss, options.train, hook);
        return result;
    }

    std::vector<design::WaveformDesign> predict_waveforms(const nn::MlpModel &model,
                                                          std::span<const WaveformSample> samples, double total_power)
    {
        std::vector<design::WaveformDesign> out;
        if (samples.empty())
            return out;
        RMatrix features(static_cast<Eigen::Index>(samples.size()), model.input_dim());
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            const RVector f = build_features(samples[i]);
            if (f.size() != model.input_dim())
                fail("sample dimensions do not match the model input");
            features.row(static_cast<Eigen::Index>(i)) = f.transpose();
        }
        const RMatrix raw = model.predict(features);
        out.reserve(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            const RVector r = raw.row(static_cast<Eigen::Index>(i)).transpose();
            design::WaveformDesign w;
            w.X = power_projection({r.data(), static_cast<std::size_t>(r.size())}, samples[i].num_antennas(),
                                   samples[i].frame_length(), total_power);
            w.power = total_power;
            w.provenance = design::Provenance::learned;
            out.push_back(std::move(w));
        }
        return out;
    }

    design::WaveformDesign predict_waveform(const nn::MlpModel &model, const WaveformSample &sample, double total_power)
    {
        return predict_waveforms(model, std::span<const WaveformSample>(&sample, 1), total_power).front();
    }
}
