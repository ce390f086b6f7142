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
#include "isac/neural.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace isac::nn
{
    namespace
    {
        constexpr char kMagic[8] = {'I', 'S', 'A', 'C', 'M', 'L', 'P', '1'};
        constexpr std::uint32_t kFormatVersion = 1;

        void add_bias(RMatrix &z, const RVector &b) { z.rowwise() += b.transpose(); }
    }

    const char *activation_name(Activation a)
    {
        switch (a)
        {
        case Activation::linear:
            return "linear";
        case Activation::relu:
            return "relu";
        case Activation::tanh:
            return "tanh";
        case Activation::sigmoid:
            return "sigmoid";
        case Activation::softmax:
            return "softmax";
        }
        return "unknown";
    }

    MlpModel::MlpModel(std::vector<DenseLayer> layers) : layers_(std::move(layers)) { check_chain(); }

    void MlpModel::check_chain() const
    {
        if (layers_.empty())
            fail("model needs at least one layer");
        for (std::size_t l = 0; l < layers_.size(); ++l)
        {
            const auto &L = layers_[l];
            if (L.weight.rows() == 0 || L.weight.cols() == 0 || L.bias.size() != L.weight.cols())
                fail("layer " + std::to_string(l) + " has inconsistent shapes");
            if (l > 0 && layers_[l - 1].fan_out() != L.fan_in())
                fail("layer " + std::to_string(l) + " does not chain with its predecessor");
            if (static_cast<std::uint32_t>(L.act) > static_cast<std::uint32_t>(Activation::softmax))
                fail("unknown activation tag");
        }
    }

    MlpModel MlpModel::create(std::span<const int> widths, std::span<const Activation> acts, Rng &rng)
    {
        if (widths.size() < 2 || acts.size() != widths.size() - 1)
            fail("need one activation per layer");
        std::vector<DenseLayer> layers;
        for (std::size_t l = 0; l + 1 < widths.size(); ++l)
        {
            if (widths[l] < 1 || widths[l + 1] < 1)
                fail("layer widths must be positive");
            DenseLayer L;
            const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
            L.weight.resize(widths[l], widths[l + 1]);
            L.bias.resize(widths[l + 1]);
            for (Eigen::Index j = 0; j < L.weight.cols(); ++j)
                for (Eigen::Index i = 0; i < L.weight.rows(); ++i)
                    L.weight(i, j) = rng.uniform(-bound, bound);
            for (Eigen::Index j = 0; j < L.bias.size(); ++j)
                L.bias(j) = rng.uniform(-bound, bound);
            L.act = acts[l];
            layers.push_back(std::move(L));
        }
        return MlpModel(std::move(layers));
    }

    int MlpModel::input_dim() const { return layers_.empty() ? 0 : layers_.front().fan_in(); }
    int MlpModel::output_dim() const { return layers_.empty() ? 0 : layers_.back().fan_out(); }

    std::size_t MlpModel::num_parameters() const
    {
        std::size_t n = 0;
        for (const auto &L : layers_)
            n += static_cast<std::size_t>(L.weight.size() + L.bias.size());
        return n;
    }

    RMatrix apply_activation(Activation act, const RMatrix &z)
    {
        switch (act)
        {
        case Activation::linear:
            return z;
        case Activation::relu:
            return z.cwiseMax(0.0);
        case Activation::tanh:
            return z.array().tanh().matrix();
        case Activation::sigmoid:
            return (1.0 / (1.0 + (-z.array()).exp())).matrix();
        case Activation::softmax:
        {
            RMatrix out = z.colwise() - z.rowwise().maxCoeff();
            out = out.array().exp().matrix();
            const RVector sums = out.rowwise().sum();
            for (Eigen::Index i = 0; i < out.rows(); ++i)
                out.row(i) /= sums(i);
            return out;
        }
        }
        fail("unknown activation");
    }

    RMatrix MlpModel::predict(const RMatrix &batch) const
    {
        if (batch.cols() != input_dim())
            fail("batch width " + std::to_string(batch.cols()) + " does not match model input " +
                 std::to_string(input_dim()));
        RMatrix a = batch;
        for (const auto &L : layers_)
        {
            RMatrix z = a * L.weight;
            add_bias(z, L.bias);
            a = apply_activation(L.act, z);
        }
        return a;
    }

    ForwardCache forward(const MlpModel &model, const RMatrix &batch)
    {
        if (batch.cols() != model.input_dim())
            fail("batch width does not match model input");
        ForwardCache cache;
        cache.inputs.reserve(model.layers().size());
        cache.pre.reserve(model.layers().size());
        RMatrix a = batch;
        for (const auto &L : model.layers())
        {
            RMatrix z = a * L.weight;
            add_bias(z, L.bias);
            cache.inputs.push_back(std::move(a));
            a = apply_activation(L.act, z);
            cache.pre.push_back(std::move(z));
        }
        cache.output = std::move(a);
        return cache;
    }

    Gradients Gradients::zeros_like(const MlpModel &model)
    {
        Gradients g;
        for (const auto &L : model.layers())
        {
            g.weight.push_back(RMatrix::Zero(L.weight.rows(), L.weight.cols()));
            g.bias.push_back(RVector::Zero(L.bias.size()));
        }
        return g;
    }

    void Gradients::add(const Gradients &other, double scale)
    {
        for (std::size_t l = 0; l < weight.size(); ++l)
        {
            weight[l] += scale * other.weight[l];
            bias[l] += scale * other.bias[l];
        }
    }

    double Gradients::squared_norm() const
    {
        double s = 0.0;
        for (std::size_t l = 0; l < weight.size(); ++l)
            s += weight[l].squaredNorm() + bias[l].squaredNorm();
        return s;
    }

    Gradients backward(const MlpModel &model, const ForwardCache &cache, const RMatrix &upstream, Upstream kind)
    {
        const auto &layers = model.layers();
        if (cache.pre.size() != layers.size())
            fail("forward cache does not belong to this model");
        if (upstream.rows() != cache.output.rows() || upstream.cols() != cache.output.cols())
            fail("upstream gradient shape does not match the model output");

        Gradients g;
        g.weight.resize(layers.size());
        g.bias.resize(layers.size());
        RMatrix delta = upstream;
        for (std::size_t ll = layers.size(); ll-- > 0;)
        {
            const auto &L = layers[ll];
            const RMatrix &a = cache.activation(ll);
            const bool fused = kind == Upstream::preactivation && ll + 1 == layers.size();
            if (!fused)
            {
                switch (L.act)
                {
                case Activation::linear:
                    break;
                case Activation::relu:
                    delta = delta.cwiseProduct((cache.pre[ll].array() > 0.0).cast<double>().matrix());
                    break;
                case Activation::tanh:
                    delta = delta.cwiseProduct((1.0 - a.array().square()).matrix());
                    break;
                case Activation::sigmoid:
                    delta = delta.cwiseProduct((a.array() * (1.0 - a.array())).matrix());
                    break;
                case Activation::softmax:
                {
                    const RVector inner = delta.cwiseProduct(a).rowwise().sum();
                    delta = a.cwiseProduct(delta.colwise() - inner);
                    break;
                }
                }
            }
            g.weight[ll].noalias() = cache.inputs[ll].transpose() * delta;
            g.bias[ll] = delta.colwise().sum().transpose();
            RMatrix next = delta * L.weight.transpose();
            delta = std::move(next);
        }
        g.input = std::move(delta);
        return g;
    }

    Adam::Adam(const MlpModel &model, double lr, double beta1, double beta2, double eps)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps)
    {
        if (!(lr > 0.0))
            fail("learning rate must be positive");
        for (const auto &L : model.layers())
        {
            mw_.push_back(RMatrix::Zero(L.weight.rows(), L.weight.cols()));
            vw_.push_back(RMatrix::Zero(L.weight.rows(), L.weight.cols()));
            mb_.push_back(RVector::Zero(L.bias.size()));
            vb_.push_back(RVector::Zero(L.bias.size()));
        }
    }

    void Adam::step(MlpModel &model, const Gradients &grads)
    {
        auto &layers = model.layers();
        if (grads.weight.size() != layers.size() || mw_.size() != layers.size())
            fail("gradient does not match the model");
        ++steps_;
        const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
        const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
        const double step = lr_ * std::sqrt(c2) / c1;
        const double eps_hat = eps_ * std::sqrt(c2);
        for (std::size_t l = 0; l < layers.size(); ++l)
        {
            mw_[l] = beta1_ * mw_[l] + (1.0 - beta1_) * grads.weight[l];
            vw_[l] = beta2_ * vw_[l] + (1.0 - beta2_) * grads.weight[l].cwiseAbs2();
            layers[l].weight.array() -= step * mw_[l].array() / (vw_[l].array().sqrt() + eps_hat);
            mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * grads.bias[l];
            vb_[l] = beta2_ * vb_[l] + (1.0 - beta2_) * grads.bias[l].cwiseAbs2();
            layers[l].bias.array() -= step * mb_[l].array() / (vb_[l].array().sqrt() + eps_hat);
        }
    }

    namespace
    {
        RMatrix gather_rows(const RMatrix &m, std::span<const std::size_t> rows)
        {
            RMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
            for (std::size_t i = 0; i < rows.size(); ++i)
                out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
            return out;
        }

        double evaluate(const MlpModel &model, const RMatrix &features, std::span<const std::size_t> rows,
                        const LossFn &loss)
        {
            constexpr std::size_t chunk = 512;
            double total = 0.0;
            for (std::size_t start = 0; start < rows.size(); start += chunk)
            {
                const auto part = rows.subspan(start, std::min(chunk, rows.size() - start));
                total += loss(model.predict(gather_rows(features, part)), part, nullptr) * static_cast<double>(part.size());
            }
            return total / static_cast<double>(rows.size());
        }
    }

    TrainHistory train(MlpModel &model, const RMatrix &features, std::span<const std::size_t> train_rows,
                       std::span<const std::size_t> val_rows, const LossFn &loss, const TrainConfig &config,
                       const BatchHook &hook)
    {
        if (train_rows.empty())
            fail("training set is empty");
        if (config.epochs < 1 || config.batch_size < 1 || !(config.lr > 0.0))
            fail("invalid training configuration");
        if (features.cols() != model.input_dim())
            fail("feature width does not match the model input");

        Rng rng(config.seed);
        Adam adam(model, config.lr);
        std::vector<std::size_t> order(train_rows.begin(), train_rows.end());
        TrainHistory hist;
        MlpModel best = model;
        double best_loss = std::numeric_limits<double>::infinity();
        int since_best = 0;
        const auto batch = static_cast<std::size_t>(config.batch_size);

        for (int epoch = 0; epoch < config.epochs; ++epoch)
        {
            std::shuffle(order.begin(), order.end(), rng.engine());
            double epoch_loss = 0.0;
            for (std::size_t start = 0; start < order.size(); start += batch)
            {
                const std::span<const std::size_t> rows(order.data() + start, std::min(batch, order.size() - start));
                RMatrix x = gather_rows(features, rows);
                if (hook)
                    hook(x, rows, rng);
                const ForwardCache cache = forward(model, x);
                RMatrix grad;
                const double l = loss(cache.output, rows, &grad);
                if (!std::isfinite(l))
                    fail_numerical("training loss is not finite at epoch " + std::to_string(epoch));
                epoch_loss += l * static_cast<double>(rows.size());
                adam.step(model, backward(model, cache, grad));
            }
            hist.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));

            double monitored = hist.train_loss.back();
            if (!val_rows.empty())
            {
                monitored = evaluate(model, features, val_rows, loss);
                hist.val_loss.push_back(monitored);
            }
            if (monitored < best_loss)
            {
                best_loss = monitored;
                best = model;
                hist.best_epoch = epoch;
                since_best = 0;
            }
            else if (config.early_stop_patience && ++since_best >= *config.early_stop_patience)
            {
                hist.stopped_early = true;
                break;
            }
        }
        model = std::move(best);
        return hist;
    }

    double softmax_cross_entropy(const RMatrix &probs, std::span<const int> labels, RMatrix *grad_pre)
    {
        if (static_cast<std::size_t>(probs.rows()) != labels.size() || probs.rows() == 0)
            fail("label count does not match the batch");
        const double n = static_cast<double>(probs.rows());
        double total = 0.0;
        for (Eigen::Index i = 0; i < probs.rows(); ++i)
        {
            const int y = labels[static_cast<std::size_t>(i)];
            if (y < 0 || y >= probs.cols())
                fail("label out of range");
            total -= std::log(std::max(probs(i, y), 1e-300));
        }
        if (grad_pre)
        {
            *grad_pre = probs / n;
            for (Eigen::Index i = 0; i < probs.rows(); ++i)
                (*grad_pre)(i, labels[static_cast<std::size_t>(i)]) -= 1.0 / n;
        }
        return total / n;
    }

    double sigmoid_binary_cross_entropy(const RMatrix &probs, std::span<const double> targets, RMatrix *grad_pre)
    {
        if (probs.cols() != 1 || static_cast<std::size_t>(probs.rows()) != targets.size() || probs.rows() == 0)
            fail("target count does not match the batch");
        const double n = static_cast<double>(probs.rows());
        double total = 0.0;
        for (Eigen::Index i = 0; i < probs.rows(); ++i)
        {
            const double p = std::clamp(probs(i, 0), 1e-12, 1.0 - 1e-12);
            const double t = targets[static_cast<std::size_t>(i)];
            total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
        }
        if (grad_pre)
        {
            grad_pre->resize(probs.rows(), 1);
            for (Eigen::Index i = 0; i < probs.rows(); ++i)
                (*grad_pre)(i, 0) = (probs(i, 0) - targets[static_cast<std::size_t>(i)]) / n;
        }
        return total / n;
    }

    void MlpModel::save(const std::string &path) const
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error(ErrorKind::io, "cannot open " + path + " for writing");
        auto put_u32 = [&](std::uint32_t v)
        { out.write(reinterpret_cast<const char *>(&v), sizeof v); };
        out.write(kMagic, sizeof kMagic);
        put_u32(kFormatVersion);
        put_u32(static_cast<std::uint32_t>(layers_.size()));
        for (const auto &L : layers_)
        {
            put_u32(static_cast<std::uint32_t>(L.fan_in()));
            put_u32(static_cast<std::uint32_t>(L.fan_out()));
            put_u32(static_cast<std::uint32_t>(L.act));
            for (Eigen::Index i = 0; i < L.weight.rows(); ++i)
                for (Eigen::Index j = 0; j < L.weight.cols(); ++j)
                {
                    const double v = L.weight(i, j);
                    out.write(reinterpret_cast<const char *>(&v), sizeof v);
                }
            out.write(reinterpret_cast<const char *>(L.bias.data()), static_cast<std::streamsize>(sizeof(double) * L.bias.size()));
        }
        if (!out)
            throw Error(ErrorKind::io, "write failed for " + path);
    }

    MlpModel MlpModel::load(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorKind::io, "cannot open " + path);
        char magic[8];
        in.read(magic, sizeof magic);
        if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
            throw Error(ErrorKind::io, path + " is not a model file");
        auto get_u32 = [&]
        {
            std::uint32_t v = 0;
            in.read(reinterpret_cast<char *>(&v), sizeof v);
            if (!in)
                throw Error(ErrorKind::io, "truncated model file " + path);
            return v;
        };
        if (get_u32() != kFormatVersion)
            throw Error(ErrorKind::io, "unsupported model format version in " + path);
        const std::uint32_t n = get_u32();
        if (n == 0 || n > 1024)
            throw Error(ErrorKind::io, "implausible layer count in " + path);
        std::vector<DenseLayer> layers(n);
        for (auto &L : layers)
        {
            const std::uint32_t fin = get_u32();
            const std::uint32_t fout = get_u32();
            const std::uint32_t act = get_u32();
            if (fin == 0 || fout == 0 || fin > (1u << 24) || fout > (1u << 24) ||
                act > static_cast<std::uint32_t>(Activation::softmax))
                throw Error(ErrorKind::io, "corrupt layer header in " + path);
            L.act = static_cast<Activation>(act);
            L.weight.resize(fin, fout);
            for (Eigen::Index i = 0; i < L.weight.rows(); ++i)
                for (Eigen::Index j = 0; j < L.weight.cols(); ++j)
                    in.read(reinterpret_cast<char *>(&L.weight(i, j)), sizeof(double));
            L.bias.resize(fout);
            in.read(reinterpret_cast<char *>(L.bias.data()), static_cast<std::streamsize>(sizeof(double) * fout));
            if (!in)
                throw Error(ErrorKind::io, "truncated model file " + path);
        }
        return MlpModel(std::move(layers));
    }
}
