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
#ifndef ISAC_NEURAL_HPP
#define ISAC_NEURAL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isac/rng.hpp"
#include "isac/types.hpp"

// Small dense-network engine in double precision. A batch is a matrix with one
// sample per row.
namespace isac::nn
{
    enum class Activation : std::uint32_t
    {
        linear = 0,
        relu = 1,
        tanh = 2,
        sigmoid = 3,
        softmax = 4,
    };

    const char *activation_name(Activation a);

    struct DenseLayer
    {
        RMatrix weight; // fan_in x fan_out
        RVector bias;   // fan_out
        Activation act = Activation::linear;

        int fan_in() const { return static_cast<int>(weight.rows()); }
        int fan_out() const { return static_cast<int>(weight.cols()); }
    };

    class MlpModel
    {
    public:
        MlpModel() = default;
        explicit MlpModel(std::vector<DenseLayer> layers);

        // widths = [in, h1, ..., out], one activation per layer. Weights and biases are
        // uniform in +-1/sqrt(fan_in).
        static MlpModel create(std::span<const int> widths, std::span<const Activation> acts, Rng &rng);

        const std::vector<DenseLayer> &layers() const { return layers_; }
        std::vector<DenseLayer> &layers() { return layers_; }
        int input_dim() const;
        int output_dim() const;
        std::size_t num_parameters() const;

        RMatrix predict(const RMatrix &batch) const;

        void save(const std::string &path) const;
        static MlpModel load(const std::string &path);

    private:
        void check_chain() const;
        std::vector<DenseLayer> layers_;
    };

    struct ForwardCache
    {
        std::vector<RMatrix> inputs; // input to each layer
        std::vector<RMatrix> pre;    // affine output of each layer
        RMatrix output;

        const RMatrix &activation(std::size_t layer) const { return layer + 1 < inputs.size() ? inputs[layer + 1] : output; }
    };

    ForwardCache forward(const MlpModel &model, const RMatrix &batch);

    struct Gradients
    {
        std::vector<RMatrix> weight;
        std::vector<RVector> bias;
        RMatrix input; // d loss / d batch

        static Gradients zeros_like(const MlpModel &model);
        void add(const Gradients &other, double scale = 1.0);
        double squared_norm() const;
    };

    // Upstream gradient is taken with respect to the final activation, or with
    // respect to its pre-activation when the loss fuses the last nonlinearity
    // (softmax + cross-entropy, sigmoid + binary cross-entropy).
    enum class Upstream
    {
        activation,
        preactivation,
    };

    Gradients backward(const MlpModel &model, const ForwardCache &cache, const RMatrix &upstream,
                       Upstream kind = Upstream::activation);

    RMatrix apply_activation(Activation act, const RMatrix &z);

    class Adam
    {
    public:
        explicit Adam(const MlpModel &model, double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

        void step(MlpModel &model, const Gradients &grads);

        long step_count() const { return steps_; }
        double learning_rate() const { return lr_; }
        void set_learning_rate(double lr) { lr_ = lr; }

    private:
        double lr_, beta1_, beta2_, eps_;
        long steps_ = 0;
        std::vector<RMatrix> mw_, vw_;
        std::vector<RVector> mb_, vb_;
    };

    struct TrainConfig
    {
        int epochs = 100;
        int batch_size = 32;
        double lr = 1e-3;
        std::optional<int> early_stop_patience;
        std::uint64_t seed = 0;
    };

    // Loss over a mini-batch. `rows` are the dataset rows behind each output row so
    // the callback can look up auxiliary data. Fills grad (same shape as outputs)
    // with d loss / d outputs when grad is not null.
    using LossFn = std::function<double(const RMatrix &outputs, std::span<const std::size_t> rows, RMatrix *grad)>;

    // Optional hook that rewrites the feature rows of a mini-batch before the forward
    // pass (data augmentation). It may also update per-row auxiliary data through
    // its own captures, keyed by the same rows.
    using BatchHook = std::function<void(RMatrix &features, std::span<const std::size_t> rows, Rng &rng)>;

    struct TrainHistory
    {
        std::vector<double> train_loss; // mean mini-batch loss per epoch
        std::vector<double> val_loss;   // empty when no validation rows
        int best_epoch = -1;
        bool stopped_early = false;
    };

    TrainHistory train(MlpModel &model, const RMatrix &features, std::span<const std::size_t> train_rows,
                       std::span<const std::size_t> val_rows, const LossFn &loss, const TrainConfig &config,
                       const BatchHook &hook = {});

    // Fused heads. Both return mean losses over the batch and gradients with respect
    // to the pre-activation of the final layer.
    double softmax_cross_entropy(const RMatrix &probs, std::span<const int> labels, RMatrix *grad_pre);
    double sigmoid_binary_cross_entropy(const RMatrix &probs, std::span<const double> targets, RMatrix *grad_pre);
}

#endif
