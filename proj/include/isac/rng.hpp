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

#ifndef ISAC_RNG_HPP
#define ISAC_RNG_HPP

#include <cstdint>
#include <functional>
#include <random>

#include "isac/types.hpp"

namespace isac
{
    // Seeded random source. Every stochastic routine takes one of these explicitly;
    // the same seed reproduces the same stream on one platform.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

        std::uint64_t seed() const { return seed_; }

        double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
        double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
        double normal() { return normal_(engine_); }
        std::uint64_t integer(std::uint64_t bound) { return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_); }
        bool bernoulli(double p) { return uniform() < p; }

        // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
        cdouble complex_normal(double variance = 1.0)
        {
            const double s = std::sqrt(0.5 * variance);
            const double re = normal();
            const double im = normal();
            return {s * re, s * im};
        }

        std::mt19937_64 &engine() { return engine_; }

        // Child stream for index i of a parallel loop; independent of how the loop is split.
        Rng child(std::uint64_t index) const { return Rng(split_seed(seed_, index)); }

        static std::uint64_t split_seed(std::uint64_t master, std::uint64_t index);

    private:
        std::uint64_t seed_;
        std::mt19937_64 engine_;
        std::normal_distribution<double> normal_{0.0, 1.0};
    };

    // Runs body(i) for i in [0, n) on up to `threads` workers. The body must only write
    // to slot i of its output, so results do not depend on the thread count.
    void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &body);

    // Process-wide default worker count used by Monte-Carlo loops (set by the CLI --threads flag).
    int default_threads();
    void set_default_threads(int threads);
}

#endif
