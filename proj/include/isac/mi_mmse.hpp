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
#ifndef ISAC_MI_MMSE_HPP
#define ISAC_MI_MMSE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "isac/rng.hpp"
#include "isac/types.hpp"

// Mutual information and MMSE of a scalar complex AWGN channel y = sqrt(snr) x + n,
// n ~ CN(0, 1). With this normalization dI/dsnr = MMSE (nats).
namespace isac::metrics
{
    struct MiMmsePoint
    {
        double snr = 0.0;         // linear
        double mutual_info = 0.0; // nats
        double mmse = 0.0;
    };

    struct DiscreteInput
    {
        std::string name;
        std::vector<cdouble> points;
        std::vector<double> probs;

        static DiscreteInput uniform(std::string name, std::vector<cdouble> points);
        static DiscreteInput bpsk();
        static DiscreteInput qpsk();

        // Throws unless probabilities sum to 1 and the average power is 1 (1e-9).
        void validate() const;
    };

    struct MiMmseOptions
    {
        int gh_order = 20;                  // per real dimension
        std::size_t mc_threshold = 64;      // constellations larger than this use Monte-Carlo
        std::size_t mc_samples = 1000000;
        std::uint64_t mc_seed = 1;
    };

    MiMmsePoint gaussian_mi_mmse(double snr);

    MiMmsePoint awgn_mi_mmse(const DiscreteInput &input, double snr, const MiMmseOptions &opts = {});

    MiMmsePoint awgn_mi_mmse_monte_carlo(const DiscreteInput &input, double snr, std::size_t samples, Rng &rng);

    // Nodes and weights for the weight exp(-t^2) (Golub-Welsch).
    void gauss_hermite(int order, std::vector<double> &nodes, std::vector<double> &weights);
}

#endif
