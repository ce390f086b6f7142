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

#ifndef ISAC_CHANNEL_HPP
#define ISAC_CHANNEL_HPP

#include <optional>
#include <span>
#include <vector>

#include "isac/rng.hpp"
#include "isac/types.hpp"

// Propagation objects: ULA steering vectors, Rician/Rayleigh user channels and
// Jakes-correlated channel aging.
namespace isac::channel
{
    struct ArrayGeometry
    {
        int num_antennas = 1;
        double spacing = 0.5; // in wavelengths

        void validate() const;
    };

    struct RicianParams
    {
        double rician_factor = 0.0;     // K_h, LoS-to-scatter power ratio
        double large_scale_gain = 1.0;  // linear
        double departure_angle = 0.0;   // radians, [-pi/2, pi/2]

        void validate() const;
    };

    // K x M matrix, row k is h_k^T.
    struct ChannelMatrix
    {
        CMatrix entries;
        std::vector<RicianParams> per_user;

        int num_users() const { return static_cast<int>(entries.rows()); }
        int num_antennas() const { return static_cast<int>(entries.cols()); }
    };

    struct AgingParams
    {
        double user_speed = 0.0;          // m/s
        double carrier_freq = 3.2e9;      // Hz
        double sample_period = 1e-3;      // s
        std::optional<double> mobility_phase; // radians in [-pi, pi]; drawn uniformly when unset

        void validate() const;
    };

    // Element m is exp(j 2 pi spacing m sin(theta)).
    CVector steering_vector(double theta, const ArrayGeometry &geom);

    CVector sample_user_channel(const RicianParams &params, const ArrayGeometry &geom, Rng &rng);

    ChannelMatrix sample_channel_matrix(std::span<const RicianParams> users, const ArrayGeometry &geom, Rng &rng);

    // i.i.d. CN(0, 1) entries.
    CVector sample_rayleigh(int dim, Rng &rng);

    // Zeroth-order Bessel function of the first kind.
    double bessel_j0(double x);

    // J0(2 pi f_D T_s) with f_D = v f_c / c.
    double jakes_correlation(const AgingParams &aging);

    // One aging step of a Rician channel. The LoS part of `prev` is taken to be the
    // steering vector of params.departure_angle.
    CVector age_channel(const CVector &prev, const RicianParams &params, const AgingParams &aging, Rng &rng,
                        const ArrayGeometry &geom);

    // Same step with an explicit correlation coefficient and LoS phase; used by the
    // aging experiment and by tests that pin chi directly.
    CVector age_channel_with(const CVector &prev, const RicianParams &params, double chi, double los_phase,
                             Rng &rng, const ArrayGeometry &geom);

    // Log-distance stand-in for the large-scale gain: (d / d0)^(-exponent).
    double path_gain(double distance_m, double exponent = 3.0, double reference_m = 1.0);
}

#endif
