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

#include "isac/channel.hpp"

#include <cmath>

namespace isac::channel
{
    void ArrayGeometry::validate() const
    {
        if (num_antennas < 1)
            fail("array needs at least one antenna");
        if (!(spacing > 0.0))
            fail("antenna spacing must be positive");
    }

    void RicianParams::validate() const
    {
        if (!(rician_factor >= 0.0))
            fail("rician factor must be nonnegative");
        if (!(large_scale_gain > 0.0))
            fail("large-scale gain must be positive");
        if (std::abs(departure_angle) > 0.5 * pi + 1e-12)
            fail("departure angle must lie in [-pi/2, pi/2]");
    }

    void AgingParams::validate() const
    {
        if (!(user_speed >= 0.0))
            fail("user speed must be nonnegative");
        if (!(carrier_freq > 0.0))
            fail("carrier frequency must be positive");
        if (!(sample_period > 0.0))
            fail("sample period must be positive");
        if (mobility_phase && std::abs(*mobility_phase) > pi + 1e-12)
            fail("mobility phase must lie in [-pi, pi]");
    }

    CVector steering_vector(double theta, const ArrayGeometry &geom)
    {
        geom.validate();
        CVector v(geom.num_antennas);
        const double phase_step = 2.0 * pi * geom.spacing * std::sin(theta);
        for (int m = 0; m < geom.num_antennas; ++m)
            v(m) = std::polar(1.0, phase_step * m);
        return v;
    }

    CVector sample_user_channel(const RicianParams &params, const ArrayGeometry &geom, Rng &rng)
    {
        params.validate();
        const double kh = params.rician_factor;
        const double eta = params.large_scale_gain;
        const double los_w = std::sqrt(kh * eta / (kh + 1.0));
        const double nlos_w = std::sqrt(eta / (kh + 1.0));
        const CVector los = steering_vector(params.departure_angle, geom);
        CVector h(geom.num_antennas);
        for (int m = 0; m < geom.num_antennas; ++m)
            h(m) = los_w * los(m) + nlos_w * rng.complex_normal();
        return h;
    }

    ChannelMatrix sample_channel_matrix(std::span<const RicianParams> users, const ArrayGeometry &geom, Rng &rng)
    {
        if (users.empty())
            fail("no users");
        ChannelMatrix out;
        out.entries.resize(static_cast<Eigen::Index>(users.size()), geom.num_antennas);
        out.per_user.assign(users.begin(), users.end());
        for (std::size_t k = 0; k < users.size(); ++k)
            out.entries.row(static_cast<Eigen::Index>(k)) = sample_user_channel(users[k], geom, rng).transpose();
        return out;
    }

    CVector sample_rayleigh(int dim, Rng &rng)
    {
        if (dim < 1)
            fail("rayleigh channel dimension must be positive");
        CVector h(dim);
        for (int i = 0; i < dim; ++i)
            h(i) = rng.complex_normal();
        return h;
    }

    double bessel_j0(double x)
    {
        x = std::abs(x);
        if (x < 8.0)
        {
            // Power series: sum_k (-1)^k (x^2/4)^k / (k!)^2
            const double q = 0.25 * x * x;
            double term = 1.0;
            double sum = 1.0;
            for (int k = 1; k < 60; ++k)
            {
                term *= -q / (static_cast<double>(k) * k);
                sum += term;
                if (std::abs(term) < 1e-17 * std::abs(sum) && k > 5)
                    break;
            }
            return sum;
        }
        // Hankel asymptotic expansion, P and Q to several terms.
        const double z = 8.0 / x;
        const double z2 = z * z;
        const double p = 1.0 + z2 * (-0.1098628627e-2 + z2 * (0.2734510407e-4 + z2 * (-0.2073370639e-5 + z2 * 0.2093887211e-6)));
        const double q = -0.1562499995e-1 + z2 * (0.1430488765e-3 + z2 * (-0.6911147651e-5 + z2 * (0.7621095161e-6 - z2 * 0.934935152e-7)));
        const double xx = x - 0.25 * pi;
        return std::sqrt(2.0 / (pi * x)) * (std::cos(xx) * p - z * std::sin(xx) * q);
    }

    double jakes_correlation(const AgingParams &aging)
    {
        aging.validate();
        const double doppler = aging.user_speed * aging.carrier_freq / speed_of_light;
        return bessel_j0(2.0 * pi * doppler * aging.sample_period);
    }

    CVector age_channel_with(const CVector &prev, const RicianParams &params, double chi, double los_phase,
                             Rng &rng, const ArrayGeometry &geom)
    {
        params.validate();
        if (!(std::abs(chi) <= 1.0))
            fail("invalid correlation");
        if (prev.size() != geom.num_antennas)
            fail("channel length does not match the array");

        const double kh = params.rician_factor;
        const double eta = params.large_scale_gain;
        const double los_w = std::sqrt(kh * eta / (kh + 1.0));
        const double nlos_w = std::sqrt(eta / (kh + 1.0));
        const CVector los = steering_vector(params.departure_angle, geom);
        const cdouble rot = std::polar(1.0, los_phase);
        const double innovation_w = nlos_w * std::sqrt(std::max(0.0, 1.0 - chi * chi));

        // h[n] = rot a hbar + b (chi htilde[n-1] + sqrt(1-chi^2) e)
        //      = chi h[n-1] + (rot - chi) a hbar + b sqrt(1-chi^2) e
        // so chi = 1, rot = 1 returns prev unchanged.
        CVector out(prev.size());
        for (Eigen::Index m = 0; m < prev.size(); ++m)
        {
            const cdouble e = rng.complex_normal();
            out(m) = chi * prev(m) + (rot - chi) * los_w * los(m) + innovation_w * e;
        }
        return out;
    }

    CVector age_channel(const CVector &prev, const RicianParams &params, const AgingParams &aging, Rng &rng,
                        const ArrayGeometry &geom)
    {
        const double chi = jakes_correlation(aging);
        const double phase = aging.mobility_phase ? *aging.mobility_phase : rng.uniform(-pi, pi);
        return age_channel_with(prev, params, chi, phase, rng, geom);
    }

    double path_gain(double distance_m, double exponent, double reference_m)
    {
        if (!(distance_m > 0.0) || !(reference_m > 0.0))
            fail("distances must be positive");
        return std::pow(distance_m / reference_m, -exponent);
    }
}
