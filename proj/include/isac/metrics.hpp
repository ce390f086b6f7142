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

#ifndef ISAC_METRICS_HPP
#define ISAC_METRICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "isac/channel.hpp"
#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace isac::metrics
{
    struct RateReport
    {
        RVector per_user_sinr; // linear
        double sum_rate = 0.0; // bits per symbol
    };

    struct BeampatternCurve
    {
        std::vector<double> angles; // radians
        std::vector<double> gains;  // linear power
    };

    // Thresholds ascend; pfa and pd are nonincreasing along them.
    struct RocCurve
    {
        std::vector<double> thresholds;
        std::vector<double> pfa;
        std::vector<double> pd;
    };

    struct HybridRate
    {
        double nats = 0.0;
        double bits = 0.0;
    };

    // ||H X - D||_F^2
    double mui_power(const CMatrix &H, const CMatrix &X, const CMatrix &D);

    // SINR per user with the expectations taken as averages over the tau_d frame
    // columns. D is assumed to come from a unit-energy constellation.
    RVector per_user_sinr(const CMatrix &H, const CMatrix &X, const CMatrix &D, double noise_var);

    double sum_rate(std::span<const double> sinrs);
    RateReport rate_report(const RVector &sinrs);

    // channels is N x K with column k = h_k; F is N x L, W is L x K.
    HybridRate hybrid_sum_rate(const CMatrix &channels, const CMatrix &F, const CMatrix &W, double noise_var);

    // (1/tau_d) X X^H
    CMatrix waveform_covariance(const CMatrix &X);

    // P(theta) = v^H Sigma v, real part after Hermitian symmetrization.
    BeampatternCurve transmit_beampattern(const CMatrix &cov, std::span<const double> angles,
                                          const channel::ArrayGeometry &geom);

    // Uniform angle grid in radians over [lo_deg, hi_deg] with the given step.
    std::vector<double> angle_grid_deg(double lo_deg, double hi_deg, double step_deg);

    // Indices of interior local maxima of a sampled curve, strongest first.
    std::vector<std::size_t> local_maxima(std::span<const double> values);

    // Unknown-amplitude matched-subspace GLRT. Z is the M x tau_d echo; with
    // s = v^T X the statistic is |v^H Z s^H|^2 / (sigma^2 ||v||^2 ||s||^2), which
    // is Exp(1) under H0.
    double glrt_statistic(const CMatrix &echo, double target_angle, const CMatrix &X, double noise_var,
                          const channel::ArrayGeometry &geom);

    // Monostatic echo Z = alpha v a^T X + N (a = v) or Z = N when the target is absent.
    CMatrix simulate_echo(const CMatrix &X, double target_angle, cdouble amplitude, double noise_var, bool target_present,
                          const channel::ArrayGeometry &geom, Rng &rng);

    RocCurve roc_curve(std::span<const double> stats_h0, std::span<const double> stats_h1, int num_thresholds);

    // Detection probability at a false-alarm level, using the empirical H0 quantile
    // as threshold.
    double pd_at_pfa(std::span<const double> stats_h0, std::span<const double> stats_h1, double pfa);

    // Linear interpolation of an ROC at a false-alarm level.
    double interpolate_pd(const RocCurve &roc, double pfa);

    // Modified Cramer-Rao bounds for phase and normalized frequency.
    double mcrb_phase(double es_over_n0, int num_samples);
    double mcrb_freq(double es_over_n0, int num_samples);

    struct RadarResolution
    {
        double range_m = 0.0;
        double velocity_mps = 0.0;
        double angle_rad = 0.0;
    };

    RadarResolution radar_resolutions(double bandwidth_hz, double wavelength_m, int pulses, double pri_s,
                                      double aperture_m);

    struct EstimationRateBounds
    {
        double mi_lower_bound = 0.0;       // bits, clamped at 0
        double rate_from_distortion = 0.0; // bits
        bool clamped = false;              // distortion exceeded the prior variance
    };

    EstimationRateBounds estimation_rate_bounds(double prior_var, double distortion);

    double ser(std::span<const int> true_labels, std::span<const int> decisions);
    double ber(std::span<const std::uint8_t> true_bits, std::span<const std::uint8_t> decided_bits);

    // Gaussian tail probability.
    double qfunc(double x);
}

#endif
