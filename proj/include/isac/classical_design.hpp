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
#ifndef ISAC_CLASSICAL_DESIGN_HPP
#define ISAC_CLASSICAL_DESIGN_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isac/metrics.hpp"
#include "isac/types.hpp"

// Model-based waveform baselines: sensing-centric (Procrustes) designs, the exact
// weighted-sum trade-off solver and its epsilon-constraint wrappers.
namespace isac::design
{
    struct CovarianceTemplate
    {
        CMatrix matrix; // M x M Hermitian PSD
        double power = 1.0;

        void validate() const;
    };

    enum class Provenance
    {
        omni,
        directional,
        tradeoff,
        epsilon_comm,
        epsilon_sens,
        learned,
        genie,
    };

    const char *provenance_name(Provenance p);

    struct WaveformDesign
    {
        CMatrix X; // M x tau_d
        double power = 1.0;
        Provenance provenance = Provenance::tradeoff;
        double weight = 0.0;                  // eta used by trade-off style designs
        double slack = 0.0;                   // epsilon designs: bound minus achieved constraint value
        std::vector<std::string> warnings;

        int num_antennas() const { return static_cast<int>(X.rows()); }
        int frame_length() const { return static_cast<int>(X.cols()); }
    };

    CovarianceTemplate reference_covariance_omni(double total_power, int num_antennas);

    struct DirectionalOptions
    {
        double mask_width_deg = 10.0;
        double grid_step_deg = 1.0;
        double grid_lo_deg = -90.0;
        double grid_hi_deg = 90.0;
        std::optional<double> mask_height; // defaults to M P_T / (number of targets)
        int max_iterations = 20000;
        double tolerance = 1e-9; // on the Frobenius step, relative to P_T
    };

    // Desired beampattern used by directional_covariance, on the options' grid.
    std::vector<double> directional_mask(std::span<const double> target_angles, double total_power, int num_antennas,
                                         const DirectionalOptions &opts);

    // Sum over the grid of (mask - v^H C v)^2.
    double directional_objective(const CMatrix &cov, std::span<const double> target_angles, double total_power,
                                 const DirectionalOptions &opts);

    CovarianceTemplate directional_covariance(std::span<const double> target_angles, double total_power,
                                              int num_antennas, const DirectionalOptions &opts = {});

    // Hermitian square root with negative eigenvalues clipped to zero.
    CMatrix hermitian_sqrt(const CMatrix &A);

    // Minimizes ||H X - D||_F over X with (1/tau_d) X X^H = C_D. H is K x M, D is K x tau_d.
    WaveformDesign procrustes_waveform(const CovarianceTemplate &cov, const CMatrix &H, const CMatrix &D, int frame_length,
                                       Provenance provenance = Provenance::omni);

    struct TradeoffTerms
    {
        double mui = 0.0;      // ||H X - D||^2
        double mismatch = 0.0; // ||X - X0||^2
    };

    TradeoffTerms tradeoff_terms(const CMatrix &H, const CMatrix &D, const CMatrix &X0, const CMatrix &X);

    // Global minimizer of eta ||HX - D||^2 + (1 - eta) ||X - X0||^2 on ||X||^2 = tau_d P_T.
    WaveformDesign tradeoff_design(const CMatrix &H, const CMatrix &D, const CMatrix &X0, double eta, double total_power,
                                   int frame_length);

    enum class EpsilonMode
    {
        comm_priority, // minimize MUI subject to ||X - X0||^2 <= eps
        sens_priority, // minimize ||X - X0||^2 subject to MUI <= eps
    };

    WaveformDesign epsilon_design(const CMatrix &H, const CMatrix &D, const CMatrix &X0, double epsilon, EpsilonMode mode,
                                  double total_power, int frame_length);

    // Zero-MUI bound: gamma_k = E|D_kq|^2 / sigma^2.
    metrics::RateReport genie_rate(const CMatrix &D, double noise_var);
}

#endif
