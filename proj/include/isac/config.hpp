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
#ifndef ISAC_CONFIG_HPP
#define ISAC_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace isac::config
{
    enum class Experiment
    {
        mi_mmse,
        case1_rate,
        case1_roc,
        case1_beampattern,
        case1_aging,
        case2_convergence,
        case2_snr,
        case3_sweep,
    };

    const char *experiment_name(Experiment e);
    std::optional<Experiment> parse_experiment(std::string_view name);
    const std::vector<Experiment> &all_experiments();

    enum class ParamKind
    {
        integer,
        real,
        boolean,
        choice,
        text,
        real_list,
        choice_list,
    };

    struct ParamSpec
    {
        std::string name;
        ParamKind kind = ParamKind::real;
        nlohmann::json default_value;
        double min = 0.0; // inclusive, numeric kinds and list elements
        double max = 0.0;
        std::vector<std::string> choices;
        std::string doc;
    };

    const std::vector<ParamSpec> &schema(Experiment e);

    struct Diagnostic
    {
        std::string field; // dotted path, e.g. "params.eta"
        int line = 0;      // 1-based; 0 when the field is absent from the file
        std::string message;
        std::string to_string() const;
    };

    struct ExperimentConfig
    {
        Experiment experiment = Experiment::mi_mmse;
        std::uint64_t seed = 0;
        std::string output_dir = "out";
        int threads = 1;
        nlohmann::json params; // every schema entry present, defaults filled in

        long long integer(const std::string &name) const;
        double real(const std::string &name) const;
        bool flag(const std::string &name) const;
        std::string text(const std::string &name) const;
        std::vector<double> reals(const std::string &name) const;
        std::vector<std::string> texts(const std::string &name) const;
        nlohmann::json to_json() const;
    };

    struct Overrides
    {
        std::optional<std::uint64_t> seed;
        std::optional<std::string> output_dir;
        std::optional<int> threads;
    };

    struct ParseResult
    {
        std::optional<ExperimentConfig> config;
        std::vector<Diagnostic> diagnostics;
        bool ok() const { return config.has_value() && diagnostics.empty(); }
    };

    ParseResult parse_config_text(const std::string &text, const Overrides &overrides = {});
    ParseResult load_config(const std::string &path, const Overrides &overrides = {});
}

#endif
