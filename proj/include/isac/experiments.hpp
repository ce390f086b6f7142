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
#ifndef ISAC_EXPERIMENTS_HPP
#define ISAC_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isac/config.hpp"

namespace isac::experiments
{
    struct RunRecord
    {
        nlohmann::json config;
        std::string version;
        double wall_time_s = 0.0;
        std::vector<std::string> files; // relative to the output directory
        nlohmann::json summary = nlohmann::json::object();
        std::vector<std::string> warnings;
        nlohmann::json to_json() const;
    };

    const char *toolkit_version();

    // Runs the configured experiment, writes its CSVs into cfg.output_dir and then
    // run_record.json (always last).
    RunRecord run(const config::ExperimentConfig &cfg);

    inline constexpr const char *record_file = "run_record.json";
}

#endif
