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
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isac/isac.h"

namespace
{
    // Process exit codes; 1 is left to CLI11 for usage errors.
    int exit_code(isac_status s)
    {
        switch (s)
        {
        case ISAC_OK: return 0;
        case ISAC_ERR_CONFIG: return 2;
        case ISAC_ERR_NUMERICAL: return 3;
        case ISAC_ERR_IO: return 4;
        case ISAC_ERR_INVALID_ARGUMENT: return 5;
        case ISAC_ERR_INTERNAL: return 6;
        }
        return 6;
    }

    struct Flags
    {
        std::string config_path;
        std::optional<std::uint64_t> seed;
        std::string out_dir;
        int threads = 0;
    };

    void add_common(CLI::App *cmd, Flags &f)
    {
        cmd->add_option("config", f.config_path, "experiment configuration (JSON)")->required();
        cmd->add_option("--seed", f.seed, "override the configured seed");
        cmd->add_option("--out", f.out_dir, "override the output directory");
        cmd->add_option("--threads", f.threads, "worker threads for Monte-Carlo and dataset loops")
            ->check(CLI::Range(1, 1024));
    }

    isac_overrides overrides_of(const Flags &f)
    {
        isac_overrides o{};
        if (f.seed)
        {
            o.has_seed = 1;
            o.seed = *f.seed;
        }
        o.output_dir = f.out_dir.empty() ? nullptr : f.out_dir.c_str();
        o.threads = f.threads;
        return o;
    }

    // Loads the config and prints diagnostics; returns null on failure.
    isac_config *load(const Flags &f, isac_status &status)
    {
        const isac_overrides o = overrides_of(f);
        isac_config *cfg = nullptr;
        isac_diagnostics *diags = nullptr;
        status = isac_config_load(f.config_path.c_str(), &o, &cfg, &diags);
        const size_t n = isac_diagnostics_count(diags);
        for (size_t i = 0; i < n; ++i)
            std::fprintf(stderr, "%s: %s\n", f.config_path.c_str(), isac_diagnostic_text(diags, i));
        if (status != ISAC_OK && n == 0)
            std::fprintf(stderr, "%s: %s\n", f.config_path.c_str(), isac_last_error());
        isac_diagnostics_free(diags);
        return cfg;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"isac: seeded experiment runner for integrated sensing and communication designs"};
    app.require_subcommand(1);

    Flags run_flags, validate_flags;
    auto *run = app.add_subcommand("run", "execute an experiment and write its CSVs and run record");
    add_common(run, run_flags);
    bool print_record = false;
    run->add_flag("--print-record", print_record, "print the run record JSON to stdout");
    auto *validate = app.add_subcommand("validate", "check a configuration without running it");
    add_common(validate, validate_flags);
    auto *version = app.add_subcommand("version", "print the toolkit version");

    CLI11_PARSE(app, argc, argv);

    if (version->parsed())
    {
        std::printf("isac %s\n", isac_version());
        return 0;
    }

    if (validate->parsed())
    {
        isac_status status = ISAC_OK;
        isac_config *cfg = load(validate_flags, status);
        if (!cfg)
            return exit_code(status);
        std::printf("%s: ok (%s)\n", validate_flags.config_path.c_str(), isac_config_experiment(cfg));
        isac_config_free(cfg);
        return 0;
    }

    isac_status status = ISAC_OK;
    isac_config *cfg = load(run_flags, status);
    if (!cfg)
        return exit_code(status);
    isac_run_record *record = nullptr;
    status = isac_run(cfg, &record);
    if (status != ISAC_OK)
    {
        std::fprintf(stderr, "isac run: %s: %s\n", isac_status_string(status), isac_last_error());
        isac_config_free(cfg);
        return exit_code(status);
    }
    const std::string dir = isac_config_output_dir(cfg);
    if (print_record)
        std::printf("%s\n", isac_run_record_json(record));
    else
    {
        for (size_t i = 0; i < isac_run_record_file_count(record); ++i)
            std::printf("wrote %s/%s\n", dir.c_str(), isac_run_record_file(record, i));
        std::printf("record %s/run_record.json (%.1f s)\n", dir.c_str(), isac_run_record_wall_time(record));
    }
    isac_run_record_free(record);
    isac_config_free(cfg);
    return 0;
}
