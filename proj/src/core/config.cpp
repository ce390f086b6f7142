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
#include "isac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "isac/types.hpp"

namespace isac::config
{
    using nlohmann::json;

    namespace
    {
        constexpr double big = 1e12;

        ParamSpec integer(std::string name, long long def, double lo, double hi, std::string doc)
        {
            return {std::move(name), ParamKind::integer, def, lo, hi, {}, std::move(doc)};
        }
        ParamSpec real(std::string name, double def, double lo, double hi, std::string doc)
        {
            return {std::move(name), ParamKind::real, def, lo, hi, {}, std::move(doc)};
        }
        ParamSpec boolean(std::string name, bool def, std::string doc)
        {
            return {std::move(name), ParamKind::boolean, def, 0, 0, {}, std::move(doc)};
        }
        ParamSpec choice(std::string name, std::string def, std::vector<std::string> choices, std::string doc)
        {
            return {std::move(name), ParamKind::choice, def, 0, 0, std::move(choices), std::move(doc)};
        }
        ParamSpec text(std::string name, std::string def, std::string doc)
        {
            return {std::move(name), ParamKind::text, def, 0, 0, {}, std::move(doc)};
        }
        ParamSpec reals(std::string name, std::vector<double> def, double lo, double hi, std::string doc)
        {
            return {std::move(name), ParamKind::real_list, def, lo, hi, {}, std::move(doc)};
        }
        ParamSpec choices(std::string name, std::vector<std::string> def, std::vector<std::string> allowed,
                          std::string doc)
        {
            return {std::move(name), ParamKind::choice_list, def, 0, 0, std::move(allowed), std::move(doc)};
        }

        // Shared by the three Case I experiments that train a waveform network.
        std::vector<ParamSpec> waveform_net_params(int antennas, int epochs)
        {
            return {
                integer("num_antennas", antennas, 2, 64, "transmit antennas M"),
                integer("num_users", 2, 1, 16, "users K"),
                integer("frame_length", 8, 1, 64, "frame length tau_d"),
                real("total_power", 1.0, 1e-6, 1e6, "P_T in W"),
                real("rician_min", 1.0, 0.0, 100.0, "K_h drawn uniformly in [rician_min, rician_max]"),
                real("rician_max", 3.0, 0.0, 100.0, ""),
                integer("samples", 2000, 20, 1e7, "dataset size before the 60/20/20 split"),
                real("eta", 0.2, 0.0, 1.0, "weight on MUI in the training loss"),
                integer("epochs", epochs, 1, 1e6, ""),
                integer("batch_size", 32, 1, 1e6, ""),
                real("lr", 1e-3, 1e-9, 1.0, "Adam learning rate"),
                integer("patience", 20, 0, 1e6, "early stopping on validation loss; 0 disables"),
                boolean("augment", false, "symbol relabeling augmentation of training batches"),
                integer("test_channels", 200, 1, 1e7, "held-out channels used for evaluation"),
                text("dataset_cache", "", "binary dataset cache; loaded if present, written otherwise"),
            };
        }

        std::vector<ParamSpec> pga_params()
        {
            return {
                integer("num_antennas", 16, 1, 256, "N"),
                integer("num_rf", 6, 1, 64, "RF chains L"),
                integer("num_users", 4, 1, 64, "K"),
                integer("layers", 10, 1, 1000, "unrolled layers I"),
                integer("train_channels", 1000, 1, 1e7, ""),
                integer("validation_channels", 100, 0, 1e7, "0 selects on the training loss"),
                integer("test_channels", 100, 1, 1e7, ""),
                real("lr", 0.005, 1e-9, 10.0, "SGD learning rate"),
                integer("epochs", 20, 1, 1e6, ""),
                integer("batch_size", 50, 1, 1e7, ""),
                real("init_step", 0.05, 0.0, 100.0, "initial unrolled step sizes"),
                real("fixed_step", 0.05, 0.0, 100.0, "step size of the PGA baseline"),
                real("fd_epsilon", 1e-4, 1e-10, 1.0, "central difference step"),
                real("max_grad_norm", 1.0, 1e-9, big, "SGD gradient norm clip"),
                choice("weighting", "log_natural", {"log_natural", "log2", "uniform"}, "per-layer loss weights"),
                real("noise_var", 1.0, 1e-12, big, "sigma_n^2; P_t = noise_var 10^(snr/10)"),
            };
        }

        std::map<Experiment, std::vector<ParamSpec>> build_schemas()
        {
            std::map<Experiment, std::vector<ParamSpec>> s;
            s[Experiment::mi_mmse] = {
                real("snr_db_min", -10.0, -60.0, 60.0, ""),
                real("snr_db_max", 20.0, -60.0, 60.0, ""),
                real("snr_db_step", 0.5, 1e-3, 60.0, ""),
                choices("inputs", {"gaussian", "bpsk", "qpsk"}, {"gaussian", "bpsk", "qpsk", "qam16"}, ""),
                integer("gh_order", 20, 4, 64, "Gauss-Hermite order per real dimension"),
                real("fd_rel_step", 1e-4, 1e-8, 1e-2, "relative SNR step for the I-MMSE derivative check"),
            };

            auto rate = waveform_net_params(8, 300);
            rate.push_back(reals("snr_db", {-2, 0, 2, 4, 6, 8, 10, 12}, -40.0, 60.0, "evaluation SNRs P_T / sigma^2"));
            rate.push_back(real("gap_snr_db", 10.0, -40.0, 60.0, "SNR of the reported learned-vs-exact gap"));
            rate.push_back(choice("reference", "omni", {"omni", "directional"}, "covariance behind X0"));
            s[Experiment::case1_rate] = rate;

            s[Experiment::case1_roc] = {
                integer("num_antennas", 8, 2, 64, "baseline M; the doubled array uses 2M"),
                integer("num_users", 4, 1, 16, ""),
                integer("frame_length", 16, 1, 256, ""),
                real("total_power", 1.0, 1e-6, 1e6, ""),
                real("rician_min", 1.0, 0.0, 100.0, ""),
                real("rician_max", 3.0, 0.0, 100.0, ""),
                reals("etas", {0.2, 0.5}, 0.0, 1.0, "trade-off weights compared at the baseline M"),
                real("doubled_eta", 0.2, 0.0, 1.0, "weight used for the M vs 2M comparison"),
                choice("reference", "directional", {"omni", "directional"}, ""),
                real("target_angle_deg", 0.0, -90.0, 90.0, ""),
                real("echo_snr", 0.004, 1e-9, 1e6, "|alpha|^2 / sigma^2 of the monostatic echo"),
                integer("trials", 100000, 100, 1e9, "Monte-Carlo trials per hypothesis and curve"),
                integer("thresholds", 201, 3, 1e6, ""),
                integer("waveform_pool", 200, 1, 1e6, "channel draws cycled through the trials"),
                real("pfa", 0.2, 1e-6, 0.999999, "false-alarm level of the reported Pd"),
            };

            auto bp = waveform_net_params(10, 150);
            bp.push_back(reals("targets_deg", {-60, 0, 60}, -90.0, 90.0, ""));
            bp.push_back(real("mask_width_deg", 10.0, 0.1, 90.0, ""));
            bp.push_back(real("grid_step_deg", 1.0, 0.01, 10.0, "design grid"));
            bp.push_back(real("plot_step_deg", 0.1, 0.001, 10.0, "output grid"));
            s[Experiment::case1_beampattern] = bp;

            auto aging = waveform_net_params(8, 150);
            aging.push_back(integer("mismatch_users", 4, 2, 16, "users of the mismatched topology"));
            aging.push_back(real("user_speed", 2.0, 0.0, 1e3, "m/s"));
            aging.push_back(real("carrier_freq", 3.2e9, 1e6, 1e12, "Hz"));
            aging.push_back(real("sample_period", 1e-3, 1e-9, 10.0, "s"));
            aging.push_back(reals("snr_db", {0, 2, 4, 6, 8, 10, 12}, -40.0, 60.0, ""));
            aging.push_back(real("eval_snr_db", 6.0, -40.0, 60.0, "SNR of the reported degradations"));
            s[Experiment::case1_aging] = aging;

            auto conv = pga_params();
            conv.push_back(real("snr_db", 10.0, -40.0, 60.0, ""));
            conv.push_back(integer("max_fixed_layers", 200, 1, 1e5, "horizon of the fixed-step PGA curve"));
            conv.push_back(real("plateau_tolerance", 0.01, 0.0, 1.0, "relative distance to the final rate"));
            s[Experiment::case2_convergence] = conv;

            auto snr = pga_params();
            snr.push_back(reals("snr_db", {-5, 0, 5, 10}, -40.0, 60.0, "a schedule is trained per SNR"));
            s[Experiment::case2_snr] = snr;

            s[Experiment::case3_sweep] = {
                integer("bits", 5, 1, 8, "message bits K; M = 2^K"),
                reals("etas", {0.05, 0.7, 0.9}, 0.0, 1.0, "weight on the radar loss"),
                integer("runs", 3, 1, 100, "training seeds averaged per eta"),
                integer("epochs", 50, 1, 1e6, ""),
                integer("samples_per_epoch", 100000, 1, 1e9, ""),
                integer("batch_size", 1000, 1, 1e8, ""),
                real("lr", 1e-3, 1e-9, 1.0, ""),
                choice("head", "softmax", {"softmax", "per_bit_sigmoid"}, "communication decoder output"),
                boolean("calibrate", true, "solve noise levels from the PSK baseline"),
                real("comm_noise_var", 0.0198, 1e-9, 1e6, "used when calibrate is false"),
                real("radar_noise_var", 0.1, 1e-9, 1e6, "used when calibrate is false"),
                real("posterior_threshold", 0.83, 0.0, 1.0, "used when calibrate is false"),
                real("target_log10_ser", -0.49, -10.0, 0.0, "PSK calibration target"),
                real("target_pd", 0.935, 0.0, 1.0, ""),
                real("target_pfa", 0.0085, 0.0, 1.0, ""),
                integer("calibration_trials", 200000, 1000, 1e9, ""),
                integer("trials", 200000, 1000, 1e9, "evaluation trials per constellation"),
            };
            return s;
        }

        const std::map<Experiment, std::vector<ParamSpec>> &schemas()
        {
            static const auto s = build_schemas();
            return s;
        }

        const ParamSpec *find_spec(Experiment e, const std::string &name)
        {
            for (const auto &p : schema(e))
                if (p.name == name)
                    return &p;
            return nullptr;
        }

        // 1-based line of the first occurrence of "key" at or after `from`.
        int line_of(const std::string &text, const std::string &key, std::size_t from = 0)
        {
            const auto pos = text.find("\"" + key + "\"", from);
            if (pos == std::string::npos)
                return 0;
            return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
        }

        int line_of_offset(const std::string &text, std::size_t offset)
        {
            offset = std::min(offset, text.size());
            return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
        }

        std::string kind_name(ParamKind k)
        {
            switch (k)
            {
            case ParamKind::integer: return "an integer";
            case ParamKind::real: return "a number";
            case ParamKind::boolean: return "a boolean";
            case ParamKind::choice:
            case ParamKind::text: return "a string";
            case ParamKind::real_list: return "a list of numbers";
            case ParamKind::choice_list: return "a list of strings";
            }
            return "?";
        }

        std::string join(const std::vector<std::string> &v)
        {
            std::string out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out += (i ? ", " : "") + v[i];
            return out;
        }

        std::string number_text(double x)
        {
            std::ostringstream os;
            os << x;
            return os.str();
        }

        bool is_integral(const json &v)
        {
            if (v.is_number_integer())
                return true;
            if (!v.is_number_float())
                return false;
            const double d = v.get<double>();
            return std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15;
        }

        // Returns an error message, or empty when the value conforms.
        std::string check_value(const ParamSpec &spec, const json &v)
        {
            auto range = [&](double x) -> std::string
            {
                if (!std::isfinite(x) || x < spec.min || x > spec.max)
                    return "value " + number_text(x) + " is out of range [" + number_text(spec.min) + ", " +
                           number_text(spec.max) + "]";
                return {};
            };
            switch (spec.kind)
            {
            case ParamKind::integer:
                if (!is_integral(v))
                    return "expected " + kind_name(spec.kind);
                return range(v.get<double>());
            case ParamKind::real:
                if (!v.is_number())
                    return "expected " + kind_name(spec.kind);
                return range(v.get<double>());
            case ParamKind::boolean:
                return v.is_boolean() ? std::string{} : "expected " + kind_name(spec.kind);
            case ParamKind::text:
                return v.is_string() ? std::string{} : "expected " + kind_name(spec.kind);
            case ParamKind::choice:
                if (!v.is_string())
                    return "expected " + kind_name(spec.kind);
                if (std::find(spec.choices.begin(), spec.choices.end(), v.get<std::string>()) == spec.choices.end())
                    return "unknown value '" + v.get<std::string>() + "' (expected one of " + join(spec.choices) + ")";
                return {};
            case ParamKind::real_list:
                if (!v.is_array() || v.empty())
                    return "expected a non-empty list of numbers";
                for (const auto &x : v)
                {
                    if (!x.is_number())
                        return "expected a non-empty list of numbers";
                    if (auto e = range(x.get<double>()); !e.empty())
                        return e;
                }
                return {};
            case ParamKind::choice_list:
                if (!v.is_array() || v.empty())
                    return "expected a non-empty list of strings";
                for (const auto &x : v)
                {
                    if (!x.is_string())
                        return "expected a non-empty list of strings";
                    if (std::find(spec.choices.begin(), spec.choices.end(), x.get<std::string>()) == spec.choices.end())
                        return "unknown value '" + x.get<std::string>() + "' (expected one of " + join(spec.choices) +
                               ")";
                }
                return {};
            }
            return {};
        }

        void cross_checks(const ExperimentConfig &c, const std::string &text, std::size_t params_at,
                          std::vector<Diagnostic> &diags)
        {
            auto add = [&](const std::string &key, const std::string &msg)
            { diags.push_back({"params." + key, line_of(text, key, params_at), msg}); };
            const auto &p = c.params;
            if (p.contains("rician_min") && p["rician_min"].get<double>() > p["rician_max"].get<double>())
                add("rician_min", "must not exceed rician_max");
            if (c.experiment == Experiment::mi_mmse && p["snr_db_min"].get<double>() >= p["snr_db_max"].get<double>())
                add("snr_db_min", "must be below snr_db_max");
            if (p.contains("test_channels") && p.contains("samples") &&
                p["test_channels"].get<long long>() > p["samples"].get<long long>() / 5)
                add("test_channels", "exceeds the 20% test split of samples");
            if (p.contains("mismatch_users") && p["mismatch_users"].get<long long>() <= p["num_users"].get<long long>())
                add("mismatch_users", "must exceed num_users");
            if (p.contains("num_rf") &&
                (p["num_rf"].get<long long>() < p["num_users"].get<long long>() ||
                 p["num_rf"].get<long long>() > p["num_antennas"].get<long long>()))
                add("num_rf", "must satisfy num_users <= num_rf <= num_antennas");
        }
    }

    const char *experiment_name(Experiment e)
    {
        switch (e)
        {
        case Experiment::mi_mmse: return "mi_mmse";
        case Experiment::case1_rate: return "case1_rate";
        case Experiment::case1_roc: return "case1_roc";
        case Experiment::case1_beampattern: return "case1_beampattern";
        case Experiment::case1_aging: return "case1_aging";
        case Experiment::case2_convergence: return "case2_convergence";
        case Experiment::case2_snr: return "case2_snr";
        case Experiment::case3_sweep: return "case3_sweep";
        }
        return "?";
    }

    const std::vector<Experiment> &all_experiments()
    {
        static const std::vector<Experiment> all{
            Experiment::mi_mmse,          Experiment::case1_rate, Experiment::case1_roc,
            Experiment::case1_beampattern, Experiment::case1_aging, Experiment::case2_convergence,
            Experiment::case2_snr,        Experiment::case3_sweep,
        };
        return all;
    }

    std::optional<Experiment> parse_experiment(std::string_view name)
    {
        for (auto e : all_experiments())
            if (name == experiment_name(e))
                return e;
        return std::nullopt;
    }

    const std::vector<ParamSpec> &schema(Experiment e) { return schemas().at(e); }

    std::string Diagnostic::to_string() const
    {
        std::string out = line > 0 ? "line " + std::to_string(line) + ": " : std::string{};
        if (!field.empty())
            out += field + ": ";
        return out + message;
    }

    long long ExperimentConfig::integer(const std::string &name) const
    {
        return static_cast<long long>(std::llround(params.at(name).get<double>()));
    }
    double ExperimentConfig::real(const std::string &name) const { return params.at(name).get<double>(); }
    bool ExperimentConfig::flag(const std::string &name) const { return params.at(name).get<bool>(); }
    std::string ExperimentConfig::text(const std::string &name) const { return params.at(name).get<std::string>(); }
    std::vector<double> ExperimentConfig::reals(const std::string &name) const
    {
        return params.at(name).get<std::vector<double>>();
    }
    std::vector<std::string> ExperimentConfig::texts(const std::string &name) const
    {
        return params.at(name).get<std::vector<std::string>>();
    }

    json ExperimentConfig::to_json() const
    {
        return json{{"experiment", experiment_name(experiment)},
                    {"seed", seed},
                    {"output_dir", output_dir},
                    {"threads", threads},
                    {"params", params}};
    }

    ParseResult parse_config_text(const std::string &text, const Overrides &overrides)
    {
        ParseResult result;
        auto &diags = result.diagnostics;
        json root;
        try
        {
            root = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            diags.push_back({"", line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), std::string("syntax error: ") + e.what()});
            return result;
        }
        if (!root.is_object())
        {
            diags.push_back({"", 1, "top level must be an object"});
            return result;
        }

        static const std::vector<std::string> known{"experiment", "seed", "output_dir", "threads", "params", "description"};
        for (const auto &[key, value] : root.items())
            if (std::find(known.begin(), known.end(), key) == known.end())
                diags.push_back({key, line_of(text, key), "unknown field"});

        ExperimentConfig cfg;
        bool have_experiment = false;
        if (!root.contains("experiment"))
            diags.push_back({"experiment", 0, "missing required field"});
        else if (!root["experiment"].is_string())
            diags.push_back({"experiment", line_of(text, "experiment"), "expected a string"});
        else if (auto e = parse_experiment(root["experiment"].get<std::string>()))
        {
            cfg.experiment = *e;
            have_experiment = true;
        }
        else
        {
            std::vector<std::string> names;
            for (auto x : all_experiments())
                names.emplace_back(experiment_name(x));
            diags.push_back({"experiment", line_of(text, "experiment"),
                             "unknown experiment '" + root["experiment"].get<std::string>() + "' (expected one of " +
                                 join(names) + ")"});
        }

        if (overrides.seed)
            cfg.seed = *overrides.seed;
        else if (!root.contains("seed"))
            diags.push_back({"seed", 0, "missing required field"});
        else if (!root["seed"].is_number_unsigned() && !(is_integral(root["seed"]) && root["seed"].get<double>() >= 0))
            diags.push_back({"seed", line_of(text, "seed"), "expected a non-negative integer"});
        else
            cfg.seed = root["seed"].is_number_unsigned() ? root["seed"].get<std::uint64_t>()
                                                         : static_cast<std::uint64_t>(root["seed"].get<double>());

        if (root.contains("output_dir"))
        {
            if (!root["output_dir"].is_string() || root["output_dir"].get<std::string>().empty())
                diags.push_back({"output_dir", line_of(text, "output_dir"), "expected a non-empty string"});
            else
                cfg.output_dir = root["output_dir"].get<std::string>();
        }
        if (overrides.output_dir)
            cfg.output_dir = *overrides.output_dir;

        if (root.contains("threads"))
        {
            const auto &t = root["threads"];
            if (!is_integral(t) || t.get<double>() < 1 || t.get<double>() > 1024)
                diags.push_back({"threads", line_of(text, "threads"), "expected an integer in [1, 1024]"});
            else
                cfg.threads = static_cast<int>(t.get<double>());
        }
        if (overrides.threads)
        {
            if (*overrides.threads < 1 || *overrides.threads > 1024)
                diags.push_back({"threads", 0, "override must lie in [1, 1024]"});
            else
                cfg.threads = *overrides.threads;
        }

        if (root.contains("description") && !root["description"].is_string())
            diags.push_back({"description", line_of(text, "description"), "expected a string"});

        const std::size_t params_at = text.find("\"params\"") == std::string::npos ? 0 : text.find("\"params\"");
        json given = json::object();
        if (root.contains("params"))
        {
            if (!root["params"].is_object())
                diags.push_back({"params", line_of(text, "params"), "expected an object"});
            else
                given = root["params"];
        }

        if (have_experiment)
        {
            for (const auto &[key, value] : given.items())
            {
                const ParamSpec *spec = find_spec(cfg.experiment, key);
                if (!spec)
                {
                    diags.push_back({"params." + key, line_of(text, key, params_at),
                                     std::string("unknown parameter for experiment ") + experiment_name(cfg.experiment)});
                    continue;
                }
                if (auto err = check_value(*spec, value); !err.empty())
                    diags.push_back({"params." + key, line_of(text, key, params_at), err});
            }
            cfg.params = json::object();
            for (const auto &spec : schema(cfg.experiment))
                cfg.params[spec.name] = given.contains(spec.name) ? given[spec.name] : spec.default_value;
            if (diags.empty())
                cross_checks(cfg, text, params_at, diags);
        }

        if (diags.empty())
            result.config = std::move(cfg);
        return result;
    }

    ParseResult load_config(const std::string &path, const Overrides &overrides)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
        {
            ParseResult r;
            r.diagnostics.push_back({"", 0, "cannot read config file " + path});
            return r;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config_text(ss.str(), overrides);
    }
}
