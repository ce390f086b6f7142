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
#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "isac/config.hpp"
#include "isac/csv.hpp"
#include "isac/experiments.hpp"

using namespace isac;
using namespace isac::config;

namespace
{
    bool has_field(const ParseResult &r, const std::string &field)
    {
        return std::any_of(r.diagnostics.begin(), r.diagnostics.end(), [&](const Diagnostic &d) { return d.field == field; });
    }

    std::string slurp(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
}

TEST_CASE("experiment names", "[config]")
{
    CHECK(all_experiments().size() == 8);
    for (auto e : all_experiments())
    {
        CHECK(parse_experiment(experiment_name(e)) == e);
        CHECK(!schema(e).empty());
    }
    CHECK(!parse_experiment("case4"));
}

TEST_CASE("valid configuration", "[config]")
{
    const auto r = parse_config_text(R"({"experiment": "case1_rate", "seed": 4, "params": {"eta": 0.7}})");
    REQUIRE(r.ok());
    CHECK(r.config->seed == 4);
    CHECK(r.config->real("eta") == 0.7);
    CHECK(r.config->integer("num_antennas") == 8);
    CHECK(r.config->reals("snr_db").size() == 8);
    CHECK(r.config->to_json()["params"]["batch_size"] == 32);

    Overrides o;
    o.seed = 11;
    o.output_dir = "elsewhere";
    o.threads = 2;
    const auto r2 = parse_config_text(R"({"experiment": "mi_mmse"})", o);
    REQUIRE(r2.ok());
    CHECK(r2.config->seed == 11);
    CHECK(r2.config->output_dir == "elsewhere");
    CHECK(r2.config->threads == 2);
}

TEST_CASE("shipped configurations load", "[config]")
{
    for (const auto &entry : std::filesystem::directory_iterator(ISAC_CONFIG_DIR))
    {
        const auto r = load_config(entry.path().string());
        INFO(entry.path().string());
        CHECK(r.ok());
    }
}

TEST_CASE("diagnostics", "[config]")
{
    SECTION("missing seed")
    {
        const auto r = parse_config_text(R"({"experiment": "mi_mmse"})");
        CHECK(!r.ok());
        CHECK(has_field(r, "seed"));
    }
    SECTION("trade-off weight out of range, with its line")
    {
        const auto r = parse_config_text("{\n  \"experiment\": \"case1_rate\",\n  \"seed\": 1,\n  \"params\": {\n    \"eta\": 1.5\n  }\n}");
        REQUIRE(!r.ok());
        REQUIRE(has_field(r, "params.eta"));
        for (const auto &d : r.diagnostics)
            if (d.field == "params.eta")
            {
                CHECK(d.line == 5);
                CHECK(d.to_string().rfind("line 5: params.eta:", 0) == 0);
            }
    }
    SECTION("unknown and mistyped keys")
    {
        const auto r = parse_config_text(R"({"experiment": "case2_snr", "seed": 1, "colour": 3, "params": {"layers": "ten", "foo": 1}})");
        CHECK(has_field(r, "colour"));
        CHECK(has_field(r, "params.layers"));
        CHECK(has_field(r, "params.foo"));
    }
    SECTION("cross checks")
    {
        CHECK(has_field(parse_config_text(R"({"experiment": "case1_rate", "seed": 1, "params": {"rician_min": 4, "rician_max": 2}})"),
                        "params.rician_min"));
        CHECK(has_field(parse_config_text(R"({"experiment": "case2_snr", "seed": 1, "params": {"num_rf": 2}})"), "params.num_rf"));
    }
    SECTION("bad experiment and syntax")
    {
        CHECK(has_field(parse_config_text(R"({"experiment": "nope", "seed": 1})"), "experiment"));
        const auto r = parse_config_text("{\"experiment\": ");
        CHECK(!r.ok());
        CHECK(!r.diagnostics.empty());
        CHECK(!load_config("/nonexistent/file.json").ok());
    }
}

TEST_CASE("CSV formatting", "[config]")
{
    CHECK(io::format_number(0.1) == "0.1");
    CHECK(io::format_number(1.0 / 3.0) == "0.333333333");
    CHECK(io::format_number(123456789012.0) == "1.23456789e+11");
    CHECK(io::format_number(-0.0) == "0");
    CHECK(io::format_number(std::nan("")) == "nan");

    const auto path = (std::filesystem::temp_directory_path() / "isac_test.csv").string();
    {
        io::CsvWriter w(path, {"a", "b", "c"});
        w.row({1.5, 7LL, std::string("x")});
        CHECK_THROWS(w.row({1.0}));
        w.close();
    }
    const auto t = io::read_csv(path);
    CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0] == std::vector<std::string>{"1.5", "7", "x"});
    CHECK(t.column("c") == 2);
    CHECK(t.column("z") == -1);
    std::filesystem::remove(path);
    CHECK_THROWS(io::CsvWriter("/nonexistent/dir/x.csv", {"a"}));
}

TEST_CASE("experiment runs are reproducible", "[config]")
{
    const auto base = std::filesystem::temp_directory_path() / "isac_test_runs";
    std::filesystem::remove_all(base);
    auto run_once = [&](const std::string &sub, int threads)
    {
        Overrides o;
        o.output_dir = (base / sub).string();
        o.threads = threads;
        const auto r = parse_config_text(
            R"({"experiment": "mi_mmse", "seed": 3, "params": {"snr_db_min": -5, "snr_db_max": 10, "snr_db_step": 1}})", o);
        REQUIRE(r.ok());
        return experiments::run(*r.config);
    };
    const auto a = run_once("a", 1);
    const auto b = run_once("b", 2);
    CHECK(a.files == b.files);
    CHECK(a.summary == b.summary);
    REQUIRE(std::filesystem::exists(base / "a" / experiments::record_file));
    for (const auto &f : a.files)
        CHECK(slurp(base / "a" / f) == slurp(base / "b" / f));
    const auto table = io::read_csv((base / "a" / "mi_mmse.csv").string());
    CHECK(table.header == std::vector<std::string>{"snr_db", "input", "mi_nats", "mmse"});
    CHECK(table.rows.size() == 16 * 3);
    std::filesystem::remove_all(base);
}
