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
#include "isac/isac.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "isac/config.hpp"
#include "isac/experiments.hpp"
#include "isac/neural.hpp"

struct isac_config
{
    isac::config::ExperimentConfig cfg;
    std::string json;
};

struct isac_diagnostics
{
    std::vector<isac::config::Diagnostic> items;
    std::vector<std::string> texts;
};

struct isac_run_record
{
    isac::experiments::RunRecord record;
    std::string json;
};

struct isac_model
{
    isac::nn::MlpModel model;
};

namespace
{
    thread_local std::string g_last_error;

    isac_status fail_with(isac_status s, const std::string &msg)
    {
        g_last_error = msg;
        return s;
    }

    // Maps the active exception to a status code; call only inside a catch block.
    isac_status translate()
    {
        try
        {
            throw;
        }
        catch (const isac::Error &e)
        {
            switch (e.kind())
            {
            case isac::ErrorKind::invalid_argument: return fail_with(ISAC_ERR_INVALID_ARGUMENT, e.what());
            case isac::ErrorKind::config: return fail_with(ISAC_ERR_CONFIG, e.what());
            case isac::ErrorKind::numerical: return fail_with(ISAC_ERR_NUMERICAL, e.what());
            case isac::ErrorKind::io: return fail_with(ISAC_ERR_IO, e.what());
            }
            return fail_with(ISAC_ERR_INTERNAL, e.what());
        }
        catch (const std::bad_alloc &)
        {
            return fail_with(ISAC_ERR_INTERNAL, "out of memory");
        }
        catch (const std::exception &e)
        {
            return fail_with(ISAC_ERR_INTERNAL, e.what());
        }
        catch (...)
        {
            return fail_with(ISAC_ERR_INTERNAL, "unknown error");
        }
    }

    isac::config::Overrides to_overrides(const isac_overrides *o)
    {
        isac::config::Overrides out;
        if (!o)
            return out;
        if (o->has_seed)
            out.seed = o->seed;
        if (o->output_dir)
            out.output_dir = std::string(o->output_dir);
        if (o->threads > 0)
            out.threads = o->threads;
        return out;
    }

    isac_status finish_parse(isac::config::ParseResult result, isac_config **out, isac_diagnostics **diags)
    {
        if (diags)
        {
            auto d = new isac_diagnostics;
            d->items = result.diagnostics;
            for (const auto &x : d->items)
                d->texts.push_back(x.to_string());
            *diags = d;
        }
        if (!result.ok())
        {
            std::string msg = "invalid configuration";
            if (!result.diagnostics.empty())
                msg += ": " + result.diagnostics.front().to_string();
            return fail_with(ISAC_ERR_CONFIG, msg);
        }
        auto c = new isac_config;
        c->cfg = std::move(*result.config);
        c->json = c->cfg.to_json().dump(2);
        *out = c;
        return ISAC_OK;
    }

    const isac::config::Diagnostic *diag_at(const isac_diagnostics *d, size_t i)
    {
        return d && i < d->items.size() ? &d->items[i] : nullptr;
    }
}

extern "C" {

const char *isac_version(void) { return isac::experiments::toolkit_version(); }

const char *isac_status_string(isac_status status)
{
    switch (status)
    {
    case ISAC_OK: return "ok";
    case ISAC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ISAC_ERR_CONFIG: return "configuration error";
    case ISAC_ERR_NUMERICAL: return "numerical failure";
    case ISAC_ERR_IO: return "i/o error";
    case ISAC_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char *isac_last_error(void) { return g_last_error.c_str(); }

isac_status isac_config_load(const char *path, const isac_overrides *overrides, isac_config **out,
                             isac_diagnostics **diags)
{
    if (diags)
        *diags = nullptr;
    if (!path || !out)
        return fail_with(ISAC_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    try
    {
        return finish_parse(isac::config::load_config(path, to_overrides(overrides)), out, diags);
    }
    catch (...)
    {
        return translate();
    }
}

isac_status isac_config_parse(const char *text, const isac_overrides *overrides, isac_config **out,
                              isac_diagnostics **diags)
{
    if (diags)
        *diags = nullptr;
    if (!text || !out)
        return fail_with(ISAC_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    try
    {
        return finish_parse(isac::config::parse_config_text(text, to_overrides(overrides)), out, diags);
    }
    catch (...)
    {
        return translate();
    }
}

void isac_config_free(isac_config *config) { delete config; }

const char *isac_config_experiment(const isac_config *config)
{
    return config ? isac::config::experiment_name(config->cfg.experiment) : "";
}

uint64_t isac_config_seed(const isac_config *config) { return config ? config->cfg.seed : 0; }

const char *isac_config_output_dir(const isac_config *config) { return config ? config->cfg.output_dir.c_str() : ""; }

const char *isac_config_json(const isac_config *config) { return config ? config->json.c_str() : ""; }

size_t isac_diagnostics_count(const isac_diagnostics *diags) { return diags ? diags->items.size() : 0; }

const char *isac_diagnostic_field(const isac_diagnostics *diags, size_t index)
{
    const auto *d = diag_at(diags, index);
    return d ? d->field.c_str() : "";
}

int isac_diagnostic_line(const isac_diagnostics *diags, size_t index)
{
    const auto *d = diag_at(diags, index);
    return d ? d->line : 0;
}

const char *isac_diagnostic_message(const isac_diagnostics *diags, size_t index)
{
    const auto *d = diag_at(diags, index);
    return d ? d->message.c_str() : "";
}

const char *isac_diagnostic_text(const isac_diagnostics *diags, size_t index)
{
    return diags && index < diags->texts.size() ? diags->texts[index].c_str() : "";
}

void isac_diagnostics_free(isac_diagnostics *diags) { delete diags; }

size_t isac_experiment_count(void) { return isac::config::all_experiments().size(); }

const char *isac_experiment_name(size_t index)
{
    const auto &all = isac::config::all_experiments();
    return index < all.size() ? isac::config::experiment_name(all[index]) : "";
}

isac_status isac_run(const isac_config *config, isac_run_record **out)
{
    if (!config || !out)
        return fail_with(ISAC_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    try
    {
        auto r = new isac_run_record;
        try
        {
            r->record = isac::experiments::run(config->cfg);
        }
        catch (...)
        {
            delete r;
            throw;
        }
        r->json = r->record.to_json().dump(2);
        *out = r;
        return ISAC_OK;
    }
    catch (...)
    {
        return translate();
    }
}

const char *isac_run_record_json(const isac_run_record *record) { return record ? record->json.c_str() : ""; }

double isac_run_record_wall_time(const isac_run_record *record) { return record ? record->record.wall_time_s : 0.0; }

size_t isac_run_record_file_count(const isac_run_record *record) { return record ? record->record.files.size() : 0; }

const char *isac_run_record_file(const isac_run_record *record, size_t index)
{
    return record && index < record->record.files.size() ? record->record.files[index].c_str() : "";
}

void isac_run_record_free(isac_run_record *record) { delete record; }

isac_status isac_model_load(const char *path, isac_model **out)
{
    if (!path || !out)
        return fail_with(ISAC_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    try
    {
        *out = new isac_model{isac::nn::MlpModel::load(path)};
        return ISAC_OK;
    }
    catch (...)
    {
        return translate();
    }
}

size_t isac_model_input_dim(const isac_model *model)
{
    return model ? static_cast<size_t>(model->model.input_dim()) : 0;
}

size_t isac_model_output_dim(const isac_model *model)
{
    return model ? static_cast<size_t>(model->model.output_dim()) : 0;
}

isac_status isac_model_predict(const isac_model *model, const double *input, size_t rows, double *output)
{
    if (!model || !input || !output)
        return fail_with(ISAC_ERR_INVALID_ARGUMENT, "null argument");
    try
    {
        const auto in_dim = model->model.input_dim();
        const auto out_dim = model->model.output_dim();
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const isac::RMatrix x = Eigen::Map<const RowMajor>(input, static_cast<Eigen::Index>(rows), in_dim);
        Eigen::Map<RowMajor>(output, static_cast<Eigen::Index>(rows), out_dim) = model->model.predict(x);
        return ISAC_OK;
    }
    catch (...)
    {
        return translate();
    }
}

void isac_model_free(isac_model *model) { delete model; }

}
