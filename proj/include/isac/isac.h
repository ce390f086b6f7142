/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * isac-toolkit: design and evaluation of integrated sensing and communication
 * Copyright (C) 2026 isac-toolkit contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ISAC_ISAC_H
#define ISAC_ISAC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(ISAC_BUILDING_LIBRARY)
#define ISAC_API __declspec(dllexport)
#else
#define ISAC_API __declspec(dllimport)
#endif
#else
#define ISAC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum isac_status
{
    ISAC_OK = 0,
    ISAC_ERR_INVALID_ARGUMENT = 1,
    ISAC_ERR_CONFIG = 2,
    ISAC_ERR_NUMERICAL = 3,
    ISAC_ERR_IO = 4,
    ISAC_ERR_INTERNAL = 5
} isac_status;

typedef struct isac_config isac_config;
typedef struct isac_diagnostics isac_diagnostics;
typedef struct isac_run_record isac_run_record;
typedef struct isac_model isac_model;

/* Fields left at zero / NULL are not overridden. */
typedef struct isac_overrides
{
    int has_seed;
    uint64_t seed;
    const char *output_dir;
    int threads;
} isac_overrides;

ISAC_API const char *isac_version(void);
ISAC_API const char *isac_status_string(isac_status status);
/* Message of the most recent failure on the calling thread; never NULL. */
ISAC_API const char *isac_last_error(void);

/* On ISAC_ERR_CONFIG *out is NULL and *diags (if diags is not NULL) lists the
 * problems. *diags is always set when diags is not NULL and must be freed. */
ISAC_API isac_status isac_config_load(const char *path, const isac_overrides *overrides, isac_config **out,
                                      isac_diagnostics **diags);
ISAC_API isac_status isac_config_parse(const char *text, const isac_overrides *overrides, isac_config **out,
                                       isac_diagnostics **diags);
ISAC_API void isac_config_free(isac_config *config);
ISAC_API const char *isac_config_experiment(const isac_config *config);
ISAC_API uint64_t isac_config_seed(const isac_config *config);
ISAC_API const char *isac_config_output_dir(const isac_config *config);
/* Normalized JSON with defaults filled in; owned by the config. */
ISAC_API const char *isac_config_json(const isac_config *config);

ISAC_API size_t isac_diagnostics_count(const isac_diagnostics *diags);
ISAC_API const char *isac_diagnostic_field(const isac_diagnostics *diags, size_t index);
ISAC_API int isac_diagnostic_line(const isac_diagnostics *diags, size_t index);
ISAC_API const char *isac_diagnostic_message(const isac_diagnostics *diags, size_t index);
/* "line N: field: message" */
ISAC_API const char *isac_diagnostic_text(const isac_diagnostics *diags, size_t index);
ISAC_API void isac_diagnostics_free(isac_diagnostics *diags);

/* Names of the available experiments, index in [0, isac_experiment_count()). */
ISAC_API size_t isac_experiment_count(void);
ISAC_API const char *isac_experiment_name(size_t index);

ISAC_API isac_status isac_run(const isac_config *config, isac_run_record **out);
ISAC_API const char *isac_run_record_json(const isac_run_record *record);
ISAC_API double isac_run_record_wall_time(const isac_run_record *record);
ISAC_API size_t isac_run_record_file_count(const isac_run_record *record);
/* Empty string when index is out of range. */
ISAC_API const char *isac_run_record_file(const isac_run_record *record, size_t index);
ISAC_API void isac_run_record_free(isac_run_record *record);

/* Feed-forward networks saved by the toolkit (e.g. waveform_net.bin). */
ISAC_API isac_status isac_model_load(const char *path, isac_model **out);
ISAC_API size_t isac_model_input_dim(const isac_model *model);
ISAC_API size_t isac_model_output_dim(const isac_model *model);
/* rows x input_dim row-major in, rows x output_dim row-major out. */
ISAC_API isac_status isac_model_predict(const isac_model *model, const double *input, size_t rows, double *output);
ISAC_API void isac_model_free(isac_model *model);

#ifdef __cplusplus
}
#endif

#endif
