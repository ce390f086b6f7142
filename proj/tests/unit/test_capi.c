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

#include <stdio.h>
#include <string.h>

#include "isac/isac.h"

#define EXPECT(cond)                                                   \
    do                                                                 \
    {                                                                  \
        if (!(cond))                                                   \
        {                                                              \
            fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(int argc, char **argv)
{
    const char *work = argc > 1 ? argv[1] : "capi_out";
    isac_config *cfg = NULL;
    isac_diagnostics *diags = NULL;
    isac_overrides ov;
    memset(&ov, 0, sizeof ov);

    EXPECT(strlen(isac_version()) > 0);
    EXPECT(isac_experiment_count() == 8);
    EXPECT(strcmp(isac_status_string(ISAC_ERR_CONFIG), "") != 0);

    EXPECT(isac_config_parse("{\"experiment\": \"mi_mmse\", \"params\": {\"eta\": 1}}", &ov, &cfg, &diags) == ISAC_ERR_CONFIG);
    EXPECT(cfg == NULL);
    EXPECT(isac_diagnostics_count(diags) >= 2);
    EXPECT(strlen(isac_diagnostic_text(diags, 0)) > 0);
    isac_diagnostics_free(diags);
    diags = NULL;

    EXPECT(isac_config_parse(NULL, &ov, &cfg, &diags) == ISAC_ERR_INVALID_ARGUMENT);

    ov.has_seed = 1;
    ov.seed = 5;
    ov.output_dir = work;
    EXPECT(isac_config_parse("{\"experiment\": \"mi_mmse\", \"params\": {\"snr_db_min\": 0, \"snr_db_max\": 4, \"snr_db_step\": 2}}",
                             &ov, &cfg, &diags) == ISAC_OK);
    EXPECT(cfg != NULL);
    EXPECT(isac_config_seed(cfg) == 5);
    EXPECT(strcmp(isac_config_experiment(cfg), "mi_mmse") == 0);
    EXPECT(strcmp(isac_config_output_dir(cfg), work) == 0);

    isac_run_record *rec = NULL;
    EXPECT(isac_run(cfg, &rec) == ISAC_OK);
    EXPECT(isac_run_record_file_count(rec) >= 1);
    EXPECT(strcmp(isac_run_record_file(rec, 0), "mi_mmse.csv") == 0);
    EXPECT(strcmp(isac_run_record_file(rec, 99), "") == 0);
    EXPECT(strstr(isac_run_record_json(rec), "\"summary\"") != NULL);
    EXPECT(isac_run_record_wall_time(rec) >= 0.0);
    isac_run_record_free(rec);
    isac_config_free(cfg);
    isac_diagnostics_free(diags);

    isac_model *model = NULL;
    EXPECT(isac_model_load("/nonexistent/model.bin", &model) == ISAC_ERR_IO);
    EXPECT(model == NULL);
    EXPECT(strlen(isac_last_error()) > 0);
    puts("capi ok");
    return 0;
}
