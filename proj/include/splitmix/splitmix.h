/* Copyright 2026 The SplitMix Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the splitmix library. Every fallible call returns a
 * splitmix_status; on failure splitmix_last_error() describes the problem
 * until the next call on the same thread. Strings and buffers handed out by
 * the library are released with splitmix_free. */

#ifndef SPLITMIX_SPLITMIX_H_
#define SPLITMIX_SPLITMIX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SPLITMIX_BUILDING_LIBRARY)
#define SPLITMIX_API __attribute__((visibility("default")))
#else
#define SPLITMIX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum splitmix_status {
  SPLITMIX_OK = 0,
  SPLITMIX_ERROR_PARAMETER = 1,
  SPLITMIX_ERROR_SHAPE = 2,
  SPLITMIX_ERROR_PROTOCOL = 3,
  SPLITMIX_ERROR_STATE = 4,
  SPLITMIX_ERROR_CONFIG = 5,
  SPLITMIX_ERROR_IO = 6,
  SPLITMIX_ERROR_INTERNAL = 7,
  SPLITMIX_ERROR_NULL_ARGUMENT = 8,
} splitmix_status;

typedef struct splitmix_config splitmix_config;
typedef struct splitmix_simulator splitmix_simulator;

typedef struct splitmix_rdp {
  double alpha;
  double max_lambda;
  double eps_o;
  double eps_mix;
  double eps_cutmix;
} splitmix_rdp;

typedef struct splitmix_round_metrics {
  uint32_t round;
  int32_t num_groups;
  double train_loss;
  double max_lambda;
  uint64_t uplink_bytes;
  uint64_t downlink_bytes;
} splitmix_round_metrics;

typedef struct splitmix_run_summary {
  int32_t rounds;
  double final_accuracy;
  double final_train_loss;
  splitmix_rdp rdp;
  /* Mean smashed-data upload per client per round, and the same upload
   * with every patch sent. */
  double mean_uplink_payload;
  double dense_uplink_payload;
  double uplink_reduction;
} splitmix_run_summary;

SPLITMIX_API const char* splitmix_version(void);
SPLITMIX_API const char* splitmix_status_name(int status);
SPLITMIX_API const char* splitmix_last_error(void);
SPLITMIX_API void splitmix_free(void* ptr);

/* Configuration. */
SPLITMIX_API int splitmix_config_load(const char* path, splitmix_config** out);
SPLITMIX_API int splitmix_config_parse(const char* json, splitmix_config** out);
SPLITMIX_API int splitmix_config_to_json(const splitmix_config* config,
                                         char** json_out);
SPLITMIX_API int splitmix_config_set_seed(splitmix_config* config,
                                          uint64_t seed);
SPLITMIX_API int splitmix_config_set_output_dir(splitmix_config* config,
                                                const char* dir);
SPLITMIX_API void splitmix_config_free(splitmix_config* config);

/* Privacy accounting. */
SPLITMIX_API int splitmix_rdp_compute(double alpha, double delta_bound,
                                      double sigma_s, double sigma_y,
                                      int64_t d_s, int64_t d_y,
                                      double max_lambda, splitmix_rdp* out);
SPLITMIX_API int splitmix_config_rdp(const splitmix_config* config,
                                     splitmix_rdp* out);
SPLITMIX_API int splitmix_config_rdp_json(const splitmix_config* config,
                                          char** json_out);

/* Experiments. Outputs go to the configured output directory. */
SPLITMIX_API int splitmix_run(const splitmix_config* config,
                              splitmix_run_summary* summary);
/* axis is "sigma", "group_size" or "num_clients". */
SPLITMIX_API int splitmix_sweep(const splitmix_config* config,
                                const char* axis, const double* values,
                                size_t num_values, char** csv_out);
SPLITMIX_API int splitmix_export_smashed(const splitmix_config* config,
                                         int32_t count, size_t* files_written);
SPLITMIX_API int splitmix_attack(const splitmix_config* config, char** csv_out);

/* Step-by-step training. */
SPLITMIX_API int splitmix_simulator_create(const splitmix_config* config,
                                           splitmix_simulator** out);
SPLITMIX_API int splitmix_simulator_total_rounds(const splitmix_simulator* sim,
                                                 int32_t* rounds);
SPLITMIX_API int splitmix_simulator_step(splitmix_simulator* sim,
                                         splitmix_round_metrics* metrics);
SPLITMIX_API int splitmix_simulator_evaluate(const splitmix_simulator* sim,
                                             double* accuracy);
/* Serialized lower-segment parameters of one client. */
SPLITMIX_API int splitmix_simulator_lower_params(const splitmix_simulator* sim,
                                                 int32_t client,
                                                 uint8_t** bytes_out,
                                                 size_t* size_out);
SPLITMIX_API void splitmix_simulator_free(splitmix_simulator* sim);

/* Patch masks for one mixing group: owners_out[k] receives the index in
 * [0, group_size) of the client that keeps patch k. */
SPLITMIX_API int splitmix_build_patch_masks(uint64_t seed,
                                            const double* lambdas,
                                            size_t group_size,
                                            int32_t num_patches,
                                            uint8_t* owners_out);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* SPLITMIX_SPLITMIX_H_ */
