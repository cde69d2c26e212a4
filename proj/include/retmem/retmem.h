// Copyright 2026 The retmem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RETMEM_RETMEM_H_
#define RETMEM_RETMEM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define RETMEM_API __declspec(dllexport)
#else
#define RETMEM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  RETMEM_OK = 0,
  RETMEM_ERR_INVALID_ARGUMENT = 1,
  RETMEM_ERR_PARSE = 2,
  RETMEM_ERR_VALIDATION = 3,
  RETMEM_ERR_NUMERIC = 4,
  RETMEM_ERR_IO = 5,
  RETMEM_ERR_MISSING_ARTIFACT = 6,
  RETMEM_ERR_INTERNAL = 7
} retmem_status;

/* Opaque handle over a prepared corpus, a retriever and a trained model. */
typedef struct retmem_session retmem_session;

RETMEM_API const char* retmem_version(void);
RETMEM_API const char* retmem_status_name(retmem_status status);

/* Message of the last failed call on this thread; "" after a success. */
RETMEM_API const char* retmem_last_error(void);

/* Runs one pipeline command (prepare, pretrain-carm, retrieve, train, eval,
 * generate, ablate). request_json is a JSON object of arguments; on success
 * *response_json (if non-null) receives a JSON summary that the caller
 * releases with retmem_free_string. */
RETMEM_API retmem_status retmem_run_command(const char* command,
                                            const char* request_json,
                                            char** response_json);

RETMEM_API void retmem_free_string(char* s);

/* (inform + success) * 0.5 + bleu */
RETMEM_API double retmem_combined_score(double inform, double success,
                                        double bleu);

RETMEM_API retmem_status retmem_session_open(const char* prepared_dir,
                                             const char* retriever_dir,
                                             const char* model_path,
                                             retmem_session** out);

/* Generates every turn of one dialogue from the given split. options_json
 * may set belief_mode ("oracle" | "generated"), memory_source ("retrieved" |
 * "random") and seed. *jsonl_out receives one JSON object per turn. */
RETMEM_API retmem_status retmem_session_generate(retmem_session* session,
                                                 const char* split,
                                                 const char* dialogue_id,
                                                 const char* options_json,
                                                 char** jsonl_out);

RETMEM_API size_t retmem_session_vocab_size(const retmem_session* session);

RETMEM_API void retmem_session_close(retmem_session* session);

#ifdef __cplusplus
}
#endif

#endif  // RETMEM_RETMEM_H_
