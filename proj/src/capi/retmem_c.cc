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

#include "retmem/retmem.h"

#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "common/error.h"
#include "evaluation/metrics.h"
#include "pipeline/commands.h"
#include "pipeline/experiment.h"
#include "pipeline/workspace.h"
#include "training/checkpoint.h"

struct retmem_session {
  retmem::pipeline::Prepared data;
  retmem::pipeline::LoadedRetriever retriever;
  retmem::training::LoadedCheckpoint ckpt;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

template <class Fn>
retmem_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RETMEM_OK;
  } catch (const retmem::InvalidArgument& e) {
    g_last_error = e.what();
    return RETMEM_ERR_INVALID_ARGUMENT;
  } catch (const retmem::ParseError& e) {
    g_last_error = e.what();
    return RETMEM_ERR_PARSE;
  } catch (const retmem::ValidationError& e) {
    g_last_error = e.what();
    return RETMEM_ERR_VALIDATION;
  } catch (const retmem::NumericError& e) {
    g_last_error = e.what();
    return RETMEM_ERR_NUMERIC;
  } catch (const retmem::IoError& e) {
    g_last_error = e.what();
    return RETMEM_ERR_IO;
  } catch (const retmem::MissingArtifact& e) {
    g_last_error = e.what();
    return RETMEM_ERR_MISSING_ARTIFACT;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return RETMEM_ERR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RETMEM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RETMEM_ERR_INTERNAL;
  }
}

nlohmann::json parse_object(const char* text, const char* what) {
  if (!text || !*text) return nlohmann::json::object();
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) RETMEM_THROW(retmem::InvalidArgument, what << " must be a JSON object");
  return j;
}

}  // namespace

extern "C" {

const char* retmem_version(void) { return "0.1.0"; }

const char* retmem_status_name(retmem_status status) {
  switch (status) {
    case RETMEM_OK:
      return "ok";
    case RETMEM_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case RETMEM_ERR_PARSE:
      return "parse_error";
    case RETMEM_ERR_VALIDATION:
      return "validation_error";
    case RETMEM_ERR_NUMERIC:
      return "numeric_error";
    case RETMEM_ERR_IO:
      return "io_error";
    case RETMEM_ERR_MISSING_ARTIFACT:
      return "missing_artifact";
    case RETMEM_ERR_INTERNAL:
      return "internal_error";
  }
  return "unknown";
}

const char* retmem_last_error(void) { return g_last_error.c_str(); }

retmem_status retmem_run_command(const char* command, const char* request_json,
                                 char** response_json) {
  if (response_json) *response_json = nullptr;
  return guarded([&] {
    if (!command) RETMEM_THROW(retmem::InvalidArgument, "command is null");
    nlohmann::json result =
        retmem::pipeline::run_command(command, parse_object(request_json, "request"));
    if (response_json) *response_json = dup_string(result.dump());
  });
}

void retmem_free_string(char* s) { std::free(s); }

double retmem_combined_score(double inform, double success, double bleu) {
  return retmem::evaluation::combined_score(inform, success, bleu);
}

retmem_status retmem_session_open(const char* prepared_dir, const char* retriever_dir,
                                  const char* model_path, retmem_session** out) {
  if (out) *out = nullptr;
  return guarded([&] {
    if (!prepared_dir || !retriever_dir || !model_path || !out) {
      RETMEM_THROW(retmem::InvalidArgument, "retmem_session_open: null argument");
    }
    auto s = std::make_unique<retmem_session>();
    s->data = retmem::pipeline::load_prepared(prepared_dir);
    s->retriever = retmem::pipeline::load_retriever(retriever_dir, s->data.vocab);
    s->ckpt = retmem::training::load_checkpoint(model_path, s->data.vocab);
    *out = s.release();
  });
}

retmem_status retmem_session_generate(retmem_session* session, const char* split,
                                      const char* dialogue_id, const char* options_json,
                                      char** jsonl_out) {
  if (jsonl_out) *jsonl_out = nullptr;
  return guarded([&] {
    if (!session || !split || !dialogue_id || !jsonl_out) {
      RETMEM_THROW(retmem::InvalidArgument, "retmem_session_generate: null argument");
    }
    nlohmann::json opts = parse_object(options_json, "options");
    opts["split"] = split;
    retmem::pipeline::EvalSpec spec = retmem::pipeline::EvalSpec::from_json(opts);
    retmem::pipeline::Prepared view;
    view.ontology = session->data.ontology;
    view.db = session->data.db;
    view.vocab = session->data.vocab;
    view.train = session->data.train;
    bool found = false;
    for (const auto& d : session->data.split(split)) {
      if (d.dialogue_id == dialogue_id) {
        view.test = {d};
        found = true;
      }
    }
    if (!found) {
      RETMEM_THROW(retmem::InvalidArgument, "no dialogue '" << dialogue_id << "' in split "
                                                            << split);
    }
    spec.exclude_self = std::string(split) == "train";
    spec.split = "test";
    retmem::pipeline::EvaluationRun run =
        retmem::pipeline::evaluate_split(*session->ckpt.model, view, session->retriever, spec);
    std::ostringstream out;
    for (const auto& turn : run.generations.front()) out << turn.to_json().dump() << "\n";
    *jsonl_out = dup_string(out.str());
  });
}

size_t retmem_session_vocab_size(const retmem_session* session) {
  return session ? session->data.vocab.size() : 0;
}

void retmem_session_close(retmem_session* session) { delete session; }

}  // extern "C"
