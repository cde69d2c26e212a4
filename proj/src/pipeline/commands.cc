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

#include "pipeline/commands.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "carm/pretrain.h"
#include "common/error.h"
#include "pipeline/experiment.h"
#include "pipeline/manifest.h"
#include "pipeline/workspace.h"
#include "training/checkpoint.h"

namespace retmem::pipeline {

namespace fs = std::filesystem;

namespace {

std::string require_string(const nlohmann::json& req, const char* key) {
  if (!req.contains(key) || !req.at(key).is_string() || req.at(key).get<std::string>().empty()) {
    RETMEM_THROW(InvalidArgument, "missing required argument '" << key << "'");
  }
  return req.at(key).get<std::string>();
}

struct Common {
  std::string out;
  std::string config_path;
  nlohmann::json config = nlohmann::json::object();
  bool has_seed = false;
  uint64_t seed = 0;
};

Common common_args(const nlohmann::json& req) {
  Common c;
  c.out = require_string(req, "out");
  if (req.contains("config_json")) {
    c.config = req.at("config_json");
  } else if (req.contains("config") && !req.at("config").get<std::string>().empty()) {
    c.config_path = req.at("config").get<std::string>();
    c.config = read_json_file(c.config_path);
  }
  if (req.contains("seed") && !req.at("seed").is_null()) {
    c.has_seed = true;
    c.seed = req.at("seed").get<uint64_t>();
  }
  fs::create_directories(c.out);
  return c;
}

std::string path_in(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

RunManifest manifest_for(const std::string& command, const Common& c, uint64_t seed) {
  RunManifest m;
  m.command = command;
  m.config_path = c.config_path;
  m.config = c.config;
  m.seed = seed;
  return m;
}

void add_prepared_inputs(RunManifest& m, const std::string& dir) {
  for (const char* f : {kTrainFile, kValFile, kTestFile, kOntologyFile, kDbFile, kVocabFile}) {
    m.inputs[std::string("prepared/") + f] = path_in(dir, f);
  }
}

nlohmann::json cmd_prepare(const nlohmann::json& req) {
  Common c = common_args(req);
  const uint64_t seed = c.has_seed ? c.seed : c.config.value("seed", uint64_t{20210311});
  Prepared p = prepare(c.config, seed);
  save_prepared(p, c.out);
  RunManifest m = manifest_for("prepare", c, seed);
  for (const char* key : {"corpus", "ontology", "db"}) {
    if (c.config.contains(key)) m.inputs[key] = c.config.at(key).get<std::string>();
  }
  for (const char* f : {kTrainFile, kValFile, kTestFile, kOntologyFile, kDbFile, kVocabFile}) {
    m.outputs[f] = path_in(c.out, f);
  }
  m.extra = {{"train_dialogues", p.train.size()},
             {"val_dialogues", p.val.size()},
             {"test_dialogues", p.test.size()},
             {"vocab_size", p.vocab.size()},
             {"vocab_hash", p.vocab.hash()}};
  m.write(c.out);
  return m.extra;
}

nlohmann::json cmd_pretrain_carm(const nlohmann::json& req) {
  Common c = common_args(req);
  const std::string prepared = require_string(req, "prepared");
  Prepared data = load_prepared(prepared);
  carm::CarmConfig cfg = carm::CarmConfig::from_json(c.config);
  if (c.has_seed) cfg.seed = c.seed;
  carm::GruContextEncoder encoder(cfg, data.vocab);
  std::ofstream log(path_in(c.out, "pretrain_log.jsonl"), std::ios::trunc);
  carm::PretrainReport report = carm::pretrain_encoder(
      encoder, data.train, data.ontology, [&](const carm::PretrainEpoch& e) {
        if (!std::isfinite(e.loss)) {
          RETMEM_THROW(NumericError, "retriever pretraining diverged at epoch " << e.epoch);
        }
        log << nlohmann::json{{"epoch", e.epoch}, {"loss", e.loss}, {"f1", e.f1}}.dump()
            << "\n";
        log.flush();
      });
  encoder.save(path_in(c.out, kEncoderFile));
  carm::RetrievalIndex index = carm::build_index(data.train, encoder);
  index.save(path_in(c.out, kIndexFile));

  RunManifest m = manifest_for("pretrain-carm", c, cfg.seed);
  m.config = cfg.to_json();
  add_prepared_inputs(m, prepared);
  m.outputs["encoder"] = path_in(c.out, kEncoderFile);
  m.outputs["index"] = path_in(c.out, kIndexFile);
  m.outputs["log"] = path_in(c.out, "pretrain_log.jsonl");
  m.extra = {{"initial_f1", report.initial_f1},
             {"final_f1", report.final_f1},
             {"index_entries", index.size()},
             {"encoder_fingerprint", encoder.fingerprint()}};
  m.write(c.out);
  return m.extra;
}

nlohmann::json cmd_retrieve(const nlohmann::json& req) {
  Common c = common_args(req);
  const std::string prepared = require_string(req, "prepared");
  const std::string retriever_dir = require_string(req, "retriever");
  Prepared data = load_prepared(prepared);
  LoadedRetriever r = load_retriever(retriever_dir, data.vocab);
  const size_t k = req.value("k", c.config.value("k", size_t{9}));
  const size_t n_raw = req.value("n_raw", c.config.value("n_raw", size_t{50}));
  if (k < 1 || n_raw < 1) RETMEM_THROW(InvalidArgument, "k and n_raw must be >= 1");
  RunManifest m = manifest_for("retrieve", c, c.seed);
  m.config = {{"k", k}, {"n_raw", n_raw}};
  add_prepared_inputs(m, prepared);
  m.inputs["encoder"] = path_in(retriever_dir, kEncoderFile);
  m.inputs["index"] = path_in(retriever_dir, kIndexFile);
  nlohmann::json counts = nlohmann::json::object();
  for (const std::string split : {"train", "val", "test"}) {
    carm::CandidateMap map = carm::retrieve_corpus(r.index, *r.encoder, data.split(split),
                                                   n_raw, k, split == "train");
    const std::string path = path_in(c.out, candidates_file(split));
    carm::save_candidates(map, path);
    m.outputs["candidates/" + split] = path;
    size_t retrieved = 0, padded = 0;
    for (const auto& [key, set] : map) {
      retrieved += set.count(carm::Provenance::kRetrieved);
      padded += set.count(carm::Provenance::kNullPad);
    }
    counts[split] = {{"turns", map.size()}, {"retrieved", retrieved}, {"null_pad", padded}};
  }
  m.extra = counts;
  m.write(c.out);
  return counts;
}

nlohmann::json cmd_train(const nlohmann::json& req) {
  Common c = common_args(req);
  const std::string prepared = require_string(req, "prepared");
  const std::string retriever_dir = require_string(req, "retriever");
  const std::string cand_dir = require_string(req, "candidates");
  Prepared data = load_prepared(prepared);
  LoadedRetriever r = load_retriever(retriever_dir, data.vocab);
  TrainSpec spec = TrainSpec::from_json(c.config);
  if (c.has_seed) {
    spec.train.seed = c.seed;
    spec.sync();
  }
  const std::string cand_path = path_in(cand_dir, candidates_file("train"));
  if (!fs::is_regular_file(cand_path)) {
    RETMEM_THROW(MissingArtifact, cand_path << " not found; run the retrieve command first");
  }
  carm::CandidateMap cands = carm::load_candidates(cand_path);
  std::ofstream log(path_in(c.out, "train_log.jsonl"), std::ios::trunc);
  TrainedModel tm = train_model(data, r, cands, spec, [&](const training::EpochLog& e) {
    log << e.to_json().dump() << "\n";
    log.flush();
  });
  training::CheckpointInfo info{spec.model, spec.train, data.vocab.hash(),
                                tm.result.best_epoch, tm.result.best_score};
  training::save_checkpoint(*tm.model, info, path_in(c.out, kModelFile));

  RunManifest m = manifest_for("train", c, spec.train.seed);
  m.config = spec.to_json();
  add_prepared_inputs(m, prepared);
  m.inputs["encoder"] = path_in(retriever_dir, kEncoderFile);
  m.inputs["index"] = path_in(retriever_dir, kIndexFile);
  m.inputs["candidates/train"] = cand_path;
  m.outputs["model"] = path_in(c.out, kModelFile);
  m.outputs["log"] = path_in(c.out, "train_log.jsonl");
  m.extra = {{"best_epoch", tm.result.best_epoch},
             {"best_val_combined", tm.result.best_score},
             {"steps", tm.result.steps},
             {"final_loss", tm.result.log.empty() ? 0.0 : tm.result.log.back().loss}};
  m.write(c.out);
  return m.extra;
}

EvalSpec eval_spec_from(const nlohmann::json& req, const Common& c) {
  nlohmann::json j = c.config;
  for (const char* key : {"split", "belief_mode", "memory_source", "max_dialogues", "n_raw"}) {
    if (req.contains(key) && !req.at(key).is_null()) j[key] = req.at(key);
  }
  if (c.has_seed) j["seed"] = c.seed;
  return EvalSpec::from_json(j);
}

struct EvalInputs {
  Prepared data;
  LoadedRetriever retriever;
  training::LoadedCheckpoint ckpt;
  std::string prepared, retriever_dir, model_path;
};

EvalInputs load_eval_inputs(const nlohmann::json& req) {
  EvalInputs in;
  in.prepared = require_string(req, "prepared");
  in.retriever_dir = require_string(req, "retriever");
  in.model_path = require_string(req, "model");
  in.data = load_prepared(in.prepared);
  in.retriever = load_retriever(in.retriever_dir, in.data.vocab);
  if (!fs::is_regular_file(in.model_path)) {
    RETMEM_THROW(MissingArtifact, in.model_path << " not found; run the train command first");
  }
  in.ckpt = training::load_checkpoint(in.model_path, in.data.vocab);
  return in;
}

void add_eval_inputs(RunManifest& m, const EvalInputs& in) {
  add_prepared_inputs(m, in.prepared);
  m.inputs["encoder"] = path_in(in.retriever_dir, kEncoderFile);
  m.inputs["index"] = path_in(in.retriever_dir, kIndexFile);
  m.inputs["model"] = in.model_path;
}

std::string generations_jsonl(const EvaluationRun& run) {
  std::ostringstream out;
  for (const auto& dialogue : run.generations) {
    for (const auto& turn : dialogue) out << turn.to_json().dump() << "\n";
  }
  return out.str();
}

nlohmann::json cmd_eval(const nlohmann::json& req) {
  Common c = common_args(req);
  EvalInputs in = load_eval_inputs(req);
  EvalSpec spec = eval_spec_from(req, c);
  EvaluationRun run = evaluate_split(*in.ckpt.model, in.data, in.retriever, spec);
  write_text_file(path_in(c.out, "report.json"), run.report.to_json().dump(2) + "\n");
  write_text_file(path_in(c.out, "report.txt"), run.report.to_table());
  RunManifest m = manifest_for("eval", c, spec.seed);
  m.config = spec.to_json();
  add_eval_inputs(m, in);
  m.outputs["report"] = path_in(c.out, "report.json");
  m.outputs["table"] = path_in(c.out, "report.txt");
  m.extra = {{"belief_mode", decoding::belief_mode_name(spec.belief_mode)},
             {"memory_source", decoding::memory_source_name(spec.memory_source)},
             {"warnings", run.warnings}};
  m.write(c.out);
  nlohmann::json summary = {{"inform", run.report.inform},
                            {"success", run.report.success},
                            {"bleu", run.report.bleu},
                            {"combined", run.report.combined},
                            {"belief_mode", decoding::belief_mode_name(spec.belief_mode)}};
  return summary;
}

nlohmann::json cmd_generate(const nlohmann::json& req) {
  Common c = common_args(req);
  EvalInputs in = load_eval_inputs(req);
  EvalSpec spec = eval_spec_from(req, c);
  EvaluationRun run = evaluate_split(*in.ckpt.model, in.data, in.retriever, spec);
  write_text_file(path_in(c.out, "generations.jsonl"), generations_jsonl(run));
  RunManifest m = manifest_for("generate", c, spec.seed);
  m.config = spec.to_json();
  add_eval_inputs(m, in);
  m.outputs["generations"] = path_in(c.out, "generations.jsonl");
  size_t turns = 0;
  for (const auto& d : run.generations) turns += d.size();
  m.extra = {{"dialogues", run.generations.size()}, {"turns", turns}};
  m.write(c.out);
  return m.extra;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << std::fixed << v;
  return s.str();
}

nlohmann::json cmd_ablate(const nlohmann::json& req) {
  Common c = common_args(req);
  const std::string prepared = require_string(req, "prepared");
  const std::string retriever_dir = require_string(req, "retriever");
  Prepared data = load_prepared(prepared);
  LoadedRetriever r = load_retriever(retriever_dir, data.vocab);

  const nlohmann::json base_json = c.config.value("base", nlohmann::json::object());
  const nlohmann::json grid = c.config.value("grid", nlohmann::json::object());
  const std::vector<bool> memory = grid.value("memory", std::vector<bool>{true, false});
  const std::vector<double> ps = grid.value("sampling_p", std::vector<double>{0.8});
  const std::vector<size_t> ks = grid.value("k", std::vector<size_t>{9});
  std::vector<uint64_t> seeds = grid.value("seeds", std::vector<uint64_t>{777});
  if (c.has_seed) seeds = {c.seed};
  nlohmann::json eval_json = c.config.value("eval", nlohmann::json::object());
  const std::vector<std::string> sources =
      eval_json.value("sources", std::vector<std::string>{"retrieved", "random"});
  eval_json.erase("sources");
  if (memory.empty() || ps.empty() || ks.empty() || seeds.empty() || sources.empty()) {
    RETMEM_THROW(InvalidArgument, "ablation grid axes must be non-empty");
  }

  struct Row {
    bool memory;
    double p;
    size_t k;
    uint64_t seed;
    std::string name;
  };
  std::vector<Row> rows;
  for (bool mem : memory) {
    for (size_t pi = 0; pi < ps.size(); ++pi) {
      for (size_t ki = 0; ki < ks.size(); ++ki) {
        if (!mem && (pi > 0 || ki > 0)) continue;  // p and k are inert without memory
        for (uint64_t seed : seeds) {
          std::ostringstream name;
          name << (mem ? "mem" : "nomem") << "_p" << ps[pi] << "_k" << ks[ki] << "_s" << seed;
          rows.push_back({mem, ps[pi], ks[ki], seed, name.str()});
        }
      }
    }
  }

  std::map<size_t, carm::CandidateMap> cand_by_k;
  std::ostringstream csv;
  csv << "name,memory,sampling_p,k,seed,eval_source,inform,success,bleu,combined\n";
  // (axis value, source) -> scores over seeds
  std::map<std::pair<double, std::string>, std::vector<double>> sweep_p, sweep_k;
  nlohmann::json summary = nlohmann::json::array();
  for (const Row& row : rows) {
    if (!cand_by_k.count(row.k)) {
      cand_by_k[row.k] = train_candidates(data, r, row.k, c.config.value("n_raw", size_t{50}));
    }
    TrainSpec spec = TrainSpec::from_json(base_json);
    spec.model.use_memory = row.memory;
    spec.train.sampling_p = row.p;
    spec.train.k = row.k;
    spec.train.seed = row.seed;
    spec.sync();
    const std::string row_dir = path_in(path_in(c.out, "rows"), row.name);
    fs::create_directories(row_dir);
    std::ofstream log(path_in(row_dir, "train_log.jsonl"), std::ios::trunc);
    TrainedModel tm = train_model(data, r, cand_by_k[row.k], spec,
                                  [&](const training::EpochLog& e) {
                                    log << e.to_json().dump() << "\n";
                                  });
    training::CheckpointInfo info{spec.model, spec.train, data.vocab.hash(),
                                  tm.result.best_epoch, tm.result.best_score};
    training::save_checkpoint(*tm.model, info, path_in(row_dir, kModelFile));
    RunManifest m = manifest_for("ablate", c, row.seed);
    m.config = {{"train", spec.to_json()}, {"eval", eval_json}};
    add_prepared_inputs(m, prepared);
    m.inputs["encoder"] = path_in(retriever_dir, kEncoderFile);
    m.inputs["index"] = path_in(retriever_dir, kIndexFile);
    m.outputs["model"] = path_in(row_dir, kModelFile);
    nlohmann::json results = nlohmann::json::object();
    for (const std::string& source : sources) {
      nlohmann::json ej = eval_json;
      ej["memory_source"] = source;
      ej["seed"] = row.seed;
      EvalSpec es = EvalSpec::from_json(ej);
      evaluation::MetricsReport rep = evaluate_split(*tm.model, data, r, es).report;
      csv << row.name << "," << (row.memory ? 1 : 0) << "," << row.p << "," << row.k << ","
          << row.seed << "," << source << "," << fmt(rep.inform) << "," << fmt(rep.success)
          << "," << fmt(rep.bleu) << "," << fmt(rep.combined) << "\n";
      results[source] = rep.to_json();
      if (row.memory && row.k == ks.front()) sweep_p[{row.p, source}].push_back(rep.combined);
      if (row.memory && row.p == ps.front()) {
        sweep_k[{static_cast<double>(row.k), source}].push_back(rep.combined);
      }
      summary.push_back({{"name", row.name}, {"eval_source", source}, {"combined", rep.combined}});
    }
    m.extra = results;
    m.write(row_dir);
  }
  auto sweep_csv = [](const char* axis,
                      const std::map<std::pair<double, std::string>, std::vector<double>>& s) {
    std::ostringstream out;
    out << axis << ",eval_source,combined_mean,runs\n";
    for (const auto& [key, vals] : s) {
      double mean = 0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(vals.size());
      out << key.first << "," << key.second << "," << fmt(mean) << "," << vals.size() << "\n";
    }
    return out.str();
  };
  write_text_file(path_in(c.out, "ablation.csv"), csv.str());
  write_text_file(path_in(c.out, "sweep_p.csv"), sweep_csv("sampling_p", sweep_p));
  write_text_file(path_in(c.out, "sweep_k.csv"), sweep_csv("k", sweep_k));
  RunManifest m = manifest_for("ablate", c, seeds.front());
  add_prepared_inputs(m, prepared);
  m.outputs["table"] = path_in(c.out, "ablation.csv");
  m.outputs["sweep_p"] = path_in(c.out, "sweep_p.csv");
  m.outputs["sweep_k"] = path_in(c.out, "sweep_k.csv");
  m.extra = {{"rows", rows.size()}};
  m.write(c.out);
  return {{"rows", rows.size()}, {"results", summary}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"prepare", "pretrain-carm", "retrieve",
                                                 "train",   "eval",          "generate",
                                                 "ablate"};
  return names;
}

nlohmann::json run_command(const std::string& command, const nlohmann::json& request) {
  if (!request.is_object()) RETMEM_THROW(InvalidArgument, "request must be a JSON object");
  try {
    if (command == "prepare") return cmd_prepare(request);
    if (command == "pretrain-carm") return cmd_pretrain_carm(request);
    if (command == "retrieve") return cmd_retrieve(request);
    if (command == "train") return cmd_train(request);
    if (command == "eval") return cmd_eval(request);
    if (command == "generate") return cmd_generate(request);
    if (command == "ablate") return cmd_ablate(request);
  } catch (const nlohmann::json::exception& e) {
    RETMEM_THROW(ParseError, command << ": malformed configuration: " << e.what());
  } catch (const fs::filesystem_error& e) {
    RETMEM_THROW(IoError, command << ": " << e.what());
  }
  RETMEM_THROW(InvalidArgument, "unknown command '" << command << "'");
}

}  // namespace retmem::pipeline
