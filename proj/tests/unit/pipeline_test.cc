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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "common/error.h"
#include "doctest.h"
#include "evaluation/metrics.h"
#include "pipeline/commands.h"
#include "pipeline/workspace.h"

namespace retmem::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "retmem_pipeline_test" / name;
  fs::remove_all(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

size_t count_lines(const std::string& text) {
  size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

const json kPrepare = {{"synthetic", {{"num_dialogues", 24}}},
                       {"split", {{"val", 0.15}, {"test", 0.2}}}};
const json kCarm = {{"embed_dim", 8}, {"hidden", 12}, {"epochs", 2}, {"lr", 0.01},
                    {"batch_size", 8}};
const json kTrain = {{"model", {{"embed_dim", 8}, {"hidden", 12}, {"db_dim", 3}}},
                     {"train", {{"batch_size", 8}, {"epochs", 2}, {"lr", 0.005}, {"k", 3}}},
                     {"validate", false}};

struct Run {
  std::string root, prep, carm, cand, model, eval, gen;
  json prepared, pretrained, retrieved, trained, evaluated, generated;

  explicit Run(const std::string& name) : root(fresh_dir(name)) {
    prep = root + "/prep";
    carm = root + "/carm";
    cand = root + "/cand";
    model = root + "/model";
    eval = root + "/eval";
    gen = root + "/gen";
    prepared = run_command("prepare", {{"out", prep}, {"config_json", kPrepare}, {"seed", 5}});
    pretrained = run_command("pretrain-carm", {{"out", carm}, {"prepared", prep},
                                               {"config_json", kCarm}});
    retrieved = run_command("retrieve", {{"out", cand}, {"prepared", prep}, {"retriever", carm},
                                         {"k", 3}, {"n_raw", 20}});
    trained = run_command("train", {{"out", model}, {"prepared", prep}, {"retriever", carm},
                                    {"candidates", cand}, {"config_json", kTrain}});
    const json ev = {{"prepared", prep}, {"retriever", carm},
                     {"model", model + "/" + kModelFile}, {"split", "test"}};
    json e = ev, g = ev;
    e["out"] = eval;
    g["out"] = gen;
    g["belief_mode"] = "generated";
    evaluated = run_command("eval", e);
    generated = run_command("generate", g);
  }
};

TEST_SUITE("pipeline") {

TEST_CASE("commands compose from prepare to generate") {
  Run r("compose");
  CHECK(r.prepared.at("train_dialogues").get<int>() + r.prepared.at("val_dialogues").get<int>() +
            r.prepared.at("test_dialogues").get<int>() ==
        24);
  for (const char* f : {kTrainFile, kValFile, kTestFile, kOntologyFile, kDbFile, kVocabFile}) {
    CHECK(fs::exists(r.prep + "/" + f));
  }
  CHECK(fs::exists(r.carm + "/" + kEncoderFile));
  CHECK(fs::exists(r.carm + "/" + kIndexFile));
  for (const char* s : {"train", "val", "test"}) CHECK(fs::exists(r.cand + "/" + candidates_file(s)));
  CHECK(fs::exists(r.model + "/" + kModelFile));
  for (const auto& dir : {r.prep, r.carm, r.cand, r.model, r.eval, r.gen}) {
    json m = read_json_file(dir + "/manifest.json");
    CHECK(m.contains("command"));
  }
  const double inform = r.evaluated.at("inform"), success = r.evaluated.at("success"),
               bleu = r.evaluated.at("bleu");
  CHECK(r.evaluated.at("combined").get<double>() == evaluation::combined_score(inform, success, bleu));
  CHECK(success <= inform);
  json report = read_json_file(r.eval + "/report.json");
  CHECK(report.at("combined") == r.evaluated.at("combined"));

  json test = read_json_file(r.prep + "/" + kTestFile);
  size_t turns = 0;
  for (const auto& d : test) turns += d.at("turns").size();
  CHECK(count_lines(slurp(r.gen + "/generations.jsonl")) == turns);
  CHECK(r.generated.at("turns").get<size_t>() == turns);
}

TEST_CASE("identical runs give identical artifacts") {
  Run a("det_a"), b("det_b");
  const std::vector<std::string> files = {
      std::string("prep/") + kTrainFile, std::string("prep/") + kVocabFile,
      std::string("carm/") + kEncoderFile, std::string("carm/") + kIndexFile,
      "cand/" + candidates_file("train"), "cand/" + candidates_file("test"),
      std::string("model/") + kModelFile, "gen/generations.jsonl", "eval/report.json"};
  for (const auto& f : files) {
    INFO(f);
    CHECK(slurp(a.root + "/" + f) == slurp(b.root + "/" + f));
  }
}

TEST_CASE("the seed changes the corpus") {
  const std::string a = fresh_dir("seed_a"), b = fresh_dir("seed_b");
  run_command("prepare", {{"out", a}, {"config_json", kPrepare}, {"seed", 1}});
  run_command("prepare", {{"out", b}, {"config_json", kPrepare}, {"seed", 2}});
  CHECK(slurp(a + "/" + kTrainFile) != slurp(b + "/" + kTrainFile));
}

TEST_CASE("missing inputs are reported before any work") {
  const std::string root = fresh_dir("missing");
  run_command("prepare", {{"out", root + "/prep"}, {"config_json", kPrepare}});
  CHECK_THROWS_AS(run_command("nonsense", {{"out", root}}), InvalidArgument);
  CHECK_THROWS_AS(run_command("prepare", json::object()), InvalidArgument);
  CHECK_THROWS_AS(run_command("pretrain-carm", {{"out", root + "/c"}}), InvalidArgument);
  CHECK_THROWS_AS(run_command("pretrain-carm", {{"out", root + "/c"}, {"prepared", root + "/none"}}),
                  MissingArtifact);
  run_command("pretrain-carm", {{"out", root + "/carm"}, {"prepared", root + "/prep"},
                                {"config_json", {{"embed_dim", 4}, {"hidden", 4}, {"epochs", 1}}}});
  CHECK_THROWS_AS(run_command("train", {{"out", root + "/m"}, {"prepared", root + "/prep"},
                                        {"retriever", root + "/carm"}, {"candidates", root + "/none"}}),
                  MissingArtifact);
  CHECK_THROWS_AS(run_command("eval", {{"out", root + "/e"}, {"prepared", root + "/prep"},
                                       {"retriever", root + "/carm"},
                                       {"model", root + "/none/model.ckpt"}}),
                  MissingArtifact);
  CHECK_THROWS_AS(run_command("prepare", {{"out", root + "/p2"}, {"config", root + "/none.json"}}),
                  MissingArtifact);
}

TEST_CASE("ablate writes one row per configuration and source") {
  const std::string root = fresh_dir("ablate");
  run_command("prepare", {{"out", root + "/prep"}, {"config_json", kPrepare}});
  run_command("pretrain-carm", {{"out", root + "/carm"}, {"prepared", root + "/prep"},
                                {"config_json", kCarm}});
  json cfg = {{"base", kTrain},
              {"grid", {{"memory", {true, false}}, {"sampling_p", {0.0, 0.8}}, {"k", {2}},
                        {"seeds", {1}}}},
              {"eval", {{"split", "test"}, {"max_dialogues", 2}}}};
  cfg["base"]["train"]["epochs"] = 1;
  json out = run_command("ablate", {{"out", root + "/abl"}, {"prepared", root + "/prep"},
                                    {"retriever", root + "/carm"}, {"config_json", cfg}});
  CHECK(out.at("rows") == 3);
  const std::string csv = slurp(root + "/abl/ablation.csv");
  CHECK(count_lines(csv) == 1 + 3 * 2);
  CHECK(csv.rfind("name,memory,sampling_p,k,seed,eval_source,inform,success,bleu,combined\n", 0) == 0);
  for (const char* row : {"mem_p0_k2_s1", "mem_p0.8_k2_s1", "nomem_p0_k2_s1"}) {
    CHECK(fs::exists(root + "/abl/rows/" + row + "/" + kModelFile));
  }
  CHECK(count_lines(slurp(root + "/abl/sweep_p.csv")) == 1 + 2 * 2);
}

}  // TEST_SUITE

}  // namespace
}  // namespace retmem::pipeline
