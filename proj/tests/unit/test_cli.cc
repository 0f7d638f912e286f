// Copyright 2026 The SIF Authors.
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


#include <stdio.h>
#include <stdlib.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sif/esd.hpp"
#include "sif/io.hpp"
#include "support/synthetic.hpp"

namespace sif {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "sif-cli-XXXXXX").string();
    REQUIRE(mkdtemp(tmpl.data()) != nullptr);
    path = tmpl;
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const {
    return (path / name).string();
  }
};

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

Run sif(const std::vector<std::string>& args, const std::string& env = "") {
  TempDir tmp;
  std::string cmd = env + " " + quote(SIF_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>" + quote(tmp / "stderr");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.err = read_file(tmp / "stderr");
  return r;
}

std::string data(const std::string& name) {
  return std::string(SIF_SOURCE_DIR) + "/tests/data/" + name;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Gold ESDs reversed, with a duplicate and an event of another scenario.
std::string corrupted_generated(const Corpus& gold) {
  std::string out;
  const auto& scenarios = gold.scenarios();
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& other = gold.esds(scenarios[(s + 1) % scenarios.size()].id);
    for (const auto& esd : gold.esds(scenarios[s].id)) {
      std::vector<std::string> ev = esd.texts();
      std::reverse(ev.begin(), ev.end());
      ev.insert(ev.begin() + 1, other.front().events.front().text);
      ev.push_back(ev.front());
      out += json{{"scenario", scenarios[s].name},
                  {"esd_id", esd.esd_id + "_gen"},
                  {"events", ev}}
                 .dump() +
             "\n";
    }
  }
  return out;
}

TEST_CASE("folds --fixed reproduces the shipped plan file") {
  const Run r = sif({"folds", "--fixed"});
  CHECK(r.status == 0);
  CHECK(r.out == read_file(std::string(SIF_SOURCE_DIR) + "/data/fixed_folds.json"));
  const Run t = sif({"folds", "--fixed", "--table"});
  CHECK(lines(t.out).size() == 9);
}

TEST_CASE("dry run prints the configuration without side effects") {
  TempDir tmp;
  const Run r = sif({"folds", "--fixed", "--output", tmp / "plan.json", "--dry-run"});
  CHECK(r.status == 0);
  CHECK(r.out.rfind("[folds]\n", 0) == 0);
  CHECK(r.out.find("fixed=true") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp / "plan.json"));
  const Run e = sif({"--dry-run", "export-finetune", "--corpus",
                     data("toy_fold_gold.jsonl"), "--out-dir", tmp / "run"});
  CHECK(e.status == 0);
  CHECK_FALSE(fs::exists(tmp / "run"));
}

TEST_CASE("config files supply subcommand options") {
  TempDir tmp;
  write_file_atomic(tmp / "sif.ini", "[folds]\nfixed=true\ntable=true\n");
  const Run r = sif({"--config", tmp / "sif.ini", "folds"});
  CHECK(r.status == 0);
  CHECK(r.out == sif({"folds", "--fixed", "--table"}).out);
}

TEST_CASE("errors are reported as JSON with an exit code") {
  const Run usage = sif({"folds", "--no-such-flag"});
  CHECK(usage.status == 2);
  CHECK(json::parse(usage.err)["error"]["kind"] == "UsageError");
  const Run none = sif({});
  CHECK(none.status == 2);
  const Run bad = sif({"folds"});
  CHECK(bad.status == 1);
  CHECK(json::parse(bad.err)["error"]["kind"] == "InvalidArgument");

  TempDir tmp;
  write_file_atomic(tmp / "gen.jsonl",
                    "{\"scenario\":\"flying to mars\",\"esd_id\":\"x\","
                    "\"events\":[\"launch\"]}\n");
  const Run unknown = sif({"evaluate", "--gold", data("toy_fold_gold.jsonl"),
                           "--input", tmp / "gen.jsonl", "--fixed-folds"});
  CHECK(unknown.status == 1);
  const json err = json::parse(unknown.err)["error"];
  CHECK(err["kind"] == "UnknownScenario");
  CHECK(err["ids"] == json::array({"flying to mars"}));
}

TEST_CASE("ingest converts text and is idempotent on canonical files") {
  TempDir tmp;
  write_file_atomic(tmp / "raw.txt",
                    "Baking a Cake\n1. Buy flour\n2. Mix batter\n\n"
                    "Baking a Cake\n1. Preheat oven\n2. Bake\n");
  const Run r = sif({"ingest", "--input", tmp / "raw.txt", "--output", tmp / "c.jsonl"});
  CHECK(r.status == 0);
  CHECK(json::parse(r.out) == json{{"scenarios", 1}, {"esds", 2}});
  const std::string canonical = read_file(tmp / "c.jsonl");
  CHECK(lines(canonical).size() == 2);
  CHECK(sif({"ingest", "--input", tmp / "c.jsonl"}).out == canonical);
}

TEST_CASE("postprocess with every step disabled is the identity") {
  TempDir tmp;
  const Corpus gold = load_corpus(data("toy_fold_gold.jsonl"));
  write_file_atomic(tmp / "gen.jsonl", corrupted_generated(gold));
  const std::string canonical = sif({"postprocess", "--input", tmp / "gen.jsonl",
                                     "--no-relevance", "--no-dedup", "--no-reorder"})
                                    .out;
  write_file_atomic(tmp / "canon.jsonl", canonical);
  const Run r = sif({"postprocess", "--input", tmp / "canon.jsonl", "--no-relevance",
                     "--no-dedup", "--no-reorder"});
  CHECK(r.status == 0);
  CHECK(r.out == canonical);
}

TEST_CASE("postprocess through endpoint workers named by environment") {
  TempDir tmp;
  write_file_atomic(tmp / "gen.jsonl",
                    "{\"scenario\":\"s\",\"esd_id\":\"a\",\"events\":[\"c\",\"a\",\"b\",\"a\"]}\n");
  const std::string worker = std::string("exec:") + SIF_FAKE_WORKER;
  const std::string env = "SIF_RELEVANCE_ENDPOINT=" + quote(worker) +
                          " SIF_TEMPORAL_ENDPOINT=" + quote(worker);
  const Run r = sif({"postprocess", "--input", tmp / "gen.jsonl", "--report",
                     tmp / "report.jsonl"},
                    env);
  CHECK(r.status == 0);
  CHECK(json::parse(r.out)["events"] == json::array({"a", "b", "c"}));
  const json report = json::parse(read_file(tmp / "report.jsonl"));
  CHECK(report["pair_queries"] == 3);
  CHECK(report["removed_duplicates"].size() == 1);

  const Run failing = sif({"postprocess", "--input", tmp / "gen.jsonl",
                           "--no-relevance", "--temporal-endpoint",
                           worker + " --mode die-after --count 1",
                           "--report", tmp / "r2.jsonl"});
  CHECK(failing.status == 0);
  CHECK(failing.out.empty());
  const json failed = json::parse(read_file(tmp / "r2.jsonl"));
  CHECK(failed["error"].get<std::string>().find("EndpointTimeout") == 0);
}

TEST_CASE("postprocess over a run root") {
  TempDir tmp;
  const Corpus gold = load_corpus(data("toy_fold_gold.jsonl"));
  write_file_atomic(tmp / "SEQUENCE/fold-1/generated.jsonl", corrupted_generated(gold));
  write_file_atomic(tmp / "EXPECT/fold-2/generated.jsonl",
                    "{\"scenario\":\"baking a cake\",\"esd_id\":\"t\","
                    "\"text\":\"1. mix 2. bake 3. mix\"}\n");
  const Run r = sif({"postprocess", "--root", tmp.path.string(), "--oracle-gold",
                     data("toy_fold_gold.jsonl")});
  CHECK(r.status == 0);
  const json summary = json::parse(r.out);
  CHECK(summary["esds"] == 13);
  CHECK(summary["failures"] == 0);
  CHECK(summary.contains("acyclic"));
  CHECK(lines(read_file(tmp / "SEQUENCE/fold-1/postprocessed.jsonl")).size() == 12);
  CHECK(lines(read_file(tmp / "EXPECT/fold-2/report.jsonl")).size() == 1);
}

double bleu_cell(const std::string& cell) { return std::stod(cell); }

TEST_CASE("ablation table improves with each step") {
  TempDir tmp;
  const Corpus gold = load_corpus(data("toy_fold_gold.jsonl"));
  write_file_atomic(tmp / "gen.jsonl", corrupted_generated(gold));
  const Run r = sif({"evaluate", "--gold", data("toy_fold_gold.jsonl"), "--input",
                     tmp / "gen.jsonl", "--ablation", "--oracle-gold",
                     data("toy_fold_gold.jsonl"), "--output", tmp / "abl.jsonl"});
  REQUIRE(r.status == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "config\tgen.jsonl");
  std::vector<double> scores;
  const std::vector<std::string> names = {"FT", "+R", "+R+D", "SIF"};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto tab = rows[i + 1].find('\t');
    CHECK(rows[i + 1].substr(0, tab) == names[i]);
    scores.push_back(bleu_cell(rows[i + 1].substr(tab + 1)));
  }
  CHECK(scores[0] < scores[1]);
  CHECK(scores[1] < scores[2]);
  CHECK(scores[2] < scores[3]);
  CHECK(rows[4] == "SIF\t100.0 (0.0)");
  CHECK(lines(read_file(tmp / "abl.jsonl")).size() == 4);

  const Run plain = sif({"evaluate", "--gold", data("toy_fold_gold.jsonl"),
                         "--input", data("toy_fold_generated.jsonl")});
  CHECK(lines(plain.out)[1] == "toy_fold_generated.jsonl\t71.7 (0.0)");
}

TEST_CASE("export-finetune layout") {
  TempDir tmp;
  const Run r = sif({"export-finetune", "--corpus", data("toy_fold_gold.jsonl"),
                     "--k", "3", "--variant", "SEQUENCE", "--variant", "tokens",
                     "--fold", "2", "--out-dir", tmp.path.string()});
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["fold_variant_dirs"] == 2);
  CHECK(fs::exists(tmp / "templates.json"));
  for (const std::string v : {"SEQUENCE", "TOKENS"}) {
    const std::string dir = tmp / (v + "/fold-2");
    CHECK(lines(read_file(dir + "/finetune.txt")).size() == 8);
    const json manifest = json::parse(read_file(dir + "/generation.json"));
    CHECK(manifest["variant"] == v);
    CHECK(manifest["fold"] == 2);
    CHECK(manifest["top_k"] == 50);
    CHECK(manifest["prompts"].size() == 1);
  }
  CHECK_FALSE(fs::exists(tmp / "SEQUENCE/fold-1"));
}

TEST_CASE("training sets and baseline training are reproducible") {
  TempDir a, b;
  std::ostringstream corpus;
  write_corpus(corpus, testing::make_world(8, 4, 11).gold);
  write_file_atomic(a / "corpus.jsonl", corpus.str());
  for (const TempDir* t : {&a, &b}) {
    const Run r = sif({"build-train", "--corpus", a / "corpus.jsonl", "--k", "4",
                       "--fold", "1", "--out-dir", t->path.string()});
    REQUIRE(r.status == 0);
  }
  for (const std::string f : {"relevance.train.jsonl", "relevance.valid.jsonl",
                              "temporal.train.jsonl", "temporal.valid.jsonl"}) {
    CHECK(read_file(a / ("fold-1/" + f)) == read_file(b / ("fold-1/" + f)));
  }
  const Run t = sif({"train-baseline", "--train", a / "fold-1/temporal.train.jsonl",
                     "--valid", a / "fold-1/temporal.valid.jsonl", "--output",
                     a / "temporal.model", "--dim", "4096"});
  REQUIRE(t.status == 0);
  const json summary = json::parse(t.out);
  CHECK(summary["task"] == "temporal");
  CHECK(summary["train_accuracy"].get<double>() >= 0.5);
  CHECK(read_file(a / "temporal.model").rfind("sif-baseline-model 1\n", 0) == 0);

  const Run mixed = sif({"train-baseline", "--train", a / "fold-1/temporal.train.jsonl",
                         "--valid", a / "fold-1/relevance.valid.jsonl", "--output",
                         a / "x.model"});
  CHECK(mixed.status == 1);
}

TEST_CASE("probe prints sixteen prompts") {
  const Run r = sif({"probe", "--scenario", "Baking a Cake", "--event", "buy flour",
                     "--event", "mix", "--event", "bake"});
  CHECK(r.status == 0);
  CHECK(lines(r.out).size() == 16);
  const Run j = sif({"probe", "--scenario", "baking a cake", "--corpus",
                     data("toy_fold_gold.jsonl"), "--json"});
  const auto rows = lines(j.out);
  REQUIRE(rows.size() == 16);
  const json first = json::parse(rows[0]);
  CHECK(first["beginning"] == 1);
  CHECK(first["continuation"] == 1);
}

TEST_CASE("annotate-score summary") {
  TempDir tmp;
  auto rec = [](const char* who, const char* id, std::vector<int> rel,
                std::vector<int> ord, int missing) {
    return json{{"annotator", who}, {"scenario", "s"}, {"esd_id", id},
                {"relevance", rel}, {"order", ord},   {"missing", missing}}
               .dump() +
           "\n";
  };
  write_file_atomic(tmp / "a.jsonl", rec("A", "1", {1, 1, 0}, {1, 0}, 2) +
                                         rec("A", "2", {1, 1}, {1}, 1) +
                                         rec("A", "3", {1, 1, 1}, {0, 1}, 4));
  write_file_atomic(tmp / "b.jsonl", rec("B", "1", {1, 1, 1}, {1, 1}, 3) +
                                         rec("B", "2", {0, 1}, {0}, 1) +
                                         rec("B", "3", {1, 1, 1}, {1, 1}, 2));
  const Run r = sif({"annotate-score", "--annotations", tmp / "a.jsonl",
                     "--annotations", tmp / "b.jsonl", "--output", tmp / "s.json"});
  REQUIRE(r.status == 0);
  CHECK(lines(r.out)[1] == "87.5\t83.3\t2.17\t-0.14\t0.00\t0.50");
  CHECK(json::parse(read_file(tmp / "s.json"))["eligible_pairs"] == 3);
}

}  // namespace
}  // namespace sif
