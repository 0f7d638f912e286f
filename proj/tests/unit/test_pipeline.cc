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


#include <map>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "sif/error.hpp"
#include "sif/oracle.hpp"
#include "sif/pipeline.hpp"

namespace sif {
namespace {

EventSequence seq(std::vector<std::string> events, std::string id = "g1") {
  return make_sequence(Scenario::from_name("baking a cake"), events,
                       Provenance::kGenerated, std::move(id));
}

RulesClassifier cake_rules() {
  std::map<std::string, ScenarioRules> rules;
  rules["baking a cake"] = {{"mix", "pour", "bake", "eat"},
                            {"mix", "pour", "bake", "eat"}};
  return RulesClassifier(rules);
}

TEST_CASE("disabled steps leave the sequence unchanged") {
  const auto esd = seq({"eat", "noise", "mix", "mix"});
  PipelineConfig cfg;
  cfg.enable_relevance = cfg.enable_dedup = cfg.enable_reorder = false;
  const auto r = run_pipeline(esd, cfg, nullptr, nullptr);
  CHECK(r.esd.events == esd.events);
  CHECK(r.esd.provenance == Provenance::kPostprocessed);
  REQUIRE(r.esd.report);
  CHECK(r.report.final_permutation == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(r.report.pair_queries == 0);
}

TEST_CASE("missing classifiers for enabled steps are rejected") {
  const auto esd = seq({"mix"});
  CHECK_THROWS_AS(run_pipeline(esd, PipelineConfig{}, nullptr, nullptr), Error);
  RulesClassifier rules = cake_rules();
  PipelineConfig cfg;
  cfg.enable_reorder = true;
  CHECK_THROWS_AS(run_pipeline(esd, cfg, &rules, nullptr), Error);
}

TEST_CASE("full pipeline on a corrupted sequence") {
  RulesClassifier rules = cake_rules();
  const auto esd = seq({"eat", "noise", "bake", "mix", "bake", "pour"});
  const auto r = run_pipeline(esd, PipelineConfig{}, &rules, &rules);
  CHECK(r.esd.texts() == std::vector<std::string>{"mix", "pour", "bake", "eat"});
  CHECK(r.report.final_permutation == std::vector<std::size_t>{3, 5, 2, 0});
  REQUIRE(r.report.removed_irrelevant.size() == 1);
  CHECK(r.report.removed_irrelevant[0].event == Event{"noise", 1});
  CHECK(r.report.removed_irrelevant[0].score == 0.0);
  REQUIRE(r.report.removed_duplicates.size() == 1);
  CHECK(r.report.removed_duplicates[0].event.original_index == 4);
  CHECK(r.report.removed_duplicates[0].kept_index == 2);
  CHECK(r.report.pair_queries == 6);
  CHECK(r.report.graph_acyclic);
  CHECK(r.report.reorder_applied);
}

TEST_CASE("relevance threshold is inclusive") {
  CallbackClassifier half([](Task, const Query& q) {
    return verdict_from_score(q.events[0] == "keep" ? 0.5 : 0.49);
  });
  const auto out = step_relevance(seq({"keep", "drop", "keep"}), half, 0.5);
  CHECK(out.texts() == std::vector<std::string>{"keep", "keep"});
}

TEST_CASE("near-duplicate removal by edit distance") {
  const auto esd = seq({"mix flour", "mix flour", "mix flours", "bake"});
  CHECK(step_dedup(esd, 0).texts() ==
        std::vector<std::string>{"mix flour", "mix flours", "bake"});
  CHECK(step_dedup(esd, 1).texts() ==
        std::vector<std::string>{"mix flour", "bake"});
}

TEST_CASE("levenshtein counts code points") {
  CHECK(levenshtein("", "") == 0);
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("flaw", "lawn") == 2);
  CHECK(levenshtein("caf\xc3\xa9", "cafe") == 1);
  CHECK(levenshtein("\xc3\xa9", "") == 1);
  CHECK(levenshtein("abc", "abc") == 0);
}

TEST_CASE("cyclic predictions keep the input order") {
  CallbackClassifier rock_paper_scissors([](Task, const Query& q) {
    static const std::map<std::string, std::string> beats = {
        {"rock", "scissors"}, {"scissors", "paper"}, {"paper", "rock"}};
    return verdict_from_score(beats.at(q.events[0]) == q.events[1] ? 0.9 : 0.1);
  });
  PipelineReport report;
  const auto esd = seq({"paper", "rock", "scissors"});
  const auto out = step_reorder(esd, rock_paper_scissors, &report);
  CHECK(out.events == esd.events);
  CHECK_FALSE(report.graph_acyclic);
  CHECK_FALSE(report.reorder_applied);
  CHECK(report.pair_queries == 3);
}

TEST_CASE("order graph construction and sorting") {
  CallbackClassifier always_first([](Task, const Query&) {
    return Verdict{1, 1.0};
  });
  const auto g = build_order_graph(seq({"a", "b", "c"}), always_first);
  CHECK(g.is_tournament());
  CHECK(g.nodes == std::vector<std::size_t>{0, 1, 2});
  CHECK(topological_order(g) == std::vector<std::size_t>{0, 1, 2});
  OrderGraph missing{{0, 1, 2}, {{0, 1}, {1, 2}}};
  CHECK_FALSE(missing.is_tournament());
  CHECK(topological_order(missing) == std::vector<std::size_t>{0, 1, 2});
  OrderGraph ties{{5, 3, 9}, {{9, 5}}};
  CHECK(topological_order(ties) == std::vector<std::size_t>{3, 9, 5});
  OrderGraph cycle{{0, 1}, {{0, 1}, {1, 0}}};
  CHECK_FALSE(topological_order(cycle).has_value());
}

TEST_CASE("ablation settings") {
  const auto steps = ablation_steps();
  REQUIRE(steps.size() == 4);
  CHECK(steps[0].name == "FT");
  CHECK(steps[3].name == "SIF");
  CHECK_FALSE(steps[0].config.enable_relevance);
  CHECK(steps[1].config.enable_relevance);
  CHECK_FALSE(steps[1].config.enable_dedup);
  CHECK(steps[2].config.enable_dedup);
  CHECK_FALSE(steps[2].config.enable_reorder);
  CHECK(steps[3].config.enable_reorder);
}

TEST_CASE("acyclicity rates") {
  PipelineReport yes, no;
  yes.graph_acyclic = true;
  const std::vector<PipelineReport> reports = {yes, yes, no, yes};
  CHECK(acyclicity_rate(reports) == 0.75);
  CHECK_THROWS_AS(acyclicity_rate({}), Error);
  const std::vector<std::pair<std::string, PipelineReport>> keyed = {
      {"a", yes}, {"a", no}, {"b", yes}, {"b", yes}};
  const GroupedRate g = grouped_acyclicity(keyed);
  REQUIRE(g.per_group.size() == 2);
  CHECK(g.per_group[0] == std::pair<std::string, double>{"a", 0.5});
  CHECK(g.mean == doctest::Approx(0.75));
  CHECK(g.std == doctest::Approx(0.3535533905932738));
  CHECK(format_percent_mean_std(g.mean, g.std) == "75±35%");
}

TEST_CASE("generated records") {
  std::istringstream in(
      "{\"scenario\": \"Baking a Cake\", \"esd_id\": \"a\", \"events\": "
      "[\"Mix\", \" \", \"bake\"]}\n"
      "\n"
      "{\"scenario\": \"baking a cake\", \"esd_id\": \"b\", \"variant\": "
      "\"SEQUENCE\", \"text\": \"1. mix 2. bake\"}\n"
      "{\"scenario\": \"baking a cake\", \"esd_id\": \"c\", \"variant\": "
      "\"SEQUENCE\", \"text\": \"nothing here\"}\n");
  const auto records = read_generated(in);
  REQUIRE(records.size() == 3);
  CHECK(records[0].esd.texts() == std::vector<std::string>{"mix", "bake"});
  CHECK(records[0].esd.events[1].original_index == 1);
  CHECK_FALSE(records[0].variant.has_value());
  CHECK(records[1].esd.texts() == std::vector<std::string>{"mix", "bake"});
  CHECK(records[1].variant == PromptVariant::kSequence);
  CHECK(records[2].esd.events.empty());
  CHECK(generated_record(records[1]) ==
        R"({"esd_id":"b","events":["mix","bake"],"scenario":"baking a cake","variant":"SEQUENCE"})");

  auto kind = [](const std::string& text) {
    std::istringstream s(text);
    try {
      read_generated(s);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kInvalidArgument;
  };
  CHECK(kind("{\"scenario\":\"s\",\"esd_id\":\"x\",\"text\":\"1. a\"}") ==
        ErrorKind::kParseError);
  CHECK(kind("{\"scenario\":\"s\",\"esd_id\":\"x\",\"events\":[\"a\"]}\n"
             "{\"scenario\":\"s\",\"esd_id\":\"x\",\"events\":[\"b\"]}") ==
        ErrorKind::kDuplicateEsdId);
  CHECK(kind("{\"scenario\":\"s\"}") == ErrorKind::kParseError);
  CHECK(kind("not json") == ErrorKind::kParseError);
  CHECK(kind("{\"scenario\":\"s\",\"esd_id\":\"x\",\"variant\":\"NOPE\","
             "\"events\":[]}") == ErrorKind::kParseError);
}

TEST_CASE("report records") {
  RulesClassifier rules = cake_rules();
  const auto r = run_pipeline(seq({"noise", "bake", "mix"}), PipelineConfig{},
                              &rules, &rules);
  const auto j = nlohmann::json::parse(report_record(r.report));
  CHECK(j["esd_id"] == "g1");
  CHECK(j["removed_irrelevant"][0]["event"] == "noise");
  CHECK(j["removed_irrelevant"][0]["index"] == 0);
  CHECK(j["final_permutation"] == nlohmann::json::array({2, 1}));
  CHECK(j["graph_acyclic"] == true);
  CHECK_FALSE(j.contains("error"));
}

TEST_CASE("batch failures are isolated per ESD") {
  RulesClassifier rules = cake_rules();
  CallbackClassifier flaky([](Task, const Query& q) -> Verdict {
    if (q.events[0] == "boom") throw Error(ErrorKind::kEndpointTimeout, "late", {"9"});
    return Verdict{1, 0.9};
  });
  const std::vector<GeneratedRecord> records = {
      {seq({"mix", "bake"}, "ok1"), PromptVariant::kSequence},
      {seq({"boom", "bake"}, "bad"), std::nullopt},
      {seq({"eat"}, "ok2"), std::nullopt},
  };
  std::ostringstream log;
  const auto result = run_batch(records, PipelineConfig{}, &flaky, &rules, &log);
  CHECK(result.failures == 1);
  REQUIRE(result.outputs.size() == 2);
  CHECK(result.outputs[0].esd.esd_id == "ok1");
  CHECK(result.outputs[0].variant == PromptVariant::kSequence);
  CHECK(result.outputs[1].esd.esd_id == "ok2");
  REQUIRE(result.reports.size() == 3);
  REQUIRE(result.reports[1].error.has_value());
  CHECK(result.reports[1].error->find("EndpointTimeout") != std::string::npos);
  CHECK(log.str().find("esd bad:") == 0);
}

}  // namespace
}  // namespace sif
