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

#include "sif/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sif/error.hpp"

namespace sif {
namespace {

using json = nlohmann::json;

// Exact duplicates removed, first occurrence kept.
std::vector<std::string> distinct_events(const EventSequence& esd) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& e : esd.events) {
    if (seen.insert(e.text).second) out.push_back(e.text);
  }
  return out;
}

std::set<std::string> scenario_event_set(const Corpus& corpus,
                                         const std::string& scenario) {
  std::set<std::string> out;
  for (const auto& esd : corpus.esds(scenario)) {
    for (const auto& e : esd.events) out.insert(e.text);
  }
  return out;
}

constexpr int kMaxResampleAttempts = 1000;

}  // namespace

FoldPlan partition_folds(const Corpus& corpus, std::size_t k,
                         std::uint64_t seed) {
  const std::size_t n = corpus.scenarios().size();
  if (k < 2 || n == 0 || n % k != 0) {
    throw Error(ErrorKind::kIndivisiblePartition,
                std::to_string(n) + " scenarios into " + std::to_string(k) +
                    " folds");
  }
  std::vector<std::string> ids;
  for (const auto& s : corpus.scenarios()) ids.push_back(s.id);
  Rng rng(seed);
  rng.shuffle(std::span<std::string>(ids));

  FoldPlan plan;
  plan.seed = seed;
  const std::size_t per_fold = n / k;
  for (std::size_t f = 0; f < k; ++f) {
    Fold fold;
    fold.scenarios.assign(ids.begin() + f * per_fold,
                          ids.begin() + (f + 1) * per_fold);
    // Uniform over the scenarios of the other folds.
    std::size_t pick = rng.uniform(n - per_fold);
    if (pick >= f * per_fold) pick += per_fold;
    fold.heldout = ids[pick];
    plan.folds.push_back(std::move(fold));
  }
  return plan;
}

FoldPlan load_fixed_plan() {
  FoldPlan plan;
  plan.folds = {
      {{"baking a cake", "borrowing a book from the library",
        "flying in an airplane", "going on a train", "riding on a bus"},
       "cooking pasta"},
      {{"getting a hair cut", "going grocery shopping", "planting a tree",
        "repairing a flat bicycle tire", "taking a bath"},
       "going bowling"},
      {{"eating in a fast food restaurant", "paying with a credit card",
        "playing tennis", "going to the theater", "taking a child to bed"},
       "planting a tree"},
      {{"washing dishes", "making a bonfire", "going to the sauna",
        "making coffee", "going to the swimming pool"},
       "going grocery shopping"},
      {{"taking a shower", "ironing laundry", "taking a driving lesson",
        "going to the dentist", "going to a funeral"},
       "taking the underground"},
      {{"washing one's hair", "fueling a car",
        "sending food back (in a restaurant)",
        "changing batteries in an alarm clock", "checking in at an airport"},
       "paying with a credit card"},
      {{"having a barbecue", "ordering a pizza", "cleaning up a flat",
        "making scrambled eggs", "taking the underground"},
       "eating in a fast food restaurant"},
      {{"renovating a room", "cooking pasta", "sewing a button",
        "doing laundry", "going bowling"},
       "getting a hair cut"},
  };
  return plan;
}

void check_fold_plan(const FoldPlan& plan) {
  std::map<std::string, std::size_t> owner;
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    for (const auto& s : plan.folds[f].scenarios) {
      if (!owner.emplace(s, f).second) {
        throw Error(ErrorKind::kInvalidArgument,
                    "scenario '" + s + "' appears in two folds");
      }
    }
  }
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    auto it = owner.find(plan.folds[f].heldout);
    if (it == owner.end() || it->second == f) {
      throw Error(ErrorKind::kInvalidArgument,
                  "held-out scenario of fold " + std::to_string(f + 1) +
                      " must belong to another fold");
    }
  }
}

FoldSplit split_for_fold(const FoldPlan& plan, std::size_t fold_index) {
  if (fold_index >= plan.folds.size()) {
    throw Error(ErrorKind::kInvalidArgument,
                "fold " + std::to_string(fold_index + 1) + " out of range");
  }
  FoldSplit split;
  const Fold& test = plan.folds[fold_index];
  split.test = test.scenarios;
  split.validation = {test.heldout};
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    if (f == fold_index) continue;
    for (const auto& s : plan.folds[f].scenarios) {
      split.finetune.push_back(s);
      if (s != test.heldout) split.train.push_back(s);
    }
  }
  return split;
}

std::string fold_plan_json(const FoldPlan& plan) {
  nlohmann::ordered_json doc;
  if (plan.seed) {
    doc["seed"] = *plan.seed;
  } else {
    doc["seed"] = "fixed";
  }
  doc["folds"] = nlohmann::ordered_json::array();
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    nlohmann::ordered_json fold;
    fold["fold"] = f + 1;
    fold["scenarios"] = plan.folds[f].scenarios;
    fold["heldout"] = plan.folds[f].heldout;
    doc["folds"].push_back(fold);
  }
  return doc.dump(2) + "\n";
}

FoldPlan parse_fold_plan(const std::string& json_text) {
  FoldPlan plan;
  try {
    const json doc = json::parse(json_text);
    const auto& seed = doc.at("seed");
    if (seed.is_number_unsigned()) plan.seed = seed.get<std::uint64_t>();
    for (const auto& fold : doc.at("folds")) {
      plan.folds.push_back({fold.at("scenarios").get<std::vector<std::string>>(),
                            fold.at("heldout").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("fold plan: ") + e.what());
  }
  check_fold_plan(plan);
  return plan;
}

FoldPlan load_fold_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_fold_plan(buffer.str());
}

std::string fold_plan_table(const FoldPlan& plan) {
  std::string out = "fold\tscenarios\theldout\n";
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    out += std::to_string(f + 1) + '\t';
    for (std::size_t i = 0; i < plan.folds[f].scenarios.size(); ++i) {
      if (i > 0) out += ", ";
      out += plan.folds[f].scenarios[i];
    }
    out += '\t' + plan.folds[f].heldout + '\n';
  }
  return out;
}

std::string finetune_line(const EventSequence& esd, PromptVariant variant) {
  return std::string(kBeginOfScript) + " " +
         encode(esd.scenario, esd.events, variant) + " " +
         std::string(kEndOfScript);
}

std::vector<std::string> export_finetune(
    const Corpus& corpus, PromptVariant variant,
    std::span<const std::string> scenarios) {
  std::vector<std::string> lines;
  for (const auto& s : scenarios) {
    for (const auto& esd : corpus.esds(s)) {
      lines.push_back(finetune_line(esd, variant));
    }
  }
  return lines;
}

std::string RelevanceExample::serialized() const {
  return serialize_query({scenario, {event}});
}

std::string TemporalExample::serialized() const {
  return serialize_query({scenario, {event_a, event_b}});
}

std::vector<RelevanceExample> build_relevance_set(
    const Corpus& corpus, std::span<const std::string> scenarios,
    std::span<const std::string> negative_pool,
    const RelevanceSetOptions& options) {
  std::set<std::string> distinct(negative_pool.begin(), negative_pool.end());
  distinct.insert(scenarios.begin(), scenarios.end());
  if (distinct.size() < 2) {
    throw Error(ErrorKind::kInsufficientScenarios,
                "negative sampling needs at least two scenarios");
  }
  Rng rng(options.seed);
  std::vector<RelevanceExample> out;
  for (const auto& scenario : scenarios) {
    const auto own = scenario_event_set(corpus, scenario);
    std::vector<const std::string*> others;
    for (const auto& s : negative_pool) {
      if (s != scenario) others.push_back(&s);
    }
    if (others.empty() && options.neg_per_pos > 0) {
      throw Error(ErrorKind::kInsufficientScenarios,
                  "no other scenario to draw negatives for '" + scenario + "'");
    }
    for (const auto& esd : corpus.esds(scenario)) {
      for (const auto& event : distinct_events(esd)) {
        out.push_back({scenario, event, 1});
        for (std::size_t k = 0; k < options.neg_per_pos; ++k) {
          bool drawn = false;
          for (int attempt = 0; attempt < kMaxResampleAttempts; ++attempt) {
            const std::string& source = *others[rng.uniform(others.size())];
            const auto& esds = corpus.esds(source);
            const auto& events = esds[rng.uniform(esds.size())].events;
            const std::string& candidate =
                events[rng.uniform(events.size())].text;
            if (own.count(candidate)) continue;
            out.push_back({scenario, candidate, 0});
            drawn = true;
            break;
          }
          if (!drawn) {
            throw Error(ErrorKind::kInsufficientScenarios,
                        "every candidate negative for '" + scenario +
                            "' is one of its own events");
          }
        }
      }
    }
  }
  return out;
}

std::vector<RelevanceExample> build_relevance_set(
    const Corpus& corpus, std::span<const std::string> scenarios,
    const RelevanceSetOptions& options) {
  return build_relevance_set(corpus, scenarios, scenarios, options);
}

std::vector<TemporalExample> build_temporal_set(
    const Corpus& corpus, std::span<const std::string> scenarios,
    const TemporalSetOptions& options) {
  Rng rng(options.seed);
  std::vector<TemporalExample> out;
  for (const auto& scenario : scenarios) {
    for (const auto& esd : corpus.esds(scenario)) {
      const auto events = distinct_events(esd);
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < events.size(); ++i) {
        for (std::size_t j = i + 1; j < events.size(); ++j) {
          pairs.emplace_back(i, j);
        }
      }
      const std::size_t cap = options.max_pairs_per_esd;
      if (cap > 0 && pairs.size() > cap) {
        // Partial Fisher-Yates, then restore enumeration order.
        for (std::size_t i = 0; i < cap; ++i) {
          std::swap(pairs[i], pairs[i + rng.uniform(pairs.size() - i)]);
        }
        pairs.resize(cap);
        std::sort(pairs.begin(), pairs.end());
      }
      for (const auto& [i, j] : pairs) {
        out.push_back({scenario, events[i], events[j], 1});
        out.push_back({scenario, events[j], events[i], 0});
      }
    }
  }
  return out;
}

void write_examples(std::ostream& out,
                    std::span<const RelevanceExample> examples) {
  for (const auto& e : examples) {
    json record;
    record["scenario"] = e.scenario;
    record["text_a"] = e.event;
    record["label"] = e.label;
    record["serialized_input"] = e.serialized();
    out << record.dump() << '\n';
  }
}

void write_examples(std::ostream& out,
                    std::span<const TemporalExample> examples) {
  for (const auto& e : examples) {
    json record;
    record["scenario"] = e.scenario;
    record["text_a"] = e.event_a;
    record["text_b"] = e.event_b;
    record["label"] = e.label;
    record["serialized_input"] = e.serialized();
    out << record.dump() << '\n';
  }
}

ExampleFile read_examples(std::istream& in) {
  ExampleFile file;
  std::string line;
  std::size_t line_no = 0;
  bool seen_any = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (collapse_whitespace(line).empty()) continue;
    try {
      const json record = json::parse(line);
      const Task task =
          record.contains("text_b") ? Task::kTemporal : Task::kRelevance;
      if (seen_any && task != file.task) {
        throw Error(ErrorKind::kParseError,
                    "line " + std::to_string(line_no) + ": mixed tasks");
      }
      file.task = task;
      seen_any = true;
      const int label = record.at("label").get<int>();
      if (label != 0 && label != 1) {
        throw Error(ErrorKind::kParseError,
                    "line " + std::to_string(line_no) + ": label not 0/1");
      }
      file.examples.push_back(
          {record.at("serialized_input").get<std::string>(), label});
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParseError,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return file;
}

ExampleFile load_examples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path);
  return read_examples(in);
}

}  // namespace sif
