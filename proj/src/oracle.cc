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

#include "sif/oracle.hpp"

#include <fstream>
#include <istream>
#include <set>

#include "json.hpp"
#include "sif/error.hpp"
#include "sif/pipeline.hpp"

namespace sif {

RulesClassifier::RulesClassifier(std::map<std::string, ScenarioRules> rules)
    : rules_(std::move(rules)) {
  for (auto& [scenario, r] : rules_) {
    auto& pos = positions_[scenario];
    for (std::size_t i = 0; i < r.order.size(); ++i) {
      pos.emplace(r.order[i], i);
      r.events.insert(r.order[i]);
    }
  }
}

RulesClassifier RulesClassifier::from_corpus(const Corpus& corpus) {
  std::map<std::string, ScenarioRules> rules;
  for (const auto& scenario : corpus.scenarios()) {
    ScenarioRules& r = rules[scenario.id];
    std::vector<std::string> first_seen;
    std::map<std::string, std::size_t> rank;
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& esd : corpus.esds(scenario.id)) {
      for (std::size_t i = 0; i < esd.events.size(); ++i) {
        const auto& text = esd.events[i].text;
        if (r.events.insert(text).second) {
          rank.emplace(text, first_seen.size());
          first_seen.push_back(text);
        }
        if (i > 0) {
          const std::size_t u = rank.at(esd.events[i - 1].text);
          const std::size_t v = rank.at(text);
          if (u != v) edges.emplace(u, v);
        }
      }
    }
    OrderGraph graph;
    for (std::size_t i = 0; i < first_seen.size(); ++i) graph.nodes.push_back(i);
    graph.edges.assign(edges.begin(), edges.end());
    const auto order = topological_order(graph);
    if (order) {
      for (std::size_t i : *order) r.order.push_back(first_seen[i]);
    } else {
      r.order = first_seen;
    }
  }
  return RulesClassifier(std::move(rules));
}

RulesClassifier RulesClassifier::from_json(std::istream& in) {
  std::map<std::string, ScenarioRules> rules;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& [name, entry] : doc.items()) {
      ScenarioRules r;
      for (const auto& e : entry.value("events", nlohmann::json::array())) {
        r.events.insert(normalize_event(e.get<std::string>()).text);
      }
      for (const auto& e : entry.value("order", nlohmann::json::array())) {
        r.order.push_back(normalize_event(e.get<std::string>()).text);
      }
      rules[Scenario::from_name(name).id] = std::move(r);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("rules file: ") + e.what());
  }
  return RulesClassifier(std::move(rules));
}

RulesClassifier RulesClassifier::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path);
  return from_json(in);
}

std::string RulesClassifier::to_json() const {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [scenario, r] : rules_) {
    doc[scenario]["events"] = std::vector<std::string>(r.events.begin(),
                                                       r.events.end());
    doc[scenario]["order"] = r.order;
  }
  return doc.dump(2) + "\n";
}

Verdict RulesClassifier::relevance(const std::string& scenario,
                                   const std::string& event) const {
  auto it = rules_.find(scenario);
  const bool known = it != rules_.end() && it->second.events.count(event) > 0;
  return known ? Verdict{1, 1.0} : Verdict{0, 0.0};
}

Verdict RulesClassifier::temporal(const std::string& scenario,
                                  const std::string& a,
                                  const std::string& b) const {
  auto it = positions_.find(scenario);
  if (it != positions_.end()) {
    auto pa = it->second.find(a);
    auto pb = it->second.find(b);
    if (pa != it->second.end() && pb != it->second.end()) {
      return pa->second < pb->second ? Verdict{1, 1.0} : Verdict{0, 0.0};
    }
  }
  return {1, 0.5};
}

std::vector<Verdict> RulesClassifier::predict(Task task,
                                              std::span<const Query> queries) {
  std::vector<Verdict> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    const std::size_t want = task == Task::kRelevance ? 1 : 2;
    if (q.events.size() != want) {
      throw Error(ErrorKind::kInvalidArgument,
                  std::string(task_name(task)) + " query needs " +
                      std::to_string(want) + " event(s)");
    }
    out.push_back(task == Task::kRelevance
                      ? relevance(q.scenario, q.events[0])
                      : temporal(q.scenario, q.events[0], q.events[1]));
  }
  return out;
}

}  // namespace sif
