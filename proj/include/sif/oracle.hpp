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

#ifndef SIF_ORACLE_HPP_
#define SIF_ORACLE_HPP_

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sif/classifier.hpp"
#include "sif/esd.hpp"

namespace sif {

struct ScenarioRules {
  std::set<std::string> events;    // relevance allow-list
  std::vector<std::string> order;  // gold order for temporal questions
};

// Rule-table classifier: relevance is allow-list membership, temporal is a
// comparison of gold-order positions. Pairs with an event missing from the
// order get label 1 at score 0.5, so the queried orientation is kept.
class RulesClassifier : public Classifier {
 public:
  RulesClassifier() = default;
  explicit RulesClassifier(std::map<std::string, ScenarioRules> rules);

  // Allow-list: every event of every gold ESD. Order: a topological order of
  // the consecutive-event precedences of all gold ESDs, ties broken by first
  // appearance; plain first-appearance order when the precedences conflict.
  static RulesClassifier from_corpus(const Corpus& corpus);

  // {"<scenario>": {"events": [...], "order": [...]}, ...}
  static RulesClassifier from_json(std::istream& in);
  static RulesClassifier load_file(const std::string& path);
  std::string to_json() const;

  const std::map<std::string, ScenarioRules>& rules() const { return rules_; }

  bool supports(Task) const override { return true; }
  std::vector<Verdict> predict(Task task,
                               std::span<const Query> queries) override;

  Verdict relevance(const std::string& scenario,
                    const std::string& event) const;
  Verdict temporal(const std::string& scenario, const std::string& a,
                   const std::string& b) const;

 private:
  std::map<std::string, ScenarioRules> rules_;
  std::map<std::string, std::map<std::string, std::size_t>> positions_;
};

}  // namespace sif

#endif  // SIF_ORACLE_HPP_
