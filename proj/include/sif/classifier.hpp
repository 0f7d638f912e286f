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

// Binary classifier abstraction shared by the relevance filter and the
// temporal reorderer. Backends: the hashed-feature logistic baseline
// (baseline.hpp), out-of-process workers (endpoint.hpp) and rule tables
// (oracle.hpp).

#ifndef SIF_CLASSIFIER_HPP_
#define SIF_CLASSIFIER_HPP_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sif {

enum class Task { kRelevance, kTemporal };

std::string_view task_name(Task task);
std::optional<Task> parse_task(std::string_view name);

inline constexpr double kDecisionThreshold = 0.5;

// Field separator of serialized classifier inputs.
inline constexpr std::string_view kFieldSeparator = "</s>";

// One classifier question. Relevance queries carry one event, temporal
// queries carry an ordered pair (does events[0] precede events[1]?).
struct Query {
  std::string scenario;
  std::vector<std::string> events;
};

// "scenario </s> e" or "scenario </s> e1 </s> e2".
std::string serialize_query(const Query& query);

struct Verdict {
  int label = 0;
  double score = 0.0;  // probability of label 1

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline Verdict verdict_from_score(double score,
                                  double threshold = kDecisionThreshold) {
  return {score >= threshold ? 1 : 0, score};
}

class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual bool supports(Task task) const = 0;

  // One verdict per query, in query order.
  virtual std::vector<Verdict> predict(Task task,
                                       std::span<const Query> queries) = 0;
};

// Adapts a per-query function. Used for fixtures and scripted behaviour.
class CallbackClassifier : public Classifier {
 public:
  using Fn = std::function<Verdict(Task, const Query&)>;

  explicit CallbackClassifier(Fn fn) : fn_(std::move(fn)) {}

  bool supports(Task) const override { return true; }
  std::vector<Verdict> predict(Task task,
                               std::span<const Query> queries) override;

 private:
  Fn fn_;
};

}  // namespace sif

#endif  // SIF_CLASSIFIER_HPP_
