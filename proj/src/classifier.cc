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

#include "sif/classifier.hpp"

namespace sif {

std::string_view task_name(Task task) {
  return task == Task::kRelevance ? "relevance" : "temporal";
}

std::optional<Task> parse_task(std::string_view name) {
  if (name == "relevance") return Task::kRelevance;
  if (name == "temporal") return Task::kTemporal;
  return std::nullopt;
}

std::string serialize_query(const Query& query) {
  std::string out = query.scenario;
  for (const auto& e : query.events) {
    out += ' ';
    out += kFieldSeparator;
    out += ' ';
    out += e;
  }
  return out;
}

std::vector<Verdict> CallbackClassifier::predict(
    Task task, std::span<const Query> queries) {
  std::vector<Verdict> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(fn_(task, q));
  return out;
}

}  // namespace sif
