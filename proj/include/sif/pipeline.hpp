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

// Post-processing of generated ESDs: relevance filtering, de-duplication and
// temporal reordering through a tournament of pairwise predictions.

#ifndef SIF_PIPELINE_HPP_
#define SIF_PIPELINE_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sif/classifier.hpp"
#include "sif/esd.hpp"
#include "sif/prompt.hpp"

namespace sif {

struct PipelineConfig {
  bool enable_relevance = true;
  bool enable_dedup = true;
  bool enable_reorder = true;
  double relevance_threshold = kDecisionThreshold;
  std::size_t dedup_max_distance = 0;
};

// Ablation settings: FT (nothing), +R, +R+D, SIF (everything).
struct AblationStep {
  std::string name;
  PipelineConfig config;
};
std::vector<AblationStep> ablation_steps();

struct RemovedIrrelevant {
  Event event;
  double score = 0.0;
};

struct RemovedDuplicate {
  Event event;
  std::size_t kept_index = 0;  // original_index of the surviving copy
};

struct PipelineReport {
  std::string scenario;
  std::string esd_id;
  std::vector<RemovedIrrelevant> removed_irrelevant;
  std::vector<RemovedDuplicate> removed_duplicates;
  bool reorder_applied = false;
  bool graph_acyclic = false;
  std::size_t pair_queries = 0;
  std::vector<std::size_t> final_permutation;
  // Set when processing of this ESD was aborted.
  std::optional<std::string> error;
};

// Nodes are original indices in current sequence order; (u, v) means u
// precedes v.
struct OrderGraph {
  std::vector<std::size_t> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  // Exactly one edge per unordered node pair and no self-loops.
  bool is_tournament() const;
};

// Events scoring below `threshold` are removed; survivors keep their order.
EventSequence step_relevance(const EventSequence& esd, Classifier& clf,
                             double threshold = kDecisionThreshold,
                             PipelineReport* report = nullptr);

// Edit distance over Unicode code points (UTF-8 input).
std::size_t levenshtein(std::string_view a, std::string_view b);

// Keeps an event only if it is farther than max_distance from every event
// kept before it.
EventSequence step_dedup(const EventSequence& esd, std::size_t max_distance = 0,
                         PipelineReport* report = nullptr);

// Queries every pair i < j once, in sequence orientation; label 1 gives
// i -> j, otherwise j -> i.
OrderGraph build_order_graph(const EventSequence& esd, Classifier& clf);

// Zero-in-degree elimination with ties broken by the smallest original index.
// Returns nullopt when the graph has a cycle.
std::optional<std::vector<std::size_t>> topological_order(
    const OrderGraph& graph);

// Reorders by the topological order, or keeps the input order when the
// predicted graph is cyclic.
EventSequence step_reorder(const EventSequence& esd, Classifier& clf,
                           PipelineReport* report = nullptr);

struct PipelineResult {
  EventSequence esd;
  PipelineReport report;
};

// Applies the enabled steps in the order relevance, dedup, reorder. A
// classifier is only required for its enabled step.
PipelineResult run_pipeline(const EventSequence& esd, const PipelineConfig& cfg,
                            Classifier* relevance_clf, Classifier* temporal_clf);

// Fraction of reports whose order graph was acyclic. Throws kEmptyInput.
double acyclicity_rate(std::span<const PipelineReport> reports);

struct GroupedRate {
  std::vector<std::pair<std::string, double>> per_group;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across groups
};

// Acyclicity rate per group key (e.g. "SEQUENCE/fold-3"), then mean and
// sample std across groups.
GroupedRate grouped_acyclicity(
    std::span<const std::pair<std::string, PipelineReport>> keyed_reports);

// "66±15%" from fractions.
std::string format_percent_mean_std(double mean, double std);

// Batch files. Generated records: {scenario, esd_id, events | text, variant?}.
// When only raw text is given it is decoded with the record's variant; text
// without any event slot becomes an empty ESD.
struct GeneratedRecord {
  EventSequence esd;
  std::optional<PromptVariant> variant;
};

std::vector<GeneratedRecord> read_generated(std::istream& in);
std::vector<GeneratedRecord> load_generated(const std::string& path);

// {esd_id, events, scenario, variant?} with sorted keys.
std::string generated_record(const GeneratedRecord& record);
std::string report_record(const PipelineReport& report);

struct BatchResult {
  std::vector<GeneratedRecord> outputs;  // aborted ESDs are left out
  std::vector<PipelineReport> reports;   // one per input, in input order
  std::size_t failures = 0;
};

// Classifier failures abort only the affected ESD; a line describing the
// failure goes to `log` when given.
BatchResult run_batch(std::span<const GeneratedRecord> records,
                      const PipelineConfig& cfg, Classifier* relevance_clf,
                      Classifier* temporal_clf, std::ostream* log = nullptr);

}  // namespace sif

#endif  // SIF_PIPELINE_HPP_
