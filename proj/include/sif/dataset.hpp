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

// Fold plans, fine-tuning export and classifier training sets.

#ifndef SIF_DATASET_HPP_
#define SIF_DATASET_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sif/classifier.hpp"
#include "sif/esd.hpp"
#include "sif/prompt.hpp"
#include "sif/random.hpp"

namespace sif {

struct Fold {
  std::vector<std::string> scenarios;
  // Scenario from another fold whose ESDs validate the classifiers trained
  // for this fold.
  std::string heldout;

  friend bool operator==(const Fold&, const Fold&) = default;
};

struct FoldPlan {
  std::vector<Fold> folds;
  // Empty for the fixed published plan.
  std::optional<std::uint64_t> seed;

  friend bool operator==(const FoldPlan&, const FoldPlan&) = default;
};

// Scenario roles when fold `fold_index` (0-based) is the test fold.
struct FoldSplit {
  std::vector<std::string> test;
  // All other folds minus the validation scenario; classifier training.
  std::vector<std::string> train;
  std::vector<std::string> validation;
  // All other folds; language-model fine-tuning.
  std::vector<std::string> finetune;
};

// Random disjoint partition into k folds. Throws kIndivisiblePartition when k
// does not divide the scenario count (or k < 2).
FoldPlan partition_folds(const Corpus& corpus, std::size_t k = 8,
                         std::uint64_t seed = kDefaultSeed);

// The published 8-fold assignment of the 40 DeScript scenarios.
FoldPlan load_fixed_plan();

// Throws kInvalidArgument for overlapping folds or a held-out scenario that
// does not belong to another fold.
void check_fold_plan(const FoldPlan& plan);

FoldSplit split_for_fold(const FoldPlan& plan, std::size_t fold_index);

// {"seed": <int>|"fixed", "folds": [{"fold": 1, "scenarios": [...],
// "heldout": "..."}, ...]}
std::string fold_plan_json(const FoldPlan& plan);
FoldPlan parse_fold_plan(const std::string& json_text);
FoldPlan load_fold_plan(const std::string& path);

// Tab-separated: fold number, comma-joined scenarios, held-out scenario.
std::string fold_plan_table(const FoldPlan& plan);

// "<BOS> " + encode(...) + " <EOS>"
std::string finetune_line(const EventSequence& esd, PromptVariant variant);
std::vector<std::string> export_finetune(const Corpus& corpus,
                                         PromptVariant variant,
                                         std::span<const std::string> scenarios);

struct RelevanceExample {
  std::string scenario;
  std::string event;
  int label = 0;

  std::string serialized() const;
  friend bool operator==(const RelevanceExample&,
                         const RelevanceExample&) = default;
};

struct TemporalExample {
  std::string scenario;
  std::string event_a;
  std::string event_b;
  int label = 0;  // 1: event_a precedes event_b

  std::string serialized() const;
  friend bool operator==(const TemporalExample&,
                         const TemporalExample&) = default;
};

struct RelevanceSetOptions {
  std::size_t neg_per_pos = 1;
  std::uint64_t seed = kDefaultSeed;
};

// One positive per distinct event of every gold ESD of `scenarios`, each
// followed by neg_per_pos negatives drawn from `negative_pool` scenarios other
// than its own. Negatives that are genuine events of the scenario are
// resampled. Throws kInsufficientScenarios.
std::vector<RelevanceExample> build_relevance_set(
    const Corpus& corpus, std::span<const std::string> scenarios,
    std::span<const std::string> negative_pool,
    const RelevanceSetOptions& options = {});
std::vector<RelevanceExample> build_relevance_set(
    const Corpus& corpus, std::span<const std::string> scenarios,
    const RelevanceSetOptions& options = {});

struct TemporalSetOptions {
  // 0 keeps every pair.
  std::size_t max_pairs_per_esd = 50;
  std::uint64_t seed = kDefaultSeed;
};

// For each gold ESD (exact duplicate events dropped), samples up to
// max_pairs_per_esd of its i<j pairs and emits each as a positive followed by
// its reversal as a negative.
std::vector<TemporalExample> build_temporal_set(
    const Corpus& corpus, std::span<const std::string> scenarios,
    const TemporalSetOptions& options = {});

// Line records {scenario, text_a, text_b?, label, serialized_input}.
void write_examples(std::ostream& out,
                    std::span<const RelevanceExample> examples);
void write_examples(std::ostream& out,
                    std::span<const TemporalExample> examples);

struct LabeledInput {
  std::string input;
  int label = 0;
};

struct ExampleFile {
  Task task = Task::kRelevance;
  std::vector<LabeledInput> examples;
};

// Reads a training-set file; the task is temporal when records carry text_b.
ExampleFile read_examples(std::istream& in);
ExampleFile load_examples(const std::string& path);

}  // namespace sif

#endif  // SIF_DATASET_HPP_
