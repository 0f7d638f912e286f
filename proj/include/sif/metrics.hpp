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

// Automatic evaluation (multi-reference smoothed BLEU over numbered forms,
// fold aggregation) and aggregation of manual annotations.

#ifndef SIF_METRICS_HPP_
#define SIF_METRICS_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sif/dataset.hpp"
#include "sif/esd.hpp"

namespace sif {

struct BleuDetail {
  double score = 0.0;
  // Clipped matches and candidate n-gram totals for n = 1..max_n.
  std::vector<std::size_t> matches;
  std::vector<std::size_t> totals;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
  double brevity_penalty = 1.0;
  // Scored 0 by convention.
  bool empty_candidate = false;
};

// Whitespace tokens; counts clipped by the maximum count in any reference;
// p1 unsmoothed, pn = (matches + 1) / (total + 1) for n >= 2; brevity penalty
// against the reference length closest to the candidate length (ties go to
// the shorter). Throws kEmptyReferences.
BleuDetail bleu_detail(std::string_view candidate,
                       std::span<const std::string> references,
                       std::size_t max_n = 4);
double bleu(std::string_view candidate, std::span<const std::string> references,
            std::size_t max_n = 4);

struct EsdBleu {
  std::string scenario;
  std::string esd_id;
  double score = 0.0;
  bool empty_candidate = false;
};

struct BleuReport {
  std::vector<EsdBleu> per_esd;
  std::map<std::string, double> per_scenario_mean;
  // Mean of the per-scenario means.
  double fold_mean = 0.0;
};

// Scores every generated ESD against all gold ESDs of its scenario, both in
// numbered form. Throws kMissingReferences (ids: scenarios without gold) and
// kEmptyInput.
BleuReport evaluate_fold(std::span<const EventSequence> generated,
                         const Corpus& gold);

struct CrossFoldReport {
  // Indexed like the plan's folds; folds without generated ESDs are nullopt
  // and do not enter the aggregate.
  std::vector<std::optional<BleuReport>> folds;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across fold means
};

// Assigns each generated ESD to the fold testing its scenario. Throws
// kUnknownScenario (ids: scenarios absent from the plan) and
// kMissingReferences.
CrossFoldReport evaluate(std::span<const EventSequence> generated,
                         const Corpus& gold, const FoldPlan& plan);

// Mean and sample std of per-fold means. Throws kEmptyInput.
CrossFoldReport aggregate_folds(std::vector<std::optional<BleuReport>> folds);

// "33.6 (5.4)" from fractions, on the x100 scale.
std::string format_bleu_mean_std(double mean, double std);

std::string bleu_report_json(const BleuReport& report);

struct AnnotationRecord {
  std::string annotator;
  std::string scenario;
  std::string esd_id;
  std::vector<bool> relevance;  // one per event
  std::vector<bool> order;      // one per consecutive pair
  int missing = 1;              // 1 (none missing) .. 4
};

// Line records {annotator, scenario, esd_id, relevance: [0/1],
// order: [0/1], missing: 1..4}. Throws kParseError.
std::vector<AnnotationRecord> read_annotations(std::istream& in);
std::vector<AnnotationRecord> load_annotations(const std::string& path);

struct ManualScores {
  double relevance = 0.0;         // R, percent
  std::optional<double> order;    // O, percent; nullopt without eligible pairs
  double missing = 0.0;           // M, mean Likert
  std::size_t esd_count = 0;
  std::size_t eligible_pairs = 0;  // per annotator
};

// Requires exactly two annotators covering the same ESDs with aligned
// lengths (kAlignmentError otherwise). R averages each annotator's share of
// relevant events; O counts only pairs whose two events both annotators
// marked relevant; M averages over annotators and ESDs.
ManualScores manual_scores(std::span<const AnnotationRecord> records);

struct Agreement {
  std::optional<double> kappa_relevance;
  std::optional<double> kappa_order;  // over the pairs eligible for O
  std::optional<double> rho_missing;
  // Why a statistic is absent.
  std::vector<std::string> notes;
};

Agreement agreement(std::span<const AnnotationRecord> records);

// (p_o - p_e) / (1 - p_e); when p_e == 1 the result is 1 if p_o == 1 else 0.
// Throws kLengthMismatch and kEmptyInput.
double cohen_kappa(std::span<const int> a, std::span<const int> b);

// Pearson correlation of fractional ranks. Throws kLengthMismatch,
// kInvalidArgument (fewer than two values) and kZeroVariance.
double spearman_rho(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> fractional_ranks(std::span<const double> values);

}  // namespace sif

#endif  // SIF_METRICS_HPP_
