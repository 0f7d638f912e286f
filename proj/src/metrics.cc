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

#include "sif/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <set>
#include <utility>

#include "json.hpp"
#include "sif/error.hpp"

namespace sif {
namespace {

using json = nlohmann::json;
using NgramCounts = std::map<std::vector<std::string_view>, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::vector<std::string_view> gram(tokens.begin() + i,
                                       tokens.begin() + i + n);
    ++counts[std::move(gram)];
  }
  return counts;
}

double mean_of(std::span<const double> values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::string candidate_form(const EventSequence& esd) {
  return esd.events.empty() ? std::string() : canonical_numbered_form(esd);
}

struct AnnotatorPair {
  std::string first;
  std::string second;
  // Aligned records, one entry per ESD, in the first annotator's order.
  std::vector<std::pair<const AnnotationRecord*, const AnnotationRecord*>>
      esds;
};

AnnotatorPair pair_annotators(std::span<const AnnotationRecord> records) {
  std::map<std::string, std::vector<const AnnotationRecord*>> by_annotator;
  for (const auto& r : records) by_annotator[r.annotator].push_back(&r);
  if (by_annotator.size() != 2) {
    throw Error(ErrorKind::kAlignmentError,
                "expected two annotators, found " +
                    std::to_string(by_annotator.size()));
  }
  AnnotatorPair out;
  out.first = by_annotator.begin()->first;
  out.second = std::next(by_annotator.begin())->first;
  std::map<std::string, const AnnotationRecord*> second;
  for (const auto* r : by_annotator[out.second]) {
    if (!second.emplace(r->esd_id, r).second) {
      throw Error(ErrorKind::kAlignmentError,
                  "esd annotated twice by " + out.second, {r->esd_id});
    }
  }
  std::set<std::string> seen;
  std::vector<std::string> unmatched;
  for (const auto* a : by_annotator[out.first]) {
    if (!seen.insert(a->esd_id).second) {
      throw Error(ErrorKind::kAlignmentError,
                  "esd annotated twice by " + out.first, {a->esd_id});
    }
    auto it = second.find(a->esd_id);
    if (it == second.end()) {
      unmatched.push_back(a->esd_id);
      continue;
    }
    const auto* b = it->second;
    if (a->relevance.size() != b->relevance.size() ||
        a->order.size() != b->order.size()) {
      throw Error(ErrorKind::kAlignmentError, "annotation lengths differ",
                  {a->esd_id});
    }
    out.esds.emplace_back(a, b);
  }
  for (const auto& [id, r] : second) {
    if (!seen.count(id)) unmatched.push_back(id);
  }
  if (!unmatched.empty()) {
    throw Error(ErrorKind::kAlignmentError,
                "esds not covered by both annotators", unmatched);
  }
  return out;
}

bool pair_eligible(const AnnotationRecord& a, const AnnotationRecord& b,
                   std::size_t i) {
  return a.relevance[i] && a.relevance[i + 1] && b.relevance[i] &&
         b.relevance[i + 1];
}

}  // namespace

BleuDetail bleu_detail(std::string_view candidate,
                       std::span<const std::string> references,
                       std::size_t max_n) {
  if (references.empty()) {
    throw Error(ErrorKind::kEmptyReferences, "no references");
  }
  if (max_n == 0) throw Error(ErrorKind::kInvalidArgument, "max_n must be >= 1");
  BleuDetail d;
  const auto cand = split_whitespace(candidate);
  d.candidate_length = cand.size();
  std::vector<std::vector<std::string>> refs;
  refs.reserve(references.size());
  for (const auto& r : references) refs.push_back(split_whitespace(r));

  const std::size_t c = cand.size();
  d.reference_length = refs.front().size();
  for (const auto& r : refs) {
    const auto dist = [c](std::size_t len) { return len > c ? len - c : c - len; };
    const std::size_t best = d.reference_length;
    if (dist(r.size()) < dist(best) ||
        (dist(r.size()) == dist(best) && r.size() < best)) {
      d.reference_length = r.size();
    }
  }
  if (c == 0) {
    d.empty_candidate = true;
    d.brevity_penalty = 0.0;
    d.matches.assign(max_n, 0);
    d.totals.assign(max_n, 0);
    return d;
  }

  double log_sum = 0.0;
  bool zero = false;
  for (std::size_t n = 1; n <= max_n; ++n) {
    const NgramCounts cand_counts = count_ngrams(cand, n);
    NgramCounts max_ref;
    for (const auto& r : refs) {
      for (const auto& [gram, count] : count_ngrams(r, n)) {
        auto& slot = max_ref[gram];
        slot = std::max(slot, count);
      }
    }
    std::size_t matches = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = max_ref.find(gram);
      if (it != max_ref.end()) matches += std::min(count, it->second);
    }
    const std::size_t total = c >= n ? c - n + 1 : 0;
    d.matches.push_back(matches);
    d.totals.push_back(total);
    double p = 0.0;
    if (n == 1) {
      p = static_cast<double>(matches) / static_cast<double>(total);
    } else {
      p = static_cast<double>(matches + 1) / static_cast<double>(total + 1);
    }
    if (p == 0.0) {
      zero = true;
    } else {
      log_sum += std::log(p) / static_cast<double>(max_n);
    }
  }
  const double r = static_cast<double>(d.reference_length);
  d.brevity_penalty =
      c > d.reference_length ? 1.0 : std::exp(1.0 - r / static_cast<double>(c));
  d.score = zero ? 0.0 : d.brevity_penalty * std::exp(log_sum);
  return d;
}

double bleu(std::string_view candidate, std::span<const std::string> references,
            std::size_t max_n) {
  return bleu_detail(candidate, references, max_n).score;
}

BleuReport evaluate_fold(std::span<const EventSequence> generated,
                         const Corpus& gold) {
  if (generated.empty()) {
    throw Error(ErrorKind::kEmptyInput, "no generated ESDs to evaluate");
  }
  std::vector<std::string> missing;
  for (const auto& esd : generated) {
    if (!gold.has_scenario(esd.scenario.id) &&
        std::find(missing.begin(), missing.end(), esd.scenario.id) ==
            missing.end()) {
      missing.push_back(esd.scenario.id);
    }
  }
  if (!missing.empty()) {
    throw Error(ErrorKind::kMissingReferences, "scenarios without gold ESDs",
                missing);
  }
  std::map<std::string, std::vector<std::string>> references;
  std::map<std::string, std::vector<double>> scores;
  BleuReport report;
  for (const auto& esd : generated) {
    auto& refs = references[esd.scenario.id];
    if (refs.empty()) {
      for (const auto& g : gold.esds(esd.scenario.id)) {
        refs.push_back(canonical_numbered_form(g));
      }
    }
    const BleuDetail d = bleu_detail(candidate_form(esd), refs);
    report.per_esd.push_back(
        {esd.scenario.id, esd.esd_id, d.score, d.empty_candidate});
    scores[esd.scenario.id].push_back(d.score);
  }
  std::vector<double> means;
  for (const auto& [scenario, values] : scores) {
    const double m = mean_of(values);
    report.per_scenario_mean[scenario] = m;
    means.push_back(m);
  }
  report.fold_mean = mean_of(means);
  return report;
}

CrossFoldReport aggregate_folds(std::vector<std::optional<BleuReport>> folds) {
  std::vector<double> means;
  for (const auto& f : folds) {
    if (f) means.push_back(f->fold_mean);
  }
  if (means.empty()) throw Error(ErrorKind::kEmptyInput, "no evaluated folds");
  CrossFoldReport out;
  out.folds = std::move(folds);
  out.mean = mean_of(means);
  out.std = sample_std(means);
  return out;
}

CrossFoldReport evaluate(std::span<const EventSequence> generated,
                         const Corpus& gold, const FoldPlan& plan) {
  std::map<std::string, std::size_t> fold_of;
  for (std::size_t k = 0; k < plan.folds.size(); ++k) {
    for (const auto& s : plan.folds[k].scenarios) {
      fold_of[Scenario::from_name(s).id] = k;
    }
  }
  std::vector<std::vector<EventSequence>> grouped(plan.folds.size());
  std::vector<std::string> unknown;
  for (const auto& esd : generated) {
    auto it = fold_of.find(esd.scenario.id);
    if (it == fold_of.end()) {
      if (std::find(unknown.begin(), unknown.end(), esd.scenario.id) ==
          unknown.end()) {
        unknown.push_back(esd.scenario.id);
      }
      continue;
    }
    grouped[it->second].push_back(esd);
  }
  if (!unknown.empty()) {
    throw Error(ErrorKind::kUnknownScenario, "scenarios not in the fold plan",
                unknown);
  }
  std::vector<std::optional<BleuReport>> folds(plan.folds.size());
  for (std::size_t k = 0; k < grouped.size(); ++k) {
    if (!grouped[k].empty()) folds[k] = evaluate_fold(grouped[k], gold);
  }
  return aggregate_folds(std::move(folds));
}

std::string format_bleu_mean_std(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f (%.1f)", mean * 100.0, std * 100.0);
  return buf;
}

std::string bleu_report_json(const BleuReport& report) {
  nlohmann::ordered_json j;
  j["fold_mean"] = report.fold_mean;
  j["per_scenario_mean"] = report.per_scenario_mean;
  j["per_esd"] = nlohmann::ordered_json::array();
  for (const auto& e : report.per_esd) {
    nlohmann::ordered_json row;
    row["scenario"] = e.scenario;
    row["esd_id"] = e.esd_id;
    row["bleu"] = e.score;
    if (e.empty_candidate) row["empty_candidate"] = true;
    j["per_esd"].push_back(std::move(row));
  }
  return j.dump();
}

std::vector<AnnotationRecord> read_annotations(std::istream& in) {
  std::vector<AnnotationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kParseError,
                "line " + std::to_string(line_no) + ": " + what);
  };
  auto flags = [&](const json& j, const char* key) {
    std::vector<bool> v;
    if (!j.contains(key) || !j[key].is_array()) {
      fail(std::string(key) + " must be an array");
    }
    for (const auto& x : j[key]) {
      if (!x.is_number_integer() || (x.get<int>() != 0 && x.get<int>() != 1)) {
        fail(std::string(key) + " entries must be 0 or 1");
      }
      v.push_back(x.get<int>() == 1);
    }
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (collapse_whitespace(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(e.what());
    }
    if (!j.is_object()) fail("expected an object");
    for (const char* key : {"annotator", "scenario", "esd_id"}) {
      if (!j.contains(key) || !j[key].is_string()) {
        fail(std::string(key) + " must be a string");
      }
    }
    AnnotationRecord r;
    r.annotator = j["annotator"].get<std::string>();
    r.scenario = Scenario::from_name(j["scenario"].get<std::string>()).id;
    r.esd_id = j["esd_id"].get<std::string>();
    r.relevance = flags(j, "relevance");
    r.order = flags(j, "order");
    if (!j.contains("missing") || !j["missing"].is_number_integer()) {
      fail("missing must be an integer");
    }
    r.missing = j["missing"].get<int>();
    if (r.missing < 1 || r.missing > 4) fail("missing must be in 1..4");
    const std::size_t pairs = r.relevance.empty() ? 0 : r.relevance.size() - 1;
    if (r.order.size() != pairs) {
      fail("order needs one entry per consecutive event pair");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<AnnotationRecord> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path);
  return read_annotations(in);
}

ManualScores manual_scores(std::span<const AnnotationRecord> records) {
  const AnnotatorPair pair = pair_annotators(records);
  ManualScores s;
  s.esd_count = pair.esds.size();
  std::size_t events = 0, relevant_a = 0, relevant_b = 0;
  std::size_t correct_a = 0, correct_b = 0;
  double missing_sum = 0.0;
  for (const auto& [a, b] : pair.esds) {
    events += a->relevance.size();
    relevant_a += std::count(a->relevance.begin(), a->relevance.end(), true);
    relevant_b += std::count(b->relevance.begin(), b->relevance.end(), true);
    for (std::size_t i = 0; i < a->order.size(); ++i) {
      if (!pair_eligible(*a, *b, i)) continue;
      ++s.eligible_pairs;
      correct_a += a->order[i];
      correct_b += b->order[i];
    }
    missing_sum += a->missing + b->missing;
  }
  if (s.esd_count == 0) throw Error(ErrorKind::kEmptyInput, "no annotations");
  if (events > 0) {
    const double n = static_cast<double>(events);
    s.relevance = 100.0 * (relevant_a / n + relevant_b / n) / 2.0;
  }
  if (s.eligible_pairs > 0) {
    const double n = static_cast<double>(s.eligible_pairs);
    s.order = 100.0 * (correct_a / n + correct_b / n) / 2.0;
  }
  s.missing = missing_sum / (2.0 * static_cast<double>(s.esd_count));
  return s;
}

Agreement agreement(std::span<const AnnotationRecord> records) {
  const AnnotatorPair pair = pair_annotators(records);
  std::vector<int> rel_a, rel_b, ord_a, ord_b;
  std::vector<double> miss_a, miss_b;
  for (const auto& [a, b] : pair.esds) {
    for (std::size_t i = 0; i < a->relevance.size(); ++i) {
      rel_a.push_back(a->relevance[i]);
      rel_b.push_back(b->relevance[i]);
    }
    for (std::size_t i = 0; i < a->order.size(); ++i) {
      if (!pair_eligible(*a, *b, i)) continue;
      ord_a.push_back(a->order[i]);
      ord_b.push_back(b->order[i]);
    }
    miss_a.push_back(a->missing);
    miss_b.push_back(b->missing);
  }
  Agreement out;
  if (rel_a.empty()) {
    out.notes.push_back("kappa_relevance: no events");
  } else {
    out.kappa_relevance = cohen_kappa(rel_a, rel_b);
  }
  if (ord_a.empty()) {
    out.notes.push_back("kappa_order: no eligible pairs");
  } else {
    out.kappa_order = cohen_kappa(ord_a, ord_b);
  }
  try {
    out.rho_missing = spearman_rho(miss_a, miss_b);
  } catch (const Error& e) {
    out.notes.push_back(std::string("rho_missing: ") + e.what());
  }
  return out;
}

double cohen_kappa(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kLengthMismatch, "label lists differ in length");
  }
  if (a.empty()) throw Error(ErrorKind::kEmptyInput, "no labels");
  const double n = static_cast<double>(a.size());
  std::map<int, std::pair<std::size_t, std::size_t>> marginals;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++marginals[a[i]].first;
    ++marginals[b[i]].second;
    agree += a[i] == b[i];
  }
  const double p_o = static_cast<double>(agree) / n;
  double p_e = 0.0;
  for (const auto& [label, counts] : marginals) {
    p_e += (static_cast<double>(counts.first) / n) *
           (static_cast<double>(counts.second) / n);
  }
  if (p_e == 1.0) return p_o == 1.0 ? 1.0 : 0.0;
  return (p_o - p_e) / (1.0 - p_e);
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] < values[j];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = static_cast<double>(i + j) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kLengthMismatch, "value lists differ in length");
  }
  if (x.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "need at least two values");
  }
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::kZeroVariance, "correlation undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman_rho(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::kLengthMismatch, "value lists differ in length");
  }
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  return pearson(rx, ry);
}

}  // namespace sif
