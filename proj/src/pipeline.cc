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

#include "sif/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>

#include "json.hpp"
#include "sif/error.hpp"

namespace sif {
namespace {

using json = nlohmann::json;

// Invalid UTF-8 bytes map to values above the Unicode range so that they stay
// distinct from every code point.
std::vector<char32_t> code_points(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b < 0x80) {
      len = 1;
      cp = b;
    } else if ((b & 0xE0) == 0xC0) {
      len = 2;
      cp = b & 0x1F;
    } else if ((b & 0xF0) == 0xE0) {
      len = 3;
      cp = b & 0x0F;
    } else if ((b & 0xF8) == 0xF0) {
      len = 4;
      cp = b & 0x07;
    }
    bool valid = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; valid && k < len; ++k) {
      const auto c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) {
        valid = false;
      } else {
        cp = (cp << 6) | (c & 0x3F);
      }
    }
    if (!valid) {
      out.push_back(0x110000 + b);
      ++i;
    } else {
      out.push_back(cp);
      i += len;
    }
  }
  return out;
}

double sample_std(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::vector<std::size_t> indices_of(const EventSequence& esd) {
  std::vector<std::size_t> out;
  out.reserve(esd.events.size());
  for (const auto& e : esd.events) out.push_back(e.original_index);
  return out;
}

}  // namespace

std::vector<AblationStep> ablation_steps() {
  auto cfg = [](bool r, bool d, bool o) {
    PipelineConfig c;
    c.enable_relevance = r;
    c.enable_dedup = d;
    c.enable_reorder = o;
    return c;
  };
  return {
      {"FT", cfg(false, false, false)},
      {"+R", cfg(true, false, false)},
      {"+R+D", cfg(true, true, false)},
      {"SIF", cfg(true, true, true)},
  };
}

bool OrderGraph::is_tournament() const {
  const std::size_t n = nodes.size();
  if (edges.size() != n * (n - (n > 0 ? 1 : 0)) / 2) return false;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  const std::set<std::size_t> node_set(nodes.begin(), nodes.end());
  for (const auto& [u, v] : edges) {
    if (u == v || !node_set.count(u) || !node_set.count(v)) return false;
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second) return false;
  }
  return true;
}

EventSequence step_relevance(const EventSequence& esd, Classifier& clf,
                             double threshold, PipelineReport* report) {
  EventSequence out = esd;
  out.events.clear();
  if (esd.events.empty()) return out;
  std::vector<Query> queries;
  queries.reserve(esd.events.size());
  for (const auto& e : esd.events) {
    queries.push_back({esd.scenario.name, {e.text}});
  }
  const auto verdicts = clf.predict(Task::kRelevance, queries);
  for (std::size_t i = 0; i < esd.events.size(); ++i) {
    if (verdicts[i].score >= threshold) {
      out.events.push_back(esd.events[i]);
    } else if (report) {
      report->removed_irrelevant.push_back({esd.events[i], verdicts[i].score});
    }
  }
  return out;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  const auto x = code_points(a);
  const auto y = code_points(b);
  std::vector<std::size_t> row(y.size() + 1);
  std::iota(row.begin(), row.end(), 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= y.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({above + 1, row[j - 1] + 1,
                         diagonal + (x[i - 1] == y[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[y.size()];
}

EventSequence step_dedup(const EventSequence& esd, std::size_t max_distance,
                         PipelineReport* report) {
  EventSequence out = esd;
  out.events.clear();
  for (const auto& e : esd.events) {
    const Event* match = nullptr;
    for (const auto& kept : out.events) {
      const bool near = max_distance == 0
                            ? kept.text == e.text
                            : levenshtein(kept.text, e.text) <= max_distance;
      if (near) {
        match = &kept;
        break;
      }
    }
    if (!match) {
      out.events.push_back(e);
    } else if (report) {
      report->removed_duplicates.push_back({e, match->original_index});
    }
  }
  return out;
}

OrderGraph build_order_graph(const EventSequence& esd, Classifier& clf) {
  OrderGraph graph;
  graph.nodes = indices_of(esd);
  const auto& events = esd.events;
  std::vector<Query> queries;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      queries.push_back({esd.scenario.name, {events[i].text, events[j].text}});
      pairs.emplace_back(i, j);
    }
  }
  if (queries.empty()) return graph;
  const auto verdicts = clf.predict(Task::kTemporal, queries);
  graph.edges.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const std::size_t u = events[pairs[k].first].original_index;
    const std::size_t v = events[pairs[k].second].original_index;
    if (verdicts[k].label == 1) {
      graph.edges.emplace_back(u, v);
    } else {
      graph.edges.emplace_back(v, u);
    }
  }
  return graph;
}

std::optional<std::vector<std::size_t>> topological_order(
    const OrderGraph& graph) {
  std::map<std::size_t, std::size_t> in_degree;
  std::map<std::size_t, std::vector<std::size_t>> successors;
  for (std::size_t n : graph.nodes) in_degree[n] = 0;
  for (const auto& [u, v] : graph.edges) {
    ++in_degree[v];
    successors[u].push_back(v);
    in_degree.emplace(u, 0);
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>,
                      std::greater<std::size_t>>
      ready;
  for (const auto& [node, degree] : in_degree) {
    if (degree == 0) ready.push(node);
  }
  std::vector<std::size_t> order;
  order.reserve(in_degree.size());
  while (!ready.empty()) {
    const std::size_t node = ready.top();
    ready.pop();
    order.push_back(node);
    for (std::size_t next : successors[node]) {
      if (--in_degree[next] == 0) ready.push(next);
    }
  }
  if (order.size() != in_degree.size()) return std::nullopt;
  return order;
}

EventSequence step_reorder(const EventSequence& esd, Classifier& clf,
                           PipelineReport* report) {
  const OrderGraph graph = build_order_graph(esd, clf);
  const auto order = topological_order(graph);
  if (report) {
    report->pair_queries += graph.edges.size();
    report->graph_acyclic = order.has_value();
    report->reorder_applied = order.has_value();
  }
  if (!order) return esd;
  std::map<std::size_t, const Event*> by_index;
  for (const auto& e : esd.events) by_index[e.original_index] = &e;
  EventSequence out = esd;
  out.events.clear();
  for (std::size_t index : *order) out.events.push_back(*by_index.at(index));
  return out;
}

PipelineResult run_pipeline(const EventSequence& esd, const PipelineConfig& cfg,
                            Classifier* relevance_clf,
                            Classifier* temporal_clf) {
  PipelineReport report;
  report.scenario = esd.scenario.name;
  report.esd_id = esd.esd_id;
  EventSequence current = esd;
  if (cfg.enable_relevance) {
    if (!relevance_clf) {
      throw Error(ErrorKind::kInvalidArgument, "relevance step needs a classifier");
    }
    current = step_relevance(current, *relevance_clf, cfg.relevance_threshold,
                             &report);
  }
  if (cfg.enable_dedup) {
    current = step_dedup(current, cfg.dedup_max_distance, &report);
  }
  if (cfg.enable_reorder) {
    if (!temporal_clf) {
      throw Error(ErrorKind::kInvalidArgument, "reorder step needs a classifier");
    }
    current = step_reorder(current, *temporal_clf, &report);
  }
  report.final_permutation = indices_of(current);
  current.provenance = Provenance::kPostprocessed;
  current.report = std::make_shared<const PipelineReport>(report);
  return {std::move(current), std::move(report)};
}

double acyclicity_rate(std::span<const PipelineReport> reports) {
  if (reports.empty()) {
    throw Error(ErrorKind::kEmptyInput, "no reports for acyclicity rate");
  }
  const auto acyclic = std::count_if(reports.begin(), reports.end(),
                                     [](const auto& r) { return r.graph_acyclic; });
  return static_cast<double>(acyclic) / static_cast<double>(reports.size());
}

GroupedRate grouped_acyclicity(
    std::span<const std::pair<std::string, PipelineReport>> keyed_reports) {
  std::map<std::string, std::vector<PipelineReport>> groups;
  for (const auto& [key, report] : keyed_reports) groups[key].push_back(report);
  if (groups.empty()) {
    throw Error(ErrorKind::kEmptyInput, "no reports for acyclicity rate");
  }
  GroupedRate out;
  std::vector<double> rates;
  for (const auto& [key, reports] : groups) {
    const double r = acyclicity_rate(reports);
    out.per_group.emplace_back(key, r);
    rates.push_back(r);
  }
  out.mean = std::accumulate(rates.begin(), rates.end(), 0.0) /
             static_cast<double>(rates.size());
  out.std = sample_std(rates, out.mean);
  return out;
}

std::string format_percent_mean_std(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0f±%.0f%%", mean * 100.0, std * 100.0);
  return buf;
}

std::vector<GeneratedRecord> read_generated(std::istream& in) {
  std::vector<GeneratedRecord> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kParseError,
                "line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (collapse_whitespace(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(e.what());
    }
    if (!record.is_object() || !record.contains("scenario") ||
        !record["scenario"].is_string() || !record.contains("esd_id") ||
        !record["esd_id"].is_string()) {
      fail("expected {scenario, esd_id, events|text}");
    }
    GeneratedRecord g;
    if (record.contains("variant")) {
      if (!record["variant"].is_string()) fail("variant must be a string");
      g.variant = parse_variant(record["variant"].get<std::string>());
      if (!g.variant) fail("unknown variant");
    }
    const Scenario scenario =
        Scenario::from_name(record["scenario"].get<std::string>());
    std::string esd_id = record["esd_id"].get<std::string>();
    if (!ids.insert(esd_id).second) {
      throw Error(ErrorKind::kDuplicateEsdId, esd_id);
    }
    if (record.contains("events")) {
      if (!record["events"].is_array()) fail("events must be an array");
      std::vector<std::string> raw;
      for (const auto& e : record["events"]) {
        if (!e.is_string()) fail("events must be strings");
        raw.push_back(e.get<std::string>());
      }
      // Generated events may be blank; those slots are dropped.
      g.esd = EventSequence{scenario, {}, Provenance::kGenerated, esd_id, nullptr};
      for (const auto& r : raw) {
        try {
          g.esd.events.push_back(normalize_event(r, g.esd.events.size()));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::kEmptyEvent) throw;
        }
      }
    } else if (record.contains("text") && record["text"].is_string()) {
      if (!g.variant) fail("raw text needs a variant");
      g.esd = EventSequence{scenario, {}, Provenance::kGenerated, esd_id, nullptr};
      try {
        g.esd.events = decode(record["text"].get<std::string>(), *g.variant);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kNoEventsFound) throw;
      }
    } else {
      fail("record needs events or text");
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GeneratedRecord> load_generated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path);
  return read_generated(in);
}

std::string generated_record(const GeneratedRecord& record) {
  json j;
  j["scenario"] = record.esd.scenario.name;
  j["esd_id"] = record.esd.esd_id;
  j["events"] = record.esd.texts();
  if (record.variant) j["variant"] = variant_name(*record.variant);
  return j.dump();
}

std::string report_record(const PipelineReport& report) {
  nlohmann::ordered_json j;
  j["scenario"] = report.scenario;
  j["esd_id"] = report.esd_id;
  j["removed_irrelevant"] = nlohmann::ordered_json::array();
  for (const auto& r : report.removed_irrelevant) {
    j["removed_irrelevant"].push_back(
        {{"event", r.event.text}, {"index", r.event.original_index},
         {"score", r.score}});
  }
  j["removed_duplicates"] = nlohmann::ordered_json::array();
  for (const auto& r : report.removed_duplicates) {
    j["removed_duplicates"].push_back({{"event", r.event.text},
                                       {"index", r.event.original_index},
                                       {"kept_index", r.kept_index}});
  }
  j["reorder_applied"] = report.reorder_applied;
  j["graph_acyclic"] = report.graph_acyclic;
  j["pair_queries"] = report.pair_queries;
  j["final_permutation"] = report.final_permutation;
  if (report.error) j["error"] = *report.error;
  return j.dump();
}

BatchResult run_batch(std::span<const GeneratedRecord> records,
                      const PipelineConfig& cfg, Classifier* relevance_clf,
                      Classifier* temporal_clf, std::ostream* log) {
  BatchResult result;
  for (const auto& record : records) {
    try {
      auto processed =
          run_pipeline(record.esd, cfg, relevance_clf, temporal_clf);
      result.outputs.push_back({std::move(processed.esd), record.variant});
      result.reports.push_back(std::move(processed.report));
    } catch (const Error& e) {
      PipelineReport failed;
      failed.scenario = record.esd.scenario.name;
      failed.esd_id = record.esd.esd_id;
      failed.error = e.what();
      result.reports.push_back(std::move(failed));
      ++result.failures;
      if (log) *log << "esd " << record.esd.esd_id << ": " << e.what() << '\n';
    }
  }
  return result;
}

}  // namespace sif
