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

#include "sif/esd.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"
#include "sif/error.hpp"

namespace sif {
namespace {

using json = nlohmann::json;

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of a leading "<digits>." prefix (plus following spaces), or 0. The
// period must not be followed by a digit so "3.5 cups" is left alone.
std::size_t numbering_prefix_length(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == 0 || i >= s.size() || s[i] != '.') return 0;
  ++i;
  if (i < s.size() && is_digit(s[i])) return 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return i;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::kParseError,
              "line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  for (const auto& token : split_whitespace(text)) {
    if (!out.empty()) out += ' ';
    out += token;
  }
  return out;
}

bool is_numbering_token(std::string_view token) {
  if (token.size() < 2 || token.back() != '.') return false;
  for (std::size_t i = 0; i + 1 < token.size(); ++i) {
    if (!is_digit(token[i])) return false;
  }
  return true;
}

Scenario Scenario::from_name(std::string_view name) {
  std::string normalized = collapse_whitespace(lowercase(name));
  if (normalized.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "empty scenario name");
  }
  return Scenario{normalized, normalized};
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kGold: return "gold";
    case Provenance::kGenerated: return "generated";
    case Provenance::kPostprocessed: return "postprocessed";
  }
  return "unknown";
}

std::vector<std::string> EventSequence::texts() const {
  std::vector<std::string> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.text);
  return out;
}

void EventSequence::check_invariants() const {
  if (provenance == Provenance::kGold && events.empty()) {
    throw Error(ErrorKind::kInvalidArgument,
                "gold ESD '" + esd_id + "' has no events");
  }
  if (provenance == Provenance::kPostprocessed && !report) {
    throw Error(ErrorKind::kInvalidArgument,
                "postprocessed ESD '" + esd_id + "' has no report");
  }
  std::set<std::size_t> seen;
  for (const auto& e : events) {
    if (!seen.insert(e.original_index).second) {
      throw Error(ErrorKind::kInvalidArgument,
                  "ESD '" + esd_id + "' repeats original index " +
                      std::to_string(e.original_index));
    }
  }
}

Event normalize_event(std::string_view raw, std::size_t original_index) {
  std::string text = collapse_whitespace(lowercase(raw));
  std::string_view rest = text;
  while (std::size_t n = numbering_prefix_length(rest)) rest.remove_prefix(n);
  if (rest.empty()) {
    throw Error(ErrorKind::kEmptyEvent,
                "nothing left of '" + std::string(raw) + "'");
  }
  return Event{std::string(rest), original_index};
}

EventSequence make_sequence(const Scenario& scenario,
                            std::span<const std::string> raw_events,
                            Provenance provenance, std::string esd_id) {
  EventSequence esd{scenario, {}, provenance, std::move(esd_id), nullptr};
  esd.events.reserve(raw_events.size());
  for (std::size_t i = 0; i < raw_events.size(); ++i) {
    esd.events.push_back(normalize_event(raw_events[i], i));
  }
  return esd;
}

std::string canonical_numbered_form(std::span<const std::string> events) {
  if (events.empty()) {
    throw Error(ErrorKind::kEmptySequence, "no events to number");
  }
  std::string out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(i + 1);
    out += ". ";
    out += events[i];
  }
  return out;
}

std::string canonical_numbered_form(const EventSequence& esd) {
  const auto texts = esd.texts();
  return canonical_numbered_form(texts);
}

void Corpus::add(EventSequence esd) {
  if (esd.provenance != Provenance::kGold) {
    throw Error(ErrorKind::kInvalidArgument,
                "corpus holds gold ESDs only: '" + esd.esd_id + "'");
  }
  esd.check_invariants();
  if (by_id_.count(esd.esd_id)) {
    throw Error(ErrorKind::kDuplicateEsdId, esd.esd_id);
  }
  auto it = esds_.find(esd.scenario.id);
  if (it == esds_.end()) {
    scenarios_.push_back(esd.scenario);
    it = esds_.emplace(esd.scenario.id, std::vector<EventSequence>{}).first;
  }
  by_id_.emplace(esd.esd_id, std::make_pair(esd.scenario.id, it->second.size()));
  it->second.push_back(std::move(esd));
}

const std::vector<EventSequence>& Corpus::esds(
    std::string_view scenario_id) const {
  auto it = esds_.find(scenario_id);
  if (it == esds_.end()) {
    throw Error(ErrorKind::kUnknownScenario, std::string(scenario_id));
  }
  return it->second;
}

const EventSequence* Corpus::find_esd(std::string_view esd_id) const {
  auto it = by_id_.find(esd_id);
  if (it == by_id_.end()) return nullptr;
  return &esds_.find(it->second.first)->second[it->second.second];
}

bool Corpus::has_scenario(std::string_view scenario_id) const {
  return esds_.find(scenario_id) != esds_.end();
}

const Scenario* Corpus::find_scenario(std::string_view scenario_id) const {
  for (const auto& s : scenarios_) {
    if (s.id == scenario_id) return &s;
  }
  return nullptr;
}

std::size_t Corpus::esd_count() const {
  std::size_t n = 0;
  for (const auto& [_, list] : esds_) n += list.size();
  return n;
}

Corpus Corpus::subset(std::span<const std::string> scenario_ids) const {
  Corpus out;
  for (const auto& id : scenario_ids) {
    for (const auto& esd : esds(id)) out.add(esd);
  }
  return out;
}

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (collapse_whitespace(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      parse_error(line_no, e.what());
    }
    if (!record.is_object() || !record.contains("scenario") ||
        !record.contains("esd_id") || !record.contains("events") ||
        !record["scenario"].is_string() || !record["esd_id"].is_string() ||
        !record["events"].is_array()) {
      parse_error(line_no, "expected {scenario, esd_id, events}");
    }
    std::vector<std::string> events;
    for (const auto& e : record["events"]) {
      if (!e.is_string()) parse_error(line_no, "events must be strings");
      events.push_back(e.get<std::string>());
    }
    if (events.empty()) parse_error(line_no, "gold ESD without events");
    try {
      corpus.add(make_sequence(
          Scenario::from_name(record["scenario"].get<std::string>()), events,
          Provenance::kGold, record["esd_id"].get<std::string>()));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kDuplicateEsdId) throw;
      parse_error(line_no, e.what());
    }
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path);
  return read_corpus(in);
}

std::string corpus_record(const EventSequence& esd) {
  json record;
  record["scenario"] = esd.scenario.name;
  record["esd_id"] = esd.esd_id;
  record["events"] = esd.texts();
  return record.dump();
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& scenario : corpus.scenarios()) {
    for (const auto& esd : corpus.esds(scenario.id)) {
      out << corpus_record(esd) << '\n';
    }
  }
}

Corpus convert_text_corpus(std::istream& in) {
  Corpus corpus;
  std::map<std::string, std::size_t> counters;
  std::vector<std::string> block;
  std::size_t line_no = 0;
  std::size_t block_start = 0;

  auto flush = [&] {
    if (block.empty()) return;
    const Scenario scenario = Scenario::from_name(block.front());
    std::vector<std::string> events(block.begin() + 1, block.end());
    if (events.empty()) parse_error(block_start, "scenario without events");
    std::string stem = scenario.name;
    for (char& c : stem) {
      if (c == ' ') c = '_';
    }
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_%03zu", ++counters[scenario.id]);
    try {
      corpus.add(make_sequence(scenario, events, Provenance::kGold,
                               stem + suffix));
    } catch (const Error& e) {
      parse_error(block_start, e.what());
    }
    block.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (collapse_whitespace(line).empty()) {
      flush();
      continue;
    }
    if (block.empty()) block_start = line_no;
    block.push_back(line);
  }
  flush();
  return corpus;
}

}  // namespace sif
