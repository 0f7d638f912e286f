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

// Scenarios, events and event sequence descriptions (ESDs), plus the
// canonical line-record corpus format.

#ifndef SIF_ESD_HPP_
#define SIF_ESD_HPP_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sif {

struct PipelineReport;

// ASCII lowercasing and whitespace collapsing. Bytes >= 0x80 pass through.
std::string lowercase(std::string_view text);
std::string collapse_whitespace(std::string_view text);
std::vector<std::string> split_whitespace(std::string_view text);

// True if `token` is a list-numbering token: one or more digits then '.'.
bool is_numbering_token(std::string_view token);

struct Scenario {
  std::string name;
  std::string id;

  // Normalizes `name` (lowercase, single spaces) and uses it as the id.
  static Scenario from_name(std::string_view name);

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct Event {
  std::string text;
  std::size_t original_index = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

enum class Provenance { kGold, kGenerated, kPostprocessed };

std::string_view provenance_name(Provenance p);

struct EventSequence {
  Scenario scenario;
  std::vector<Event> events;
  Provenance provenance = Provenance::kGenerated;
  std::string esd_id;
  // Set for provenance == kPostprocessed.
  std::shared_ptr<const PipelineReport> report;

  std::vector<std::string> texts() const;

  // Throws Error(kInvalidArgument) when an invariant is violated.
  void check_invariants() const;
};

// Builds an ESD whose events are normalized from `raw_events` and indexed in
// order.
EventSequence make_sequence(const Scenario& scenario,
                            std::span<const std::string> raw_events,
                            Provenance provenance, std::string esd_id);

// Lowercases, strips any leading "<digits>." numbering and collapses
// whitespace. Interior "<digits>." tokens are kept. Throws kEmptyEvent.
Event normalize_event(std::string_view raw, std::size_t original_index = 0);

// "1. e1 2. e2 ... n. en". Throws kEmptySequence for an empty list.
std::string canonical_numbered_form(std::span<const std::string> events);
std::string canonical_numbered_form(const EventSequence& esd);

class Corpus {
 public:
  // Throws kDuplicateEsdId when esd_id was seen before. `esd` must be gold.
  void add(EventSequence esd);

  const std::vector<Scenario>& scenarios() const { return scenarios_; }
  const std::vector<EventSequence>& esds(std::string_view scenario_id) const;
  const EventSequence* find_esd(std::string_view esd_id) const;
  bool has_scenario(std::string_view scenario_id) const;
  const Scenario* find_scenario(std::string_view scenario_id) const;
  std::size_t esd_count() const;
  bool empty() const { return scenarios_.empty(); }

  // Corpus restricted to the given scenarios, in the given order.
  Corpus subset(std::span<const std::string> scenario_ids) const;

 private:
  std::vector<Scenario> scenarios_;
  std::map<std::string, std::vector<EventSequence>, std::less<>> esds_;
  std::map<std::string, std::pair<std::string, std::size_t>, std::less<>>
      by_id_;
};

// Canonical corpus format: one JSON object per LF-terminated line with
// fields scenario (string), esd_id (string), events (array of strings).
// Throws kParseError (message carries the 1-based line number) and
// kDuplicateEsdId.
Corpus read_corpus(std::istream& in);
Corpus load_corpus(const std::string& path);
void write_corpus(std::ostream& out, const Corpus& corpus);

// One canonical line record, keys in sorted order.
std::string corpus_record(const EventSequence& esd);

// Converts the plain text layout (scenario header line, then numbered events,
// ESDs separated by blank lines) into a corpus. esd ids are
// "<scenario with '_' for spaces>_<3-digit counter>".
Corpus convert_text_corpus(std::istream& in);

}  // namespace sif

#endif  // SIF_ESD_HPP_
