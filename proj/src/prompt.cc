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

#include "sif/prompt.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json.hpp"
#include "sif/error.hpp"

namespace sif {
namespace {

constexpr std::string_view kSequencePhrase =
    "here is a sequence of events that happen while ";
constexpr std::string_view kExpectPhrase =
    "these are the things that happen when you ";
constexpr std::string_view kOrderedPhrase =
    "here is an ordered sequence of events that occur when you ";
constexpr std::string_view kDescribePhrase = "describe ";
constexpr std::string_view kDescribeTail =
    " in small sequences of short sentences";

// Head verbs of every scenario name appearing in the DeScript folds and the
// novel-scenario evaluation, plus gerunds whose base form itself ends in
// "ing".
const std::map<std::string, std::string, std::less<>>& gerund_table() {
  static const auto* table = new std::map<std::string, std::string, std::less<>>{
      {"answering", "answer"},  {"attending", "attend"},
      {"baking", "bake"},       {"borrowing", "borrow"},
      {"brushing", "brush"},    {"buying", "buy"},
      {"changing", "change"},   {"checking", "check"},
      {"cleaning", "clean"},    {"cooking", "cook"},
      {"doing", "do"},          {"eating", "eat"},
      {"flying", "fly"},        {"fueling", "fuel"},
      {"getting", "get"},       {"going", "go"},
      {"having", "have"},       {"ironing", "iron"},
      {"making", "make"},       {"ordering", "order"},
      {"paying", "pay"},        {"planting", "plant"},
      {"playing", "play"},      {"renovating", "renovate"},
      {"repairing", "repair"},  {"riding", "ride"},
      {"sending", "send"},      {"sewing", "sew"},
      {"surfing", "surf"},      {"taking", "take"},
      {"tying", "tie"},         {"washing", "wash"},
      {"watching", "watch"},
      {"bringing", "bring"},    {"singing", "sing"},
      {"ringing", "ring"},      {"stringing", "string"},
      {"swinging", "swing"},    {"stinging", "sting"},
      {"clinging", "cling"},    {"flinging", "fling"},
      {"wringing", "wring"},    {"springing", "spring"},
  };
  return *table;
}

// Words ending in "ing" that are not gerunds.
bool is_non_gerund(std::string_view word) {
  static const auto* words = new std::set<std::string, std::less<>>{
      "bring", "sing",    "ring",      "king",     "thing",    "wing",
      "spring", "string", "swing",     "sting",    "cling",    "fling",
      "wring", "sling",   "ding",      "ping",     "during",   "nothing",
      "something", "anything", "everything", "ceiling", "evening", "morning",
      "ling", "ting",     "wedding", "building", "pudding", "clothing",
      "stuffing", "icing",  "frosting", "awning",   "bedding",
  };
  return words->count(word) > 0;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

std::size_t vowel_groups(std::string_view w) {
  std::size_t groups = 0;
  bool in_group = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool v = is_vowel(w[i]) || (w[i] == 'y' && i > 0);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  return groups;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::string numbered_body(std::span<const std::string> events) {
  if (events.empty()) return {};
  return canonical_numbered_form(events);
}

std::string tokened_body(std::span<const std::string> events) {
  std::string out;
  for (const auto& e : events) {
    if (!out.empty()) out += ' ';
    out += kEventBegin;
    out += ' ';
    out += e;
    out += ' ';
    out += kEventEnd;
  }
  return out;
}

// Position just past the first ':' at or after `from`, or npos.
std::size_t past_colon(std::string_view s, std::size_t from) {
  const std::size_t colon = s.find(':', from);
  return colon == std::string_view::npos ? colon : colon + 1;
}

// Removes the variant's prompt prefix from lowercased text when present.
std::string_view strip_prefix(std::string_view text, PromptVariant variant) {
  std::size_t cut = std::string_view::npos;
  switch (variant) {
    case PromptVariant::kSequence:
      if (starts_with(text, kSequencePhrase)) {
        cut = past_colon(text, kSequencePhrase.size());
      }
      break;
    case PromptVariant::kExpect:
      if (starts_with(text, kExpectPhrase)) {
        cut = past_colon(text, kExpectPhrase.size());
      }
      break;
    case PromptVariant::kOrdered:
      if (starts_with(text, kOrderedPhrase)) {
        cut = past_colon(text, kOrderedPhrase.size());
      }
      break;
    case PromptVariant::kDescribe:
      if (starts_with(text, kDescribePhrase)) {
        const std::size_t tail = text.find(kDescribeTail);
        if (tail != std::string_view::npos) {
          cut = past_colon(text, tail + kDescribeTail.size());
        }
      }
      break;
    case PromptVariant::kDirect: {
      const auto tokens = split_whitespace(text.substr(0, 32));
      if (!tokens.empty() && !is_numbering_token(tokens.front())) {
        cut = past_colon(text, 0);
      }
      break;
    }
    case PromptVariant::kTokens:
    case PromptVariant::kAllTokens:
      if (starts_with(text, "<scr>")) {
        const std::size_t end = text.find("<escr>");
        if (end != std::string_view::npos) {
          cut = end + 6;
          if (cut < text.size() && text[cut] == ':') ++cut;
        }
      }
      break;
  }
  if (cut == std::string_view::npos) return text;
  return text.substr(cut);
}

std::vector<std::string> numbered_slots(std::string_view body) {
  std::vector<std::string> slots;
  bool open = false;
  for (auto& token : split_whitespace(body)) {
    if (is_numbering_token(token)) {
      slots.emplace_back();
      open = true;
    } else if (open) {
      if (!slots.back().empty()) slots.back() += ' ';
      slots.back() += token;
    }
  }
  return slots;
}

std::vector<std::string> tokened_slots(std::string_view body) {
  constexpr std::string_view kBegin = "<bevent>";
  constexpr std::string_view kEnd = "<eevent>";
  std::vector<std::string> slots;
  std::size_t pos = body.find(kBegin);
  while (pos != std::string_view::npos) {
    const std::size_t start = pos + kBegin.size();
    const std::size_t next_begin = body.find(kBegin, start);
    const std::size_t next_end = body.find(kEnd, start);
    const std::size_t stop = std::min(next_begin, next_end);
    slots.emplace_back(body.substr(start, stop == std::string_view::npos
                                              ? std::string_view::npos
                                              : stop - start));
    pos = next_begin;
  }
  return slots;
}

}  // namespace

std::string_view variant_name(PromptVariant v) {
  switch (v) {
    case PromptVariant::kSequence: return "SEQUENCE";
    case PromptVariant::kExpect: return "EXPECT";
    case PromptVariant::kOrdered: return "ORDERED";
    case PromptVariant::kDescribe: return "DESCRIBE";
    case PromptVariant::kDirect: return "DIRECT";
    case PromptVariant::kTokens: return "TOKENS";
    case PromptVariant::kAllTokens: return "ALLTOKENS";
  }
  return "";
}

std::optional<PromptVariant> parse_variant(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  for (auto v : kAllVariants) {
    if (variant_name(v) == upper) return v;
  }
  return std::nullopt;
}

std::string gerund_to_base_by_rules(std::string_view gerund) {
  const std::string word(gerund);
  if (word.size() < 5 || !ends_with(word, "ing")) return word;
  std::string stem = word.substr(0, word.size() - 3);
  const char last = stem.back();

  // tying -> tie, lying -> lie
  if (stem.size() == 2 && last == 'y') return stem.substr(0, 1) + "ie";

  // getting -> get; calling and passing keep their double letter.
  if (stem.size() >= 3 && last == stem[stem.size() - 2] && !is_vowel(last) &&
      last != 'l' && last != 's' && last != 'z' && last != 'f') {
    stem.pop_back();
    return stem;
  }

  // Stems that never end a base form without a silent e.
  if (last == 'v' || last == 'c' || last == 'u' || ends_with(stem, "dg") ||
      (last == 'z' && stem[stem.size() - 2] != 'z')) {
    return stem + "e";
  }

  // Consonant-vowel-consonant endings.
  if (stem.size() >= 2 && !is_vowel(last) && last != 'w' && last != 'x' &&
      last != 'y' && is_vowel(stem[stem.size() - 2]) &&
      (stem.size() == 2 || !is_vowel(stem[stem.size() - 3]))) {
    if (stem.size() > 2 && vowel_groups(stem) == 1) return stem + "e";
    static constexpr std::string_view kSilentE[] = {
        "at", "iz", "ut", "ud", "ok", "os", "ib", "ar", "ir", "ur", "ag",
        "id", "in", "ul"};
    for (auto suffix : kSilentE) {
      if (ends_with(stem, suffix)) return stem + "e";
    }
  }
  return stem;
}

InfinitiveForm infinitive_form(std::string_view scenario_name) {
  const std::string name(scenario_name);
  const std::size_t space = name.find(' ');
  const std::string head = name.substr(0, space);
  const std::string rest =
      space == std::string::npos ? std::string() : name.substr(space);

  if (!ends_with(head, "ing") || is_non_gerund(head)) return {name, false};
  const auto& table = gerund_table();
  if (auto it = table.find(head); it != table.end()) {
    return {it->second + rest, true};
  }
  const std::string base = gerund_to_base_by_rules(head);
  if (base == head || ends_with(base, "ing")) return {name, false};
  return {base + rest, true};
}

std::string prompt_prefix(const Scenario& scenario, PromptVariant variant) {
  const std::string& name = scenario.name;
  switch (variant) {
    case PromptVariant::kSequence:
      return std::string(kSequencePhrase) + name + ":";
    case PromptVariant::kExpect:
      return std::string(kExpectPhrase) + infinitive_form(name).text + ":";
    case PromptVariant::kOrdered:
      return std::string(kOrderedPhrase) + infinitive_form(name).text + ":";
    case PromptVariant::kDescribe:
      return std::string(kDescribePhrase) + name + std::string(kDescribeTail) +
             ":";
    case PromptVariant::kDirect:
      return name + ":";
    case PromptVariant::kTokens:
    case PromptVariant::kAllTokens:
      return std::string(kScenarioBegin) + " " + name + " " +
             std::string(kScenarioEnd) + ":";
  }
  return {};
}

std::string encode(const Scenario& scenario,
                   std::span<const std::string> events, PromptVariant variant) {
  std::string out = prompt_prefix(scenario, variant);
  const std::string body = variant == PromptVariant::kAllTokens
                               ? tokened_body(events)
                               : numbered_body(events);
  if (!body.empty()) {
    out += ' ';
    out += body;
  }
  return out;
}

std::string encode(const Scenario& scenario, std::span<const Event> events,
                   PromptVariant variant) {
  std::vector<std::string> texts;
  texts.reserve(events.size());
  for (const auto& e : events) texts.push_back(e.text);
  return encode(scenario, std::span<const std::string>(texts), variant);
}

std::vector<Event> decode(std::string_view text, PromptVariant variant) {
  std::string lowered = collapse_whitespace(lowercase(text));
  if (const auto eos = lowered.find("<eos>"); eos != std::string::npos) {
    lowered.resize(eos);
  }
  std::string_view body = lowered;
  while (starts_with(body, "<bos>")) {
    body.remove_prefix(5);
    while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
  }
  body = strip_prefix(body, variant);

  const auto slots = variant == PromptVariant::kAllTokens ? tokened_slots(body)
                                                          : numbered_slots(body);
  std::vector<Event> events;
  for (const auto& slot : slots) {
    try {
      events.push_back(normalize_event(slot, events.size()));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kEmptyEvent) throw;
    }
  }
  if (events.empty()) {
    throw Error(ErrorKind::kNoEventsFound,
                "no event slot in generated text for variant " +
                    std::string(variant_name(variant)));
  }
  return events;
}

std::array<std::string, 4> probing_beginnings(const Scenario& scenario) {
  return {
      prompt_prefix(scenario, PromptVariant::kExpect),
      prompt_prefix(scenario, PromptVariant::kOrdered),
      prompt_prefix(scenario, PromptVariant::kDescribe),
      prompt_prefix(scenario, PromptVariant::kSequence),
  };
}

std::vector<ProbingPrompt> probing_prompts(const Scenario& scenario,
                                           std::span<const Event> seed_events) {
  if (seed_events.size() < 2) {
    throw Error(ErrorKind::kInsufficientSeedEvents,
                "need 2 seed events, got " +
                    std::to_string(seed_events.size()));
  }
  const std::array<std::string, 4> continuations = {
      "",
      "1. ",
      "1. " + seed_events[0].text + " ",
      "1. " + seed_events[0].text + " 2. " + seed_events[1].text + " ",
  };
  std::vector<ProbingPrompt> prompts;
  const auto beginnings = probing_beginnings(scenario);
  for (std::size_t b = 0; b < beginnings.size(); ++b) {
    for (std::size_t c = 0; c < continuations.size(); ++c) {
      prompts.push_back({b, c, beginnings[b] + " " + continuations[c]});
    }
  }
  return prompts;
}

std::string template_manifest_json() {
  using json = nlohmann::json;
  json doc;
  doc["placeholders"] = {
      {"{scenario}", "scenario name, lowercase"},
      {"{scenario_infinitive}",
       "scenario with its head gerund in base form (baking a cake -> bake a "
       "cake)"},
      {"{events_numbered}", "\"1. e1 2. e2 ... n. en\""},
      {"{events_tokened}",
       "\"<BEVENT> e1 <EEVENT> <BEVENT> e2 <EEVENT> ...\""},
  };
  doc["rule"] =
      "the single space between the prefix and the events placeholder is "
      "omitted when there are no events";
  doc["wrapping"] = "<BOS> {prompt} <EOS>";
  const Scenario placeholder{"{scenario}", "{scenario}"};
  json variants = json::object();
  for (auto v : kAllVariants) {
    std::string prefix;
    switch (v) {
      case PromptVariant::kExpect:
        prefix = std::string(kExpectPhrase) + "{scenario_infinitive}:";
        break;
      case PromptVariant::kOrdered:
        prefix = std::string(kOrderedPhrase) + "{scenario_infinitive}:";
        break;
      default:
        prefix = prompt_prefix(placeholder, v);
    }
    const char* events = v == PromptVariant::kAllTokens ? "{events_tokened}"
                                                        : "{events_numbered}";
    variants[std::string(variant_name(v))] = prefix + " " + events;
  }
  doc["variants"] = variants;
  json probing;
  probing["beginnings"] = {
      std::string(kExpectPhrase) + "{scenario_infinitive}:",
      std::string(kOrderedPhrase) + "{scenario_infinitive}:",
      "describe {scenario}" + std::string(kDescribeTail) + ":",
      std::string(kSequencePhrase) + "{scenario}:",
  };
  probing["continuations"] = {"", "1. ", "1. {e1} ", "1. {e1} 2. {e2} "};
  probing["prompt"] = "{beginning} {continuation}";
  doc["probing"] = probing;
  return doc.dump(2);
}

}  // namespace sif
