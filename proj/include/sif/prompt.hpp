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

// Prompt formulations used to fine-tune a language model on ESDs, the 16
// zero-shot probing prompts, and the parser that turns generated text back
// into events.

#ifndef SIF_PROMPT_HPP_
#define SIF_PROMPT_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sif/esd.hpp"

namespace sif {

enum class PromptVariant {
  kSequence,
  kExpect,
  kOrdered,
  kDescribe,
  kDirect,
  kTokens,
  kAllTokens,
};

inline constexpr std::array<PromptVariant, 7> kAllVariants = {
    PromptVariant::kSequence, PromptVariant::kExpect,
    PromptVariant::kOrdered,  PromptVariant::kDescribe,
    PromptVariant::kDirect,   PromptVariant::kTokens,
    PromptVariant::kAllTokens,
};

// Upper-case names: SEQUENCE, EXPECT, ORDERED, DESCRIBE, DIRECT, TOKENS,
// ALLTOKENS. Parsing is case-insensitive.
std::string_view variant_name(PromptVariant v);
std::optional<PromptVariant> parse_variant(std::string_view name);

// Special-token surface forms.
inline constexpr std::string_view kScenarioBegin = "<SCR>";
inline constexpr std::string_view kScenarioEnd = "<ESCR>";
inline constexpr std::string_view kEventBegin = "<BEVENT>";
inline constexpr std::string_view kEventEnd = "<EEVENT>";
inline constexpr std::string_view kBeginOfScript = "<BOS>";
inline constexpr std::string_view kEndOfScript = "<EOS>";

struct InfinitiveForm {
  std::string text;
  // False when the head word did not look like a gerund and the input was
  // returned unchanged.
  bool converted = false;
};

// "baking a cake" -> "bake a cake". Lookup table first, then suffix rules.
InfinitiveForm infinitive_form(std::string_view scenario_name);

// The suffix rules alone, without the lookup table. Exposed for testing.
std::string gerund_to_base_by_rules(std::string_view gerund);

// Prompt text preceding the events, e.g. "baking a cake:" for DIRECT.
std::string prompt_prefix(const Scenario& scenario, PromptVariant variant);

std::string encode(const Scenario& scenario, std::span<const Event> events,
                   PromptVariant variant);
std::string encode(const Scenario& scenario,
                   std::span<const std::string> events, PromptVariant variant);

// Parses generated text. Leading <BOS> and everything from the first <EOS> on
// are dropped, the variant's prompt prefix is removed when present, and slots
// are split on numbering tokens (or <BEVENT>/<EEVENT> for ALLTOKENS). Slot
// numbers are not trusted; order is surface order. Empty slots are skipped.
// Throws kNoEventsFound.
std::vector<Event> decode(std::string_view text, PromptVariant variant);

struct ProbingPrompt {
  std::size_t beginning_index = 0;
  std::size_t continuation_index = 0;
  std::string text;
};

// The four prompt beginnings for a scenario, each ending with ':'.
std::array<std::string, 4> probing_beginnings(const Scenario& scenario);

// All 16 beginning x continuation prompts, beginning-major. Text is
// "<beginning> <continuation>" where the continuations are "", "1. ",
// "1. <e1> " and "1. <e1> 2. <e2> ". Throws kInsufficientSeedEvents.
std::vector<ProbingPrompt> probing_prompts(const Scenario& scenario,
                                           std::span<const Event> seed_events);

// Machine-readable description of every template, as a JSON document.
std::string template_manifest_json();

}  // namespace sif

#endif  // SIF_PROMPT_HPP_
