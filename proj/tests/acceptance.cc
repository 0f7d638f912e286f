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


// Acceptance suite. Prints one PASS or FAIL line per criterion and exits
// non-zero when any criterion fails.
//
// usage: sif_acceptance <path to sif executable> <test data directory>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sif/baseline.hpp"
#include "sif/classifier.hpp"
#include "sif/dataset.hpp"
#include "sif/error.hpp"
#include "sif/esd.hpp"
#include "sif/metrics.hpp"
#include "sif/oracle.hpp"
#include "sif/pipeline.hpp"
#include "sif/prompt.hpp"
#include "sif/random.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace sif;
using sif::testing::Corruption;
using sif::testing::World;
using sif::testing::WordSource;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

std::string cli_path;
std::string data_dir;

std::string run_capture(const std::string& command, int* status) {
  std::string out;
  FILE* pipe = ::popen(command.c_str(), "r");
  if (!pipe) {
    *status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    out.append(buf.data(), n);
  }
  *status = ::pclose(pipe);
  return out;
}

std::vector<std::string> texts(const EventSequence& esd) { return esd.texts(); }

// ------------------------------------------------------------ inversion

Outcome pipeline_inversion() {
  Outcome o;
  Rng rng(7001);
  WordSource words(rng);
  std::vector<std::string> foreign_pool;
  for (int i = 0; i < 300; ++i) {
    foreign_pool.push_back(words.next() + " the " + words.next());
  }
  const auto start = std::chrono::steady_clock::now();
  const int trials = 1000;
  int restored = 0;
  for (int t = 0; t < trials; ++t) {
    const Scenario scenario = Scenario::from_name("doing " + words.next());
    const std::size_t n = 3 + rng.uniform(10);
    std::vector<std::string> gold;
    for (std::size_t i = 0; i < n; ++i) {
      gold.push_back(words.next() + " " + words.next());
    }
    Corruption c;
    c.foreign = 1 + rng.uniform(3);
    c.duplicates = 1 + rng.uniform(2);
    c.shuffle = true;
    const auto corrupted = sif::testing::corrupt(gold, foreign_pool, c, rng);
    std::map<std::string, ScenarioRules> rules;
    rules[scenario.id].order = gold;
    RulesClassifier oracle(std::move(rules));
    const EventSequence input = make_sequence(
        scenario, corrupted, Provenance::kGenerated, "t" + std::to_string(t));
    const auto result = run_pipeline(input, PipelineConfig{}, &oracle, &oracle);
    if (texts(result.esd) == gold) {
      ++restored;
    } else {
      o.fail("trial " + std::to_string(t) + " not restored");
    }
  }
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  if (seconds >= 10.0) o.fail("took " + std::to_string(seconds) + " s");
  if (o.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d/%d trials restored in %.2f s", restored,
                  trials, seconds);
    o.detail = buf;
  }
  return o;
}

// ------------------------------------------------------------ ablation

std::vector<EventSequence> corrupted_samples(const World& w, const Corruption& c,
                                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<EventSequence> out;
  for (const auto& id : w.scenarios) {
    std::vector<std::string> foreign;
    for (const auto& [other, script] : w.scripts) {
      if (other != id) foreign.insert(foreign.end(), script.begin(), script.end());
    }
    const auto& golds = w.gold.esds(id);
    for (int k = 0; k < 5; ++k) {
      const auto& g = golds[rng.uniform(golds.size())];
      const auto events = sif::testing::corrupt(g.texts(), foreign, c, rng);
      out.push_back(make_sequence(g.scenario, events, Provenance::kGenerated,
                                  id + "/gen" + std::to_string(k)));
    }
  }
  return out;
}

std::vector<double> ablation_means(const World& w,
                                   const std::vector<EventSequence>& generated) {
  RulesClassifier oracle = w.oracle();
  std::vector<double> means;
  for (const auto& step : ablation_steps()) {
    std::vector<EventSequence> processed;
    for (const auto& esd : generated) {
      processed.push_back(run_pipeline(esd, step.config, &oracle, &oracle).esd);
    }
    means.push_back(evaluate_fold(processed, w.gold).fold_mean);
  }
  return means;
}

Outcome ablation_monotonicity() {
  Outcome o;
  const World w = sif::testing::make_world(8, 4, 7101);
  std::ostringstream detail;
  auto fmt = [](const std::vector<double>& m) {
    std::ostringstream s;
    for (std::size_t i = 0; i < m.size(); ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%.1f", m[i] * 100.0);
      s << (i ? " -> " : "") << buf;
    }
    return s.str();
  };
  // All corruption types: every step must gain.
  {
    const auto m =
        ablation_means(w, corrupted_samples(w, {2, 2, true}, 7102));
    for (std::size_t i = 1; i < m.size(); ++i) {
      if (!(m[i] > m[i - 1])) o.fail("no strict gain at step " + std::to_string(i) + ": " + fmt(m));
    }
    detail << "all: " << fmt(m);
  }
  // One corruption type at a time: that step gains, none loses.
  const std::array<std::pair<Corruption, std::size_t>, 3> singles = {{
      {{2, 0, false}, 1},
      {{0, 2, false}, 2},
      {{0, 0, true}, 3},
  }};
  for (const auto& [c, step] : singles) {
    const auto m = ablation_means(w, corrupted_samples(w, c, 7103 + step));
    for (std::size_t i = 1; i < m.size(); ++i) {
      if (m[i] < m[i - 1]) o.fail("BLEU decreased at step " + std::to_string(i) + ": " + fmt(m));
    }
    if (!(m[step] > m[step - 1])) {
      o.fail("step " + std::to_string(step) + " did not gain: " + fmt(m));
    }
    detail << "; only-" << ablation_steps()[step].name << ": " << fmt(m);
  }
  if (o.pass) o.detail = detail.str();
  return o;
}

// ------------------------------------------------------------ topological sort

// A tournament is transitive exactly when its out-degrees are 0..n-1.
bool transitive_by_scores(std::size_t n,
                          const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::size_t> out(n, 0);
  for (const auto& [u, v] : edges) ++out[u];
  std::sort(out.begin(), out.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (out[i] != i) return false;
  }
  return true;
}

Outcome topological_equivalence() {
  Outcome o;
  std::size_t checked = 0;
  for (std::size_t n = 0; n <= 8; ++n) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
      OrderGraph g;
      g.nodes.resize(n);
      std::iota(g.nodes.begin(), g.nodes.end(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) g.edges.emplace_back(perm[i], perm[j]);
      }
      ++checked;
      const auto order = topological_order(g);
      if (!order || *order != perm) {
        o.fail("permutation of size " + std::to_string(n) + " not recovered");
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  Rng rng(7201);
  int cyclic = 0;
  while (cyclic < 1000) {
    const std::size_t n = 3 + rng.uniform(8);
    std::map<std::pair<std::size_t, std::size_t>, bool> forward;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool f = rng.uniform(2) == 0;
        forward[{i, j}] = f;
        edges.emplace_back(f ? i : j, f ? j : i);
      }
    }
    if (transitive_by_scores(n, edges)) continue;
    ++cyclic;
    OrderGraph g;
    g.nodes.resize(n);
    std::iota(g.nodes.begin(), g.nodes.end(), 0);
    g.edges = edges;
    if (topological_order(g)) o.fail("cyclic tournament given an order");
    std::vector<std::string> events;
    std::vector<std::size_t> shown(n);
    std::iota(shown.begin(), shown.end(), 0);
    rng.shuffle(std::span<std::size_t>(shown));
    for (std::size_t i : shown) events.push_back("event " + std::to_string(i));
    EventSequence esd =
        make_sequence(Scenario::from_name("cycling"), events,
                      Provenance::kGenerated, "c" + std::to_string(cyclic));
    CallbackClassifier clf([&](Task, const Query& q) {
      const std::size_t a = std::stoul(q.events[0].substr(6));
      const std::size_t b = std::stoul(q.events[1].substr(6));
      const bool a_first = a < b ? forward[{a, b}] : !forward[{b, a}];
      return Verdict{a_first ? 1 : 0, a_first ? 1.0 : 0.0};
    });
    PipelineReport report;
    const auto out = step_reorder(esd, clf, &report);
    if (out.texts() != esd.texts() || report.graph_acyclic) {
      o.fail("cyclic input order not preserved");
    }
  }
  if (o.pass) {
    o.detail = std::to_string(checked) +
               " transitive tournaments recovered, 1000 cyclic rejected";
  }
  return o;
}

// ------------------------------------------------------------ levenshtein

std::vector<std::string> ab_strings(std::size_t max_len) {
  std::vector<std::string> out{""};
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].size() < max_len) {
      out.push_back(out[i] + "a");
      out.push_back(out[i] + "b");
    }
  }
  return out;
}

// Breadth-first search over single-character edits, lengths bounded by
// max_len (an optimal edit script never needs a longer intermediate).
std::map<std::string, std::size_t> edit_bfs(const std::string& source,
                                            std::size_t max_len) {
  std::map<std::string, std::size_t> dist{{source, 0}};
  std::queue<std::string> q;
  q.push(source);
  while (!q.empty()) {
    const std::string s = q.front();
    q.pop();
    std::vector<std::string> next;
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::string sub = s;
      sub[i] = s[i] == 'a' ? 'b' : 'a';
      next.push_back(sub);
      next.push_back(s.substr(0, i) + s.substr(i + 1));
    }
    if (s.size() < max_len) {
      for (std::size_t i = 0; i <= s.size(); ++i) {
        next.push_back(s.substr(0, i) + "a" + s.substr(i));
        next.push_back(s.substr(0, i) + "b" + s.substr(i));
      }
    }
    for (auto& t : next) {
      if (dist.emplace(t, dist[s] + 1).second) q.push(t);
    }
  }
  return dist;
}

std::size_t naive_distance(const std::string& a, const std::string& b) {
  if (a.empty()) return b.size();
  if (b.empty()) return a.size();
  const std::string ra = a.substr(1), rb = b.substr(1);
  if (a[0] == b[0]) return naive_distance(ra, rb);
  return 1 + std::min({naive_distance(ra, b), naive_distance(a, rb),
                       naive_distance(ra, rb)});
}

Outcome levenshtein_equivalence() {
  Outcome o;
  const auto all = ab_strings(6);
  std::size_t pairs = 0;
  for (const auto& a : all) {
    const auto dist = edit_bfs(a, 6);
    for (const auto& b : all) {
      ++pairs;
      if (levenshtein(a, b) != dist.at(b)) o.fail("'" + a + "' vs '" + b + "'");
      if (a.size() <= 4 && b.size() <= 4 && naive_distance(a, b) != dist.at(b)) {
        o.fail("oracles disagree on '" + a + "' vs '" + b + "'");
      }
    }
  }
  if (o.pass) o.detail = std::to_string(pairs) + " pairs exact";
  return o;
}

// ------------------------------------------------------------ BLEU

Outcome bleu_fixtures() {
  Outcome o;
  for (const std::string x :
       {"1. a", "1. a b 2. c", "1. preheat the oven 2. bake the cake 3. eat"}) {
    const std::vector<std::string> refs{x};
    if (bleu(x, refs) != 1.0) o.fail("identity not 1.0 for '" + x + "'");
  }
  struct Fixture {
    std::string candidate;
    std::vector<std::string> references;
    double expected;
  };
  // Expected values come from an independent BLEU implementation
  // (add-one smoothing for orders 2..4); the first is exp(-0.2) by hand.
  const std::vector<Fixture> fixtures = {
      {"1. a b 2. c", {"1. a b 2. c d"}, 0.8187307530779819},
      {"1. a b 2. a b", {"1. a b 2. c", "1. x y 2. a b 3. z"}, 0.6865890479690393},
      {"1. preheat the oven 2. mix flour and sugar 3. bake the cake",
       {"1. preheat the oven 2. mix the batter 3. pour batter into pan 4. bake the cake",
        "1. get ingredients 2. mix flour and sugar 3. bake cake 4. eat the cake"},
       0.7747518992563083},
      {"1. board the bus 2. pay the fare 3. sit down 4. get off",
       {"1. wait at the stop 2. board the bus 3. pay the fare 4. find a seat 5. ring the bell 6. get off",
        "1. board bus 2. pay 3. sit down",
        "1. go to the bus stop 2. get on the bus 3. sit down 4. get off the bus"},
       0.4622266719503424},
      {"1. fill the tub 2. fill the tub 3. get in 4. wash 5. get out",
       {"1. fill the tub with water 2. get in 3. wash 4. get out 5. dry off",
        "1. run water 2. undress 3. get in the tub 4. wash yourself 5. get out"},
       0.3840888062519143},
      {"1. x y z 2. w", {"1. a b 2. c d 3. e", "1. x y 2. q"}, 0.42728700639623407},
      {"1. go to the store 2. buy milk 3. pay 4. go home",
       {"1. go to the store 2. buy milk 3. pay 4. go home 5. put milk away",
        "1. go to the store 2. buy milk 3. pay"},
       1.0},
  };
  if (std::abs(fixtures[0].expected - std::exp(-0.2)) > 1e-15) {
    o.fail("hand fixture transcription");
  }
  for (std::size_t i = 0; i < fixtures.size(); ++i) {
    const double got = bleu(fixtures[i].candidate, fixtures[i].references);
    if (std::abs(got - fixtures[i].expected) > 1e-9) {
      o.fail("fixture " + std::to_string(i + 1) + ": " + std::to_string(got));
    }
  }
  // All-perfect toy folds: every scenario's generated ESD equals its single
  // gold ESD.
  Corpus gold;
  std::vector<EventSequence> generated;
  const std::vector<std::pair<std::string, std::vector<std::string>>> toy = {
      {"baking a cake", {"preheat oven", "mix batter", "bake"}},
      {"riding on a bus", {"wait", "board the bus", "pay", "get off"}},
      {"planting a tree", {"dig a hole", "plant", "water"}},
  };
  FoldPlan plan;
  for (const auto& [name, events] : toy) {
    const Scenario s = Scenario::from_name(name);
    gold.add(make_sequence(s, events, Provenance::kGold, name + "/gold"));
    generated.push_back(make_sequence(s, events, Provenance::kGenerated, name + "/gen"));
    plan.folds.push_back({{name}, ""});
  }
  const CrossFoldReport perfect = evaluate(generated, gold, plan);
  const std::string shown = format_bleu_mean_std(perfect.mean, perfect.std);
  if (shown != "100.0 (0.0)") o.fail("perfect toy fold reported " + shown);

  const Corpus toy_gold = load_corpus(data_dir + "/toy_fold_gold.jsonl");
  std::vector<EventSequence> toy_gen;
  for (const auto& r : load_generated(data_dir + "/toy_fold_generated.jsonl")) {
    toy_gen.push_back(r.esd);
  }
  const double fold_mean = evaluate_fold(toy_gen, toy_gold).fold_mean;
  if (std::abs(fold_mean - 0.7165335392090845) > 1e-9) {
    o.fail("toy fold mean " + std::to_string(fold_mean));
  }
  if (o.pass) {
    o.detail = "identity exact, " + std::to_string(fixtures.size()) +
               " multi-reference fixtures within 1e-9, perfect fold " + shown;
  }
  return o;
}

// ------------------------------------------------------------ codec

Outcome prompt_codec() {
  Outcome o;
  Rng rng(7301);
  std::vector<std::string> names;
  for (const auto& f : load_fixed_plan().folds) {
    names.insert(names.end(), f.scenarios.begin(), f.scenarios.end());
  }
  names.push_back("wedding ceremony");
  names.push_back("tying shoe laces");
  auto word = [&]() {
    switch (rng.uniform(6)) {
      case 0: return std::to_string(rng.uniform(1000));
      case 1: {
        std::string w(1 + rng.uniform(6), 'a');
        for (auto& ch : w) ch = static_cast<char>('a' + rng.uniform(26));
        return w + ".";
      }
      default: {
        std::string w(1 + rng.uniform(8), 'a');
        for (auto& ch : w) ch = static_cast<char>('a' + rng.uniform(26));
        return w;
      }
    }
  };
  int cases = 0;
  for (; cases < 10000; ++cases) {
    const Scenario s = Scenario::from_name(names[rng.uniform(names.size())]);
    const PromptVariant v = kAllVariants[rng.uniform(kAllVariants.size())];
    std::vector<std::string> events(1 + rng.uniform(10));
    for (auto& e : events) {
      const std::size_t n = 1 + rng.uniform(6);
      for (std::size_t i = 0; i < n; ++i) e += (i ? " " : "") + word();
      // A leading number followed by '.' would read as list numbering.
      e = "x " + e;
    }
    const std::string text = encode(s, events, v);
    std::vector<std::string> back;
    for (const auto& ev : decode(text, v)) back.push_back(ev.text);
    if (back != events) {
      o.fail("round trip failed for " + std::string(variant_name(v)) + ": " + text);
      break;
    }
  }
  const std::vector<Event> seeds = {normalize_event("get a cake mix", 0),
                                    normalize_event("gather together other ingredients", 1)};
  const auto prompts = probing_prompts(Scenario::from_name("baking a cake"), seeds);
  if (prompts.size() != 16) o.fail("expected 16 probing prompts");
  const std::vector<std::string> bold = {
      "these are the things that happen when you bake a cake: ",
      "here is an ordered sequence of events that occur when you bake a cake: ",
      "describe baking a cake in small sequences of short sentences: ",
      "here is a sequence of events that happen while baking a cake: 1. ",
      "here is an ordered sequence of events that occur when you bake a cake: 1. ",
      "here is a sequence of events that happen while baking a cake: 1. get a cake mix ",
      "these are the things that happen when you bake a cake: 1. get a cake mix 2. gather together other ingredients ",
      "describe baking a cake in small sequences of short sentences: 1. get a cake mix 2. gather together other ingredients ",
  };
  std::set<std::string> produced;
  for (const auto& p : prompts) produced.insert(p.text);
  for (const auto& b : bold) {
    if (!produced.count(b)) o.fail("missing probing prompt '" + b + "'");
  }
  if (o.pass) {
    o.detail = std::to_string(cases) + " round trips; 16 prompts incl. all " +
               std::to_string(bold.size()) + " exemplar prompts";
  }
  return o;
}

// ------------------------------------------------------------ fold plan

Outcome fixed_fold_plan() {
  Outcome o;
  const std::vector<std::pair<std::vector<std::string>, std::string>> expected = {
      {{"baking a cake", "borrowing a book from the library", "flying in an airplane", "going on a train", "riding on a bus"}, "cooking pasta"},
      {{"getting a hair cut", "going grocery shopping", "planting a tree", "repairing a flat bicycle tire", "taking a bath"}, "going bowling"},
      {{"eating in a fast food restaurant", "paying with a credit card", "playing tennis", "going to the theater", "taking a child to bed"}, "planting a tree"},
      {{"washing dishes", "making a bonfire", "going to the sauna", "making coffee", "going to the swimming pool"}, "going grocery shopping"},
      {{"taking a shower", "ironing laundry", "taking a driving lesson", "going to the dentist", "going to a funeral"}, "taking the underground"},
      {{"washing one's hair", "fueling a car", "sending food back (in a restaurant)", "changing batteries in an alarm clock", "checking in at an airport"}, "paying with a credit card"},
      {{"having a barbecue", "ordering a pizza", "cleaning up a flat", "making scrambled eggs", "taking the underground"}, "eating in a fast food restaurant"},
      {{"renovating a room", "cooking pasta", "sewing a button", "doing laundry", "going bowling"}, "getting a hair cut"},
  };
  int status = 0;
  const std::string out = run_capture("'" + cli_path + "' folds --fixed", &status);
  if (status != 0) {
    o.fail("folds --fixed exited with status " + std::to_string(status));
    return o;
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(out);
  } catch (const std::exception& e) {
    o.fail(std::string("unparsable plan: ") + e.what());
    return o;
  }
  if (doc.value("seed", nlohmann::json()) != "fixed") o.fail("seed is not \"fixed\"");
  if (!doc["folds"].is_array() || doc["folds"].size() != 8) {
    o.fail("expected 8 folds");
    return o;
  }
  for (std::size_t k = 0; k < 8; ++k) {
    const auto& f = doc["folds"][k];
    if (f["fold"] != k + 1) o.fail("fold number " + std::to_string(k + 1));
    if (f["scenarios"].get<std::vector<std::string>>() != expected[k].first) {
      o.fail("scenarios of fold " + std::to_string(k + 1));
    }
    if (f["heldout"] != expected[k].second) {
      o.fail("held-out scenario of fold " + std::to_string(k + 1));
    }
  }
  if (o.pass) o.detail = "8 folds x 5 scenarios + held-out match";
  return o;
}

// ------------------------------------------------------------ baseline

struct Synthetic {
  std::vector<LabeledInput> train;
  std::vector<LabeledInput> test;
};

std::string filler_phrase(Rng& rng, const std::vector<std::string>& pool,
                          const std::string& keyword) {
  std::vector<std::string> words;
  const std::size_t n = 2 + rng.uniform(3);
  for (std::size_t i = 0; i < n; ++i) words.push_back(pool[rng.uniform(pool.size())]);
  words.insert(words.begin() + static_cast<std::ptrdiff_t>(rng.uniform(n + 1)),
               keyword);
  std::string out;
  for (const auto& w : words) out += (out.empty() ? "" : " ") + w;
  return out;
}

Synthetic relevance_task(std::size_t train_n, std::size_t test_n) {
  Rng rng(7401);
  WordSource words(rng);
  std::vector<std::string> pool, keywords;
  for (int i = 0; i < 200; ++i) pool.push_back(words.next());
  for (int i = 0; i < 20; ++i) keywords.push_back(words.next());
  auto make = [&](std::size_t n) {
    std::vector<LabeledInput> out;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t s = rng.uniform(keywords.size());
      const int label = static_cast<int>(rng.uniform(2));
      std::size_t k = s;
      while (label == 0 && k == s) k = rng.uniform(keywords.size());
      const Query q{"doing " + keywords[s], {filler_phrase(rng, pool, keywords[k])}};
      out.push_back({serialize_query(q), label});
    }
    return out;
  };
  Synthetic t;
  t.train = make(train_n);
  t.test = make(test_n);
  return t;
}

Synthetic temporal_task(std::size_t train_n, std::size_t test_n) {
  Rng rng(7402);
  WordSource words(rng);
  std::vector<std::string> pool, scenarios;
  for (int i = 0; i < 200; ++i) pool.push_back(words.next());
  for (int i = 0; i < 20; ++i) scenarios.push_back("doing " + words.next());
  const std::vector<std::string> stages = {"first", "early", "middle",
                                           "later", "late", "finally"};
  auto make = [&](std::size_t n) {
    std::vector<LabeledInput> out;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = rng.uniform(stages.size());
      std::size_t b = a;
      while (b == a) b = rng.uniform(stages.size());
      const Query q{scenarios[rng.uniform(scenarios.size())],
                    {filler_phrase(rng, pool, stages[a]),
                     filler_phrase(rng, pool, stages[b])}};
      out.push_back({serialize_query(q), a < b ? 1 : 0});
    }
    return out;
  };
  Synthetic t;
  t.train = make(train_n);
  t.test = make(test_n);
  return t;
}

Outcome baseline_classifiers() {
  Outcome o;
  const Synthetic rel = relevance_task(4000, 1000);
  const Synthetic tmp = temporal_task(4000, 1000);
  const TrainOptions opts;
  const BaselineModel rel_model = train_baseline(rel.train, Task::kRelevance, opts);
  const BaselineModel tmp_model = train_baseline(tmp.train, Task::kTemporal, opts);
  const double rel_train = accuracy(rel_model, rel.train);
  const double tmp_train = accuracy(tmp_model, tmp.train);
  const double rel_test = accuracy(rel_model, rel.test);
  const double tmp_test = accuracy(tmp_model, tmp.test);
  if (rel_train != 1.0) o.fail("relevance training accuracy " + std::to_string(rel_train));
  if (tmp_train != 1.0) o.fail("temporal training accuracy " + std::to_string(tmp_train));
  if (rel_test < 0.95) o.fail("relevance held-out accuracy " + std::to_string(rel_test));
  if (tmp_test < 0.90) o.fail("temporal held-out accuracy " + std::to_string(tmp_test));
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "train %.3f/%.3f, held-out relevance %.3f, temporal %.3f",
                rel_train, tmp_train, rel_test, tmp_test);
  if (o.pass) o.detail = buf;
  else o.detail += std::string(" (") + buf + ")";
  return o;
}

// ------------------------------------------------------------ agreement

Outcome agreement_statistics() {
  Outcome o;
  auto near = [&](double got, double want, const std::string& what) {
    if (std::abs(got - want) > 1e-12) {
      o.fail(what + ": " + std::to_string(got));
    }
  };
  const std::vector<int> same = {1, 0, 1, 1, 0, 2};
  near(cohen_kappa(same, same), 1.0, "kappa perfect");
  near(cohen_kappa(std::vector<int>{1, 1, 0, 0}, std::vector<int>{1, 0, 1, 0}), 0.0,
       "kappa chance");
  near(cohen_kappa(std::vector<int>{1, 0, 1, 0}, std::vector<int>{0, 1, 0, 1}), -1.0,
       "kappa complementary");
  const std::vector<double> x = {1, 2, 3, 4, 5};
  const std::vector<double> rev = {5, 4, 3, 2, 1};
  near(spearman_rho(x, x), 1.0, "rho monotone");
  near(spearman_rho(x, rev), -1.0, "rho reversed");
  // Ranks x: 1, 2.5, 2.5, 4 and y: 1, 3, 2, 4 give 4.5 / sqrt(5 * 4.5).
  near(spearman_rho(std::vector<double>{1, 2, 2, 4}, std::vector<double>{1, 3, 2, 4}),
       3.0 / std::sqrt(10.0), "rho tied ranks");
  if (o.pass) o.detail = "kappa 1/0/-1 and rho 1/-1/tied fixtures within 1e-12";
  return o;
}

// ------------------------------------------------------------ acyclicity

Outcome acyclicity_statistics() {
  Outcome o;
  auto report = [](bool acyclic) {
    PipelineReport r;
    r.graph_acyclic = acyclic;
    return r;
  };
  const std::vector<PipelineReport> four = {report(true), report(true),
                                            report(false), report(true)};
  if (acyclicity_rate(four) != 0.75) o.fail("rate of 3/4");
  if (acyclicity_rate(std::vector<PipelineReport>{report(false)}) != 0.0) o.fail("rate of 0/1");
  std::vector<std::pair<std::string, PipelineReport>> keyed = {
      {"SEQUENCE/fold-1", report(true)},  {"SEQUENCE/fold-1", report(false)},
      {"EXPECT/fold-1", report(true)},    {"EXPECT/fold-1", report(true)},
      {"EXPECT/fold-1", report(true)},    {"ORDERED/fold-2", report(false)},
      {"ORDERED/fold-2", report(false)},  {"ORDERED/fold-2", report(true)},
      {"ORDERED/fold-2", report(true)},
  };
  const GroupedRate g = grouped_acyclicity(keyed);
  std::map<std::string, double> per(g.per_group.begin(), g.per_group.end());
  if (per["SEQUENCE/fold-1"] != 0.5 || per["EXPECT/fold-1"] != 1.0 ||
      per["ORDERED/fold-2"] != 0.5) {
    o.fail("per-group rates");
  }
  if (g.mean != 2.0 / 3.0) o.fail("grouped mean");
  // Sample std of {0.5, 1, 0.5}: sqrt((1/36 + 1/9 + 1/36) / 2) = sqrt(1/12).
  if (std::abs(g.std - std::sqrt(1.0 / 12.0)) > 1e-15) o.fail("grouped std");
  const std::string shown = format_percent_mean_std(g.mean, g.std);
  if (shown != "67±29%") o.fail("formatted as " + shown);
  if (!std::regex_match(format_percent_mean_std(0.66, 0.15),
                        std::regex("^[0-9]+±[0-9]+%$")) ||
      format_percent_mean_std(0.66, 0.15) != "66±15%") {
    o.fail("mean±std shape");
  }
  if (o.pass) o.detail = "rates exact; grouped " + shown;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: sif_acceptance <sif executable> <test data dir>\n";
    return 2;
  }
  cli_path = argv[1];
  data_dir = argv[2];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle pipeline inversion", pipeline_inversion},
      {"ablation monotonicity", ablation_monotonicity},
      {"topological sort oracle equivalence", topological_equivalence},
      {"edit distance oracle equivalence", levenshtein_equivalence},
      {"BLEU fixtures", bleu_fixtures},
      {"prompt codec", prompt_codec},
      {"fixed fold plan", fixed_fold_plan},
      {"baseline classifiers", baseline_classifiers},
      {"agreement statistics", agreement_statistics},
      {"acyclicity rate", acyclicity_statistics},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << '\n';
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
