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

// sif: command-line entry point.
//
// Output layout under a run root:
//   <root>/templates.json
//   <root>/<VARIANT>/fold-<k>/finetune.txt
//   <root>/<VARIANT>/fold-<k>/generation.json
//   <root>/<VARIANT>/fold-<k>/generated.jsonl       (external generator)
//   <root>/<VARIANT>/fold-<k>/postprocessed.jsonl
//   <root>/<VARIANT>/fold-<k>/report.jsonl

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sif/baseline.hpp"
#include "sif/classifier.hpp"
#include "sif/dataset.hpp"
#include "sif/endpoint.hpp"
#include "sif/error.hpp"
#include "sif/esd.hpp"
#include "sif/io.hpp"
#include "sif/metrics.hpp"
#include "sif/oracle.hpp"
#include "sif/pipeline.hpp"
#include "sif/prompt.hpp"
#include "sif/random.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace sif {
namespace {

constexpr int kTopK = 50;
constexpr double kNucleusP = 0.9;
constexpr int kMaxLength = 150;
constexpr int kSamplesPerScenario = 5;

// Fold numbers on the command line and in directory names are 1-based.
std::string fold_dir(const std::string& root, PromptVariant v, std::size_t k) {
  return (fs::path(root) / std::string(variant_name(v)) /
          ("fold-" + std::to_string(k + 1)))
      .string();
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

void emit(const std::string& path, const std::string& contents) {
  if (path.empty() || path == "-") {
    std::cout << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

std::vector<PromptVariant> resolve_variants(
    const std::vector<std::string>& names) {
  if (names.empty()) {
    return {kAllVariants.begin(), kAllVariants.end()};
  }
  std::vector<PromptVariant> out;
  for (const auto& n : names) {
    const auto v = parse_variant(n);
    if (!v) throw Error(ErrorKind::kInvalidArgument, "unknown variant " + n);
    out.push_back(*v);
  }
  return out;
}

std::vector<std::size_t> resolve_folds(const std::vector<std::size_t>& folds,
                                       const FoldPlan& plan) {
  std::vector<std::size_t> out;
  if (folds.empty()) {
    for (std::size_t k = 0; k < plan.folds.size(); ++k) out.push_back(k);
    return out;
  }
  for (std::size_t k : folds) {
    if (k < 1 || k > plan.folds.size()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "fold " + std::to_string(k) + " outside 1.." +
                      std::to_string(plan.folds.size()));
    }
    out.push_back(k - 1);
  }
  return out;
}

struct PlanOptions {
  std::string plan_path;
  bool fixed = false;
  std::size_t k = 8;
  std::uint64_t seed = kDefaultSeed;

  void add(CLI::App* app) {
    app->add_option("--fold-plan", plan_path, "Fold plan document")
        ->check(CLI::ExistingFile);
    app->add_flag("--fixed-folds", fixed, "Use the published fixed fold plan");
    app->add_option("--k", k, "Number of folds for a random plan")
        ->capture_default_str();
    app->add_option("--plan-seed", seed, "Seed for a random plan")
        ->capture_default_str();
  }

  FoldPlan resolve(const Corpus& corpus) const {
    FoldPlan plan;
    if (fixed) {
      plan = load_fixed_plan();
    } else if (!plan_path.empty()) {
      plan = load_fold_plan(plan_path);
    } else {
      plan = partition_folds(corpus, k, seed);
    }
    return plan;
  }
};

struct ClassifierOptions {
  std::string relevance_endpoint;
  std::string temporal_endpoint;
  std::string relevance_model;
  std::string temporal_model;
  std::string oracle_rules;
  std::string oracle_gold;
  int endpoint_timeout_ms = 30000;
  std::size_t endpoint_batch = 64;

  void add(CLI::App* app) {
    app->add_option("--relevance-endpoint", relevance_endpoint,
                    "exec:<command> or tcp:<host>:<port>")
        ->envname("SIF_RELEVANCE_ENDPOINT");
    app->add_option("--temporal-endpoint", temporal_endpoint,
                    "exec:<command> or tcp:<host>:<port>")
        ->envname("SIF_TEMPORAL_ENDPOINT");
    app->add_option("--relevance-model", relevance_model,
                    "Baseline model file for relevance")
        ->check(CLI::ExistingFile);
    app->add_option("--temporal-model", temporal_model,
                    "Baseline model file for temporal order")
        ->check(CLI::ExistingFile);
    app->add_option("--oracle-rules", oracle_rules,
                    "Rules file {scenario: {events, order}}")
        ->check(CLI::ExistingFile);
    app->add_option("--oracle-gold", oracle_gold,
                    "Gold corpus used as a rules oracle")
        ->check(CLI::ExistingFile);
    app->add_option("--endpoint-timeout-ms", endpoint_timeout_ms,
                    "Longest wait for an endpoint response line")
        ->capture_default_str();
    app->add_option("--endpoint-batch", endpoint_batch,
                    "Requests per endpoint round trip")
        ->capture_default_str();
  }

  std::unique_ptr<Classifier> make(Task task) const {
    const std::string& endpoint =
        task == Task::kRelevance ? relevance_endpoint : temporal_endpoint;
    const std::string& model =
        task == Task::kRelevance ? relevance_model : temporal_model;
    if (!endpoint.empty()) {
      EndpointSpec spec = EndpointSpec::parse(endpoint);
      spec.timeout_ms = endpoint_timeout_ms;
      spec.max_batch = endpoint_batch;
      return std::make_unique<EndpointClient>(spec);
    }
    if (!model.empty()) {
      auto m = BaselineModel::load_file(model);
      if (m.task() != task) {
        throw Error(ErrorKind::kInvalidArgument,
                    model + " is a " + std::string(task_name(m.task())) +
                        " model");
      }
      return std::make_unique<BaselineClassifier>(std::move(m));
    }
    if (!oracle_rules.empty()) {
      return std::make_unique<RulesClassifier>(
          RulesClassifier::load_file(oracle_rules));
    }
    if (!oracle_gold.empty()) {
      return std::make_unique<RulesClassifier>(
          RulesClassifier::from_corpus(load_corpus(oracle_gold)));
    }
    throw Error(ErrorKind::kInvalidArgument,
                "no " + std::string(task_name(task)) +
                    " classifier configured");
  }
};

struct StepOptions {
  std::string ablation;
  bool no_relevance = false;
  bool no_dedup = false;
  bool no_reorder = false;
  double threshold = kDecisionThreshold;
  std::size_t dedup_distance = 0;

  // Without toggles only the step parameters are exposed.
  void add(CLI::App* app, bool toggles = true) {
    if (toggles) {
      app->add_option("--ablation", ablation, "FT, +R, +R+D or SIF");
      app->add_flag("--no-relevance", no_relevance, "Skip relevance filtering");
      app->add_flag("--no-dedup", no_dedup, "Skip duplicate removal");
      app->add_flag("--no-reorder", no_reorder, "Skip temporal reordering");
    }
    app->add_option("--threshold", threshold, "Relevance score threshold")
        ->capture_default_str();
    app->add_option("--dedup-distance", dedup_distance,
                    "Largest edit distance counted as a duplicate")
        ->capture_default_str();
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    if (!ablation.empty()) {
      bool found = false;
      for (const auto& step : ablation_steps()) {
        if (step.name == ablation) {
          cfg = step.config;
          found = true;
        }
      }
      if (!found) {
        throw Error(ErrorKind::kInvalidArgument, "unknown ablation " + ablation);
      }
    }
    if (no_relevance) cfg.enable_relevance = false;
    if (no_dedup) cfg.enable_dedup = false;
    if (no_reorder) cfg.enable_reorder = false;
    cfg.relevance_threshold = threshold;
    cfg.dedup_max_distance = dedup_distance;
    return cfg;
  }
};

struct Classifiers {
  std::unique_ptr<Classifier> relevance;
  std::unique_ptr<Classifier> temporal;
};

Classifiers make_classifiers(const ClassifierOptions& opts,
                             const PipelineConfig& cfg) {
  Classifiers c;
  if (cfg.enable_relevance) c.relevance = opts.make(Task::kRelevance);
  if (cfg.enable_reorder) c.temporal = opts.make(Task::kTemporal);
  return c;
}

// ---------------------------------------------------------------- ingest

struct IngestCmd {
  std::string input;
  std::string output;
  std::string format = "auto";

  void add(CLI::App* app) {
    app->add_option("--input", input, "Raw corpus file")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--output", output, "Canonical corpus (default stdout)");
    app->add_option("--format", format, "auto, text or jsonl")
        ->check(CLI::IsMember({"auto", "text", "jsonl"}))
        ->capture_default_str();
  }

  int run() const {
    const std::string raw = read_file(input);
    std::string fmt = format;
    if (fmt == "auto") {
      const auto pos = raw.find_first_not_of(" \t\r\n");
      fmt = pos != std::string::npos && raw[pos] == '{' ? "jsonl" : "text";
    }
    std::istringstream in(raw);
    const Corpus corpus =
        fmt == "jsonl" ? read_corpus(in) : convert_text_corpus(in);
    std::ostringstream out;
    write_corpus(out, corpus);
    emit(output, out.str());
    if (!output.empty()) {
      ojson summary;
      summary["scenarios"] = corpus.scenarios().size();
      summary["esds"] = corpus.esd_count();
      std::cout << summary.dump() << '\n';
    }
    return 0;
  }
};

// ---------------------------------------------------------------- folds

struct FoldsCmd {
  std::string corpus;
  bool fixed = false;
  std::size_t k = 8;
  std::uint64_t seed = kDefaultSeed;
  std::string output;
  bool table = false;

  void add(CLI::App* app) {
    app->add_flag("--fixed", fixed, "Emit the published fixed plan");
    app->add_option("--corpus", corpus, "Corpus for a random plan")
        ->check(CLI::ExistingFile);
    app->add_option("--k", k, "Number of folds")->capture_default_str();
    app->add_option("--seed", seed, "Partition seed")->capture_default_str();
    app->add_option("--output", output, "Plan document (default stdout)");
    app->add_flag("--table", table, "Print a tab-separated table instead");
  }

  int run() const {
    FoldPlan plan;
    if (fixed) {
      plan = load_fixed_plan();
    } else {
      if (corpus.empty()) {
        throw Error(ErrorKind::kInvalidArgument,
                    "a random plan needs --corpus (or use --fixed)");
      }
      plan = partition_folds(load_corpus(corpus), k, seed);
    }
    if (table) {
      emit(output, fold_plan_table(plan));
    } else {
      emit(output, fold_plan_json(plan));
    }
    return 0;
  }
};

// ---------------------------------------------------------------- export

std::string generation_manifest(const FoldPlan& plan, std::size_t k,
                                PromptVariant variant, const Corpus& corpus) {
  ojson j;
  j["top_k"] = kTopK;
  j["nucleus_p"] = kNucleusP;
  j["max_length"] = kMaxLength;
  j["samples_per_scenario"] = kSamplesPerScenario;
  j["variant"] = variant_name(variant);
  j["fold"] = k + 1;
  j["prompts"] = ojson::array();
  for (const auto& name : plan.folds[k].scenarios) {
    const Scenario* s = corpus.find_scenario(Scenario::from_name(name).id);
    const Scenario scenario = s ? *s : Scenario::from_name(name);
    ojson p;
    p["scenario"] = scenario.name;
    p["prompt"] = std::string(kBeginOfScript) + " " +
                  prompt_prefix(scenario, variant);
    j["prompts"].push_back(std::move(p));
  }
  return j.dump(2) + "\n";
}

struct ExportCmd {
  std::string corpus;
  PlanOptions plan;
  std::vector<std::string> variants;
  std::vector<std::size_t> folds;
  std::string out_dir;

  void add(CLI::App* app) {
    app->add_option("--corpus", corpus, "Canonical corpus")
        ->required()
        ->check(CLI::ExistingFile);
    plan.add(app);
    app->add_option("--variant", variants, "Prompt variants (default all)");
    app->add_option("--fold", folds, "Folds, 1-based (default all)");
    app->add_option("--out-dir", out_dir, "Run root")->required();
  }

  int run() const {
    const Corpus c = load_corpus(corpus);
    const FoldPlan p = plan.resolve(c);
    write_file_atomic((fs::path(out_dir) / "templates.json").string(),
                      template_manifest_json());
    std::size_t files = 0;
    for (PromptVariant v : resolve_variants(variants)) {
      for (std::size_t k : resolve_folds(folds, p)) {
        const FoldSplit split = split_for_fold(p, k);
        const std::string dir = fold_dir(out_dir, v, k);
        write_file_atomic(dir + "/finetune.txt",
                          join_lines(export_finetune(c, v, split.finetune)));
        write_file_atomic(dir + "/generation.json",
                          generation_manifest(p, k, v, c));
        ++files;
      }
    }
    ojson summary;
    summary["fold_variant_dirs"] = files;
    std::cout << summary.dump() << '\n';
    return 0;
  }
};

// ---------------------------------------------------------------- build-train

struct BuildTrainCmd {
  std::string corpus;
  PlanOptions plan;
  std::vector<std::size_t> folds;
  std::string task = "both";
  std::size_t neg_per_pos = 1;
  std::size_t max_pairs = 50;
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir;

  void add(CLI::App* app) {
    app->add_option("--corpus", corpus, "Canonical corpus")
        ->required()
        ->check(CLI::ExistingFile);
    plan.add(app);
    app->add_option("--fold", folds, "Folds, 1-based (default all)");
    app->add_option("--task", task, "relevance, temporal or both")
        ->check(CLI::IsMember({"relevance", "temporal", "both"}))
        ->capture_default_str();
    app->add_option("--neg-per-pos", neg_per_pos,
                    "Negative relevance examples per positive")
        ->capture_default_str();
    app->add_option("--max-pairs", max_pairs,
                    "Temporal pairs sampled per ESD (0 keeps all)")
        ->capture_default_str();
    app->add_option("--seed", seed, "Sampling seed")->capture_default_str();
    app->add_option("--out-dir", out_dir, "Output directory")->required();
  }

  int run() const {
    const Corpus c = load_corpus(corpus);
    const FoldPlan p = plan.resolve(c);
    ojson summary = ojson::array();
    for (std::size_t k : resolve_folds(folds, p)) {
      const FoldSplit split = split_for_fold(p, k);
      const std::string dir =
          (fs::path(out_dir) / ("fold-" + std::to_string(k + 1))).string();
      ojson row;
      row["fold"] = k + 1;
      if (task != "temporal") {
        RelevanceSetOptions opts;
        opts.neg_per_pos = neg_per_pos;
        opts.seed = seed;
        const auto train = build_relevance_set(c, split.train, opts);
        const auto valid =
            build_relevance_set(c, split.validation, split.train, opts);
        std::ostringstream t, v;
        write_examples(t, train);
        write_examples(v, valid);
        write_file_atomic(dir + "/relevance.train.jsonl", t.str());
        write_file_atomic(dir + "/relevance.valid.jsonl", v.str());
        row["relevance_train"] = train.size();
        row["relevance_valid"] = valid.size();
      }
      if (task != "relevance") {
        TemporalSetOptions opts;
        opts.max_pairs_per_esd = max_pairs;
        opts.seed = seed;
        const auto train = build_temporal_set(c, split.train, opts);
        const auto valid = build_temporal_set(c, split.validation, opts);
        std::ostringstream t, v;
        write_examples(t, train);
        write_examples(v, valid);
        write_file_atomic(dir + "/temporal.train.jsonl", t.str());
        write_file_atomic(dir + "/temporal.valid.jsonl", v.str());
        row["temporal_train"] = train.size();
        row["temporal_valid"] = valid.size();
      }
      summary.push_back(std::move(row));
    }
    std::cout << summary.dump() << '\n';
    return 0;
  }
};

// ---------------------------------------------------------------- train

struct TrainCmd {
  std::string train;
  std::string valid;
  std::string output;
  TrainOptions opts;

  void add(CLI::App* app) {
    app->add_option("--train", train, "Training examples")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--valid", valid, "Validation examples")
        ->check(CLI::ExistingFile);
    app->add_option("--output", output, "Model file")->required();
    app->add_option("--epochs", opts.epochs, "SGD epochs")
        ->capture_default_str();
    app->add_option("--lr", opts.learning_rate, "Learning rate")
        ->capture_default_str();
    app->add_option("--dim", opts.dim, "Hashed feature dimension")
        ->capture_default_str();
    app->add_option("--seed", opts.seed, "Shuffling seed")
        ->capture_default_str();
  }

  int run() const {
    const ExampleFile train_file = load_examples(train);
    const BaselineModel model =
        train_baseline(train_file.examples, train_file.task, opts,
                       fs::path(train).filename().string());
    ojson summary;
    summary["task"] = task_name(train_file.task);
    summary["train_examples"] = train_file.examples.size();
    summary["train_accuracy"] = accuracy(model, train_file.examples);
    if (!valid.empty()) {
      const ExampleFile valid_file = load_examples(valid);
      if (valid_file.task != train_file.task) {
        throw Error(ErrorKind::kInvalidArgument,
                    "validation examples are for another task");
      }
      summary["valid_examples"] = valid_file.examples.size();
      summary["valid_accuracy"] = valid_file.examples.empty()
                                      ? ojson(nullptr)
                                      : ojson(accuracy(model, valid_file.examples));
    }
    std::ostringstream out;
    model.save(out);
    write_file_atomic(output, out.str());
    std::cout << summary.dump() << '\n';
    return 0;
  }
};

// ---------------------------------------------------------------- postprocess

struct PostprocessCmd {
  std::string input;
  std::string output;
  std::string report;
  std::string root;
  std::string variant;
  StepOptions steps;
  ClassifierOptions classifiers;

  void add(CLI::App* app) {
    app->add_option("--input", input, "Generated ESDs")
        ->check(CLI::ExistingFile);
    app->add_option("--output", output, "Post-processed ESDs (default stdout)");
    app->add_option("--report", report, "Per-ESD pipeline reports");
    app->add_option("--root", root,
                    "Process every <VARIANT>/fold-<k>/generated.jsonl")
        ->check(CLI::ExistingDirectory);
    app->add_option("--variant", variant,
                    "Variant used to decode raw text records");
    steps.add(app);
    classifiers.add(app);
  }

  std::vector<GeneratedRecord> load(const std::string& path,
                                    std::optional<PromptVariant> fallback) const {
    if (!fallback) return load_generated(path);
    // Records without a variant take the fallback.
    std::istringstream in(read_file(path));
    std::string line;
    std::ostringstream patched;
    while (std::getline(in, line)) {
      if (collapse_whitespace(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_object() && !j.contains("variant")) j["variant"] = variant_name(*fallback);
      patched << j.dump() << '\n';
    }
    std::istringstream reread(patched.str());
    return read_generated(reread);
  }

  BatchResult process(const std::vector<GeneratedRecord>& records,
                      const PipelineConfig& cfg, Classifiers& c) const {
    return run_batch(records, cfg, c.relevance.get(), c.temporal.get(),
                     &std::cerr);
  }

  static std::string outputs_text(const BatchResult& r) {
    std::string out;
    for (const auto& g : r.outputs) out += generated_record(g) + "\n";
    return out;
  }

  static std::string reports_text(const BatchResult& r) {
    std::string out;
    for (const auto& rep : r.reports) out += report_record(rep) + "\n";
    return out;
  }

  int run() const {
    if (input.empty() == root.empty()) {
      throw Error(ErrorKind::kInvalidArgument,
                  "give exactly one of --input and --root");
    }
    const PipelineConfig cfg = steps.resolve();
    Classifiers c = make_classifiers(classifiers, cfg);
    std::optional<PromptVariant> fallback;
    if (!variant.empty()) {
      fallback = parse_variant(variant);
      if (!fallback) {
        throw Error(ErrorKind::kInvalidArgument, "unknown variant " + variant);
      }
    }
    ojson summary;
    if (!input.empty()) {
      const BatchResult r = process(load(input, fallback), cfg, c);
      emit(output, outputs_text(r));
      if (!report.empty()) write_file_atomic(report, reports_text(r));
      summary["esds"] = r.reports.size();
      summary["failures"] = r.failures;
      if (cfg.enable_reorder && !r.reports.empty()) {
        summary["acyclic_rate"] = acyclicity_rate(r.reports);
      }
      std::cerr << summary.dump() << '\n';
      return 0;
    }
    std::vector<std::pair<std::string, PipelineReport>> keyed;
    std::size_t esds = 0, failures = 0;
    for (PromptVariant v : kAllVariants) {
      const fs::path vdir = fs::path(root) / std::string(variant_name(v));
      if (!fs::is_directory(vdir)) continue;
      std::vector<fs::path> dirs;
      for (const auto& entry : fs::directory_iterator(vdir)) {
        if (entry.is_directory() &&
            fs::exists(entry.path() / "generated.jsonl")) {
          dirs.push_back(entry.path());
        }
      }
      std::sort(dirs.begin(), dirs.end());
      for (const auto& dir : dirs) {
        const BatchResult r =
            process(load((dir / "generated.jsonl").string(), v), cfg, c);
        write_file_atomic((dir / "postprocessed.jsonl").string(),
                          outputs_text(r));
        write_file_atomic((dir / "report.jsonl").string(), reports_text(r));
        const std::string key = std::string(variant_name(v)) + "/" +
                                dir.filename().string();
        for (const auto& rep : r.reports) {
          if (!rep.error) keyed.emplace_back(key, rep);
        }
        esds += r.reports.size();
        failures += r.failures;
      }
    }
    summary["esds"] = esds;
    summary["failures"] = failures;
    if (cfg.enable_reorder && !keyed.empty()) {
      const GroupedRate rate = grouped_acyclicity(keyed);
      summary["acyclic_mean"] = rate.mean;
      summary["acyclic_std"] = rate.std;
      summary["acyclic"] = format_percent_mean_std(rate.mean, rate.std);
    }
    std::cout << summary.dump() << '\n';
    return 0;
  }
};

// ---------------------------------------------------------------- evaluate

// One column of an evaluation table: generated ESDs grouped by fold.
struct Source {
  std::string name;
  std::vector<std::vector<EventSequence>> folds;
};

std::vector<EventSequence> esds_of(const std::vector<GeneratedRecord>& records) {
  std::vector<EventSequence> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.esd);
  return out;
}

std::vector<std::vector<EventSequence>> group_by_plan(
    const std::vector<EventSequence>& esds, const FoldPlan* plan) {
  if (!plan) return {esds};
  std::map<std::string, std::size_t> fold_of;
  for (std::size_t k = 0; k < plan->folds.size(); ++k) {
    for (const auto& s : plan->folds[k].scenarios) {
      fold_of[Scenario::from_name(s).id] = k;
    }
  }
  std::vector<std::vector<EventSequence>> out(plan->folds.size());
  std::vector<std::string> unknown;
  for (const auto& e : esds) {
    auto it = fold_of.find(e.scenario.id);
    if (it == fold_of.end()) {
      unknown.push_back(e.scenario.id);
    } else {
      out[it->second].push_back(e);
    }
  }
  if (!unknown.empty()) {
    std::sort(unknown.begin(), unknown.end());
    unknown.erase(std::unique(unknown.begin(), unknown.end()), unknown.end());
    throw Error(ErrorKind::kUnknownScenario, "scenarios not in the fold plan",
                unknown);
  }
  return out;
}

CrossFoldReport score(const std::vector<std::vector<EventSequence>>& folds,
                      const Corpus& gold) {
  std::vector<std::optional<BleuReport>> reports(folds.size());
  for (std::size_t k = 0; k < folds.size(); ++k) {
    if (!folds[k].empty()) reports[k] = evaluate_fold(folds[k], gold);
  }
  return aggregate_folds(std::move(reports));
}

struct EvaluateCmd {
  std::string gold;
  std::vector<std::string> inputs;
  std::string root;
  std::string stage = "postprocessed";
  std::string plan_path;
  bool fixed = false;
  bool ablation = false;
  std::string output;
  StepOptions steps;
  ClassifierOptions classifiers;

  void add(CLI::App* app) {
    app->add_option("--gold", gold, "Gold corpus")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--input", inputs, "Generated ESD files")
        ->check(CLI::ExistingFile);
    app->add_option("--root", root, "Run root scanned per variant and fold")
        ->check(CLI::ExistingDirectory);
    app->add_option("--stage", stage, "File scanned under --root")
        ->check(CLI::IsMember({"generated", "postprocessed"}))
        ->capture_default_str();
    app->add_option("--fold-plan", plan_path, "Fold plan for --input files")
        ->check(CLI::ExistingFile);
    app->add_flag("--fixed-folds", fixed, "Use the published fixed fold plan");
    app->add_flag("--ablation", ablation,
                  "Score FT, +R, +R+D and SIF on the same inputs");
    app->add_option("--output", output, "Machine-readable report lines");
    steps.add(app, false);
    classifiers.add(app);
  }

  std::vector<Source> sources(const FoldPlan* plan) const {
    std::vector<Source> out;
    for (const auto& path : inputs) {
      out.push_back({fs::path(path).filename().string(),
                     group_by_plan(esds_of(load_generated(path)), plan)});
    }
    if (!root.empty()) {
      const std::string file = ablation ? "generated.jsonl" : stage + ".jsonl";
      for (PromptVariant v : kAllVariants) {
        const fs::path vdir = fs::path(root) / std::string(variant_name(v));
        if (!fs::is_directory(vdir)) continue;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(vdir)) {
          if (entry.is_directory() && fs::exists(entry.path() / file)) {
            files.push_back(entry.path() / file);
          }
        }
        if (files.empty()) continue;
        std::sort(files.begin(), files.end());
        Source s{std::string(variant_name(v)), {}};
        for (const auto& f : files) {
          s.folds.push_back(esds_of(load_generated(f.string())));
        }
        out.push_back(std::move(s));
      }
    }
    return out;
  }

  int run() const {
    if (inputs.empty() && root.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "give --input or --root");
    }
    const Corpus g = load_corpus(gold);
    std::optional<FoldPlan> plan;
    if (fixed) plan = load_fixed_plan();
    if (!plan_path.empty()) plan = load_fold_plan(plan_path);
    const auto srcs = sources(plan ? &*plan : nullptr);
    if (srcs.empty()) throw Error(ErrorKind::kEmptyInput, "nothing to evaluate");

    std::vector<std::string> records;
    std::ostringstream table;
    if (!ablation) {
      table << "source\tBLEU mean (sample std)\n";
      for (const auto& s : srcs) {
        const CrossFoldReport r = score(s.folds, g);
        table << s.name << '\t' << format_bleu_mean_std(r.mean, r.std) << '\n';
        ojson j;
        j["source"] = s.name;
        j["mean"] = r.mean;
        j["std"] = r.std;
        j["std_kind"] = "sample";
        j["folds"] = ojson::array();
        for (std::size_t k = 0; k < r.folds.size(); ++k) {
          if (!r.folds[k]) continue;
          ojson f = ojson::parse(bleu_report_json(*r.folds[k]));
          f["fold"] = k + 1;
          j["folds"].push_back(std::move(f));
        }
        records.push_back(j.dump());
      }
    } else {
      PipelineConfig full = steps.resolve();
      full.enable_relevance = full.enable_dedup = full.enable_reorder = true;
      Classifiers c = make_classifiers(classifiers, full);
      table << "config";
      for (const auto& s : srcs) table << '\t' << s.name;
      table << '\n';
      for (const auto& step : ablation_steps()) {
        PipelineConfig cfg = step.config;
        cfg.relevance_threshold = full.relevance_threshold;
        cfg.dedup_max_distance = full.dedup_max_distance;
        table << step.name;
        for (const auto& s : srcs) {
          std::vector<std::vector<EventSequence>> processed;
          for (const auto& fold : s.folds) {
            auto& out = processed.emplace_back();
            for (const auto& esd : fold) {
              out.push_back(run_pipeline(esd, cfg, c.relevance.get(),
                                         c.temporal.get())
                                .esd);
            }
          }
          const CrossFoldReport r = score(processed, g);
          table << '\t' << format_bleu_mean_std(r.mean, r.std);
          ojson j;
          j["config"] = step.name;
          j["source"] = s.name;
          j["mean"] = r.mean;
          j["std"] = r.std;
          j["std_kind"] = "sample";
          records.push_back(j.dump());
        }
        table << '\n';
      }
    }
    std::cout << table.str();
    if (!output.empty()) write_file_atomic(output, join_lines(records));
    return 0;
  }
};

// ---------------------------------------------------------------- probe

struct ProbeCmd {
  std::string scenario;
  std::vector<std::string> events;
  std::string corpus;
  bool json = false;

  void add(CLI::App* app) {
    app->add_option("--scenario", scenario, "Scenario name")->required();
    app->add_option("--event", events, "Seed events, in order");
    app->add_option("--corpus", corpus,
                    "Take seed events from the scenario's first gold ESD")
        ->check(CLI::ExistingFile);
    app->add_flag("--json", json, "One JSON record per prompt");
  }

  int run() const {
    const Scenario s = Scenario::from_name(scenario);
    std::vector<Event> seeds;
    if (!events.empty()) {
      for (std::size_t i = 0; i < events.size(); ++i) {
        seeds.push_back(normalize_event(events[i], i));
      }
    } else if (!corpus.empty()) {
      const Corpus c = load_corpus(corpus);
      const auto& esds = c.esds(s.id);
      if (!esds.empty()) seeds = esds.front().events;
    }
    for (const auto& p : probing_prompts(s, seeds)) {
      if (json) {
        ojson j;
        j["beginning"] = p.beginning_index + 1;
        j["continuation"] = p.continuation_index + 1;
        j["prompt"] = p.text;
        std::cout << j.dump() << '\n';
      } else {
        std::cout << p.text << '\n';
      }
    }
    return 0;
  }
};

// ---------------------------------------------------------------- annotate

struct AnnotateCmd {
  std::vector<std::string> files;
  std::string output;

  void add(CLI::App* app) {
    app->add_option("--annotations", files, "Annotation files")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--output", output, "Machine-readable summary");
  }

  int run() const {
    std::vector<AnnotationRecord> records;
    for (const auto& f : files) {
      auto part = load_annotations(f);
      records.insert(records.end(), part.begin(), part.end());
    }
    const ManualScores s = manual_scores(records);
    const Agreement a = agreement(records);
    auto opt = [](const std::optional<double>& v) {
      return v ? ojson(*v) : ojson(nullptr);
    };
    ojson j;
    j["R"] = s.relevance;
    j["O"] = opt(s.order);
    j["M"] = s.missing;
    j["esds"] = s.esd_count;
    j["eligible_pairs"] = s.eligible_pairs;
    j["kappa_R"] = opt(a.kappa_relevance);
    j["kappa_O"] = opt(a.kappa_order);
    j["rho_M"] = opt(a.rho_missing);
    j["notes"] = a.notes;
    auto fmt = [](const std::optional<double>& v, const char* spec) {
      if (!v) return std::string("n/a");
      char buf[32];
      std::snprintf(buf, sizeof buf, spec, *v);
      return std::string(buf);
    };
    std::cout << "R\tO\tM\tkappa_R\tkappa_O\trho_M\n"
              << fmt(s.relevance, "%.1f") << '\t' << fmt(s.order, "%.1f")
              << '\t' << fmt(s.missing, "%.2f") << '\t'
              << fmt(a.kappa_relevance, "%.2f") << '\t'
              << fmt(a.kappa_order, "%.2f") << '\t'
              << fmt(a.rho_missing, "%.2f") << '\n';
    if (!output.empty()) write_file_atomic(output, j.dump() + "\n");
    return 0;
  }
};

void print_error(std::string_view kind, std::string_view message,
                 const std::vector<std::string>& ids = {}) {
  ojson j;
  j["error"]["kind"] = kind;
  j["error"]["message"] = message;
  if (!ids.empty()) j["error"]["ids"] = ids;
  std::cerr << j.dump() << '\n';
}

int run_main(int argc, char** argv) {
  CLI::App app{"Script induction toolkit"};
  app.set_config("--config", "", "Read options from an INI or TOML file");
  bool dry_run = false;
  app.add_flag("--dry-run", dry_run,
               "Print the resolved configuration and exit");
  app.require_subcommand(1);
  app.fallthrough();

  IngestCmd ingest;
  FoldsCmd folds;
  ExportCmd export_cmd;
  BuildTrainCmd build_train;
  TrainCmd train;
  PostprocessCmd postprocess;
  EvaluateCmd evaluate_cmd;
  ProbeCmd probe;
  AnnotateCmd annotate;

  std::vector<std::pair<CLI::App*, std::function<int()>>> commands;
  auto add = [&](auto& cmd, const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.add(sub);
    commands.emplace_back(sub, [&cmd] { return cmd.run(); });
  };
  add(ingest, "ingest", "Convert a raw corpus to canonical line records");
  add(folds, "folds", "Emit a fold plan");
  add(export_cmd, "export-finetune",
      "Write fine-tuning files and generation manifests");
  add(build_train, "build-train", "Write classifier training sets");
  add(train, "train-baseline", "Train the hashed logistic baseline");
  add(postprocess, "postprocess", "Run the post-processing pipeline");
  add(evaluate_cmd, "evaluate", "BLEU evaluation and ablation tables");
  add(probe, "probe", "Print the 16 probing prompts for a scenario");
  add(annotate, "annotate-score", "Manual scores and agreement");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("UsageError", e.what());
    return 2;
  }

  for (auto& [sub, fn] : commands) {
    if (!sub->parsed()) continue;
    if (dry_run) {
      std::cout << "[" << sub->get_name() << "]\n"
                << sub->config_to_str(true, false);
      return 0;
    }
    try {
      return fn();
    } catch (const Error& e) {
      print_error(error_kind_name(e.kind()), e.what(), e.ids());
      return 1;
    } catch (const std::exception& e) {
      print_error("InternalError", e.what());
      return 1;
    }
  }
  return 2;
}

}  // namespace
}  // namespace sif

int main(int argc, char** argv) { return sif::run_main(argc, argv); }
