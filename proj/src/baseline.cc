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

#include "sif/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>

#include "sif/error.hpp"

namespace sif {
namespace {

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw Error(ErrorKind::kParseError, "bad number '" + s + "' in model");
  }
  return v;
}

[[noreturn]] void bad_model(const std::string& what) {
  throw Error(ErrorKind::kParseError, "model file: " + what);
}

std::string expect_key(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) bad_model("missing '" + key + "'");
  if (line.compare(0, key.size() + 1, key + " ") != 0 && line != key) {
    bad_model("expected '" + key + "', got '" + line + "'");
  }
  return line.size() > key.size() ? line.substr(key.size() + 1) : "";
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::vector<std::string> feature_strings(std::string_view serialized_input) {
  std::vector<std::vector<std::string>> fields(1);
  for (auto& token : split_whitespace(lowercase(serialized_input))) {
    if (token == kFieldSeparator) {
      fields.emplace_back();
    } else {
      fields.back().push_back(std::move(token));
    }
  }
  std::vector<std::string> features;
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const std::string tag = std::to_string(f) + "|";
    const auto& tokens = fields[f];
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      features.push_back("u|" + tag + tokens[i]);
      if (i + 1 < tokens.size()) {
        features.push_back("b|" + tag + tokens[i] + " " + tokens[i + 1]);
      }
      if (f > 0) {
        for (const auto& s : fields[0]) {
          features.push_back("x|" + tag + s + "|" + tokens[i]);
        }
      }
    }
  }
  return features;
}

SparseVector featurize(std::string_view serialized_input, std::uint32_t dim) {
  std::map<std::uint32_t, double> counts;
  for (const auto& f : feature_strings(serialized_input)) {
    counts[static_cast<std::uint32_t>(fnv1a64(f) % dim)] += 1.0;
  }
  return SparseVector(counts.begin(), counts.end());
}

BaselineModel::BaselineModel(Task task, std::uint32_t dim,
                             std::string trained_on)
    : task_(task), dim_(dim), weights_(dim, 0.0),
      trained_on_(std::move(trained_on)) {
  if (dim == 0 || (dim & (dim - 1)) != 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "feature dimension must be a power of two");
  }
}

double BaselineModel::margin(const SparseVector& features) const {
  double z = bias_;
  for (const auto& [index, value] : features) z += weights_[index] * value;
  return z;
}

double BaselineModel::margin(std::string_view serialized_input) const {
  return margin(featurize(serialized_input, dim_));
}

Verdict BaselineModel::predict(std::string_view serialized_input) const {
  return verdict_from_score(logistic(margin(serialized_input)));
}

void BaselineModel::save(std::ostream& out) const {
  std::size_t nonzero = 0;
  for (double w : weights_) nonzero += w != 0.0;
  out << "sif-baseline-model 1\n"
      << "task " << task_name(task_) << '\n'
      << "dim " << dim_ << '\n'
      << "bias " << hex(bias_) << '\n'
      << "trained_on " << trained_on_ << '\n'
      << "weights " << nonzero << '\n';
  for (std::uint32_t i = 0; i < dim_; ++i) {
    if (weights_[i] != 0.0) out << i << ' ' << hex(weights_[i]) << '\n';
  }
}

BaselineModel BaselineModel::load(std::istream& in) {
  if (expect_key(in, "sif-baseline-model") != "1") bad_model("version");
  const auto task = parse_task(expect_key(in, "task"));
  if (!task) bad_model("unknown task");
  const unsigned long dim = std::stoul(expect_key(in, "dim"));
  const double bias = parse_double(expect_key(in, "bias"));
  std::string trained_on = expect_key(in, "trained_on");
  const unsigned long count = std::stoul(expect_key(in, "weights"));
  BaselineModel model(*task, static_cast<std::uint32_t>(dim),
                      std::move(trained_on));
  model.bias_ = bias;
  for (unsigned long k = 0; k < count; ++k) {
    unsigned long index;
    std::string value;
    if (!(in >> index >> value) || index >= dim) bad_model("weight entry");
    model.weights_[index] = parse_double(value);
  }
  return model;
}

void BaselineModel::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path);
  save(out);
}

BaselineModel BaselineModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open " + path);
  return load(in);
}

BaselineModel train_baseline(std::span<const LabeledInput> examples, Task task,
                             const TrainOptions& options,
                             std::string trained_on) {
  if (examples.empty()) {
    throw Error(ErrorKind::kEmptyInput, "no training examples");
  }
  const bool has_pos = std::any_of(examples.begin(), examples.end(),
                                   [](const auto& e) { return e.label == 1; });
  const bool has_neg = std::any_of(examples.begin(), examples.end(),
                                   [](const auto& e) { return e.label == 0; });
  if (!has_pos || !has_neg) {
    throw Error(ErrorKind::kDegenerateLabels,
                "training examples need both labels");
  }

  BaselineModel model(task, options.dim, std::move(trained_on));
  std::vector<SparseVector> features;
  features.reserve(examples.size());
  for (const auto& e : examples) {
    features.push_back(featurize(e.input, options.dim));
  }
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(options.seed);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      const double p = logistic(model.margin(features[i]));
      const double step = options.learning_rate * (examples[i].label - p);
      for (const auto& [index, value] : features[i]) {
        model.weights_[index] += step * value;
      }
      model.bias_ += step;
    }
  }
  return model;
}

double accuracy(const BaselineModel& model,
                std::span<const LabeledInput> examples) {
  if (examples.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& e : examples) {
    correct += model.predict(e.input).label == e.label;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

std::vector<Verdict> BaselineClassifier::predict(
    Task task, std::span<const Query> queries) {
  if (!supports(task)) {
    throw Error(ErrorKind::kInvalidArgument,
                "model was trained for " +
                    std::string(task_name(model_.task())));
  }
  std::vector<Verdict> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(model_.predict(serialize_query(q)));
  return out;
}

}  // namespace sif
