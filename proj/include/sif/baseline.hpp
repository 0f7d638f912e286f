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

// Hashed lexical features and a logistic-regression classifier over them.
//
// Features of a serialized input "f0 </s> f1 [</s> f2]" (lowercased,
// whitespace-tokenized, one field per separator-delimited segment):
//
//   u|<field>|<token>                    unigram
//   b|<field>|<token> <token>            bigram within a field
//   x|<field>|<scenario token>|<token>   field-0 token crossed with every
//                                        unigram of a later field
//
// Each feature string is hashed with 64-bit FNV-1a (offset basis
// 0xcbf29ce484222325, prime 0x100000001b3) over its UTF-8 bytes and reduced
// modulo the dimension. Values are occurrence counts.

#ifndef SIF_BASELINE_HPP_
#define SIF_BASELINE_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sif/classifier.hpp"
#include "sif/dataset.hpp"
#include "sif/random.hpp"

namespace sif {

inline constexpr std::uint32_t kDefaultFeatureDim = 1u << 18;

std::uint64_t fnv1a64(std::string_view bytes);

// Sorted by index, one entry per non-zero bucket.
using SparseVector = std::vector<std::pair<std::uint32_t, double>>;

// Raw feature strings before hashing, in generation order.
std::vector<std::string> feature_strings(std::string_view serialized_input);

SparseVector featurize(std::string_view serialized_input,
                       std::uint32_t dim = kDefaultFeatureDim);

struct TrainOptions {
  int epochs = 10;
  double learning_rate = 0.1;
  std::uint32_t dim = kDefaultFeatureDim;
  std::uint64_t seed = kDefaultSeed;
};

class BaselineModel {
 public:
  // Zero weights and bias. dim must be a power of two.
  BaselineModel(Task task, std::uint32_t dim, std::string trained_on = "");

  Task task() const { return task_; }
  std::uint32_t dim() const { return dim_; }
  double bias() const { return bias_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::string& trained_on() const { return trained_on_; }

  double margin(const SparseVector& features) const;
  double margin(std::string_view serialized_input) const;
  Verdict predict(std::string_view serialized_input) const;

  // Text container:
  //   sif-baseline-model 1
  //   task <relevance|temporal>
  //   dim <D>
  //   bias <hex float>
  //   trained_on <free text>
  //   weights <count>
  //   <index> <hex float>      (one line per non-zero weight)
  void save(std::ostream& out) const;
  static BaselineModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static BaselineModel load_file(const std::string& path);

 private:
  friend BaselineModel train_baseline(std::span<const LabeledInput>, Task,
                                      const TrainOptions&, std::string);

  Task task_;
  std::uint32_t dim_;
  double bias_ = 0.0;
  std::vector<double> weights_;
  std::string trained_on_;
};

// Logistic loss, plain SGD, example order reshuffled each epoch from the
// seed. Throws kEmptyInput and kDegenerateLabels.
BaselineModel train_baseline(std::span<const LabeledInput> examples, Task task,
                             const TrainOptions& options,
                             std::string trained_on = "");

// Fraction of examples whose predicted label matches.
double accuracy(const BaselineModel& model,
                std::span<const LabeledInput> examples);

class BaselineClassifier : public Classifier {
 public:
  explicit BaselineClassifier(BaselineModel model) : model_(std::move(model)) {}

  const BaselineModel& model() const { return model_; }

  bool supports(Task task) const override { return task == model_.task(); }
  std::vector<Verdict> predict(Task task,
                               std::span<const Query> queries) override;

 private:
  BaselineModel model_;
};

}  // namespace sif

#endif  // SIF_BASELINE_HPP_
