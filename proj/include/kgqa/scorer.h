// Copyright 2026 The KGQA Authors.
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

// Reference text classifier: hashed unigram+bigram features feeding a
// multinomial logistic regression. Stands in for the encoder + linear +
// softmax classifier used for hop and relation prediction; remote backends
// satisfy the same Classifier contract.
//
// Feature hashing is pinned: FNV-1a 64-bit (offset basis 0xcbf29ce484222325,
// prime 0x100000001b3) over the token bytes, masked to the low log2(F) bits.
// Tokens are lowercase runs of [a-z0-9] plus any byte >= 0x80; a bigram is
// hashed as "left right" with a single space.

#ifndef KGQA_SCORER_H_
#define KGQA_SCORER_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgqa {

inline constexpr size_t kDefaultFeatureDim = size_t{1} << 18;

uint64_t Fnv1a64(std::string_view bytes);

std::vector<std::string> Tokenize(std::string_view text);

struct FeatureVector {
  size_t dim = 0;
  std::vector<uint32_t> indices;  // strictly increasing, < dim
  std::vector<double> values;

  bool empty() const { return indices.empty(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector Featurize(std::string_view text, size_t dim);

struct LabelDistribution {
  std::vector<double> probs;
  std::string label_space;

  size_t size() const { return probs.size(); }
  // Smallest index among the maxima.
  size_t Argmax() const;
};

struct ScoredLabel {
  size_t label = 0;
  double prob = 0.0;
};

// min(k, L) labels by descending probability, ties by ascending label.
// Labels with prob < min_prob are never returned.
std::vector<ScoredLabel> TopK(const LabelDistribution& dist, size_t k,
                              double min_prob = 0.0);

class LinearClassifier {
 public:
  LinearClassifier(size_t feature_dim, std::vector<std::string> labels,
                   std::string label_space);

  size_t feature_dim() const { return feature_dim_; }
  size_t num_labels() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label_space() const { return label_space_; }

  // Row-major num_labels x feature_dim.
  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }
  std::span<double> bias() { return bias_; }
  std::span<const double> bias() const { return bias_; }

  double& weight(size_t label, size_t feature) {
    return weights_[label * feature_dim_ + feature];
  }
  double weight(size_t label, size_t feature) const {
    return weights_[label * feature_dim_ + feature];
  }

  std::vector<double> Logits(const FeatureVector& x) const;

  // softmax(W x + b). Throws kUsage when x.dim != feature_dim().
  LabelDistribution Predict(const FeatureVector& x) const;

  // Binary, versioned, little-endian; weights stored sparsely. Round-trips
  // bit-exactly.
  void Save(std::ostream& out) const;
  static LinearClassifier Load(std::istream& in);
  void SaveFile(const std::string& path) const;
  static LinearClassifier LoadFile(const std::string& path);

  friend bool operator==(const LinearClassifier&,
                         const LinearClassifier&) = default;

 private:
  size_t feature_dim_;
  std::vector<std::string> labels_;
  std::string label_space_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

// Max-subtracted softmax.
std::vector<double> Softmax(std::span<const double> logits);

struct TrainConfig {
  double learning_rate = 0.1;
  int epochs = 20;
  double l2_penalty = 1e-6;
  uint64_t seed = 13;
  size_t feature_dim = kDefaultFeatureDim;
  size_t batch_size = 32;

  void Validate() const;
};

struct LabeledText {
  std::string text;
  std::string label;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // objective after each epoch
  double final_loss = 0.0;
  double accuracy = 0.0;  // training-set argmax accuracy
};

// Mini-batch gradient descent on BatchObjective. Shuffling draws from a
// mt19937_64 seeded with cfg.seed, so equal inputs give bit-identical
// weights. Throws kData naming the first example whose label is not in
// labels.
LinearClassifier Train(std::span<const LabeledText> examples,
                       std::vector<std::string> labels,
                       std::string label_space, const TrainConfig& cfg,
                       TrainReport* report = nullptr);

struct ObjectiveValue {
  double loss = 0.0;
  std::vector<double> weight_grad;  // same layout as weights()
  std::vector<double> bias_grad;
};

// mean cross-entropy over the batch + (l2 / 2) * ||W||^2 (bias excluded),
// with its exact gradient.
ObjectiveValue BatchObjective(const LinearClassifier& clf,
                              std::span<const FeatureVector> xs,
                              std::span<const size_t> labels, double l2);

// Mean cross-entropy + L2 term, no gradient.
double BatchLoss(const LinearClassifier& clf,
                 std::span<const FeatureVector> xs,
                 std::span<const size_t> labels, double l2);

// The contract hop / relation prediction depends on. Implementations must be
// safe for concurrent Classify calls.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual LabelDistribution Classify(std::string_view input) const = 0;
  virtual const std::vector<std::string>& labels() const = 0;
  virtual std::string backend_id() const = 0;
};

class NativeClassifier : public Classifier {
 public:
  explicit NativeClassifier(LinearClassifier model) : model_(std::move(model)) {}

  LabelDistribution Classify(std::string_view input) const override;
  const std::vector<std::string>& labels() const override {
    return model_.labels();
  }
  std::string backend_id() const override { return "native:hashed-logreg"; }

  const LinearClassifier& model() const { return model_; }

 private:
  LinearClassifier model_;
};

}  // namespace kgqa

#endif  // KGQA_SCORER_H_
