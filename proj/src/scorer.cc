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

#include "kgqa/scorer.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include "kgqa/error.h"

namespace kgqa {

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

namespace {

bool IsTokenByte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

void CheckFeatureDim(size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim) || dim > (size_t{1} << 32)) {
    Fail(ErrorCode::kConfig, "feature dimension must be a power of two <= "
                             "2^32, got " + std::to_string(dim));
  }
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (IsTokenByte(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                             : static_cast<char>(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

FeatureVector Featurize(std::string_view text, size_t dim) {
  CheckFeatureDim(dim);
  const uint64_t mask = dim - 1;
  const std::vector<std::string> tokens = Tokenize(text);

  std::vector<uint32_t> hashed;
  hashed.reserve(tokens.size() * 2);
  for (size_t i = 0; i < tokens.size(); ++i) {
    hashed.push_back(static_cast<uint32_t>(Fnv1a64(tokens[i]) & mask));
    if (i + 1 < tokens.size()) {
      const std::string bigram = tokens[i] + ' ' + tokens[i + 1];
      hashed.push_back(static_cast<uint32_t>(Fnv1a64(bigram) & mask));
    }
  }
  std::sort(hashed.begin(), hashed.end());

  FeatureVector fv;
  fv.dim = dim;
  for (size_t i = 0; i < hashed.size();) {
    size_t j = i;
    while (j < hashed.size() && hashed[j] == hashed[i]) ++j;
    fv.indices.push_back(hashed[i]);
    fv.values.push_back(static_cast<double>(j - i));
    i = j;
  }
  return fv;
}

size_t LabelDistribution::Argmax() const {
  if (probs.empty()) Fail(ErrorCode::kUsage, "argmax of empty distribution");
  size_t best = 0;
  for (size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

std::vector<ScoredLabel> TopK(const LabelDistribution& dist, size_t k,
                              double min_prob) {
  if (k == 0) Fail(ErrorCode::kUsage, "top_k requires K >= 1");
  std::vector<ScoredLabel> all;
  all.reserve(dist.probs.size());
  for (size_t i = 0; i < dist.probs.size(); ++i) {
    if (dist.probs[i] >= min_prob) all.push_back({i, dist.probs[i]});
  }
  const size_t n = std::min(k, all.size());
  auto by_prob = [](const ScoredLabel& a, const ScoredLabel& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.label < b.label;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n),
                    all.end(), by_prob);
  all.resize(n);
  return all;
}

std::vector<double> Softmax(std::span<const double> logits) {
  std::vector<double> probs(logits.begin(), logits.end());
  if (probs.empty()) return probs;
  const double max = *std::max_element(probs.begin(), probs.end());
  double total = 0.0;
  for (double& p : probs) {
    p = std::exp(p - max);
    total += p;
  }
  for (double& p : probs) p /= total;
  return probs;
}

LinearClassifier::LinearClassifier(size_t feature_dim,
                                   std::vector<std::string> labels,
                                   std::string label_space)
    : feature_dim_(feature_dim),
      labels_(std::move(labels)),
      label_space_(std::move(label_space)) {
  CheckFeatureDim(feature_dim_);
  if (labels_.empty()) Fail(ErrorCode::kConfig, "classifier needs labels");
  weights_.assign(labels_.size() * feature_dim_, 0.0);
  bias_.assign(labels_.size(), 0.0);
}

std::vector<double> LinearClassifier::Logits(const FeatureVector& x) const {
  if (x.dim != feature_dim_) {
    Fail(ErrorCode::kUsage, "feature dimension mismatch: classifier " +
                                std::to_string(feature_dim_) + ", input " +
                                std::to_string(x.dim));
  }
  std::vector<double> z(bias_);
  for (size_t l = 0; l < labels_.size(); ++l) {
    const double* row = weights_.data() + l * feature_dim_;
    double acc = 0.0;
    for (size_t k = 0; k < x.indices.size(); ++k) {
      acc += row[x.indices[k]] * x.values[k];
    }
    z[l] += acc;
  }
  return z;
}

LabelDistribution LinearClassifier::Predict(const FeatureVector& x) const {
  return LabelDistribution{Softmax(Logits(x)), label_space_};
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "classifier files are written in host order");

constexpr char kMagic[8] = {'K', 'G', 'Q', 'A', 'C', 'L', 'F', '\0'};
constexpr uint32_t kFormatVersion = 1;

template <typename T>
void Put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

void PutString(std::ostream& out, const std::string& s) {
  Put<uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T Get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) Fail(ErrorCode::kParse, "truncated classifier file");
  return value;
}

std::string GetString(std::istream& in) {
  const auto size = Get<uint64_t>(in);
  if (size > (uint64_t{1} << 20)) {
    Fail(ErrorCode::kParse, "corrupt classifier file (string length)");
  }
  std::string s(size, '\0');
  in.read(s.data(), static_cast<std::streamsize>(size));
  if (!in) Fail(ErrorCode::kParse, "truncated classifier file");
  return s;
}

}  // namespace

void LinearClassifier::Save(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  Put<uint32_t>(out, kFormatVersion);
  Put<uint64_t>(out, feature_dim_);
  PutString(out, label_space_);
  Put<uint64_t>(out, labels_.size());
  for (const std::string& label : labels_) PutString(out, label);
  for (double b : bias_) Put<double>(out, b);
  uint64_t nonzero = 0;
  for (double w : weights_) nonzero += (w != 0.0 || std::signbit(w));
  Put<uint64_t>(out, nonzero);
  for (size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != 0.0 || std::signbit(weights_[i])) {
      Put<uint64_t>(out, i);
      Put<double>(out, weights_[i]);
    }
  }
}

LinearClassifier LinearClassifier::Load(std::istream& in) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    Fail(ErrorCode::kParse, "not a classifier file");
  }
  const auto version = Get<uint32_t>(in);
  if (version != kFormatVersion) {
    Fail(ErrorCode::kParse,
         "unsupported classifier version " + std::to_string(version));
  }
  const auto dim = Get<uint64_t>(in);
  std::string label_space = GetString(in);
  const auto num_labels = Get<uint64_t>(in);
  if (num_labels == 0 || num_labels > (uint64_t{1} << 20)) {
    Fail(ErrorCode::kParse, "corrupt classifier file (label count)");
  }
  std::vector<std::string> labels;
  for (uint64_t i = 0; i < num_labels; ++i) labels.push_back(GetString(in));
  LinearClassifier clf(dim, std::move(labels), std::move(label_space));
  for (double& b : clf.bias_) b = Get<double>(in);
  const auto nonzero = Get<uint64_t>(in);
  for (uint64_t i = 0; i < nonzero; ++i) {
    const auto index = Get<uint64_t>(in);
    if (index >= clf.weights_.size()) {
      Fail(ErrorCode::kParse, "corrupt classifier file (weight index)");
    }
    clf.weights_[index] = Get<double>(in);
  }
  return clf;
}

void LinearClassifier::SaveFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write '" + path + "'");
  Save(out);
  if (!out) Fail(ErrorCode::kIo, "write failed for '" + path + "'");
}

LinearClassifier LinearClassifier::LoadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "'");
  return Load(in);
}

void TrainConfig::Validate() const {
  if (!(learning_rate > 0.0)) {
    Fail(ErrorCode::kConfig, "learning_rate must be > 0");
  }
  if (epochs < 1) Fail(ErrorCode::kConfig, "epochs must be >= 1");
  if (l2_penalty < 0.0) Fail(ErrorCode::kConfig, "l2_penalty must be >= 0");
  if (batch_size < 1) Fail(ErrorCode::kConfig, "batch_size must be >= 1");
  CheckFeatureDim(feature_dim);
}

namespace {

// -log softmax(z)[gold], computed via log-sum-exp.
double CrossEntropy(std::span<const double> z, size_t gold) {
  const double max = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - max);
  return max + std::log(total) - z[gold];
}

double SquaredNorm(std::span<const double> w) {
  double total = 0.0;
  for (double v : w) total += v * v;
  return total;
}

void CheckBatch(const LinearClassifier& clf, std::span<const FeatureVector> xs,
                std::span<const size_t> labels) {
  if (xs.size() != labels.size() || xs.empty()) {
    Fail(ErrorCode::kUsage, "batch needs equal, non-zero counts of inputs "
                            "and labels");
  }
  for (size_t label : labels) {
    if (label >= clf.num_labels()) Fail(ErrorCode::kUsage, "label out of range");
  }
}

}  // namespace

double BatchLoss(const LinearClassifier& clf, std::span<const FeatureVector> xs,
                 std::span<const size_t> labels, double l2) {
  CheckBatch(clf, xs, labels);
  double total = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    total += CrossEntropy(clf.Logits(xs[i]), labels[i]);
  }
  return total / static_cast<double>(xs.size()) +
         0.5 * l2 * SquaredNorm(clf.weights());
}

ObjectiveValue BatchObjective(const LinearClassifier& clf,
                              std::span<const FeatureVector> xs,
                              std::span<const size_t> labels, double l2) {
  CheckBatch(clf, xs, labels);
  const size_t num_labels = clf.num_labels();
  const size_t dim = clf.feature_dim();
  const double inv_batch = 1.0 / static_cast<double>(xs.size());

  ObjectiveValue out;
  out.weight_grad.assign(num_labels * dim, 0.0);
  out.bias_grad.assign(num_labels, 0.0);
  for (size_t i = 0; i < xs.size(); ++i) {
    const std::vector<double> z = clf.Logits(xs[i]);
    out.loss += CrossEntropy(z, labels[i]);
    std::vector<double> residual = Softmax(z);
    residual[labels[i]] -= 1.0;
    for (size_t l = 0; l < num_labels; ++l) {
      const double r = residual[l] * inv_batch;
      out.bias_grad[l] += r;
      for (size_t k = 0; k < xs[i].indices.size(); ++k) {
        out.weight_grad[l * dim + xs[i].indices[k]] += r * xs[i].values[k];
      }
    }
  }
  out.loss *= inv_batch;
  const std::span<const double> w = clf.weights();
  out.loss += 0.5 * l2 * SquaredNorm(w);
  for (size_t j = 0; j < w.size(); ++j) out.weight_grad[j] += l2 * w[j];
  return out;
}

LinearClassifier Train(std::span<const LabeledText> examples,
                       std::vector<std::string> labels,
                       std::string label_space, const TrainConfig& cfg,
                       TrainReport* report) {
  cfg.Validate();
  if (examples.empty()) Fail(ErrorCode::kData, "no training examples");

  std::unordered_map<std::string, size_t> label_index;
  for (size_t i = 0; i < labels.size(); ++i) label_index.emplace(labels[i], i);

  std::vector<FeatureVector> xs;
  std::vector<size_t> ys;
  xs.reserve(examples.size());
  ys.reserve(examples.size());
  for (size_t i = 0; i < examples.size(); ++i) {
    auto it = label_index.find(examples[i].label);
    if (it == label_index.end()) {
      Fail(ErrorCode::kData, "example " + std::to_string(i) +
                                 ": unknown label '" + examples[i].label + "'");
    }
    ys.push_back(it->second);
    xs.push_back(Featurize(examples[i].text, cfg.feature_dim));
  }

  LinearClassifier clf(cfg.feature_dim, std::move(labels),
                       std::move(label_space));
  const size_t num_labels = clf.num_labels();
  const size_t dim = clf.feature_dim();

  // W = scale * V. L2 shrinkage multiplies scale instead of touching every
  // weight; the data term updates only the active columns of V.
  std::span<double> v = clf.weights();
  std::span<double> bias = clf.bias();
  double scale = 1.0;
  const double shrink = 1.0 - cfg.learning_rate * cfg.l2_penalty;
  if (!(shrink > 0.0)) {
    Fail(ErrorCode::kConfig, "learning_rate * l2_penalty must be < 1");
  }

  std::vector<size_t> order(xs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(cfg.seed);

  auto materialize = [&] {
    if (scale == 1.0) return;
    for (double& w : v) w *= scale;
    scale = 1.0;
  };

  std::vector<double> logits(num_labels);
  std::vector<double> residuals;
  TrainReport local;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with the raw engine output keeps the permutation identical
    // across standard library implementations.
    for (size_t i = order.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      const double step =
          cfg.learning_rate / static_cast<double>(end - start);
      residuals.assign((end - start) * num_labels, 0.0);
      for (size_t b = start; b < end; ++b) {
        const FeatureVector& x = xs[order[b]];
        for (size_t l = 0; l < num_labels; ++l) {
          const double* row = v.data() + l * dim;
          double acc = 0.0;
          for (size_t k = 0; k < x.indices.size(); ++k) {
            acc += row[x.indices[k]] * x.values[k];
          }
          logits[l] = scale * acc + bias[l];
        }
        std::vector<double> p = Softmax(logits);
        p[ys[order[b]]] -= 1.0;
        std::copy(p.begin(), p.end(),
                  residuals.begin() +
                      static_cast<std::ptrdiff_t>((b - start) * num_labels));
      }
      scale *= shrink;
      for (size_t b = start; b < end; ++b) {
        const FeatureVector& x = xs[order[b]];
        const double* r = residuals.data() + (b - start) * num_labels;
        for (size_t l = 0; l < num_labels; ++l) {
          if (r[l] == 0.0) continue;
          const double g = step * r[l] / scale;
          double* row = v.data() + l * dim;
          for (size_t k = 0; k < x.indices.size(); ++k) {
            row[x.indices[k]] -= g * x.values[k];
          }
          bias[l] -= step * r[l];
        }
      }
      if (scale < 1e-6) materialize();
    }
    materialize();
    local.epoch_loss.push_back(BatchLoss(clf, xs, ys, cfg.l2_penalty));
  }

  local.final_loss = local.epoch_loss.back();
  size_t correct = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    correct += clf.Predict(xs[i]).Argmax() == ys[i];
  }
  local.accuracy = static_cast<double>(correct) / static_cast<double>(xs.size());
  if (report != nullptr) *report = std::move(local);
  return clf;
}

LabelDistribution NativeClassifier::Classify(std::string_view input) const {
  return model_.Predict(Featurize(input, model_.feature_dim()));
}

}  // namespace kgqa
