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

// Generation and classification backends. In-process mocks are pure
// functions of the request; HttpBackend speaks the JSON wire protocol
//
//   POST /v1/generate  {"prompt", "max_new_tokens", "temperature", "seed"}
//                      -> {"text"}
//   POST /v1/classify  {"input", "label_space_id"} -> {"probs": [...]}

#ifndef KGQA_BACKEND_H_
#define KGQA_BACKEND_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "kgqa/scorer.h"

namespace kgqa {

struct GenerateRequest {
  std::string prompt;
  int max_new_tokens = 256;
  double temperature = 0.0;
  int64_t seed = 0;

  void Validate() const;
  nlohmann::json ToJson() const;
  static GenerateRequest FromJson(const nlohmann::json& j);
};

struct GenerateResponse {
  std::string text;
  std::string backend_id;
  double latency_ms = 0.0;
};

class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual GenerateResponse Generate(const GenerateRequest& request) const = 0;
  virtual std::string backend_id() const = 0;
};

struct ClassifyRequest {
  std::string input;
  std::string label_space_id;

  nlohmann::json ToJson() const;
  static ClassifyRequest FromJson(const nlohmann::json& j);
};

struct ClassifyResponse {
  std::vector<double> probs;
};

// Relative deviation of a remote probability vector's sum from 1 that is
// still repaired by renormalization; anything further is a protocol error.
inline constexpr double kRemoteSumTolerance = 0.05;

// Validates length against expected_labels and rescales to sum 1.
// Throws kProtocol on wrong length, negative / non-finite entries, or a sum
// outside 1 +- kRemoteSumTolerance.
std::vector<double> RenormalizeRemoteProbs(std::vector<double> probs,
                                           size_t expected_labels);

// Rewrites every "(s, r, o)" group of a graph-to-text prompt as
// "s r' o." where r' is r with underscores replaced by spaces; sentences are
// joined by single spaces. With drop_terminal_facts, groups whose object is
// never the subject of another group are omitted (a deliberately broken
// rewriter for gate-sensitivity checks).
class MockRewriter : public TextGenerator {
 public:
  explicit MockRewriter(bool drop_terminal_facts = false)
      : drop_terminal_facts_(drop_terminal_facts) {}

  GenerateResponse Generate(const GenerateRequest& request) const override;
  std::string backend_id() const override {
    return drop_terminal_facts_ ? "mock:rewriter-drop-terminal"
                                : "mock:rewriter";
  }

 private:
  bool drop_terminal_facts_;
};

// Answers from the facts paragraph of a knowledge-augmented prompt: the
// answer is the entity mention that ends last in the paragraph, i.e. the
// terminal object of the last stated fact. Mentions are found against the
// entity lexicon at word boundaries (longest wins on ties). Without a
// lexicon the last whitespace token of the last sentence is used. Prompts
// without facts get "unknown".
class MockQA : public TextGenerator {
 public:
  MockQA() = default;
  explicit MockQA(const std::vector<std::string>& entity_lexicon);

  GenerateResponse Generate(const GenerateRequest& request) const override;
  std::string backend_id() const override { return "mock:qa"; }

  std::string Answer(std::string_view prompt) const;

 private:
  std::unordered_set<std::string> lexicon_;
  std::vector<size_t> lengths_;  // distinct lexicon lengths, descending
};

// Lookup-table classifier: known inputs map to their stored distribution,
// anything else to the uniform distribution.
class OracleClassifier : public Classifier {
 public:
  OracleClassifier(std::string label_space, std::vector<std::string> labels)
      : label_space_(std::move(label_space)), labels_(std::move(labels)) {}

  // Stores a copy of probs (renormalized). Throws kUsage on length mismatch.
  void Set(std::string input, std::vector<double> probs);
  // One-hot on label.
  void SetGold(std::string input, size_t label);

  LabelDistribution Classify(std::string_view input) const override;
  const std::vector<std::string>& labels() const override { return labels_; }
  std::string backend_id() const override { return "mock:oracle"; }
  size_t size() const { return table_.size(); }

 private:
  std::string label_space_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

struct RemoteConfig {
  std::string endpoint;  // http://host:port[/prefix]
  int timeout_ms = 30000;
  int max_retries = 3;
  int initial_backoff_ms = 100;
  double backoff_multiplier = 2.0;
  int max_backoff_ms = 5000;
  size_t max_in_flight = 4;
  std::string bearer_token;

  void Validate() const;

  // Reads the keys above from a JSON object; missing keys keep defaults.
  static RemoteConfig FromJson(const nlohmann::json& j);
  static RemoteConfig FromFile(const std::string& path);

  // KGQA_BACKEND_URL, KGQA_BACKEND_TIMEOUT_MS, KGQA_BACKEND_MAX_RETRIES,
  // KGQA_BACKEND_MAX_IN_FLIGHT, KGQA_BACKEND_TOKEN override fields.
  void ApplyEnvironment();
};

// Thread-safe wire-protocol client. Every attempt is bounded by timeout_ms;
// transport failures, timeouts, 429 and 5xx are retried with exponential
// backoff, other statuses fail immediately. At most max_in_flight requests
// are outstanding at once.
class HttpBackend {
 public:
  explicit HttpBackend(RemoteConfig config);
  ~HttpBackend();

  GenerateResponse Generate(const GenerateRequest& request) const;
  ClassifyResponse Classify(const ClassifyRequest& request) const;

  const RemoteConfig& config() const { return config_; }
  std::string backend_id() const { return "http:" + config_.endpoint; }

 private:
  nlohmann::json Post(const std::string& path,
                      const nlohmann::json& body) const;

  struct Impl;
  RemoteConfig config_;
  std::unique_ptr<Impl> impl_;
};

class RemoteGenerator : public TextGenerator {
 public:
  explicit RemoteGenerator(std::shared_ptr<const HttpBackend> backend)
      : backend_(std::move(backend)) {}

  GenerateResponse Generate(const GenerateRequest& request) const override {
    return backend_->Generate(request);
  }
  std::string backend_id() const override { return backend_->backend_id(); }

 private:
  std::shared_ptr<const HttpBackend> backend_;
};

class RemoteClassifier : public Classifier {
 public:
  RemoteClassifier(std::shared_ptr<const HttpBackend> backend,
                   std::string label_space, std::vector<std::string> labels)
      : backend_(std::move(backend)),
        label_space_(std::move(label_space)),
        labels_(std::move(labels)) {}

  LabelDistribution Classify(std::string_view input) const override;
  const std::vector<std::string>& labels() const override { return labels_; }
  std::string backend_id() const override { return backend_->backend_id(); }

 private:
  std::shared_ptr<const HttpBackend> backend_;
  std::string label_space_;
  std::vector<std::string> labels_;
};

}  // namespace kgqa

#endif  // KGQA_BACKEND_H_
