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

// Retrieve stage: hop prediction, K-ary relation-path expansion scored by the
// product of step probabilities (kept in log space), and triple sampling up
// to M reasoning paths.

#ifndef KGQA_RETRIEVE_H_
#define KGQA_RETRIEVE_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgqa/dataset_io.h"
#include "kgqa/kg_store.h"
#include "kgqa/scorer.h"

namespace kgqa {

// Relations below this probability never enter the top-K.
inline constexpr double kMinRelationProb = 1e-12;

// Separator between the question and each relation of a partial path.
inline constexpr std::string_view kStepSeparator = " | ";

struct RetrievalConfig {
  size_t k = 3;          // expansion width per path per step
  size_t m = 5;          // reasoning-path budget
  size_t max_hops = 3;   // H
  bool use_gold_hops = false;
  std::optional<size_t> max_paths_cap;  // required when max_hops == 4

  void Validate() const;
};

struct ScoredRelationPath {
  RelationPath path;
  double log_score = 0.0;  // sum of log(step_probs)
  std::vector<double> step_probs;

  friend bool operator==(const ScoredRelationPath&,
                         const ScoredRelationPath&) = default;
};

struct RetrievalDiagnostics {
  size_t paths_tried = 0;
  size_t paths_empty = 0;

  friend bool operator==(const RetrievalDiagnostics&,
                         const RetrievalDiagnostics&) = default;
};

struct RetrievalResult {
  std::string question_id;
  size_t hops = 0;
  std::vector<ScoredRelationPath> relation_paths;  // ranked
  std::vector<ReasoningPath> reasoning_paths;      // at most M
  std::vector<size_t> reasoning_path_source;       // index into relation_paths
  RetrievalDiagnostics diagnostics;

  friend bool operator==(const RetrievalResult&,
                         const RetrievalResult&) = default;
};

// Hop labels are {"1", ..., "H"}: label index c means c + 1 hops. With
// cfg.use_gold_hops the classifier is skipped (and may be null); a missing
// gold hop is then a kData error.
size_t PredictHops(std::string_view question, std::optional<size_t> gold_hops,
                   const Classifier* hop_classifier,
                   const RetrievalConfig& cfg);

// "q | r1 | r2": the question followed by each relation surface, joined by
// kStepSeparator.
std::string BuildStepQuery(std::string_view question,
                           std::span<const RelationId> partial,
                           const Vocabulary& relations);

// h steps of top-K expansion. Output is sorted by log_score descending, ties
// broken by the lexicographic relation-id sequence. Classifier failures
// surface as kRetrieval naming the step.
std::vector<ScoredRelationPath> PredictRelationPaths(
    std::string_view question, size_t hops, const Classifier& relation_clf,
    const Vocabulary& relations, const RetrievalConfig& cfg);

// Grounds paths in rank order until M reasoning paths are collected.
// source, when given, receives the rank index of each returned path.
std::vector<ReasoningPath> SampleReasoningPaths(
    std::span<const ScoredRelationPath> ranked, const KnowledgeGraph& g,
    EntityId topic, const RetrievalConfig& cfg,
    RetrievalDiagnostics* diagnostics = nullptr,
    std::vector<size_t>* source = nullptr);

class Retriever {
 public:
  // hop_classifier may be null when cfg.use_gold_hops. The relation
  // classifier's labels must be g's relation names in id order.
  Retriever(const KnowledgeGraph& g, const Classifier* hop_classifier,
            const Classifier& relation_classifier, RetrievalConfig cfg);

  RetrievalResult Retrieve(const Question& question) const;

  const RetrievalConfig& config() const { return cfg_; }

 private:
  const KnowledgeGraph& g_;
  const Classifier* hop_classifier_;
  const Classifier& relation_classifier_;
  RetrievalConfig cfg_;
};

}  // namespace kgqa

#endif  // KGQA_RETRIEVE_H_
