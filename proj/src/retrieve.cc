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

#include "kgqa/retrieve.h"

#include <algorithm>
#include <cmath>

#include "kgqa/error.h"

namespace kgqa {

void RetrievalConfig::Validate() const {
  if (k < 1) Fail(ErrorCode::kConfig, "K must be >= 1");
  if (m < 1) Fail(ErrorCode::kConfig, "M must be >= 1");
  if (max_hops < 1 || max_hops > 4) {
    Fail(ErrorCode::kConfig, "max hops must be in [1, 4]");
  }
  if (max_paths_cap && *max_paths_cap < k) {
    Fail(ErrorCode::kConfig, "max_paths_cap must be >= K");
  }
  if (max_hops == 4 && !max_paths_cap) {
    Fail(ErrorCode::kConfig, "max_paths_cap is required when max hops is 4");
  }
}

size_t PredictHops(std::string_view question, std::optional<size_t> gold_hops,
                   const Classifier* hop_classifier,
                   const RetrievalConfig& cfg) {
  if (cfg.use_gold_hops) {
    if (!gold_hops) {
      Fail(ErrorCode::kData, "gold hops requested but question has none");
    }
    return *gold_hops;
  }
  if (hop_classifier == nullptr) {
    Fail(ErrorCode::kUsage, "hop prediction needs a hop classifier");
  }
  const LabelDistribution dist = hop_classifier->Classify(question);
  if (dist.size() != cfg.max_hops) {
    Fail(ErrorCode::kRetrieval,
         "hop classifier returned " + std::to_string(dist.size()) +
             " labels, expected " + std::to_string(cfg.max_hops));
  }
  return TopK(dist, 1).front().label + 1;
}

std::string BuildStepQuery(std::string_view question,
                           std::span<const RelationId> partial,
                           const Vocabulary& relations) {
  std::string out(question);
  for (RelationId r : partial) {
    out.append(kStepSeparator);
    out.append(relations.Name(r.value));
  }
  return out;
}

namespace {

bool RanksBefore(const ScoredRelationPath& a, const ScoredRelationPath& b) {
  if (a.log_score != b.log_score) return a.log_score > b.log_score;
  return a.path < b.path;
}

}  // namespace

std::vector<ScoredRelationPath> PredictRelationPaths(
    std::string_view question, size_t hops, const Classifier& relation_clf,
    const Vocabulary& relations, const RetrievalConfig& cfg) {
  cfg.Validate();
  if (hops < 1 || hops > cfg.max_hops) {
    Fail(ErrorCode::kRetrieval, "hop count " + std::to_string(hops) +
                                    " outside [1, " +
                                    std::to_string(cfg.max_hops) + "]");
  }
  std::vector<ScoredRelationPath> frontier(1);
  for (size_t step = 1; step <= hops; ++step) {
    std::vector<ScoredRelationPath> next;
    next.reserve(frontier.size() * cfg.k);
    for (const ScoredRelationPath& partial : frontier) {
      LabelDistribution dist;
      try {
        dist = relation_clf.Classify(
            BuildStepQuery(question, partial.path, relations));
      } catch (const Error& e) {
        Fail(ErrorCode::kRetrieval,
             "relation prediction step " + std::to_string(step) + ": " +
                 e.what());
      }
      if (dist.size() != relations.size()) {
        Fail(ErrorCode::kRetrieval,
             "relation prediction step " + std::to_string(step) +
                 ": classifier returned " + std::to_string(dist.size()) +
                 " labels, relation vocabulary has " +
                 std::to_string(relations.size()));
      }
      for (const ScoredLabel& choice : TopK(dist, cfg.k, kMinRelationProb)) {
        ScoredRelationPath extended = partial;
        extended.path.push_back(RelationId(static_cast<uint32_t>(choice.label)));
        extended.step_probs.push_back(choice.prob);
        extended.log_score += std::log(choice.prob);
        next.push_back(std::move(extended));
      }
    }
    std::sort(next.begin(), next.end(), RanksBefore);
    if (cfg.max_paths_cap && next.size() > *cfg.max_paths_cap) {
      next.resize(*cfg.max_paths_cap);
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return frontier;
}

std::vector<ReasoningPath> SampleReasoningPaths(
    std::span<const ScoredRelationPath> ranked, const KnowledgeGraph& g,
    EntityId topic, const RetrievalConfig& cfg,
    RetrievalDiagnostics* diagnostics, std::vector<size_t>* source) {
  if (!g.IsValid(topic)) {
    Fail(ErrorCode::kRetrieval,
         "topic entity id " + std::to_string(topic.value) + " not in graph");
  }
  std::vector<ReasoningPath> out;
  RetrievalDiagnostics local;
  for (size_t rank = 0; rank < ranked.size() && out.size() < cfg.m; ++rank) {
    ++local.paths_tried;
    std::vector<ReasoningPath> grounded =
        GroundRelationPath(g, topic, ranked[rank].path, cfg.m - out.size());
    if (grounded.empty()) ++local.paths_empty;
    for (ReasoningPath& p : grounded) {
      out.push_back(std::move(p));
      if (source != nullptr) source->push_back(rank);
    }
  }
  if (diagnostics != nullptr) *diagnostics = local;
  return out;
}

Retriever::Retriever(const KnowledgeGraph& g, const Classifier* hop_classifier,
                     const Classifier& relation_classifier, RetrievalConfig cfg)
    : g_(g),
      hop_classifier_(hop_classifier),
      relation_classifier_(relation_classifier),
      cfg_(cfg) {
  cfg_.Validate();
  if (relation_classifier_.labels() != RelationLabels(g_)) {
    Fail(ErrorCode::kConfig,
         "relation classifier labels do not match the graph's relations");
  }
  if (!cfg_.use_gold_hops) {
    if (hop_classifier_ == nullptr) {
      Fail(ErrorCode::kConfig, "hop classifier required without gold hops");
    }
    if (hop_classifier_->labels() != HopLabels(cfg_.max_hops)) {
      Fail(ErrorCode::kConfig, "hop classifier labels must be 1.." +
                                   std::to_string(cfg_.max_hops));
    }
  }
}

RetrievalResult Retriever::Retrieve(const Question& question) const {
  const std::optional<EntityId> topic = g_.FindEntity(question.topic);
  if (!topic) {
    Fail(ErrorCode::kRetrieval, "question " + question.id + ": topic '" +
                                    question.topic + "' not in graph");
  }
  RetrievalResult result;
  result.question_id = question.id;
  result.hops = PredictHops(question.text, question.gold_hops,
                            hop_classifier_, cfg_);
  result.relation_paths = PredictRelationPaths(
      question.text, result.hops, relation_classifier_, g_.relations(), cfg_);
  result.reasoning_paths =
      SampleReasoningPaths(result.relation_paths, g_, *topic, cfg_,
                           &result.diagnostics, &result.reasoning_path_source);
  return result;
}

}  // namespace kgqa
