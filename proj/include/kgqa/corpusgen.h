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

// Graph-text corpus generation with QA feedback: ground each question's gold
// relation path into a subgraph, verbalize it with a generator, and keep the
// pair only if the QA backend answers correctly from the generated text.

#ifndef KGQA_CORPUSGEN_H_
#define KGQA_CORPUSGEN_H_

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "kgqa/backend.h"
#include "kgqa/dataset_io.h"
#include "kgqa/kg_store.h"
#include "kgqa/rewrite.h"

namespace kgqa {

struct GoldSubgraph {
  std::string question_id;
  std::vector<Triple> triples;             // union in grounding order
  std::vector<ReasoningPath> groundings;   // derivation
};

// nullopt (with a reason in diagnostic) when the question has no gold path,
// its topic or relations are unknown, or the path does not ground.
std::optional<GoldSubgraph> ExtractGoldSubgraph(const Question& question,
                                                const KnowledgeGraph& g,
                                                size_t grounding_limit,
                                                std::string* diagnostic);

struct CandidatePair {
  std::string triple_form;
  std::string free_form;
};

// Backend errors propagate.
CandidatePair GeneratePair(const GoldSubgraph& subgraph,
                           const KnowledgeGraph& g,
                           const TextGenerator& generator,
                           const GenerationSettings& settings = {});

// hit@1 of the QA backend's answer given free_form as knowledge. A backend
// failure closes the gate and is reported through diagnostic.
bool QualityGate(const Question& question, std::string_view free_form,
                 const TextGenerator& qa, const GenerationSettings& settings,
                 std::string* diagnostic);

struct GraphTextPair {
  std::string question_id;
  std::string triple_form;
  std::string free_form;

  nlohmann::ordered_json ToJson() const;
  friend bool operator==(const GraphTextPair&, const GraphTextPair&) = default;
};

struct CorpusSummary {
  size_t generated = 0;  // candidates that reached the gate
  size_t gated_out = 0;
  size_t skipped = 0;
  size_t kept = 0;

  nlohmann::json ToJson() const;
};

struct CorpusConfig {
  size_t grounding_limit = 5;
  GenerationSettings generation;
  size_t workers = 1;
};

struct CorpusRun {
  std::vector<GraphTextPair> pairs;  // input question order
  CorpusSummary summary;
  std::vector<std::string> diagnostics;  // "question_id: reason"
};

CorpusRun GenerateCorpus(std::span<const Question> questions,
                         const KnowledgeGraph& g,
                         const TextGenerator& generator,
                         const TextGenerator& qa, const CorpusConfig& config);

// One {question_id, triple_form, free_form} JSON object per line.
void EmitCorpus(std::span<const GraphTextPair> pairs, std::ostream& sink);

}  // namespace kgqa

#endif  // KGQA_CORPUSGEN_H_
