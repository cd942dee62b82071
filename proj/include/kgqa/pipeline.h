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

// Stage runners and their newline-delimited JSON records. Each stage can run
// alone (reading the previous stage's records) or fused; both paths produce
// the same QA records.

#ifndef KGQA_PIPELINE_H_
#define KGQA_PIPELINE_H_

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "kgqa/answer_eval.h"
#include "kgqa/backend.h"
#include "kgqa/dataset_io.h"
#include "kgqa/kg_store.h"
#include "kgqa/retrieve.h"
#include "kgqa/rewrite.h"

namespace kgqa {

struct PipelineBackends {
  const Classifier* hop = nullptr;  // unused with gold hops
  const Classifier* relation = nullptr;
  const TextGenerator* rewriter = nullptr;
  const TextGenerator* qa = nullptr;
};

struct StageOptions {
  RetrievalConfig retrieval;
  GenerationSettings generation;
  EvalOptions eval;
  size_t workers = 1;
};

// Retrieval record: question fields, ranked relation paths with scores, and
// reasoning paths as surface-form triples.
nlohmann::ordered_json RetrievalToJson(const RetrievalResult& result,
                                       const Question& question,
                                       const KnowledgeGraph& g);
RetrievalResult RetrievalFromJson(const nlohmann::json& j,
                                  const KnowledgeGraph& g);

struct ParagraphRecord {
  std::string question_id;
  size_t hops = 0;
  KnowledgeParagraph paragraph;
};

nlohmann::ordered_json ParagraphToJson(const ParagraphRecord& record,
                                       const KnowledgeGraph& g);
ParagraphRecord ParagraphFromJson(const nlohmann::json& j,
                                  const KnowledgeGraph& g);

std::vector<RetrievalResult> RunRetrieveStage(
    std::span<const Question> questions, const KnowledgeGraph& g,
    const PipelineBackends& backends, const StageOptions& options);

std::vector<ParagraphRecord> RunRewriteStage(
    std::span<const RetrievalResult> retrievals, const KnowledgeGraph& g,
    const TextGenerator& rewriter, const StageOptions& options);

// Pairs each paragraph with its question by id; kData when one is missing.
std::vector<QARecord> RunAnswerStage(std::span<const Question> questions,
                                     std::span<const ParagraphRecord> paragraphs,
                                     const TextGenerator& qa,
                                     const StageOptions& options);

struct PipelineOutput {
  std::vector<RetrievalResult> retrievals;
  std::vector<ParagraphRecord> paragraphs;
  std::vector<QARecord> records;
  EvalSummary summary;
};

// Retrieve, rewrite, and answer each question in one pass.
PipelineOutput RunPipeline(std::span<const Question> questions,
                           const KnowledgeGraph& g,
                           const PipelineBackends& backends,
                           const StageOptions& options);

// Reads one JSON value per non-empty line. kData names the bad line.
std::vector<nlohmann::json> ReadJsonLines(std::istream& in);
std::vector<nlohmann::json> ReadJsonLinesFile(const std::string& path);

template <typename Json>
void WriteJsonLines(std::ostream& out, std::span<const Json> rows) {
  for (const Json& row : rows) out << row.dump() << '\n';
}

}  // namespace kgqa

#endif  // KGQA_PIPELINE_H_
