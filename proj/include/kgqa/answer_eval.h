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

// Answer stage and hit@1 evaluation.

#ifndef KGQA_ANSWER_EVAL_H_
#define KGQA_ANSWER_EVAL_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kgqa/backend.h"
#include "kgqa/dataset_io.h"
#include "kgqa/rewrite.h"

namespace kgqa {

// Knowledge-augmented prompt. An absent or empty knowledge paragraph yields
// the no-knowledge form "Question: <q> Answer:".
std::string BuildAnswerPrompt(std::optional<std::string_view> knowledge,
                              std::string_view question);

// True iff the lowercased answer contains some lowercased gold answer as a
// substring. Short gold strings can match inside unrelated words; this is
// the metric as defined, not a bug. kUsage when gold is empty.
bool HitAt1(std::string_view answer, std::span<const std::string> gold);

struct QARecord {
  std::string question_id;
  std::string question;
  std::string topic;
  std::vector<std::string> gold_answers;
  size_t hops = 0;
  std::string knowledge;  // consolidated paragraph; empty without knowledge
  std::string prompt;
  std::string response;
  bool hit = false;
  std::string error;  // non-empty when the QA backend failed

  bool used_knowledge() const { return !knowledge.empty(); }
  bool failed() const { return !error.empty(); }

  nlohmann::json ToJson() const;
  static QARecord FromJson(const nlohmann::json& j);

  friend bool operator==(const QARecord&, const QARecord&) = default;
};

// Backend failures are caught and recorded as a miss with an error note.
QARecord AnswerQuestion(const Question& question, size_t hops,
                        const KnowledgeParagraph* knowledge,
                        const TextGenerator& qa,
                        const GenerationSettings& settings = {});

struct HopBreakdown {
  size_t total = 0;
  size_t hits = 0;
};

struct EvalOptions {
  // Drop backend failures from the denominator instead of counting misses.
  bool exclude_failed = false;
};

struct EvalSummary {
  size_t total = 0;
  size_t hits = 0;
  double hit_at_1 = 0.0;
  std::map<size_t, HopBreakdown> per_hop;
  size_t no_knowledge = 0;
  size_t failed = 0;

  nlohmann::json ToJson() const;
  std::string Table() const;
};

// kData ("empty evaluation") when nothing is left to score.
EvalSummary EvaluateDataset(std::span<const QARecord> records,
                            const EvalOptions& options = {});

}  // namespace kgqa

#endif  // KGQA_ANSWER_EVAL_H_
