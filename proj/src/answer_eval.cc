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

#include "kgqa/answer_eval.h"

#include <iomanip>
#include <sstream>

#include "kgqa/error.h"
#include "kgqa/prompts.h"
#include "kgqa/text_util.h"

namespace kgqa {

std::string BuildAnswerPrompt(std::optional<std::string_view> knowledge,
                              std::string_view question) {
  std::string prompt;
  if (knowledge && !knowledge->empty()) {
    prompt.append(prompts::kFactsPrefix);
    prompt.append(*knowledge);
    prompt.append(prompts::kQuestionInfix);
  } else {
    prompt.append(prompts::kQuestionPrefix);
  }
  prompt.append(question);
  prompt.append(prompts::kAnswerSuffix);
  return prompt;
}

bool HitAt1(std::string_view answer, std::span<const std::string> gold) {
  if (gold.empty()) Fail(ErrorCode::kUsage, "hit@1 needs at least one gold answer");
  const std::string haystack = AsciiLower(answer);
  for (const std::string& g : gold) {
    if (haystack.find(AsciiLower(g)) != std::string::npos) return true;
  }
  return false;
}

nlohmann::json QARecord::ToJson() const {
  nlohmann::json j{{"question_id", question_id},
                   {"question", question},
                   {"topic", topic},
                   {"gold_answers", gold_answers},
                   {"hops", hops},
                   {"knowledge", knowledge},
                   {"prompt", prompt},
                   {"response", response},
                   {"hit", hit}};
  if (!error.empty()) j["error"] = error;
  return j;
}

QARecord QARecord::FromJson(const nlohmann::json& j) {
  QARecord r;
  try {
    r.question_id = j.at("question_id").get<std::string>();
    r.question = j.at("question").get<std::string>();
    r.topic = j.at("topic").get<std::string>();
    r.gold_answers = j.at("gold_answers").get<std::vector<std::string>>();
    r.hops = j.at("hops").get<size_t>();
    r.knowledge = j.at("knowledge").get<std::string>();
    r.prompt = j.at("prompt").get<std::string>();
    r.response = j.at("response").get<std::string>();
    r.hit = j.at("hit").get<bool>();
    r.error = j.value("error", std::string());
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kData, std::string("QA record: ") + e.what());
  }
  return r;
}

QARecord AnswerQuestion(const Question& question, size_t hops,
                        const KnowledgeParagraph* knowledge,
                        const TextGenerator& qa,
                        const GenerationSettings& settings) {
  QARecord record;
  record.question_id = question.id;
  record.question = question.text;
  record.topic = question.topic;
  record.gold_answers = question.answers;
  record.hops = hops;
  if (knowledge != nullptr) record.knowledge = knowledge->consolidated;
  record.prompt = BuildAnswerPrompt(
      record.knowledge.empty() ? std::nullopt
                               : std::optional<std::string_view>(record.knowledge),
      question.text);
  try {
    record.response = qa.Generate(settings.Request(record.prompt)).text;
    record.hit = HitAt1(record.response, record.gold_answers);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUsage) throw;
    record.error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
    record.hit = false;
  }
  return record;
}

nlohmann::json EvalSummary::ToJson() const {
  nlohmann::json hops = nlohmann::json::object();
  for (const auto& [h, b] : per_hop) {
    hops[std::to_string(h)] = {{"total", b.total}, {"hits", b.hits}};
  }
  return nlohmann::json{{"total", total},
                        {"hits", hits},
                        {"hit_at_1", hit_at_1},
                        {"per_hop", hops},
                        {"no_knowledge", no_knowledge},
                        {"failed", failed}};
}

std::string EvalSummary::Table() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "hops   total    hits   hit@1\n";
  for (const auto& [h, b] : per_hop) {
    out << std::setw(4) << h << std::setw(8) << b.total << std::setw(8)
        << b.hits << std::setw(8)
        << (b.total ? static_cast<double>(b.hits) / static_cast<double>(b.total)
                    : 0.0)
        << '\n';
  }
  out << " all" << std::setw(8) << total << std::setw(8) << hits
      << std::setw(8) << hit_at_1 << '\n';
  out << "no-knowledge fallbacks: " << no_knowledge
      << ", backend failures: " << failed << '\n';
  return out.str();
}

EvalSummary EvaluateDataset(std::span<const QARecord> records,
                            const EvalOptions& options) {
  EvalSummary summary;
  for (const QARecord& r : records) {
    if (r.failed()) {
      ++summary.failed;
      if (options.exclude_failed) continue;
    }
    ++summary.total;
    if (!r.used_knowledge()) ++summary.no_knowledge;
    HopBreakdown& bucket = summary.per_hop[r.hops];
    ++bucket.total;
    if (r.hit) {
      ++summary.hits;
      ++bucket.hits;
    }
  }
  if (summary.total == 0) Fail(ErrorCode::kData, "empty evaluation");
  summary.hit_at_1 =
      static_cast<double>(summary.hits) / static_cast<double>(summary.total);
  return summary;
}

}  // namespace kgqa
