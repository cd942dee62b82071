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

#include "kgqa/corpusgen.h"

#include <algorithm>

#include "kgqa/answer_eval.h"
#include "kgqa/error.h"
#include "kgqa/parallel.h"
#include "kgqa/text_util.h"

namespace kgqa {

std::optional<GoldSubgraph> ExtractGoldSubgraph(const Question& question,
                                                const KnowledgeGraph& g,
                                                size_t grounding_limit,
                                                std::string* diagnostic) {
  auto reject = [&](const std::string& reason) -> std::optional<GoldSubgraph> {
    if (diagnostic != nullptr) *diagnostic = reason;
    return std::nullopt;
  };
  if (!question.gold_path) return reject("no gold relation path");
  const std::optional<EntityId> topic = g.FindEntity(question.topic);
  if (!topic) return reject("topic '" + question.topic + "' not in graph");
  RelationPath path;
  for (const std::string& r : *question.gold_path) {
    const std::optional<RelationId> id = g.FindRelation(r);
    if (!id) return reject("relation '" + r + "' not in graph");
    path.push_back(*id);
  }

  GoldSubgraph sub;
  sub.question_id = question.id;
  sub.groundings = GroundRelationPath(g, *topic, path, grounding_limit);
  if (sub.groundings.empty()) return reject("gold path does not ground");
  for (const ReasoningPath& p : sub.groundings) {
    for (const Triple& t : p.triples) {
      if (std::find(sub.triples.begin(), sub.triples.end(), t) ==
          sub.triples.end()) {
        sub.triples.push_back(t);
      }
    }
  }
  return sub;
}

CandidatePair GeneratePair(const GoldSubgraph& subgraph,
                           const KnowledgeGraph& g,
                           const TextGenerator& generator,
                           const GenerationSettings& settings) {
  if (subgraph.triples.empty()) {
    Fail(ErrorCode::kUsage, "cannot verbalize an empty subgraph");
  }
  CandidatePair pair;
  pair.triple_form = Linearize(subgraph.triples, g).text;
  pair.free_form = std::string(Trim(
      generator.Generate(settings.Request(BuildGraphToTextPrompt(pair.triple_form)))
          .text));
  return pair;
}

bool QualityGate(const Question& question, std::string_view free_form,
                 const TextGenerator& qa, const GenerationSettings& settings,
                 std::string* diagnostic) {
  if (question.answers.empty()) {
    Fail(ErrorCode::kUsage, "quality gate needs gold answers");
  }
  try {
    const GenerateResponse answer = qa.Generate(
        settings.Request(BuildAnswerPrompt(free_form, question.text)));
    return HitAt1(answer.text, question.answers);
  } catch (const Error& e) {
    if (diagnostic != nullptr) {
      *diagnostic = std::string("qa backend: ") + e.what();
    }
    return false;
  }
}

nlohmann::ordered_json GraphTextPair::ToJson() const {
  // Field order is part of the file format.
  nlohmann::ordered_json j;
  j["question_id"] = question_id;
  j["triple_form"] = triple_form;
  j["free_form"] = free_form;
  return j;
}

nlohmann::json CorpusSummary::ToJson() const {
  return nlohmann::json{{"generated", generated},
                        {"gated_out", gated_out},
                        {"skipped", skipped},
                        {"kept", kept}};
}

namespace {

enum class Outcome { kKept, kGatedOut, kSkipped };

struct QuestionResult {
  Outcome outcome = Outcome::kSkipped;
  GraphTextPair pair;
  std::string diagnostic;
};

}  // namespace

CorpusRun GenerateCorpus(std::span<const Question> questions,
                         const KnowledgeGraph& g,
                         const TextGenerator& generator,
                         const TextGenerator& qa, const CorpusConfig& config) {
  std::vector<QuestionResult> results(questions.size());
  ParallelFor(questions.size(), config.workers, [&](size_t i) {
    const Question& q = questions[i];
    QuestionResult& r = results[i];
    if (q.answers.empty()) {
      r.diagnostic = "no gold answers";
      return;
    }
    const std::optional<GoldSubgraph> sub =
        ExtractGoldSubgraph(q, g, config.grounding_limit, &r.diagnostic);
    if (!sub) return;
    CandidatePair candidate;
    try {
      candidate = GeneratePair(*sub, g, generator, config.generation);
    } catch (const Error& e) {
      r.diagnostic = std::string("generator: ") + e.what();
      return;
    }
    r.pair = GraphTextPair{q.id, std::move(candidate.triple_form),
                           std::move(candidate.free_form)};
    if (QualityGate(q, r.pair.free_form, qa, config.generation,
                    &r.diagnostic)) {
      r.outcome = Outcome::kKept;
    } else {
      r.outcome = Outcome::kGatedOut;
      if (r.diagnostic.empty()) r.diagnostic = "qa answer missed gold";
    }
  });

  CorpusRun run;
  for (size_t i = 0; i < results.size(); ++i) {
    QuestionResult& r = results[i];
    switch (r.outcome) {
      case Outcome::kKept:
        ++run.summary.generated;
        ++run.summary.kept;
        run.pairs.push_back(std::move(r.pair));
        break;
      case Outcome::kGatedOut:
        ++run.summary.generated;
        ++run.summary.gated_out;
        break;
      case Outcome::kSkipped:
        ++run.summary.skipped;
        break;
    }
    if (r.outcome != Outcome::kKept) {
      run.diagnostics.push_back(questions[i].id + ": " + r.diagnostic);
    }
  }
  return run;
}

void EmitCorpus(std::span<const GraphTextPair> pairs, std::ostream& sink) {
  for (const GraphTextPair& p : pairs) sink << p.ToJson().dump() << '\n';
}

}  // namespace kgqa
