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

#include "kgqa/pipeline.h"

#include <fstream>
#include <unordered_map>

#include "kgqa/error.h"
#include "kgqa/parallel.h"
#include "kgqa/text_util.h"

namespace kgqa {

namespace {

nlohmann::json TriplesToJson(std::span<const Triple> triples,
                             const KnowledgeGraph& g) {
  nlohmann::json out = nlohmann::json::array();
  for (const Triple& t : triples) {
    out.push_back({g.EntityName(t.subject), g.RelationName(t.relation),
                   g.EntityName(t.object)});
  }
  return out;
}

std::vector<Triple> TriplesFromJson(const nlohmann::json& j,
                                    const KnowledgeGraph& g) {
  std::vector<Triple> out;
  for (const auto& row : j) {
    const auto s = row.at(0).get<std::string>();
    const auto r = row.at(1).get<std::string>();
    const auto o = row.at(2).get<std::string>();
    const auto sid = g.FindEntity(s);
    const auto rid = g.FindRelation(r);
    const auto oid = g.FindEntity(o);
    if (!sid || !rid || !oid) {
      Fail(ErrorCode::kData,
           "triple (" + s + ", " + r + ", " + o + ") not in graph");
    }
    out.push_back(Triple{*sid, *rid, *oid});
  }
  return out;
}

// Gold hop count when annotated, otherwise the retrieved one.
size_t ReportedHops(const Question& q, size_t retrieved_hops) {
  return q.gold_hops ? *q.gold_hops : retrieved_hops;
}

}  // namespace

nlohmann::ordered_json RetrievalToJson(const RetrievalResult& result,
                                       const Question& question,
                                       const KnowledgeGraph& g) {
  nlohmann::ordered_json j;
  j["question_id"] = result.question_id;
  j["question"] = question.text;
  j["topic"] = question.topic;
  j["hops"] = result.hops;
  nlohmann::ordered_json paths = nlohmann::ordered_json::array();
  for (const ScoredRelationPath& p : result.relation_paths) {
    nlohmann::ordered_json row;
    std::vector<std::string> names;
    for (RelationId r : p.path) names.push_back(g.RelationName(r));
    row["relations"] = names;
    row["log_score"] = p.log_score;
    row["step_probs"] = p.step_probs;
    paths.push_back(std::move(row));
  }
  j["relation_paths"] = std::move(paths);
  nlohmann::ordered_json reasoning = nlohmann::ordered_json::array();
  for (size_t i = 0; i < result.reasoning_paths.size(); ++i) {
    nlohmann::ordered_json row;
    row["rank"] = result.reasoning_path_source[i];
    row["triples"] = TriplesToJson(result.reasoning_paths[i].triples, g);
    reasoning.push_back(std::move(row));
  }
  j["reasoning_paths"] = std::move(reasoning);
  j["diagnostics"] = {{"paths_tried", result.diagnostics.paths_tried},
                      {"paths_empty", result.diagnostics.paths_empty}};
  return j;
}

RetrievalResult RetrievalFromJson(const nlohmann::json& j,
                                  const KnowledgeGraph& g) {
  RetrievalResult r;
  try {
    r.question_id = j.at("question_id").get<std::string>();
    r.hops = j.at("hops").get<size_t>();
    for (const auto& row : j.at("relation_paths")) {
      ScoredRelationPath p;
      p.path = ResolvePath(row.at("relations").get<std::vector<std::string>>(), g);
      p.log_score = row.at("log_score").get<double>();
      p.step_probs = row.at("step_probs").get<std::vector<double>>();
      r.relation_paths.push_back(std::move(p));
    }
    for (const auto& row : j.at("reasoning_paths")) {
      r.reasoning_path_source.push_back(row.at("rank").get<size_t>());
      r.reasoning_paths.push_back(
          ReasoningPath{TriplesFromJson(row.at("triples"), g)});
    }
    r.diagnostics.paths_tried = j.at("diagnostics").at("paths_tried").get<size_t>();
    r.diagnostics.paths_empty = j.at("diagnostics").at("paths_empty").get<size_t>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kData, std::string("retrieval record: ") + e.what());
  }
  return r;
}

nlohmann::ordered_json ParagraphToJson(const ParagraphRecord& record,
                                       const KnowledgeGraph& g) {
  nlohmann::ordered_json j;
  j["question_id"] = record.question_id;
  j["hops"] = record.hops;
  nlohmann::ordered_json sentences = nlohmann::ordered_json::array();
  for (const KnowledgeSentence& s : record.paragraph.sentences) {
    nlohmann::ordered_json row;
    row["text"] = s.text;
    row["fallback"] = s.fallback;
    row["triples"] = TriplesToJson(s.source.triples, g);
    sentences.push_back(std::move(row));
  }
  j["sentences"] = std::move(sentences);
  j["consolidated"] = record.paragraph.consolidated;
  return j;
}

ParagraphRecord ParagraphFromJson(const nlohmann::json& j,
                                  const KnowledgeGraph& g) {
  ParagraphRecord r;
  try {
    r.question_id = j.at("question_id").get<std::string>();
    r.hops = j.at("hops").get<size_t>();
    for (const auto& row : j.at("sentences")) {
      KnowledgeSentence s;
      s.text = row.at("text").get<std::string>();
      s.fallback = row.at("fallback").get<bool>();
      s.source.triples = TriplesFromJson(row.at("triples"), g);
      r.paragraph.sentences.push_back(std::move(s));
    }
    r.paragraph.consolidated = j.at("consolidated").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kData, std::string("paragraph record: ") + e.what());
  }
  return r;
}

namespace {

void RequireRetrievalBackends(const PipelineBackends& b,
                              const RetrievalConfig& cfg) {
  if (b.relation == nullptr) {
    Fail(ErrorCode::kConfig, "no relation classifier backend configured");
  }
  if (!cfg.use_gold_hops && b.hop == nullptr) {
    Fail(ErrorCode::kConfig, "no hop classifier backend configured");
  }
}

}  // namespace

std::vector<RetrievalResult> RunRetrieveStage(
    std::span<const Question> questions, const KnowledgeGraph& g,
    const PipelineBackends& backends, const StageOptions& options) {
  RequireRetrievalBackends(backends, options.retrieval);
  const Retriever retriever(g, backends.hop, *backends.relation,
                            options.retrieval);
  std::vector<RetrievalResult> out(questions.size());
  ParallelFor(questions.size(), options.workers,
              [&](size_t i) { out[i] = retriever.Retrieve(questions[i]); });
  return out;
}

std::vector<ParagraphRecord> RunRewriteStage(
    std::span<const RetrievalResult> retrievals, const KnowledgeGraph& g,
    const TextGenerator& rewriter, const StageOptions& options) {
  std::vector<ParagraphRecord> out(retrievals.size());
  ParallelFor(retrievals.size(), options.workers, [&](size_t i) {
    out[i].question_id = retrievals[i].question_id;
    out[i].hops = retrievals[i].hops;
    out[i].paragraph = RewritePaths(retrievals[i].reasoning_paths, g, rewriter,
                                    options.generation);
  });
  return out;
}

std::vector<QARecord> RunAnswerStage(std::span<const Question> questions,
                                     std::span<const ParagraphRecord> paragraphs,
                                     const TextGenerator& qa,
                                     const StageOptions& options) {
  std::unordered_map<std::string, const Question*> by_id;
  for (const Question& q : questions) by_id.emplace(q.id, &q);
  std::vector<const Question*> matched;
  for (const ParagraphRecord& p : paragraphs) {
    auto it = by_id.find(p.question_id);
    if (it == by_id.end()) {
      Fail(ErrorCode::kData, "paragraph for unknown question " + p.question_id);
    }
    matched.push_back(it->second);
  }
  std::vector<QARecord> out(paragraphs.size());
  ParallelFor(paragraphs.size(), options.workers, [&](size_t i) {
    const KnowledgeParagraph& paragraph = paragraphs[i].paragraph;
    out[i] = AnswerQuestion(*matched[i],
                            ReportedHops(*matched[i], paragraphs[i].hops),
                            paragraph.empty() ? nullptr : &paragraph, qa,
                            options.generation);
  });
  return out;
}

PipelineOutput RunPipeline(std::span<const Question> questions,
                           const KnowledgeGraph& g,
                           const PipelineBackends& backends,
                           const StageOptions& options) {
  RequireRetrievalBackends(backends, options.retrieval);
  if (backends.rewriter == nullptr || backends.qa == nullptr) {
    Fail(ErrorCode::kConfig, "pipeline needs rewriter and qa backends");
  }
  const Retriever retriever(g, backends.hop, *backends.relation,
                            options.retrieval);
  PipelineOutput out;
  out.retrievals.resize(questions.size());
  out.paragraphs.resize(questions.size());
  out.records.resize(questions.size());
  ParallelFor(questions.size(), options.workers, [&](size_t i) {
    const Question& q = questions[i];
    RetrievalResult& retrieval = out.retrievals[i];
    retrieval = retriever.Retrieve(q);
    ParagraphRecord& paragraph = out.paragraphs[i];
    paragraph.question_id = q.id;
    paragraph.hops = retrieval.hops;
    paragraph.paragraph = RewritePaths(retrieval.reasoning_paths, g,
                                       *backends.rewriter, options.generation);
    out.records[i] = AnswerQuestion(
        q, ReportedHops(q, retrieval.hops),
        paragraph.paragraph.empty() ? nullptr : &paragraph.paragraph,
        *backends.qa, options.generation);
  });
  out.summary = EvaluateDataset(out.records, options.eval);
  return out;
}

std::vector<nlohmann::json> ReadJsonLines(std::istream& in) {
  std::vector<nlohmann::json> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      rows.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kData, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<nlohmann::json> ReadJsonLinesFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "'");
  return ReadJsonLines(in);
}

}  // namespace kgqa
