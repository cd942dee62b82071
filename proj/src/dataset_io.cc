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

#include "kgqa/dataset_io.h"

#include <fstream>
#include <unordered_map>

#include "kgqa/error.h"
#include "kgqa/retrieve.h"
#include "kgqa/text_util.h"

namespace kgqa {

void Question::Validate() const {
  if (answers.empty()) {
    Fail(ErrorCode::kData, "question " + id + ": no gold answers");
  }
  if (gold_path && gold_path->empty()) {
    Fail(ErrorCode::kData, "question " + id + ": empty gold path");
  }
  if (gold_path && gold_hops && *gold_hops != gold_path->size()) {
    Fail(ErrorCode::kData, "question " + id + ": gold_hops " +
                               std::to_string(*gold_hops) +
                               " disagrees with gold path of length " +
                               std::to_string(gold_path->size()));
  }
}

nlohmann::json Question::ToJson() const {
  nlohmann::json j{{"id", id},
                   {"question", text},
                   {"topic", topic},
                   {"answers", answers}};
  if (gold_path) j["gold_path"] = *gold_path;
  if (gold_hops) j["gold_hops"] = *gold_hops;
  return j;
}

Question Question::FromJson(const nlohmann::json& j) {
  Question q;
  try {
    q.id = j.at("id").get<std::string>();
    q.text = j.at("question").get<std::string>();
    q.topic = j.at("topic").get<std::string>();
    q.answers = j.at("answers").get<std::vector<std::string>>();
    if (j.contains("gold_path") && !j["gold_path"].is_null()) {
      q.gold_path = j["gold_path"].get<std::vector<std::string>>();
    }
    if (j.contains("gold_hops") && !j["gold_hops"].is_null()) {
      q.gold_hops = j["gold_hops"].get<size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kData, std::string("question record: ") + e.what());
  }
  if (q.gold_path && !q.gold_hops) q.gold_hops = q.gold_path->size();
  return q;
}

nlohmann::json LoadStats::ToJson() const {
  return nlohmann::json{{"loaded", loaded},
                        {"dropped_answerless", dropped_answerless},
                        {"skipped_unknown_topic", skipped_unknown_topic},
                        {"paths_attached", paths_attached}};
}

namespace {

std::unordered_map<std::string, std::vector<std::string>> ReadPaths(
    std::istream& in) {
  std::unordered_map<std::string, std::vector<std::string>> paths;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = Trim(line);
    if (view.empty()) continue;
    const size_t tab = view.find('\t');
    if (tab == std::string_view::npos) {
      Fail(ErrorCode::kData, "paths line " + std::to_string(line_no) +
                                 ": expected 'id<TAB>rel|rel'");
    }
    std::vector<std::string> relations;
    for (const std::string& r : Split(view.substr(tab + 1), '|')) {
      const std::string_view trimmed = Trim(r);
      if (trimmed.empty()) {
        Fail(ErrorCode::kData,
             "paths line " + std::to_string(line_no) + ": empty relation");
      }
      relations.emplace_back(trimmed);
    }
    paths[std::string(Trim(view.substr(0, tab)))] = std::move(relations);
  }
  return paths;
}

}  // namespace

std::vector<Question> LoadMetaQa(std::istream& questions, std::istream* paths,
                                 const KnowledgeGraph* g, LoadStats* stats) {
  std::unordered_map<std::string, std::vector<std::string>> gold_paths;
  if (paths != nullptr) gold_paths = ReadPaths(*paths);

  LoadStats local;
  std::vector<Question> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(questions, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      Fail(ErrorCode::kData,
           "questions line " + std::to_string(line_no) + ": missing tab");
    }
    const std::string text = line.substr(0, tab);
    const size_t open = text.find('[');
    const size_t close =
        open == std::string::npos ? open : text.find(']', open + 1);
    if (close == std::string::npos || close == open + 1) {
      Fail(ErrorCode::kData, "questions line " + std::to_string(line_no) +
                                 ": missing bracketed topic entity");
    }
    Question q;
    q.id = std::to_string(line_no);
    q.topic = text.substr(open + 1, close - open - 1);
    q.text = text.substr(0, open) + q.topic + text.substr(close + 1);
    for (const std::string& a : Split(std::string_view(line).substr(tab + 1), '|')) {
      const std::string_view trimmed = Trim(a);
      if (!trimmed.empty()) q.answers.emplace_back(trimmed);
    }
    if (q.answers.empty()) {
      ++local.dropped_answerless;
      continue;
    }
    if (g != nullptr && !g->FindEntity(q.topic)) {
      ++local.skipped_unknown_topic;
      continue;
    }
    if (auto it = gold_paths.find(q.id); it != gold_paths.end()) {
      q.gold_path = it->second;
      q.gold_hops = it->second.size();
      ++local.paths_attached;
    }
    out.push_back(std::move(q));
  }
  local.loaded = out.size();
  if (stats != nullptr) *stats = local;
  return out;
}

std::vector<Question> LoadMetaQaFile(const std::string& questions_path,
                                     const std::string& paths_path,
                                     const KnowledgeGraph* g,
                                     LoadStats* stats) {
  std::ifstream questions(questions_path);
  if (!questions) {
    Fail(ErrorCode::kIo, "cannot open questions file '" + questions_path + "'");
  }
  if (paths_path.empty()) return LoadMetaQa(questions, nullptr, g, stats);
  std::ifstream paths(paths_path);
  if (!paths) Fail(ErrorCode::kIo, "cannot open paths file '" + paths_path + "'");
  return LoadMetaQa(questions, &paths, g, stats);
}

std::vector<Question> LoadGeneric(std::istream& in, LoadStats* stats) {
  LoadStats local;
  std::vector<Question> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      Fail(ErrorCode::kData,
           "questions line " + std::to_string(line_no) + ": " + e.what());
    }
    Question q;
    try {
      q = Question::FromJson(j);
    } catch (const Error& e) {
      Fail(ErrorCode::kData,
           "questions line " + std::to_string(line_no) + ": " + e.what());
    }
    if (q.answers.empty()) {
      ++local.dropped_answerless;
      continue;
    }
    q.Validate();
    if (q.gold_path) ++local.paths_attached;
    out.push_back(std::move(q));
  }
  local.loaded = out.size();
  if (stats != nullptr) *stats = local;
  return out;
}

std::vector<Question> LoadGenericFile(const std::string& path,
                                      LoadStats* stats) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open questions file '" + path + "'");
  return LoadGeneric(in, stats);
}

void WriteGeneric(std::ostream& out, std::span<const Question> questions) {
  for (const Question& q : questions) out << q.ToJson().dump() << '\n';
}

std::vector<Question> ResolveTopics(std::vector<Question> questions,
                                    const KnowledgeGraph& g, size_t* skipped) {
  const size_t before = questions.size();
  std::erase_if(questions,
                [&](const Question& q) { return !g.FindEntity(q.topic); });
  if (skipped != nullptr) *skipped = before - questions.size();
  return questions;
}

RelationPath ResolvePath(std::span<const std::string> surfaces,
                         const KnowledgeGraph& g) {
  RelationPath path;
  for (const std::string& s : surfaces) {
    const std::optional<RelationId> r = g.FindRelation(s);
    if (!r) Fail(ErrorCode::kData, "relation '" + s + "' not in graph");
    path.push_back(*r);
  }
  return path;
}

std::vector<std::string> HopLabels(size_t max_hops) {
  std::vector<std::string> labels;
  for (size_t h = 1; h <= max_hops; ++h) labels.push_back(std::to_string(h));
  return labels;
}

std::vector<std::string> RelationLabels(const KnowledgeGraph& g) {
  std::vector<std::string> labels;
  labels.reserve(g.num_relations());
  for (size_t r = 0; r < g.num_relations(); ++r) {
    labels.push_back(g.relations().Name(static_cast<uint32_t>(r)));
  }
  return labels;
}

namespace {

const std::vector<std::string>& RequireGoldPath(const Question& q) {
  if (!q.gold_path) {
    Fail(ErrorCode::kData, "question " + q.id + " has no gold relation path");
  }
  return *q.gold_path;
}

}  // namespace

ClassifierDatasets BuildClassifierDatasets(std::span<const Question> questions,
                                           const KnowledgeGraph& g) {
  ClassifierDatasets out;
  for (const Question& q : questions) {
    const std::vector<std::string>& gold = RequireGoldPath(q);
    const RelationPath path = ResolvePath(gold, g);
    out.hops.push_back(LabeledText{q.text, std::to_string(path.size())});
    for (size_t t = 0; t < path.size(); ++t) {
      out.relation_steps.push_back(LabeledText{
          BuildStepQuery(q.text, std::span(path).first(t), g.relations()),
          gold[t]});
    }
  }
  return out;
}

std::unique_ptr<OracleClassifier> BuildOracleHopClassifier(
    std::span<const Question> questions, size_t max_hops) {
  auto oracle = std::make_unique<OracleClassifier>("hops", HopLabels(max_hops));
  for (const Question& q : questions) {
    const size_t hops = q.gold_hops ? *q.gold_hops : RequireGoldPath(q).size();
    if (hops < 1 || hops > max_hops) {
      Fail(ErrorCode::kData, "question " + q.id + ": gold hops " +
                                 std::to_string(hops) + " outside 1.." +
                                 std::to_string(max_hops));
    }
    oracle->SetGold(q.text, hops - 1);
  }
  return oracle;
}

std::unique_ptr<OracleClassifier> BuildOracleRelationClassifier(
    std::span<const Question> questions, const KnowledgeGraph& g) {
  auto oracle =
      std::make_unique<OracleClassifier>("relations", RelationLabels(g));
  for (const Question& q : questions) {
    const RelationPath path = ResolvePath(RequireGoldPath(q), g);
    for (size_t t = 0; t < path.size(); ++t) {
      oracle->SetGold(
          BuildStepQuery(q.text, std::span(path).first(t), g.relations()),
          path[t].value);
    }
  }
  return oracle;
}

}  // namespace kgqa
