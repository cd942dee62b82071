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

#ifndef KGQA_DATASET_IO_H_
#define KGQA_DATASET_IO_H_

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "kgqa/backend.h"
#include "kgqa/kg_store.h"
#include "kgqa/scorer.h"

namespace kgqa {

struct Question {
  std::string id;
  std::string text;   // topic mention kept, brackets removed
  std::string topic;  // topic entity surface form
  std::vector<std::string> answers;
  std::optional<std::vector<std::string>> gold_path;  // relation surfaces
  std::optional<size_t> gold_hops;

  // kData when answers is empty or gold_hops disagrees with gold_path.
  void Validate() const;

  // Generic record: {id, question, topic, answers, gold_path?, gold_hops?}.
  nlohmann::json ToJson() const;
  static Question FromJson(const nlohmann::json& j);

  friend bool operator==(const Question&, const Question&) = default;
};

struct LoadStats {
  size_t loaded = 0;
  size_t dropped_answerless = 0;
  size_t skipped_unknown_topic = 0;
  size_t paths_attached = 0;

  nlohmann::json ToJson() const;
};

// MetaQA question lines: "text with [topic] marker<TAB>ans1|ans2|...".
// Question ids are the 1-based line numbers. The optional paths stream holds
// "id<TAB>rel1|rel2|..." lines. When g is given, questions whose topic is
// not an entity of g are skipped and counted.
std::vector<Question> LoadMetaQa(std::istream& questions, std::istream* paths,
                                 const KnowledgeGraph* g,
                                 LoadStats* stats = nullptr);
std::vector<Question> LoadMetaQaFile(const std::string& questions_path,
                                     const std::string& paths_path,
                                     const KnowledgeGraph* g,
                                     LoadStats* stats = nullptr);

// One generic JSON record per line. Records with an empty answers array are
// dropped and counted; a missing answers field is a data error.
std::vector<Question> LoadGeneric(std::istream& in, LoadStats* stats = nullptr);
std::vector<Question> LoadGenericFile(const std::string& path,
                                      LoadStats* stats = nullptr);
void WriteGeneric(std::ostream& out, std::span<const Question> questions);

// Drops questions whose topic surface is not an entity of g.
std::vector<Question> ResolveTopics(std::vector<Question> questions,
                                    const KnowledgeGraph& g,
                                    size_t* skipped = nullptr);

// Maps relation surfaces to ids; kData when one is not in g.
RelationPath ResolvePath(std::span<const std::string> surfaces,
                         const KnowledgeGraph& g);

// {"1", ..., "H"}.
std::vector<std::string> HopLabels(size_t max_hops);

// Relation names in id order.
std::vector<std::string> RelationLabels(const KnowledgeGraph& g);

struct ClassifierDatasets {
  std::vector<LabeledText> hops;            // (question, "h")
  std::vector<LabeledText> relation_steps;  // (step query, gold relation)
};

// One hop example per question and one relation example per gold hop t,
// whose input is the step query over the first t-1 gold relations.
// kData when a question lacks a gold path or names an unknown relation.
ClassifierDatasets BuildClassifierDatasets(std::span<const Question> questions,
                                           const KnowledgeGraph& g);

// Oracle tables keyed exactly like the retrieval queries: one-hot on the
// gold hop count / gold next relation, uniform for unseen inputs.
std::unique_ptr<OracleClassifier> BuildOracleHopClassifier(
    std::span<const Question> questions, size_t max_hops);
std::unique_ptr<OracleClassifier> BuildOracleRelationClassifier(
    std::span<const Question> questions, const KnowledgeGraph& g);

}  // namespace kgqa

#endif  // KGQA_DATASET_IO_H_
