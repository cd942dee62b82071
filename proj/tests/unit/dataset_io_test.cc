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

#include <gtest/gtest.h>

#include <functional>
#include <sstream>

#include "kgqa/error.h"
#include "kgqa/retrieve.h"
#include "synthetic.h"

namespace kgqa {
namespace {

KnowledgeGraph FromText(const std::string& text, bool inverses = false) {
  std::istringstream in(text);
  return LoadKg(in, LoadOptions{.add_inverses = inverses});
}

std::vector<Question> MetaQa(const std::string& questions,
                             const std::string* paths = nullptr,
                             const KnowledgeGraph* g = nullptr,
                             LoadStats* stats = nullptr) {
  std::istringstream q(questions);
  std::istringstream p(paths ? *paths : "");
  return LoadMetaQa(q, paths ? &p : nullptr, g, stats);
}

std::vector<Question> Generic(const std::string& text, LoadStats* stats = nullptr) {
  std::istringstream in(text);
  return LoadGeneric(in, stats);
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kUsage;
}

TEST(LoadMetaQaTest, ParsesTopicAndAnswers) {
  const auto qs = MetaQa("what films did [Ginger Rogers] act in\tTop Hat|Kitty Foyle\n");
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_EQ(qs[0].topic, "Ginger Rogers");
  EXPECT_EQ(qs[0].text, "what films did Ginger Rogers act in");
  EXPECT_EQ(qs[0].answers, (std::vector<std::string>{"Top Hat", "Kitty Foyle"}));
  EXPECT_EQ(qs[0].id, "1");
  EXPECT_FALSE(qs[0].gold_path.has_value());
}

TEST(LoadMetaQaTest, ValidationErrors) {
  EXPECT_EQ(CodeOf([] { MetaQa("what films did [Ginger Rogers] act in\n"); }),
            ErrorCode::kData);
  try {
    MetaQa("ok [a]\tb\nno topic here\tb\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kData);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(LoadMetaQaTest, DropsAnswerlessSkipsUnknownTopicsAttachesPaths) {
  const KnowledgeGraph g = FromText("a|r1|b\nb|r2|c\n", true);
  const std::string questions =
      "who is [a]\tb\n"
      "who is [b]\t\n"
      "who is [zz]\tb\n"
      "\n"
      "what is [a] two\tc\n";
  const std::string paths = "1\tr1\n5\tr1|r2\n";
  LoadStats stats;
  const auto qs = MetaQa(questions, &paths, &g, &stats);
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(stats.loaded, 2u);
  EXPECT_EQ(stats.dropped_answerless, 1u);
  EXPECT_EQ(stats.skipped_unknown_topic, 1u);
  EXPECT_EQ(stats.paths_attached, 2u);
  EXPECT_EQ(qs[1].id, "5");
  EXPECT_EQ(*qs[1].gold_path, (std::vector<std::string>{"r1", "r2"}));
  EXPECT_EQ(*qs[1].gold_hops, 2u);
}

TEST(LoadGenericTest, ValidRecord) {
  const auto qs = Generic(
      R"({"id":"x1","question":"who directed Kismet","topic":"Kismet","answers":["William Dieterle"],"gold_path":["directed_by"]})"
      "\n");
  ASSERT_EQ(qs.size(), 1u);
  EXPECT_EQ(qs[0].id, "x1");
  EXPECT_EQ(*qs[0].gold_hops, 1u);
}

TEST(LoadGenericTest, Errors) {
  EXPECT_EQ(CodeOf([] { Generic(R"({"id":"1","question":"q","topic":"t"})"); }),
            ErrorCode::kData);
  EXPECT_EQ(CodeOf([] {
              Generic(R"({"id":"1","question":"q","topic":"t","answers":["a"],"gold_path":["r1","r2"],"gold_hops":3})");
            }),
            ErrorCode::kData);
  EXPECT_EQ(CodeOf([] { Generic("{broken"); }), ErrorCode::kData);
  LoadStats stats;
  EXPECT_TRUE(Generic(R"({"id":"1","question":"q","topic":"t","answers":[]})", &stats).empty());
  EXPECT_EQ(stats.dropped_answerless, 1u);
}

TEST(LoadGenericTest, RoundTripIsIdentity) {
  const KnowledgeGraph g = FromText("a|r1|b\nb|r2|c\n");
  const std::string paths = "1\tr1|r2\n";
  const auto qs = MetaQa("who is [a]\tc\nwhat \"is\" [b]\tc|d\n", &paths, &g);
  std::ostringstream out;
  WriteGeneric(out, qs);
  EXPECT_EQ(Generic(out.str()), qs);
  const auto layered = testing::MakeLayeredDataset({});
  std::ostringstream out2;
  WriteGeneric(out2, layered.questions);
  EXPECT_EQ(Generic(out2.str()), layered.questions);
}

TEST(ClassifierDatasetsTest, TwoHopQuestion) {
  const KnowledgeGraph g = FromText("a|r1|b\nb|r2|c\n");
  Question q;
  q.id = "1";
  q.text = "what does a reach";
  q.topic = "a";
  q.answers = {"c"};
  q.gold_path = std::vector<std::string>{"r1", "r2"};
  q.gold_hops = 2;
  const std::vector<Question> qs = {q};
  const ClassifierDatasets d = BuildClassifierDatasets(qs, g);
  ASSERT_EQ(d.hops.size(), 1u);
  EXPECT_EQ(d.hops[0].label, "2");
  ASSERT_EQ(d.relation_steps.size(), 2u);
  EXPECT_EQ(d.relation_steps[0].text, "what does a reach");
  EXPECT_EQ(d.relation_steps[0].label, "r1");
  EXPECT_EQ(d.relation_steps[1].text, "what does a reach | r1");
  EXPECT_EQ(d.relation_steps[1].label, "r2");

  std::vector<Question> bad = qs;
  bad[0].gold_path = std::vector<std::string>{"r1", "r9"};
  EXPECT_EQ(CodeOf([&] { BuildClassifierDatasets(bad, g); }), ErrorCode::kData);
  bad[0].gold_path.reset();
  EXPECT_EQ(CodeOf([&] { BuildClassifierDatasets(bad, g); }), ErrorCode::kData);
}

TEST(ClassifierDatasetsTest, SizesMatchCountingOracle) {
  testing::LayeredSpec spec;
  spec.questions = 100;
  spec.max_hops = 3;
  const auto data = testing::MakeLayeredDataset(spec);
  const KnowledgeGraph g = FromText(data.kb_text, data.add_inverses);
  size_t hop_sum = 0;
  for (const Question& q : data.questions) hop_sum += q.gold_path->size();
  const ClassifierDatasets d = BuildClassifierDatasets(data.questions, g);
  EXPECT_EQ(d.hops.size(), 100u);
  EXPECT_EQ(d.relation_steps.size(), hop_sum);
}

TEST(OracleBuildersTest, KeyedLikeRetrievalQueries) {
  const KnowledgeGraph g = FromText("a|r1|b\nb|r2|c\n");
  Question q;
  q.id = "1";
  q.text = "what does a reach";
  q.topic = "a";
  q.answers = {"c"};
  q.gold_path = std::vector<std::string>{"r1", "r2"};
  q.gold_hops = 2;
  const std::vector<Question> qs = {q};
  const auto hop = BuildOracleHopClassifier(qs, 3);
  EXPECT_EQ(hop->labels(), (std::vector<std::string>{"1", "2", "3"}));
  EXPECT_EQ(hop->Classify(q.text).Argmax(), 1u);
  const auto rel = BuildOracleRelationClassifier(qs, g);
  EXPECT_EQ(rel->labels(), RelationLabels(g));
  EXPECT_EQ(rel->Classify("what does a reach | r1").Argmax(),
            g.FindRelation("r2")->value);
  EXPECT_THROW(BuildOracleHopClassifier(qs, 1), Error);
}

TEST(ResolveTest, TopicsAndPaths) {
  const KnowledgeGraph g = FromText("a|r1|b\n");
  std::vector<Question> qs(2);
  qs[0].topic = "a";
  qs[1].topic = "nope";
  size_t skipped = 0;
  EXPECT_EQ(ResolveTopics(qs, g, &skipped).size(), 1u);
  EXPECT_EQ(skipped, 1u);
  const std::vector<std::string> ok = {"r1"};
  EXPECT_EQ(ResolvePath(ok, g), RelationPath{*g.FindRelation("r1")});
  const std::vector<std::string> bad = {"r2"};
  EXPECT_THROW(ResolvePath(bad, g), Error);
}

}  // namespace
}  // namespace kgqa
