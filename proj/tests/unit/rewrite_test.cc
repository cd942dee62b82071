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

#include "kgqa/rewrite.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "kgqa/error.h"

namespace kgqa {
namespace {

std::string ReadGolden(const std::string& name) {
  std::ifstream in(std::string(KGQA_TEST_DATA_DIR) + "/golden/" + name,
                   std::ios::binary);
  EXPECT_TRUE(in.good()) << name;
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

KnowledgeGraph FromText(const std::string& text) {
  std::istringstream in(text);
  return LoadKg(in, LoadOptions{});
}

Triple T(const KnowledgeGraph& g, const char* s, const char* r, const char* o) {
  return Triple{*g.FindEntity(s), *g.FindRelation(r), *g.FindEntity(o)};
}

class EmptyGenerator : public TextGenerator {
 public:
  GenerateResponse Generate(const GenerateRequest&) const override {
    return {"   \n", "test:empty", 0.0};
  }
  std::string backend_id() const override { return "test:empty"; }
};

class FailingGenerator : public TextGenerator {
 public:
  explicit FailingGenerator(int ok) : ok_(ok) {}
  GenerateResponse Generate(const GenerateRequest& r) const override {
    if (calls_++ >= ok_) Fail(ErrorCode::kBackend, "timeout");
    return {"fine " + std::to_string(r.prompt.size()), "test", 0.0};
  }
  std::string backend_id() const override { return "test:failing"; }

 private:
  int ok_;
  mutable int calls_ = 0;
};

// Records every request so settings propagation can be checked.
class RecordingGenerator : public TextGenerator {
 public:
  GenerateResponse Generate(const GenerateRequest& r) const override {
    requests.push_back(r);
    return {" padded output ", "test", 0.0};
  }
  std::string backend_id() const override { return "test:recording"; }
  mutable std::vector<GenerateRequest> requests;
};

TEST(LinearizeTest, Examples) {
  const KnowledgeGraph g = FromText(
      "Kismet|directed_by|William Dieterle\nKismet|release_year|1944\n");
  const Triple t1 = T(g, "Kismet", "directed_by", "William Dieterle");
  const Triple t2 = T(g, "Kismet", "release_year", "1944");
  const std::vector<Triple> one = {t1};
  EXPECT_EQ(Linearize(one, g).text, "(Kismet, directed_by, William Dieterle)");
  const std::vector<Triple> dup = {t1, t1, t2};
  const std::vector<Triple> dedup = {t1, t2};
  const TripleFormText x = Linearize(dup, g);
  EXPECT_EQ(x.text, Linearize(dedup, g).text);
  EXPECT_EQ(x.text,
            "(Kismet, directed_by, William Dieterle), (Kismet, release_year, 1944)");
  EXPECT_EQ(x.source, dedup);
  EXPECT_EQ(Linearize({}, g).text, "");
}

TEST(LinearizeTest, DistinctSequencesRenderDistinctly) {
  const KnowledgeGraph g = FromText("a|r|b\nb|r|c\na|s|c\n");
  const std::vector<Triple> all = {T(g, "a", "r", "b"), T(g, "b", "r", "c"),
                                   T(g, "a", "s", "c")};
  std::set<std::string> seen;
  size_t count = 0;
  for (size_t mask = 1; mask < 8; ++mask) {
    std::vector<Triple> subset;
    for (size_t i = 0; i < 3; ++i) {
      if (mask & (1u << i)) subset.push_back(all[i]);
    }
    do {
      seen.insert(Linearize(subset, g).text);
      ++count;
    } while (std::next_permutation(subset.begin(), subset.end()));
  }
  EXPECT_EQ(seen.size(), count);
}

TEST(GraphToTextPromptTest, MatchesGolden) {
  EXPECT_EQ(BuildGraphToTextPrompt("(Kismet, directed_by, William Dieterle)"),
            ReadGolden("t1_prompt.txt"));
  EXPECT_EQ(BuildGraphToTextPrompt("(a, r, b)"),
            "Your task is to transform a knowledge graph to a sentence or "
            "multiple sentences. The knowledge graph is: (a, r, b). The "
            "sentence is:");
  EXPECT_EQ(BuildGraphToTextPrompt(""),
            "Your task is to transform a knowledge graph to a sentence or "
            "multiple sentences. The knowledge graph is: . The sentence is:");
  EXPECT_EQ(BuildGraphToTextPrompt("x"), BuildGraphToTextPrompt("x"));
}

TEST(RewritePathsTest, EmptyInputGivesEmptyParagraph) {
  const KnowledgeGraph g = FromText("a|r|b");
  const KnowledgeParagraph p = RewritePaths({}, g, MockRewriter());
  EXPECT_TRUE(p.empty());
  EXPECT_EQ(p.consolidated, "");
}

TEST(RewritePathsTest, MockRewriterByHand) {
  const KnowledgeGraph g = FromText("a|r1|b\nb|r2|c\nb|r2|d\n");
  const ReasoningPath p1{{T(g, "a", "r1", "b"), T(g, "b", "r2", "c")}};
  const ReasoningPath p2{{T(g, "a", "r1", "b"), T(g, "b", "r2", "d")}};
  const std::vector<ReasoningPath> one = {p1};
  EXPECT_EQ(RewritePaths(one, g, MockRewriter()).consolidated,
            "a r1 b. b r2 c.");
  const std::vector<ReasoningPath> two = {p1, p2};
  const KnowledgeParagraph para = RewritePaths(two, g, MockRewriter());
  ASSERT_EQ(para.sentences.size(), 2u);
  EXPECT_EQ(para.consolidated,
            para.sentences[0].text + " " + para.sentences[1].text);
  EXPECT_EQ(para.sentences[0].source, p1);
  EXPECT_EQ(para.sentences[1].source, p2);
  EXPECT_FALSE(para.sentences[0].fallback);
}

TEST(RewritePathsTest, EmptyOutputFallsBackToTripleForm) {
  const KnowledgeGraph g = FromText("a|r1|b");
  const std::vector<ReasoningPath> paths = {
      ReasoningPath{{T(g, "a", "r1", "b")}}};
  const KnowledgeParagraph p = RewritePaths(paths, g, EmptyGenerator());
  ASSERT_EQ(p.sentences.size(), 1u);
  EXPECT_TRUE(p.sentences[0].fallback);
  EXPECT_EQ(p.consolidated, "(a, r1, b)");
}

TEST(RewritePathsTest, TrimsOutputAndForwardsSettings) {
  const KnowledgeGraph g = FromText("a|r1|b");
  const std::vector<ReasoningPath> paths = {
      ReasoningPath{{T(g, "a", "r1", "b")}}};
  RecordingGenerator gen;
  GenerationSettings settings;
  settings.max_new_tokens = 64;
  settings.seed = 3;
  const KnowledgeParagraph p = RewritePaths(paths, g, gen, settings);
  EXPECT_EQ(p.consolidated, "padded output");
  ASSERT_EQ(gen.requests.size(), 1u);
  EXPECT_EQ(gen.requests[0].max_new_tokens, 64);
  EXPECT_EQ(gen.requests[0].seed, 3);
  EXPECT_EQ(gen.requests[0].prompt, BuildGraphToTextPrompt("(a, r1, b)"));
}

TEST(RewritePathsTest, BackendFailureNamesPathIndex) {
  const KnowledgeGraph g = FromText("a|r1|b");
  const ReasoningPath p{{T(g, "a", "r1", "b")}};
  const std::vector<ReasoningPath> paths = {p, p, p};
  try {
    RewritePaths(paths, g, FailingGenerator(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRewrite);
    EXPECT_NE(std::string(e.what()).find("path 2"), std::string::npos)
        << e.what();
  }
}

}  // namespace
}  // namespace kgqa
