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

#include "kgqa/retrieve.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "kgqa/backend.h"
#include "kgqa/dataset_io.h"
#include "kgqa/error.h"
#include "synthetic.h"

namespace kgqa {
namespace {

KnowledgeGraph FromText(const std::string& text, bool inverses = false) {
  std::istringstream in(text);
  return LoadKg(in, LoadOptions{.add_inverses = inverses});
}

// Deterministic pseudo-random distribution per input string.
class HashedClassifier : public Classifier {
 public:
  HashedClassifier(size_t labels, uint64_t salt, bool with_zeros = false)
      : salt_(salt), with_zeros_(with_zeros) {
    for (size_t i = 0; i < labels; ++i) labels_.push_back("r" + std::to_string(i));
  }
  LabelDistribution Classify(std::string_view input) const override {
    std::mt19937_64 rng(Fnv1a64(input) ^ salt_);
    std::vector<double> p(labels_.size());
    double total = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
      p[i] = with_zeros_ && rng() % 3 == 0 ? 0.0 : 1.0 + static_cast<double>(rng() % 1000);
      total += p[i];
    }
    if (total == 0.0) {
      p[0] = 1.0;
      total = 1.0;
    }
    for (double& v : p) v /= total;
    return {p, "relations"};
  }
  const std::vector<std::string>& labels() const override { return labels_; }
  std::string backend_id() const override { return "test:hashed"; }

 private:
  std::vector<std::string> labels_;
  uint64_t salt_;
  bool with_zeros_;
};

class ThrowingClassifier : public Classifier {
 public:
  explicit ThrowingClassifier(std::vector<std::string> labels, size_t ok_calls)
      : labels_(std::move(labels)), ok_calls_(ok_calls) {}
  LabelDistribution Classify(std::string_view) const override {
    if (calls_++ >= ok_calls_) Fail(ErrorCode::kBackend, "connection refused");
    return {std::vector<double>(labels_.size(), 1.0 / labels_.size()), "r"};
  }
  const std::vector<std::string>& labels() const override { return labels_; }
  std::string backend_id() const override { return "test:throwing"; }

 private:
  std::vector<std::string> labels_;
  size_t ok_calls_;
  mutable size_t calls_ = 0;
};

Vocabulary MakeVocab(size_t n) {
  Vocabulary v;
  for (size_t i = 0; i < n; ++i) v.Intern("r" + std::to_string(i));
  return v;
}

TEST(RetrievalConfigTest, Validation) {
  RetrievalConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.k = 0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = RetrievalConfig{};
  cfg.m = 0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = RetrievalConfig{};
  cfg.max_hops = 5;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.max_hops = 4;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.max_paths_cap = 2;
  EXPECT_THROW(cfg.Validate(), Error);  // cap < K
  cfg.max_paths_cap = 50;
  EXPECT_NO_THROW(cfg.Validate());
}

TEST(PredictHopsTest, ArgmaxGoldBypassAndTie) {
  OracleClassifier clf("hops", {"1", "2"});
  clf.Set("q", {0.2, 0.8});
  clf.Set("tie", {0.5, 0.5});
  RetrievalConfig cfg;
  cfg.max_hops = 2;
  EXPECT_EQ(PredictHops("q", std::nullopt, &clf, cfg), 2u);
  EXPECT_EQ(PredictHops("tie", std::nullopt, &clf, cfg), 1u);
  cfg.use_gold_hops = true;
  EXPECT_EQ(PredictHops("q", 2, nullptr, cfg), 2u);
  EXPECT_EQ(PredictHops("tie", 2, &clf, cfg), 2u);
  try {
    PredictHops("q", std::nullopt, &clf, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kData);
  }
}

TEST(BuildStepQueryTest, Goldens) {
  Vocabulary v;
  const RelationId directed_by(v.Intern("directed_by"));
  const RelationId r1(v.Intern("r1"));
  const RelationId r2(v.Intern("r2"));
  EXPECT_EQ(BuildStepQuery("who directed X", {}, v), "who directed X");
  const std::vector<RelationId> one = {directed_by};
  EXPECT_EQ(BuildStepQuery("who directed X", one, v),
            "who directed X | directed_by");
  const std::vector<RelationId> two = {r1, r2};
  EXPECT_EQ(BuildStepQuery("q", two, v), "q | r1 | r2");
}

TEST(PredictRelationPathsTest, KEqualsOneIsGreedyChain) {
  const Vocabulary v = MakeVocab(6);
  const HashedClassifier clf(6, 1);
  RetrievalConfig cfg;
  cfg.k = 1;
  for (size_t h = 1; h <= 3; ++h) {
    const auto paths = PredictRelationPaths("question", h, clf, v, cfg);
    ASSERT_EQ(paths.size(), 1u);
    std::vector<RelationId> greedy;
    for (size_t t = 0; t < h; ++t) {
      const auto d = clf.Classify(BuildStepQuery("question", greedy, v));
      greedy.push_back(RelationId(static_cast<uint32_t>(d.Argmax())));
    }
    EXPECT_EQ(paths[0].path, greedy);
  }
}

struct OraclePath {
  RelationPath path;
  double log_sum = 0.0;
  double product = 1.0;
  std::vector<double> probs;
};

// Every |R|^h sequence, kept when each step's relation is among the K best
// labels (prob desc, label asc, prob >= 1e-12) for its prefix query.
std::vector<OraclePath> EnumerateOracle(const std::string& q, size_t h,
                                        size_t k, const Classifier& clf,
                                        const Vocabulary& v) {
  const size_t n = v.size();
  std::vector<OraclePath> out;
  size_t total = 1;
  for (size_t i = 0; i < h; ++i) total *= n;
  for (size_t code = 0; code < total; ++code) {
    OraclePath cand;
    size_t rest = code;
    for (size_t i = 0; i < h; ++i) {
      cand.path.insert(cand.path.begin(),
                       RelationId(static_cast<uint32_t>(rest % n)));
      rest /= n;
    }
    bool reachable = true;
    for (size_t t = 0; t < h && reachable; ++t) {
      const std::vector<RelationId> prefix(cand.path.begin(),
                                           cand.path.begin() + t);
      const std::vector<double> p =
          clf.Classify(BuildStepQuery(q, prefix, v)).probs;
      const size_t chosen = cand.path[t].value;
      size_t better = 0;
      for (size_t l = 0; l < n; ++l) {
        if (p[l] > p[chosen] || (p[l] == p[chosen] && l < chosen)) ++better;
      }
      reachable = p[chosen] >= 1e-12 && better < k;
      cand.log_sum += std::log(p[chosen]);
      cand.product *= p[chosen];
      cand.probs.push_back(p[chosen]);
    }
    if (reachable) out.push_back(cand);
  }
  std::sort(out.begin(), out.end(), [](const OraclePath& a, const OraclePath& b) {
    if (a.log_sum != b.log_sum) return a.log_sum > b.log_sum;
    return a.path < b.path;
  });
  return out;
}

TEST(PredictRelationPathsTest, MatchesExhaustiveEnumeration) {
  for (size_t relations : {2, 5, 10}) {
    const Vocabulary v = MakeVocab(relations);
    for (bool zeros : {false, true}) {
      const HashedClassifier clf(relations, relations * 7 + zeros, zeros);
      for (size_t k = 1; k <= 3; ++k) {
        for (size_t h = 1; h <= 2; ++h) {
          RetrievalConfig cfg;
          cfg.k = k;
          const std::string q = "what is linked to node " + std::to_string(h);
          const auto got = PredictRelationPaths(q, h, clf, v, cfg);
          const auto want = EnumerateOracle(q, h, k, clf, v);
          ASSERT_EQ(got.size(), want.size())
              << "R=" << relations << " K=" << k << " h=" << h;
          if (!zeros) {
            size_t expected = 1;
            for (size_t t = 0; t < h; ++t) expected *= std::min(k, relations);
            EXPECT_EQ(got.size(), expected);
          }
          for (size_t i = 0; i < got.size(); ++i) {
            EXPECT_EQ(got[i].path, want[i].path);
            EXPECT_EQ(got[i].step_probs, want[i].probs);
            EXPECT_NEAR(got[i].log_score, want[i].log_sum,
                        1e-9 * std::abs(want[i].log_sum) + 1e-300);
            const double direct = std::exp(got[i].log_score);
            EXPECT_LE(std::abs(direct - want[i].product),
                      1e-9 * want[i].product);
            EXPECT_GT(direct, 0.0);
            EXPECT_LE(direct, 1.0);
          }
        }
      }
    }
  }
}

TEST(PredictRelationPathsTest, CapBoundsPathCountAndPrefixesSurvive) {
  const Vocabulary v = MakeVocab(8);
  const HashedClassifier clf(8, 3);
  RetrievalConfig cfg;
  cfg.k = 3;
  cfg.max_hops = 4;
  cfg.max_paths_cap = 10;
  for (size_t h = 1; h <= 4; ++h) {
    const auto paths = PredictRelationPaths("q", h, clf, v, cfg);
    size_t k_pow = 1;
    for (size_t t = 0; t < h; ++t) k_pow *= 3;
    EXPECT_EQ(paths.size(), std::min<size_t>(k_pow, 10));
    if (h > 1) {
      const auto earlier = PredictRelationPaths("q", h - 1, clf, v, cfg);
      for (const auto& p : paths) {
        const RelationPath prefix(p.path.begin(), p.path.end() - 1);
        EXPECT_TRUE(std::any_of(earlier.begin(), earlier.end(),
                                [&](const auto& e) { return e.path == prefix; }));
      }
    }
  }
}

TEST(PredictRelationPathsTest, ClassifierFailureNamesStep) {
  const Vocabulary v = MakeVocab(3);
  const ThrowingClassifier clf({"r0", "r1", "r2"}, 1);
  try {
    PredictRelationPaths("q", 2, clf, v, RetrievalConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRetrieval);
    EXPECT_NE(std::string(e.what()).find("step 2"), std::string::npos)
        << e.what();
  }
}

TEST(PredictRelationPathsTest, WrongLabelCountIsRetrievalError) {
  const Vocabulary v = MakeVocab(3);
  const HashedClassifier clf(4, 1);
  EXPECT_THROW(PredictRelationPaths("q", 1, clf, v, RetrievalConfig{}), Error);
}

ScoredRelationPath Ranked(RelationPath p, double log_score) {
  ScoredRelationPath s;
  s.path = std::move(p);
  s.log_score = log_score;
  return s;
}

TEST(SampleReasoningPathsTest, BudgetCutFromFirstPath) {
  std::ostringstream kb;
  for (int i = 0; i < 7; ++i) kb << "a|r1|b" << i << "\n";
  kb << "a|r2|c\n";
  const KnowledgeGraph g = FromText(kb.str());
  const RelationId r1 = *g.FindRelation("r1");
  const RelationId r2 = *g.FindRelation("r2");
  const std::vector<ScoredRelationPath> ranked = {Ranked({r1}, -0.1),
                                                  Ranked({r2}, -0.5)};
  RetrievalConfig cfg;
  cfg.m = 5;
  RetrievalDiagnostics diag;
  std::vector<size_t> source;
  const auto out =
      SampleReasoningPaths(ranked, g, *g.FindEntity("a"), cfg, &diag, &source);
  ASSERT_EQ(out.size(), 5u);
  for (const auto& p : out) EXPECT_EQ(p.relations(), RelationPath{r1});
  EXPECT_EQ(source, std::vector<size_t>(5, 0));
  EXPECT_EQ(diag.paths_tried, 1u);
}

TEST(SampleReasoningPathsTest, SequentialFillAndEmptyPaths) {
  std::ostringstream kb;
  kb << "a|p|x0\na|p|x1\na|q|y0\na|q|y1\n";
  for (int i = 0; i < 9; ++i) kb << "a|s|z" << i << "\n";
  kb << "b|u|c\n";
  const KnowledgeGraph g = FromText(kb.str());
  auto rel = [&](const char* n) { return *g.FindRelation(n); };
  const std::vector<ScoredRelationPath> ranked = {
      Ranked({rel("p")}, -0.1), Ranked({rel("u")}, -0.2),
      Ranked({rel("q")}, -0.3), Ranked({rel("s")}, -0.4)};
  RetrievalConfig cfg;
  RetrievalDiagnostics diag;
  std::vector<size_t> source;
  const auto out =
      SampleReasoningPaths(ranked, g, *g.FindEntity("a"), cfg, &diag, &source);
  ASSERT_EQ(out.size(), 5u);
  EXPECT_EQ(source, (std::vector<size_t>{0, 0, 2, 2, 3}));
  EXPECT_EQ(g.EntityName(out[4].triples[0].object), "z0");
  EXPECT_EQ(diag.paths_tried, 4u);
  EXPECT_EQ(diag.paths_empty, 1u);
}

TEST(SampleReasoningPathsTest, InvalidTopicIsRetrievalError) {
  const KnowledgeGraph g = FromText("a|r|b");
  try {
    SampleReasoningPaths({}, g, EntityId(42), RetrievalConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRetrieval);
  }
}

TEST(SampleReasoningPathsTest, MatchesFullGroundingOracle) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    std::ostringstream kb;
    for (int i = 0; i < 80; ++i) {
      kb << "n" << rng() % 20 << "|p" << rng() % 4 << "|n" << rng() % 20 << "\n";
    }
    const KnowledgeGraph g = FromText(kb.str(), true);
    std::vector<ScoredRelationPath> ranked;
    for (int i = 0; i < 6; ++i) {
      RelationPath p;
      for (size_t t = 0, h = 1 + rng() % 2; t < h; ++t) {
        p.push_back(RelationId(static_cast<uint32_t>(rng() % g.num_relations())));
      }
      ranked.push_back(Ranked(p, -static_cast<double>(i)));
    }
    RetrievalConfig cfg;
    cfg.m = 1 + rng() % 8;
    const EntityId topic(static_cast<uint32_t>(rng() % g.num_entities()));
    std::vector<ReasoningPath> want;
    for (const auto& r : ranked) {
      for (auto& p : GroundRelationPath(g, topic, r.path, 1 << 20)) {
        want.push_back(std::move(p));
      }
    }
    if (want.size() > cfg.m) want.resize(cfg.m);
    EXPECT_EQ(SampleReasoningPaths(ranked, g, topic, cfg), want);
  }
}

TEST(RetrieverTest, OracleRecoversGoldPaths) {
  testing::LayeredSpec spec;
  spec.questions = 40;
  const auto data = testing::MakeLayeredDataset(spec);
  const KnowledgeGraph g = FromText(data.kb_text, data.add_inverses);
  RetrievalConfig cfg;
  cfg.max_hops = 2;
  const auto hop = BuildOracleHopClassifier(data.questions, cfg.max_hops);
  const auto rel = BuildOracleRelationClassifier(data.questions, g);
  const Retriever retriever(g, hop.get(), *rel, cfg);
  for (const Question& q : data.questions) {
    const RetrievalResult r = retriever.Retrieve(q);
    EXPECT_EQ(r.hops, *q.gold_hops);
    ASSERT_FALSE(r.relation_paths.empty());
    EXPECT_EQ(r.relation_paths[0].path, ResolvePath(*q.gold_path, g));
    EXPECT_LE(r.reasoning_paths.size(), cfg.m);
    EXPECT_EQ(r.reasoning_paths.size(), r.reasoning_path_source.size());
  }
}

TEST(RetrieverTest, DeterministicAndValidatesInputs) {
  testing::LayeredSpec spec;
  spec.questions = 10;
  const auto data = testing::MakeLayeredDataset(spec);
  const KnowledgeGraph g = FromText(data.kb_text, data.add_inverses);
  const auto rel = BuildOracleRelationClassifier(data.questions, g);
  RetrievalConfig cfg;
  cfg.use_gold_hops = true;
  const Retriever retriever(g, nullptr, *rel, cfg);
  for (const Question& q : data.questions) {
    EXPECT_EQ(retriever.Retrieve(q), retriever.Retrieve(q));
  }
  Question unknown = data.questions[0];
  unknown.topic = "nobody";
  EXPECT_THROW(retriever.Retrieve(unknown), Error);

  const HashedClassifier wrong(3, 0);
  EXPECT_THROW(Retriever(g, nullptr, wrong, cfg), Error);
  cfg.use_gold_hops = false;
  EXPECT_THROW(Retriever(g, nullptr, *rel, cfg), Error);
}

}  // namespace
}  // namespace kgqa
