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

// kgqa: command-line driver for retrieval, rewriting, answering, corpus
// generation and evaluation.
//
// Every subcommand writes its outputs plus manifest.json into --out. Outputs
// are buffered in memory and only land on disk once the whole run succeeded,
// so a failed run leaves nothing behind.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kgqa/answer_eval.h"
#include "kgqa/backend.h"
#include "kgqa/corpusgen.h"
#include "kgqa/dataset_io.h"
#include "kgqa/error.h"
#include "kgqa/kg_store.h"
#include "kgqa/pipeline.h"
#include "kgqa/retrieve.h"
#include "kgqa/rewrite.h"
#include "kgqa/scorer.h"

namespace kgqa {
namespace {

constexpr char kVersion[] = "0.1.0";

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

struct Options {
  std::string command;
  std::string kg;
  bool add_inverses = false;
  std::string questions;
  std::string paths;  // MetaQA path annotations
  std::string retrievals;
  std::string paragraphs;
  std::string records;
  std::string out;
  std::string scorer_kind;

  size_t k = 3;
  size_t m = 5;
  size_t max_hops = 3;
  std::optional<size_t> max_paths_cap;
  bool gold_hops = false;

  std::vector<std::string> backends;
  std::string backend_config;
  size_t workers = 1;
  int64_t seed = 0;
  int max_new_tokens = 256;
  double temperature = 0.0;
  bool exclude_failed = false;
  size_t grounding_limit = 5;

  TrainConfig train;
};

// Files to publish, keyed by name inside --out.
using Outputs = std::map<std::string, std::string>;

// ---------------------------------------------------------------------------
// Backends

struct BackendSpecs {
  std::map<std::string, std::string> by_role;  // hop, relation, rewriter, qa
};

const std::vector<std::string>& Roles() {
  static const std::vector<std::string> roles = {"hop", "relation", "rewriter",
                                                 "qa"};
  return roles;
}

// "[role=]spec". A spec without a role fills the roles it can serve:
// oracle and native scorers both classifier roles, http every role.
BackendSpecs ParseBackends(const std::vector<std::string>& flags) {
  BackendSpecs specs;
  specs.by_role = {{"hop", "mock:oracle"},
                   {"relation", "mock:oracle"},
                   {"rewriter", "mock:rewriter"},
                   {"qa", "mock:qa"}};
  std::map<std::string, std::string> explicit_roles;
  for (const std::string& flag : flags) {
    const size_t eq = flag.find('=');
    const size_t colon = flag.find(':');
    if (eq != std::string::npos && (colon == std::string::npos || eq < colon)) {
      const std::string role = flag.substr(0, eq);
      if (std::find(Roles().begin(), Roles().end(), role) == Roles().end()) {
        Fail(ErrorCode::kConfig, "unknown backend role '" + role + "'");
      }
      explicit_roles[role] = flag.substr(eq + 1);
      continue;
    }
    if (flag == "mock:rewriter" || flag == "mock:rewriter-drop-terminal") {
      specs.by_role["rewriter"] = flag;
    } else if (flag == "mock:qa") {
      specs.by_role["qa"] = flag;
    } else if (flag == "mock:oracle" || flag.starts_with("native:")) {
      specs.by_role["hop"] = specs.by_role["relation"] = flag;
    } else if (flag.starts_with("http:")) {
      for (const std::string& role : Roles()) specs.by_role[role] = flag;
    } else {
      Fail(ErrorCode::kConfig, "unknown backend '" + flag + "'");
    }
  }
  for (auto& [role, spec] : explicit_roles) specs.by_role[role] = spec;
  return specs;
}

struct Backends {
  std::vector<std::shared_ptr<const void>> owned;
  const Classifier* hop = nullptr;
  const Classifier* relation = nullptr;
  const TextGenerator* rewriter = nullptr;
  const TextGenerator* qa = nullptr;
  ordered_json ids = ordered_json::object();

  template <typename T>
  const T* Keep(std::shared_ptr<T> p) {
    owned.push_back(p);
    return p.get();
  }
};

class BackendFactory {
 public:
  BackendFactory(const Options& opt, const KnowledgeGraph* g,
                 std::span<const Question> questions)
      : opt_(opt), g_(g), questions_(questions) {}

  Backends Build(const std::vector<std::string>& roles) {
    const BackendSpecs specs = ParseBackends(opt_.backends);
    Backends b;
    for (const std::string& role : roles) {
      const std::string& spec = specs.by_role.at(role);
      if (role == "hop" || role == "relation") {
        const Classifier* c = MakeClassifier(role, spec, b);
        (role == "hop" ? b.hop : b.relation) = c;
        b.ids[role] = c->backend_id();
      } else {
        const TextGenerator* t = MakeGenerator(role, spec, b);
        (role == "qa" ? b.qa : b.rewriter) = t;
        b.ids[role] = t->backend_id();
      }
    }
    return b;
  }

 private:
  std::shared_ptr<const HttpBackend> Http(const std::string& spec) {
    const std::string endpoint = spec.substr(5);
    if (auto it = http_.find(endpoint); it != http_.end()) return it->second;
    RemoteConfig cfg = opt_.backend_config.empty()
                           ? RemoteConfig{}
                           : RemoteConfig::FromFile(opt_.backend_config);
    cfg.ApplyEnvironment();
    cfg.endpoint = endpoint;  // the flag wins over KGQA_BACKEND_URL
    cfg.Validate();
    auto backend = std::make_shared<const HttpBackend>(cfg);
    http_[endpoint] = backend;
    return backend;
  }

  std::vector<std::string> Labels(const std::string& role) const {
    return role == "hop" ? HopLabels(opt_.max_hops) : RelationLabels(*g_);
  }

  const Classifier* MakeClassifier(const std::string& role,
                                   const std::string& spec, Backends& b) {
    if (spec == "mock:oracle") {
      if (role == "hop") {
        return b.Keep(std::shared_ptr<OracleClassifier>(
            BuildOracleHopClassifier(questions_, opt_.max_hops)));
      }
      return b.Keep(std::shared_ptr<OracleClassifier>(
          BuildOracleRelationClassifier(questions_, *g_)));
    }
    if (spec.starts_with("native:")) {
      auto clf = std::make_shared<NativeClassifier>(
          LinearClassifier::LoadFile(spec.substr(7)));
      if (clf->labels() != Labels(role)) {
        Fail(ErrorCode::kConfig, "model '" + spec.substr(7) +
                                     "' labels do not match the " + role +
                                     " label space");
      }
      return b.Keep(clf);
    }
    if (spec.starts_with("http:")) {
      return b.Keep(std::make_shared<RemoteClassifier>(
          Http(spec), role == "hop" ? "hops" : "relations", Labels(role)));
    }
    Fail(ErrorCode::kConfig, "backend '" + spec + "' cannot serve role " + role);
  }

  const TextGenerator* MakeGenerator(const std::string& role,
                                     const std::string& spec, Backends& b) {
    if (role == "rewriter" && spec == "mock:rewriter") {
      return b.Keep(std::make_shared<MockRewriter>(false));
    }
    if (role == "rewriter" && spec == "mock:rewriter-drop-terminal") {
      return b.Keep(std::make_shared<MockRewriter>(true));
    }
    if (role == "qa" && spec == "mock:qa") {
      std::vector<std::string> lexicon;
      if (g_ != nullptr) {
        for (size_t e = 0; e < g_->num_entities(); ++e) {
          lexicon.push_back(g_->EntityName(EntityId(static_cast<uint32_t>(e))));
        }
      }
      return b.Keep(std::make_shared<MockQA>(lexicon));
    }
    if (spec.starts_with("http:")) {
      return b.Keep(std::make_shared<RemoteGenerator>(Http(spec)));
    }
    Fail(ErrorCode::kConfig, "backend '" + spec + "' cannot serve role " + role);
  }

  const Options& opt_;
  const KnowledgeGraph* g_;
  std::span<const Question> questions_;
  std::map<std::string, std::shared_ptr<const HttpBackend>> http_;
};

// ---------------------------------------------------------------------------
// Inputs

void RequireFile(const std::string& path, const std::string& flag) {
  if (path.empty()) Fail(ErrorCode::kConfig, flag + " is required");
  if (!fs::is_regular_file(path)) {
    Fail(ErrorCode::kIo, flag + " '" + path + "' does not exist");
  }
}

KnowledgeGraph LoadGraph(const Options& opt) {
  RequireFile(opt.kg, "--kg");
  return LoadKgFile(opt.kg, LoadOptions{.add_inverses = opt.add_inverses});
}

// Files ending in .jsonl are generic records; anything else is MetaQA text
// with optional --paths annotations.
std::vector<Question> LoadQuestions(const Options& opt, const KnowledgeGraph& g,
                                    LoadStats* stats) {
  RequireFile(opt.questions, "--questions");
  if (opt.questions.ends_with(".jsonl")) {
    std::vector<Question> qs = LoadGenericFile(opt.questions, stats);
    size_t skipped = 0;
    qs = ResolveTopics(std::move(qs), g, &skipped);
    stats->skipped_unknown_topic += skipped;
    stats->loaded = qs.size();
    return qs;
  }
  if (!opt.paths.empty()) RequireFile(opt.paths, "--paths");
  return LoadMetaQaFile(opt.questions, opt.paths, &g, stats);
}

std::vector<nlohmann::json> LoadRecords(const std::string& path,
                                        const std::string& flag) {
  RequireFile(path, flag);
  return ReadJsonLinesFile(path);
}

// Records read back from disk must line up with the questions by id.
void CheckAligned(std::span<const Question> questions,
                  const std::vector<std::string>& ids, const std::string& what) {
  if (ids.size() != questions.size()) {
    Fail(ErrorCode::kData, what + " has " + std::to_string(ids.size()) +
                               " records for " +
                               std::to_string(questions.size()) + " questions");
  }
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] != questions[i].id) {
      Fail(ErrorCode::kData, what + " record " + std::to_string(i + 1) +
                                 " is for question '" + ids[i] +
                                 "', expected '" + questions[i].id + "'");
    }
  }
}

StageOptions MakeStageOptions(const Options& opt) {
  StageOptions s;
  s.retrieval.k = opt.k;
  s.retrieval.m = opt.m;
  s.retrieval.max_hops = opt.max_hops;
  s.retrieval.use_gold_hops = opt.gold_hops;
  s.retrieval.max_paths_cap = opt.max_paths_cap;
  s.retrieval.Validate();
  s.generation.max_new_tokens = opt.max_new_tokens;
  s.generation.temperature = opt.temperature;
  s.generation.seed = opt.seed;
  s.eval.exclude_failed = opt.exclude_failed;
  s.workers = opt.workers;
  if (s.workers == 0) Fail(ErrorCode::kConfig, "--workers must be positive");
  return s;
}

// ---------------------------------------------------------------------------
// Serialization helpers

template <typename Rows, typename F>
std::string Lines(const Rows& rows, F to_json) {
  std::ostringstream out;
  for (const auto& row : rows) out << to_json(row).dump() << '\n';
  return out.str();
}

template <typename Json>
std::string Pretty(const Json& j) {
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Subcommands. Each fills outputs and the manifest's backend map.

struct RunResult {
  Outputs outputs;
  ordered_json backends = ordered_json::object();
  ordered_json stats = ordered_json::object();
  std::string report;  // printed to stdout on success
};

RunResult RunRetrieve(const Options& opt) {
  const KnowledgeGraph g = LoadGraph(opt);
  LoadStats stats;
  const auto questions = LoadQuestions(opt, g, &stats);
  const StageOptions so = MakeStageOptions(opt);
  BackendFactory factory(opt, &g, questions);
  Backends b = factory.Build(opt.gold_hops ? std::vector<std::string>{"relation"}
                                           : std::vector<std::string>{"hop", "relation"});
  const auto results = RunRetrieveStage(
      questions, g, {b.hop, b.relation, nullptr, nullptr}, so);
  RunResult r;
  std::ostringstream out;
  for (size_t i = 0; i < results.size(); ++i) {
    out << RetrievalToJson(results[i], questions[i], g).dump() << '\n';
  }
  r.outputs["retrievals.jsonl"] = out.str();
  r.backends = b.ids;
  r.stats["questions"] = stats.ToJson();
  r.report = std::to_string(results.size()) + " retrieval records\n";
  return r;
}

RunResult RunRewrite(const Options& opt) {
  const KnowledgeGraph g = LoadGraph(opt);
  const auto rows = LoadRecords(opt.retrievals, "--retrievals");
  std::vector<RetrievalResult> retrievals;
  for (const auto& j : rows) retrievals.push_back(RetrievalFromJson(j, g));
  const StageOptions so = MakeStageOptions(opt);
  BackendFactory factory(opt, &g, {});
  Backends b = factory.Build({"rewriter"});
  const auto paragraphs = RunRewriteStage(retrievals, g, *b.rewriter, so);
  RunResult r;
  r.outputs["paragraphs.jsonl"] = Lines(
      paragraphs, [&](const ParagraphRecord& p) { return ParagraphToJson(p, g); });
  r.backends = b.ids;
  r.report = std::to_string(paragraphs.size()) + " paragraph records\n";
  return r;
}

void AddSummary(RunResult& r, const EvalSummary& summary) {
  r.outputs["summary.json"] = Pretty(summary.ToJson());
  r.report = summary.Table();
}

RunResult RunAnswer(const Options& opt) {
  const KnowledgeGraph g = LoadGraph(opt);
  LoadStats stats;
  const auto questions = LoadQuestions(opt, g, &stats);
  const auto rows = LoadRecords(opt.paragraphs, "--paragraphs");
  std::vector<ParagraphRecord> paragraphs;
  std::vector<std::string> ids;
  for (const auto& j : rows) {
    paragraphs.push_back(ParagraphFromJson(j, g));
    ids.push_back(paragraphs.back().question_id);
  }
  CheckAligned(questions, ids, "--paragraphs");
  const StageOptions so = MakeStageOptions(opt);
  BackendFactory factory(opt, &g, questions);
  Backends b = factory.Build({"qa"});
  const auto records = RunAnswerStage(questions, paragraphs, *b.qa, so);
  RunResult r;
  r.outputs["records.jsonl"] =
      Lines(records, [](const QARecord& q) { return q.ToJson(); });
  AddSummary(r, EvaluateDataset(records, so.eval));
  r.backends = b.ids;
  r.stats["questions"] = stats.ToJson();
  return r;
}

RunResult RunFused(const Options& opt) {
  const KnowledgeGraph g = LoadGraph(opt);
  LoadStats stats;
  const auto questions = LoadQuestions(opt, g, &stats);
  const StageOptions so = MakeStageOptions(opt);
  BackendFactory factory(opt, &g, questions);
  std::vector<std::string> roles = {"relation", "rewriter", "qa"};
  if (!opt.gold_hops) roles.insert(roles.begin(), "hop");
  Backends b = factory.Build(roles);
  const PipelineOutput out =
      RunPipeline(questions, g, {b.hop, b.relation, b.rewriter, b.qa}, so);
  RunResult r;
  std::ostringstream retrievals;
  for (size_t i = 0; i < questions.size(); ++i) {
    retrievals << RetrievalToJson(out.retrievals[i], questions[i], g).dump()
               << '\n';
  }
  r.outputs["retrievals.jsonl"] = retrievals.str();
  r.outputs["paragraphs.jsonl"] = Lines(
      out.paragraphs, [&](const ParagraphRecord& p) { return ParagraphToJson(p, g); });
  r.outputs["records.jsonl"] =
      Lines(out.records, [](const QARecord& q) { return q.ToJson(); });
  AddSummary(r, out.summary);
  r.backends = b.ids;
  r.stats["questions"] = stats.ToJson();
  return r;
}

RunResult RunCorpusgen(const Options& opt) {
  const KnowledgeGraph g = LoadGraph(opt);
  LoadStats stats;
  const auto questions = LoadQuestions(opt, g, &stats);
  CorpusConfig cfg;
  cfg.grounding_limit = opt.grounding_limit;
  cfg.generation = MakeStageOptions(opt).generation;
  cfg.workers = opt.workers;
  BackendFactory factory(opt, &g, questions);
  Backends b = factory.Build({"rewriter", "qa"});
  const CorpusRun run = GenerateCorpus(questions, g, *b.rewriter, *b.qa, cfg);
  RunResult r;
  std::ostringstream corpus;
  EmitCorpus(run.pairs, corpus);
  r.outputs["corpus.jsonl"] = corpus.str();
  ordered_json summary = ordered_json::parse(run.summary.ToJson().dump());
  summary["diagnostics"] = run.diagnostics;
  r.outputs["corpus_summary.json"] = Pretty(summary);
  r.backends = b.ids;
  r.stats["questions"] = stats.ToJson();
  r.report = "kept " + std::to_string(run.summary.kept) + " of " +
             std::to_string(questions.size()) + " questions\n";
  return r;
}

RunResult RunEval(const Options& opt) {
  const auto rows = LoadRecords(opt.records, "--records");
  std::vector<QARecord> records;
  for (const auto& j : rows) records.push_back(QARecord::FromJson(j));
  EvalOptions eo;
  eo.exclude_failed = opt.exclude_failed;
  RunResult r;
  AddSummary(r, EvaluateDataset(records, eo));
  return r;
}

RunResult RunTrainScorer(const Options& opt) {
  const KnowledgeGraph g = LoadGraph(opt);
  LoadStats stats;
  const auto questions = LoadQuestions(opt, g, &stats);
  const ClassifierDatasets sets = BuildClassifierDatasets(questions, g);
  const bool hop = opt.scorer_kind == "hop";
  TrainConfig cfg = opt.train;
  cfg.seed = static_cast<uint64_t>(opt.seed);
  TrainReport report;
  const LinearClassifier model =
      hop ? Train(sets.hops, HopLabels(opt.max_hops), "hops", cfg, &report)
          : Train(sets.relation_steps, RelationLabels(g), "relations", cfg,
                  &report);
  std::ostringstream bytes;
  model.Save(bytes);
  RunResult r;
  const std::string name = opt.scorer_kind + "_scorer.bin";
  r.outputs[name] = bytes.str();
  ordered_json rep;
  rep["kind"] = opt.scorer_kind;
  rep["examples"] = hop ? sets.hops.size() : sets.relation_steps.size();
  rep["final_loss"] = report.final_loss;
  rep["accuracy"] = report.accuracy;
  rep["epoch_loss"] = report.epoch_loss;
  r.outputs["train_report.json"] = Pretty(rep);
  r.backends["scorer"] = "native:" + name;
  r.stats["questions"] = stats.ToJson();
  char line[128];
  std::snprintf(line, sizeof(line), "final loss %.6f, training accuracy %.4f\n",
                report.final_loss, report.accuracy);
  r.report = line;
  return r;
}

// ---------------------------------------------------------------------------
// Manifest and publishing

ordered_json ConfigJson(const Options& opt) {
  ordered_json c;
  c["command"] = opt.command;
  if (!opt.scorer_kind.empty()) c["scorer_kind"] = opt.scorer_kind;
  c["kg"] = opt.kg;
  c["add_inverses"] = opt.add_inverses;
  c["questions"] = opt.questions;
  c["paths"] = opt.paths;
  c["retrievals"] = opt.retrievals;
  c["paragraphs"] = opt.paragraphs;
  c["records"] = opt.records;
  c["k"] = opt.k;
  c["m"] = opt.m;
  c["max_hops"] = opt.max_hops;
  c["max_paths_cap"] = opt.max_paths_cap ? ordered_json(*opt.max_paths_cap)
                                         : ordered_json(nullptr);
  c["gold_hops"] = opt.gold_hops;
  c["backends"] = opt.backends;
  c["backend_config"] = opt.backend_config;
  c["workers"] = opt.workers;
  c["max_new_tokens"] = opt.max_new_tokens;
  c["temperature"] = opt.temperature;
  c["exclude_failed"] = opt.exclude_failed;
  c["grounding_limit"] = opt.grounding_limit;
  if (opt.command == "train-scorer") {
    c["train"] = {{"learning_rate", opt.train.learning_rate},
                  {"epochs", opt.train.epochs},
                  {"l2_penalty", opt.train.l2_penalty},
                  {"feature_dim", opt.train.feature_dim},
                  {"batch_size", opt.train.batch_size}};
  }
  return c;
}

std::string Hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

ordered_json Manifest(const Options& opt, const RunResult& r) {
  const ordered_json config = ConfigJson(opt);
  ordered_json m;
  m["tool"] = "kgqa";
  m["version"] = kVersion;
  m["json_library"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                      std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                      std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  m["config_hash"] = "fnv1a64:" + Hex64(Fnv1a64(config.dump()));
  m["seeds"] = {{"run", opt.seed}};
  if (opt.command == "train-scorer") m["seeds"]["shuffle"] = opt.seed;
  m["backends"] = r.backends;
  m["config"] = config;
  m["stats"] = r.stats;
  ordered_json files = ordered_json::object();
  for (const auto& [name, bytes] : r.outputs) {
    files[name] = "fnv1a64:" + Hex64(Fnv1a64(bytes));
  }
  m["outputs"] = files;
  return m;
}

// Writes each file to a temporary sibling first, then renames, so readers
// never see a half-written output.
void Publish(const std::string& dir, const Outputs& outputs) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create '" + dir + "': " + ec.message());
  std::vector<std::pair<fs::path, fs::path>> staged;
  for (const auto& [name, bytes] : outputs) {
    const fs::path final_path = fs::path(dir) / name;
    const fs::path tmp = fs::path(dir) / ("." + name + ".tmp");
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << bytes;
    out.close();
    if (!out) {
      for (const auto& [t, f] : staged) fs::remove(t, ec);
      fs::remove(tmp, ec);
      Fail(ErrorCode::kIo, "cannot write '" + tmp.string() + "'");
    }
    staged.emplace_back(tmp, final_path);
  }
  for (const auto& [tmp, final_path] : staged) {
    fs::rename(tmp, final_path, ec);
    if (ec) Fail(ErrorCode::kIo, "cannot rename to '" + final_path.string() + "'");
  }
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

int Report(std::string_view code, const std::string& reason) {
  std::fprintf(stderr, "error code=%.*s reason=\"%s\"\n",
               static_cast<int>(code.size()), code.data(),
               Escape(reason).c_str());
  return 1;
}

// ---------------------------------------------------------------------------

void AddCommon(CLI::App* sub, Options& opt) {
  sub->add_option("--out", opt.out, "Output directory")
      ->required()
      ->envname("KGQA_OUT");
  sub->add_option("--seed", opt.seed, "Run seed")->envname("KGQA_SEED");
  sub->add_option("--workers", opt.workers, "Worker threads")
      ->envname("KGQA_WORKERS");
}

void AddGraph(CLI::App* sub, Options& opt) {
  sub->add_option("--kg", opt.kg, "Knowledge graph file (s|r|o lines)")
      ->envname("KGQA_KG");
  sub->add_flag("--add-inverses", opt.add_inverses,
                "Add an inverse edge for every triple")
      ->envname("KGQA_ADD_INVERSES");
}

void AddQuestions(CLI::App* sub, Options& opt) {
  sub->add_option("--questions", opt.questions,
                  "Questions: .jsonl records or MetaQA text")
      ->envname("KGQA_QUESTIONS");
  sub->add_option("--paths", opt.paths,
                  "MetaQA relation path annotations (id<TAB>r1|r2)")
      ->envname("KGQA_PATHS");
}

void AddRetrieval(CLI::App* sub, Options& opt) {
  sub->add_option("--k", opt.k, "Relations kept per path per step")
      ->envname("KGQA_K");
  sub->add_option("--m", opt.m, "Reasoning paths per question")
      ->envname("KGQA_M");
  sub->add_option("--max-hops", opt.max_hops, "Largest hop count")
      ->envname("KGQA_MAX_HOPS");
  sub->add_option("--max-paths-cap", opt.max_paths_cap,
                  "Bound on relation paths kept per step")
      ->envname("KGQA_MAX_PATHS_CAP");
  sub->add_flag("--gold-hops", opt.gold_hops,
                "Use annotated hop counts instead of the hop classifier")
      ->envname("KGQA_GOLD_HOPS");
}

void AddBackends(CLI::App* sub, Options& opt) {
  sub->add_option("--backend", opt.backends,
                  "[role=]spec; roles hop, relation, rewriter, qa; specs "
                  "mock:oracle, mock:rewriter, mock:rewriter-drop-terminal, "
                  "mock:qa, native:PATH, http:URL")
      ->envname("KGQA_BACKEND")
      ->delimiter(',');
  sub->add_option("--backend-config", opt.backend_config,
                  "JSON file with HTTP client settings")
      ->envname("KGQA_BACKEND_CONFIG");
  sub->add_option("--max-new-tokens", opt.max_new_tokens)
      ->envname("KGQA_MAX_NEW_TOKENS");
  sub->add_option("--temperature", opt.temperature)
      ->envname("KGQA_TEMPERATURE");
}

void AddEval(CLI::App* sub, Options& opt) {
  sub->add_flag("--exclude-failed", opt.exclude_failed,
                "Leave failed backend calls out of hit@1")
      ->envname("KGQA_EXCLUDE_FAILED");
}

}  // namespace
}  // namespace kgqa

int main(int argc, char** argv) {
  using namespace kgqa;
  Options opt;
  CLI::App app{"Knowledge graph question answering toolkit", "kgqa"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML or INI file with option values");
  app.require_subcommand(1);

  std::map<CLI::App*, RunResult (*)(const Options&)> handlers;

  auto* train = app.add_subcommand("train-scorer", "Train a hop or relation scorer");
  train->add_option("kind", opt.scorer_kind, "hop or relation")
      ->required()
      ->check(CLI::IsMember({"hop", "relation"}));
  AddCommon(train, opt);
  AddGraph(train, opt);
  AddQuestions(train, opt);
  train->add_option("--max-hops", opt.max_hops)->envname("KGQA_MAX_HOPS");
  train->add_option("--epochs", opt.train.epochs)->envname("KGQA_EPOCHS");
  train->add_option("--learning-rate", opt.train.learning_rate)
      ->envname("KGQA_LEARNING_RATE");
  train->add_option("--l2", opt.train.l2_penalty)->envname("KGQA_L2");
  train->add_option("--batch-size", opt.train.batch_size)
      ->envname("KGQA_BATCH_SIZE");
  train->add_option("--feature-dim", opt.train.feature_dim)
      ->envname("KGQA_FEATURE_DIM");
  handlers[train] = RunTrainScorer;

  auto* retrieve = app.add_subcommand("retrieve", "Questions to retrieval records");
  AddCommon(retrieve, opt);
  AddGraph(retrieve, opt);
  AddQuestions(retrieve, opt);
  AddRetrieval(retrieve, opt);
  AddBackends(retrieve, opt);
  handlers[retrieve] = RunRetrieve;

  auto* rewrite = app.add_subcommand("rewrite", "Retrieval records to paragraphs");
  AddCommon(rewrite, opt);
  AddGraph(rewrite, opt);
  rewrite->add_option("--retrievals", opt.retrievals)->envname("KGQA_RETRIEVALS");
  AddBackends(rewrite, opt);
  handlers[rewrite] = RunRewrite;

  auto* answer = app.add_subcommand("answer", "Paragraphs and questions to answers");
  AddCommon(answer, opt);
  AddGraph(answer, opt);
  AddQuestions(answer, opt);
  answer->add_option("--paragraphs", opt.paragraphs)->envname("KGQA_PARAGRAPHS");
  AddBackends(answer, opt);
  AddEval(answer, opt);
  handlers[answer] = RunAnswer;

  auto* pipeline = app.add_subcommand("pipeline", "Retrieve, rewrite and answer");
  AddCommon(pipeline, opt);
  AddGraph(pipeline, opt);
  AddQuestions(pipeline, opt);
  AddRetrieval(pipeline, opt);
  AddBackends(pipeline, opt);
  AddEval(pipeline, opt);
  handlers[pipeline] = RunFused;

  auto* corpus = app.add_subcommand("corpusgen", "Build a graph-to-text corpus");
  AddCommon(corpus, opt);
  AddGraph(corpus, opt);
  AddQuestions(corpus, opt);
  AddBackends(corpus, opt);
  corpus->add_option("--grounding-limit", opt.grounding_limit)
      ->envname("KGQA_GROUNDING_LIMIT");
  handlers[corpus] = RunCorpusgen;

  auto* eval = app.add_subcommand("eval", "Recompute the summary from records");
  AddCommon(eval, opt);
  eval->add_option("--records", opt.records)->envname("KGQA_RECORDS");
  AddEval(eval, opt);
  handlers[eval] = RunEval;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Report("usage", e.what());
  }

  CLI::App* chosen = app.get_subcommands().front();
  opt.command = chosen->get_name();
  try {
    RunResult result = handlers.at(chosen)(opt);
    result.outputs["manifest.json"] = Pretty(Manifest(opt, result));
    Publish(opt.out, result.outputs);
    std::fputs(result.report.c_str(), stdout);
  } catch (const Error& e) {
    return Report(ErrorCodeName(e.code()), e.what());
  } catch (const std::exception& e) {
    return Report("internal", e.what());
  }
  return 0;
}
