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

#include "kgqa/kg_store.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <utility>

#include "kgqa/error.h"
#include "kgqa/text_util.h"

namespace kgqa {

RelationPath ReasoningPath::relations() const {
  RelationPath out;
  out.reserve(triples.size());
  for (const Triple& t : triples) out.push_back(t.relation);
  return out;
}

uint32_t Vocabulary::Intern(std::string_view name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<uint32_t>(names_.size());
  const std::string& stored = names_.emplace_back(name);
  index_.emplace(std::string_view(stored), id);
  return id;
}

std::optional<uint32_t> Vocabulary::Find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

size_t Vocabulary::MemoryUsage() const {
  size_t bytes = names_.size() * sizeof(std::string);
  for (const std::string& s : names_) {
    // Heap allocation only past the small-string buffer.
    if (s.capacity() > 15) bytes += s.capacity() + 1;
  }
  // Node (key, value, next pointer, cached hash) plus bucket array.
  bytes += index_.size() * (sizeof(std::string_view) + sizeof(uint32_t) +
                            2 * sizeof(void*));
  bytes += index_.bucket_count() * sizeof(void*);
  return bytes;
}

nlohmann::json GraphSummary::ToJson() const {
  return nlohmann::json{{"entities", entities},
                        {"relations", relations},
                        {"triples", triples},
                        {"duplicates_dropped", duplicates_dropped},
                        {"inverses_added", inverses_added}};
}

std::optional<EntityId> KnowledgeGraph::FindEntity(std::string_view name) const {
  if (auto id = entities_.Find(name)) return EntityId(*id);
  return std::nullopt;
}

std::optional<RelationId> KnowledgeGraph::FindRelation(
    std::string_view name) const {
  if (auto id = relations_.Find(name)) return RelationId(*id);
  return std::nullopt;
}

const std::string& KnowledgeGraph::EntityName(EntityId e) const {
  if (!IsValid(e)) {
    Fail(ErrorCode::kUsage, "invalid entity id " + std::to_string(e.value));
  }
  return entities_.Name(e.value);
}

const std::string& KnowledgeGraph::RelationName(RelationId r) const {
  if (!IsValid(r)) {
    Fail(ErrorCode::kUsage, "invalid relation id " + std::to_string(r.value));
  }
  return relations_.Name(r.value);
}

std::span<const EntityId> KnowledgeGraph::Neighbors(EntityId e,
                                                    RelationId r) const {
  if (!IsValid(e) || !IsValid(r)) {
    Fail(ErrorCode::kUsage, "neighbors: invalid id (entity " +
                                std::to_string(e.value) + ", relation " +
                                std::to_string(r.value) + ")");
  }
  const auto first = run_relation_.begin() + subject_runs_[e.value];
  const auto last = run_relation_.begin() + subject_runs_[e.value + 1];
  const auto it = std::lower_bound(first, last, r);
  if (it == last || *it != r) return {};
  const size_t run = static_cast<size_t>(it - run_relation_.begin());
  return std::span<const EntityId>(objects_).subspan(
      run_objects_[run], run_objects_[run + 1] - run_objects_[run]);
}

std::span<const RelationId> KnowledgeGraph::RelationsOf(EntityId e) const {
  if (!IsValid(e)) {
    Fail(ErrorCode::kUsage, "invalid entity id " + std::to_string(e.value));
  }
  return std::span<const RelationId>(run_relation_)
      .subspan(subject_runs_[e.value],
               subject_runs_[e.value + 1] - subject_runs_[e.value]);
}

void KnowledgeGraph::WriteLines(std::ostream& out) const {
  for (size_t i = 0; i < source_triples_; ++i) {
    const Triple& t = triples_[i];
    out << entities_.Name(t.subject.value) << '|'
        << relations_.Name(t.relation.value) << '|'
        << entities_.Name(t.object.value) << '\n';
  }
}

size_t KnowledgeGraph::MemoryUsage() const {
  return entities_.MemoryUsage() + relations_.MemoryUsage() +
         triples_.capacity() * sizeof(Triple) +
         subject_runs_.capacity() * sizeof(uint32_t) +
         run_relation_.capacity() * sizeof(RelationId) +
         run_objects_.capacity() * sizeof(uint32_t) +
         objects_.capacity() * sizeof(EntityId);
}

void KnowledgeGraph::BuildIndex() {
  std::vector<Triple> sorted(triples_);
  std::sort(sorted.begin(), sorted.end());

  subject_runs_.assign(entities_.size() + 1, 0);
  run_relation_.clear();
  run_objects_.clear();
  objects_.clear();
  objects_.reserve(sorted.size());

  for (size_t i = 0; i < sorted.size(); ++i) {
    const Triple& t = sorted[i];
    const bool new_run = i == 0 || sorted[i - 1].subject != t.subject ||
                         sorted[i - 1].relation != t.relation;
    if (new_run) {
      run_relation_.push_back(t.relation);
      run_objects_.push_back(static_cast<uint32_t>(objects_.size()));
      ++subject_runs_[t.subject.value + 1];
    }
    objects_.push_back(t.object);
  }
  run_objects_.push_back(static_cast<uint32_t>(objects_.size()));
  std::partial_sum(subject_runs_.begin(), subject_runs_.end(),
                   subject_runs_.begin());
  run_relation_.shrink_to_fit();
  run_objects_.shrink_to_fit();
}

namespace {

// Marks every triple that repeats an earlier one. Sorting (triple, position)
// keeps the first occurrence of each run.
std::vector<bool> MarkDuplicates(const std::vector<Triple>& triples) {
  std::vector<uint32_t> order(triples.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (triples[a] != triples[b]) return triples[a] < triples[b];
    return a < b;
  });
  std::vector<bool> duplicate(triples.size(), false);
  for (size_t i = 1; i < order.size(); ++i) {
    if (triples[order[i]] == triples[order[i - 1]]) duplicate[order[i]] = true;
  }
  return duplicate;
}

}  // namespace

KnowledgeGraph LoadKg(std::istream& in, const LoadOptions& options) {
  KnowledgeGraph g;
  std::vector<Triple> raw;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = Trim(line);
    if (view.empty()) continue;
    const size_t p1 = view.find('|');
    const size_t p2 = p1 == std::string_view::npos ? p1 : view.find('|', p1 + 1);
    if (p2 == std::string_view::npos ||
        view.find('|', p2 + 1) != std::string_view::npos) {
      Fail(ErrorCode::kParse, "line " + std::to_string(line_no) +
                                  ": expected 3 '|'-separated fields");
    }
    const std::string_view s = Trim(view.substr(0, p1));
    const std::string_view r = Trim(view.substr(p1 + 1, p2 - p1 - 1));
    const std::string_view o = Trim(view.substr(p2 + 1));
    if (s.empty() || r.empty() || o.empty()) {
      Fail(ErrorCode::kParse,
           "line " + std::to_string(line_no) + ": empty field");
    }
    const EntityId subject(g.entities_.Intern(s));
    const RelationId relation(g.relations_.Intern(r));
    const EntityId object(g.entities_.Intern(o));
    raw.push_back(Triple{subject, relation, object});
  }
  if (in.bad()) Fail(ErrorCode::kIo, "read failure while loading KB");

  const std::vector<bool> duplicate = MarkDuplicates(raw);
  g.triples_.reserve(raw.size() * (options.add_inverses ? 2 : 1));
  size_t dropped = 0;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (duplicate[i]) {
      ++dropped;
    } else {
      g.triples_.push_back(raw[i]);
    }
  }
  std::vector<Triple>().swap(raw);
  g.source_triples_ = g.triples_.size();

  if (options.add_inverses) {
    const size_t base_relations = g.relations_.size();
    for (size_t r = 0; r < base_relations; ++r) {
      const std::string name =
          g.relations_.Name(static_cast<uint32_t>(r)) +
          std::string(KnowledgeGraph::kInverseSuffix);
      if (g.relations_.Find(name)) {
        Fail(ErrorCode::kConfig, "inverse relation name '" + name +
                                     "' collides with an existing relation");
      }
    }
    // Inverse of relation r is r + base_relations.
    for (size_t r = 0; r < base_relations; ++r) {
      g.relations_.Intern(g.relations_.Name(static_cast<uint32_t>(r)) +
                          std::string(KnowledgeGraph::kInverseSuffix));
    }
    const auto offset = static_cast<uint32_t>(base_relations);
    for (size_t i = 0; i < g.source_triples_; ++i) {
      const Triple t = g.triples_[i];
      g.triples_.push_back(
          Triple{t.object, RelationId(t.relation.value + offset), t.subject});
    }
    g.inverses_added_ = true;
  }
  g.triples_.shrink_to_fit();
  g.BuildIndex();

  g.summary_ = GraphSummary{g.entities_.size(), g.relations_.size(),
                            g.triples_.size(), dropped, g.inverses_added_};

  const size_t used = g.MemoryUsage();
  if (used > options.memory_budget_bytes) {
    Fail(ErrorCode::kConfig,
         "graph needs " + std::to_string(used) + " bytes, budget is " +
             std::to_string(options.memory_budget_bytes));
  }
  return g;
}

KnowledgeGraph LoadKgFile(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open KB file '" + path + "'");
  return LoadKg(in, options);
}

std::vector<ReasoningPath> GroundRelationPath(const KnowledgeGraph& g,
                                              EntityId topic,
                                              const RelationPath& path,
                                              size_t limit) {
  std::vector<ReasoningPath> out;
  if (limit == 0) Fail(ErrorCode::kUsage, "grounding limit must be >= 1");
  if (path.empty() || !g.IsValid(topic)) return out;
  for (RelationId r : path) {
    if (!g.IsValid(r)) return out;
  }

  std::vector<Triple> chain;
  chain.reserve(path.size());
  auto expand = [&](auto&& self, EntityId at, size_t depth) -> void {
    if (out.size() >= limit) return;
    if (depth == path.size()) {
      out.push_back(ReasoningPath{chain});
      return;
    }
    for (EntityId next : g.Neighbors(at, path[depth])) {
      chain.push_back(Triple{at, path[depth], next});
      self(self, next, depth + 1);
      chain.pop_back();
      if (out.size() >= limit) return;
    }
  };
  expand(expand, topic, 0);
  return out;
}

}  // namespace kgqa
