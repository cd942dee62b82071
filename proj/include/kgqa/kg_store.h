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

// In-memory knowledge graph: interned entity / relation vocabularies, the
// deduplicated triple list, and a two-level CSR forward index
//
//   subject -> [relation runs] -> [objects]
//
// Relation runs within a subject and objects within a run are sorted
// ascending by id, so neighbor lookups are a binary search over the runs of
// one subject and every traversal is deterministic.

#ifndef KGQA_KG_STORE_H_
#define KGQA_KG_STORE_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace kgqa {

template <typename Tag>
struct DenseId {
  uint32_t value = 0;

  constexpr DenseId() = default;
  constexpr explicit DenseId(uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(DenseId, DenseId) = default;
};

using EntityId = DenseId<struct EntityTag>;
using RelationId = DenseId<struct RelationTag>;

struct Triple {
  EntityId subject;
  RelationId relation;
  EntityId object;

  friend constexpr auto operator<=>(const Triple&, const Triple&) = default;
};

// Schema-level hop sequence, e.g. [directed_by, directed_by_inverse].
using RelationPath = std::vector<RelationId>;

// A grounding of a RelationPath: triples[k].object == triples[k+1].subject.
struct ReasoningPath {
  std::vector<Triple> triples;

  RelationPath relations() const;
  friend bool operator==(const ReasoningPath&, const ReasoningPath&) = default;
};

// Bijective string <-> dense id table. Ids are assigned in first-intern order.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(const Vocabulary&) = delete;
  Vocabulary& operator=(const Vocabulary&) = delete;
  Vocabulary(Vocabulary&&) = default;
  Vocabulary& operator=(Vocabulary&&) = default;

  uint32_t Intern(std::string_view name);
  std::optional<uint32_t> Find(std::string_view name) const;
  const std::string& Name(uint32_t id) const { return names_[id]; }
  size_t size() const { return names_.size(); }

  size_t MemoryUsage() const;

 private:
  // deque keeps element addresses stable, so the map can key on views.
  std::deque<std::string> names_;
  std::unordered_map<std::string_view, uint32_t> index_;
};

struct GraphSummary {
  size_t entities = 0;
  size_t relations = 0;
  size_t triples = 0;
  size_t duplicates_dropped = 0;
  bool inverses_added = false;

  nlohmann::json ToJson() const;
};

struct LoadOptions {
  bool add_inverses = false;
  // Upper bound on KnowledgeGraph::MemoryUsage() after load. 1 GiB covers a
  // WebQSP-scale graph (5.7M triples, 1.8M entities) with headroom.
  size_t memory_budget_bytes = size_t{1} << 30;
};

class KnowledgeGraph {
 public:
  static constexpr std::string_view kInverseSuffix = "_inverse";

  KnowledgeGraph(KnowledgeGraph&&) = default;
  KnowledgeGraph& operator=(KnowledgeGraph&&) = default;

  const Vocabulary& entities() const { return entities_; }
  const Vocabulary& relations() const { return relations_; }
  size_t num_entities() const { return entities_.size(); }
  size_t num_relations() const { return relations_.size(); }

  // Source triples first (first-appearance order), then materialized
  // inverses in the same order.
  std::span<const Triple> triples() const { return triples_; }
  bool inverses_added() const { return inverses_added_; }
  const GraphSummary& summary() const { return summary_; }

  std::optional<EntityId> FindEntity(std::string_view name) const;
  std::optional<RelationId> FindRelation(std::string_view name) const;
  const std::string& EntityName(EntityId e) const;
  const std::string& RelationName(RelationId r) const;

  bool IsValid(EntityId e) const { return e.value < entities_.size(); }
  bool IsValid(RelationId r) const { return r.value < relations_.size(); }

  // Objects o with (e, r, o) in the graph, ascending. Throws kUsage on
  // invalid ids.
  std::span<const EntityId> Neighbors(EntityId e, RelationId r) const;

  // Relations leaving e, ascending.
  std::span<const RelationId> RelationsOf(EntityId e) const;

  // Writes the source triples (no materialized inverses) as
  // "subject|relation|object" lines. Reloading with the same add_inverses
  // flag reproduces the same ids and index.
  void WriteLines(std::ostream& out) const;

  // Bytes held by vocabularies, triples, and index (capacity based).
  size_t MemoryUsage() const;

 private:
  friend KnowledgeGraph LoadKg(std::istream& in, const LoadOptions& options);
  KnowledgeGraph() = default;

  void BuildIndex();

  Vocabulary entities_;
  Vocabulary relations_;
  std::vector<Triple> triples_;
  size_t source_triples_ = 0;
  bool inverses_added_ = false;
  GraphSummary summary_;

  // subject_runs_[e] .. subject_runs_[e + 1] index run_relation_.
  std::vector<uint32_t> subject_runs_;
  std::vector<RelationId> run_relation_;
  // run_objects_[i] .. run_objects_[i + 1] index objects_.
  std::vector<uint32_t> run_objects_;
  std::vector<EntityId> objects_;
};

// Parses "subject|relation|object" lines. Blank lines are skipped, fields are
// whitespace-trimmed, exact duplicates are collapsed.
// Errors: kParse (with 1-based line number) for a malformed line; kConfig when
// an inverse name collides with an existing relation or the memory budget is
// exceeded.
KnowledgeGraph LoadKg(std::istream& in, const LoadOptions& options);
KnowledgeGraph LoadKgFile(const std::string& path, const LoadOptions& options);

// Depth-first expansion of path from topic. Groundings come out in
// lexicographic order of their entity sequences; at most limit are returned.
// An unmatchable path yields an empty result.
std::vector<ReasoningPath> GroundRelationPath(const KnowledgeGraph& g,
                                              EntityId topic,
                                              const RelationPath& path,
                                              size_t limit);

}  // namespace kgqa

#endif  // KGQA_KG_STORE_H_
