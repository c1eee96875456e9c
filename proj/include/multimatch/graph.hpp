#pragma once

// Multi-partite similarity graph, cliques and matchings.
//
// A graph holds m sources, each with a list of opaque entity identifiers
// interned to dense indices, plus sparse nonnegative scores between entities
// of different sources. The graph is immutable once built and may be shared
// read-only between concurrent solver runs.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace multimatch {

using SourceIndex = std::uint32_t;
using EntityIndex = std::uint32_t;

// The null entity: "no counterpart in this source".
inline constexpr EntityIndex kNullEntity = std::numeric_limits<EntityIndex>::max();

struct EntityRef {
  SourceIndex source = 0;
  EntityIndex entity = kNullEntity;

  static constexpr EntityRef null(SourceIndex s) { return {s, kNullEntity}; }
  constexpr bool is_null() const { return entity == kNullEntity; }

  friend constexpr auto operator<=>(const EntityRef&, const EntityRef&) = default;
};

struct Neighbor {
  EntityRef ref;
  double score = 0.0;
};

// A stored cross-source score. Canonical orientation: a.source < b.source.
struct Edge {
  EntityRef a;
  EntityRef b;
  double score = 0.0;
};

class GraphBuilder;

class MultipartiteGraph {
 public:
  MultipartiteGraph() = default;

  std::size_t source_count() const { return source_names_.size(); }
  const std::string& source_name(SourceIndex s) const { return source_names_.at(s); }
  std::optional<SourceIndex> find_source(std::string_view name) const;

  std::size_t entity_count(SourceIndex s) const { return entity_names_.at(s).size(); }
  std::size_t total_entities() const { return source_offset_.empty() ? 0 : source_offset_.back(); }
  const std::string& entity_name(EntityRef r) const;
  std::optional<EntityRef> find_entity(SourceIndex s, std::string_view name) const;

  // Dense global numbering: source-major, then entity index.
  std::size_t global_index(EntityRef r) const { return source_offset_[r.source] + r.entity; }
  EntityRef ref_of(std::size_t global) const;

  std::size_t edge_count() const { return edges_.size(); }
  // Sorted by (a.source, b.source, a.entity, b.entity).
  std::span<const Edge> edges() const { return edges_; }

  // All neighbors of `r`, sorted by (source, entity).
  std::span<const Neighbor> neighbors(EntityRef r) const;
  // Neighbors of `r` that live in source `s`, sorted by entity.
  std::span<const Neighbor> neighbors(EntityRef r, SourceIndex s) const;

  // Score of an unordered cross-source pair. Zero when absent or when either
  // side is the null entity. Throws ContractError for a same-source query.
  double pair_score(EntityRef a, EntityRef b) const;

  double max_score() const;

  // Same sources and entities, only edges accepted by `keep`.
  template <typename Pred>
  MultipartiteGraph filter_edges(Pred keep) const {
    std::vector<Edge> kept;
    for (const Edge& e : edges_)
      if (keep(e)) kept.push_back(e);
    return MultipartiteGraph(source_names_, entity_names_, std::move(kept));
  }

 private:
  friend class GraphBuilder;

  MultipartiteGraph(std::vector<std::string> source_names,
                    std::vector<std::vector<std::string>> entity_names,
                    std::vector<Edge> sorted_edges);

  std::vector<std::string> source_names_;
  std::vector<std::vector<std::string>> entity_names_;
  std::vector<std::unordered_map<std::string, EntityIndex>> entity_lookup_;
  std::vector<std::size_t> source_offset_;  // size m + 1
  std::vector<Edge> edges_;
  // CSR adjacency over global indices; per entity an (m + 1)-entry table of
  // segment starts so neighbors(r, s) is O(1).
  std::vector<std::size_t> adj_start_;
  std::vector<std::size_t> adj_source_start_;
  std::vector<Neighbor> adjacency_;
};

// Incremental construction with name interning and duplicate handling.
class GraphBuilder {
 public:
  SourceIndex add_source(std::string_view name);
  EntityRef add_entity(SourceIndex source, std::string_view name);

  // Returns true when the pair was already present; the larger score is kept.
  // Throws ContractError for a same-source or null pair and DataError for a
  // negative or non-finite score.
  bool add_edge(EntityRef a, EntityRef b, double score);

  std::size_t duplicate_count() const { return duplicates_; }
  std::size_t source_count() const { return source_names_.size(); }

  MultipartiteGraph build() &&;

 private:
  struct PairKey {
    SourceIndex sa, sb;
    EntityIndex ea, eb;
    bool operator==(const PairKey&) const = default;
  };
  struct PairKeyHash {
    std::size_t operator()(const PairKey& k) const noexcept;
  };

  std::vector<std::string> source_names_;
  std::unordered_map<std::string, SourceIndex> source_lookup_;
  std::vector<std::vector<std::string>> entity_names_;
  std::vector<std::unordered_map<std::string, EntityIndex>> entity_lookup_;
  std::unordered_map<PairKey, double, PairKeyHash> scores_;
  std::size_t duplicates_ = 0;
};

// A matched tuple. Null members are allowed and ignored by weight accounting.
struct Clique {
  std::vector<EntityRef> members;

  std::size_t non_null_size() const;
  friend bool operator==(const Clique&, const Clique&) = default;
};

struct Matching {
  std::vector<Clique> cliques;

  friend bool operator==(const Matching&, const Matching&) = default;
};

// Members sorted by source, nulls dropped, cliques ordered by first member.
Matching canonical(Matching m);

double clique_weight(const MultipartiteGraph& g, const Clique& c);
double matching_weight(const MultipartiteGraph& g, const Matching& m);

struct Violation {
  enum class Kind { DuplicateEntity, SourceClash };
  Kind kind;
  EntityRef entity;                  // offending entity (for SourceClash: the second one seen)
  std::vector<std::size_t> cliques;  // indices into Matching::cliques
};

// Empty iff every non-null entity appears in at most one clique and no clique
// holds two entities of one source.
std::vector<Violation> validate_one_to_one(const Matching& m);

// Edges with score >= threshold; entities are kept.
MultipartiteGraph apply_threshold(const MultipartiteGraph& g, double threshold);

// Non-null entities of `g` not covered by any clique, in global order.
std::vector<EntityRef> unmatched_entities(const MultipartiteGraph& g, const Matching& m);

// Labeled cross-source pairs. A negative whose second entity is null means
// "the first entity has no counterpart in that source".
struct TruthSet {
  std::vector<std::pair<EntityRef, EntityRef>> positives;
  std::vector<std::pair<EntityRef, EntityRef>> negatives;
};

}  // namespace multimatch
