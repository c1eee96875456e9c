#pragma once

#include <cstddef>
#include <vector>

#include "multimatch/graph.hpp"

namespace multimatch {

enum class MergeOutcome { Merged, SourceConflict, AlreadyJoined };

// Disjoint cliques over all entities of a graph. Every entity starts as a
// singleton; merges are accepted only when the union keeps at most one entity
// per source. Union-find with a per-root source slot table makes each
// feasibility check O(m).
class CliqueForest {
 public:
  explicit CliqueForest(const MultipartiteGraph& g);

  MergeOutcome try_merge(EntityRef a, EntityRef b);
  bool same_clique(EntityRef a, EntityRef b);
  // Members of the clique containing `r`, ordered by source.
  std::vector<EntityRef> clique_of(EntityRef r);

  // Cliques with at least two members, ordered by their first member.
  Matching to_matching();

 private:
  std::size_t find(std::size_t v);

  const MultipartiteGraph* graph_;
  std::size_t sources_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<EntityIndex> slots_;  // root * sources_ + s -> entity of source s, or kNullEntity
};

// Candidate pairs in the order greedy visits them: score >= threshold,
// descending score, ties by (source_a, entity_a, source_b, entity_b).
std::vector<Edge> greedy_candidates(const MultipartiteGraph& g, double threshold);

Matching greedy_match(const MultipartiteGraph& g, double threshold);

}  // namespace multimatch
