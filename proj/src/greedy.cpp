#include "multimatch/greedy.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "multimatch/errors.hpp"

namespace multimatch {

CliqueForest::CliqueForest(const MultipartiteGraph& g)
    : graph_(&g),
      sources_(g.source_count()),
      parent_(g.total_entities()),
      size_(g.total_entities(), 1),
      slots_(g.total_entities() * g.source_count(), kNullEntity) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  for (std::size_t v = 0; v < parent_.size(); ++v) {
    const EntityRef r = g.ref_of(v);
    slots_[v * sources_ + r.source] = r.entity;
  }
}

std::size_t CliqueForest::find(std::size_t v) {
  while (parent_[v] != v) {
    parent_[v] = parent_[parent_[v]];
    v = parent_[v];
  }
  return v;
}

MergeOutcome CliqueForest::try_merge(EntityRef a, EntityRef b) {
  if (a.is_null() || b.is_null() || a.source == b.source)
    throw ContractError("try_merge: needs two non-null entities of different sources");
  std::size_t ra = find(graph_->global_index(a));
  std::size_t rb = find(graph_->global_index(b));
  if (ra == rb) return MergeOutcome::AlreadyJoined;
  const EntityIndex* sa = &slots_[ra * sources_];
  const EntityIndex* sb = &slots_[rb * sources_];
  for (std::size_t s = 0; s < sources_; ++s)
    if (sa[s] != kNullEntity && sb[s] != kNullEntity) return MergeOutcome::SourceConflict;
  if (size_[ra] < size_[rb]) std::swap(ra, rb);
  parent_[rb] = ra;
  size_[ra] += size_[rb];
  for (std::size_t s = 0; s < sources_; ++s)
    if (slots_[rb * sources_ + s] != kNullEntity) slots_[ra * sources_ + s] = slots_[rb * sources_ + s];
  return MergeOutcome::Merged;
}

bool CliqueForest::same_clique(EntityRef a, EntityRef b) {
  return find(graph_->global_index(a)) == find(graph_->global_index(b));
}

std::vector<EntityRef> CliqueForest::clique_of(EntityRef r) {
  const std::size_t root = find(graph_->global_index(r));
  std::vector<EntityRef> out;
  for (std::size_t s = 0; s < sources_; ++s)
    if (slots_[root * sources_ + s] != kNullEntity)
      out.push_back({static_cast<SourceIndex>(s), slots_[root * sources_ + s]});
  return out;
}

Matching CliqueForest::to_matching() {
  Matching m;
  std::vector<char> emitted(parent_.size(), 0);
  for (std::size_t v = 0; v < parent_.size(); ++v) {
    const std::size_t root = find(v);
    if (emitted[root] || size_[root] < 2) continue;
    emitted[root] = 1;
    m.cliques.push_back(Clique{clique_of(graph_->ref_of(v))});
  }
  return m;
}

std::vector<Edge> greedy_candidates(const MultipartiteGraph& g, double threshold) {
  if (threshold < 0.0) throw ContractError("greedy: threshold must be >= 0");
  std::vector<Edge> out;
  for (const Edge& e : g.edges())
    if (e.score >= threshold) out.push_back(e);
  std::sort(out.begin(), out.end(), [](const Edge& x, const Edge& y) {
    if (x.score != y.score) return x.score > y.score;
    return std::tie(x.a.source, x.a.entity, x.b.source, x.b.entity) <
           std::tie(y.a.source, y.a.entity, y.b.source, y.b.entity);
  });
  return out;
}

Matching greedy_match(const MultipartiteGraph& g, double threshold) {
  CliqueForest forest(g);
  for (const Edge& e : greedy_candidates(g, threshold)) forest.try_merge(e.a, e.b);
  return forest.to_matching();
}

}  // namespace multimatch
