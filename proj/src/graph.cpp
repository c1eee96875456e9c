#include "multimatch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "multimatch/errors.hpp"

namespace multimatch {

namespace {

bool edge_key_less(const Edge& x, const Edge& y) {
  return std::tie(x.a.source, x.b.source, x.a.entity, x.b.entity) <
         std::tie(y.a.source, y.b.source, y.a.entity, y.b.entity);
}

}  // namespace

MultipartiteGraph::MultipartiteGraph(std::vector<std::string> source_names,
                                     std::vector<std::vector<std::string>> entity_names,
                                     std::vector<Edge> sorted_edges)
    : source_names_(std::move(source_names)),
      entity_names_(std::move(entity_names)),
      edges_(std::move(sorted_edges)) {
  const std::size_t m = source_names_.size();
  source_offset_.assign(m + 1, 0);
  for (std::size_t s = 0; s < m; ++s) source_offset_[s + 1] = source_offset_[s] + entity_names_[s].size();
  const std::size_t n = total_entities();
  entity_lookup_.resize(m);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t e = 0; e < entity_names_[s].size(); ++e)
      entity_lookup_[s].emplace(entity_names_[s][e], static_cast<EntityIndex>(e));

  std::vector<std::size_t> degree(n, 0);
  for (const Edge& e : edges_) {
    ++degree[global_index(e.a)];
    ++degree[global_index(e.b)];
  }
  adj_start_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) adj_start_[v + 1] = adj_start_[v] + degree[v];
  adjacency_.resize(adj_start_[n]);
  std::vector<std::size_t> fill(adj_start_.begin(), adj_start_.end() - 1);
  for (const Edge& e : edges_) {
    adjacency_[fill[global_index(e.a)]++] = {e.b, e.score};
    adjacency_[fill[global_index(e.b)]++] = {e.a, e.score};
  }
  adj_source_start_.assign(n * (m + 1), 0);
  for (std::size_t v = 0; v < n; ++v) {
    auto begin = adjacency_.begin() + static_cast<std::ptrdiff_t>(adj_start_[v]);
    auto end = adjacency_.begin() + static_cast<std::ptrdiff_t>(adj_start_[v + 1]);
    std::sort(begin, end, [](const Neighbor& x, const Neighbor& y) { return x.ref < y.ref; });
    std::size_t* table = &adj_source_start_[v * (m + 1)];
    auto it = begin;
    for (std::size_t s = 0; s <= m; ++s) {
      while (it != end && it->ref.source < s) ++it;
      table[s] = static_cast<std::size_t>(it - adjacency_.begin());
    }
  }
}

std::optional<SourceIndex> MultipartiteGraph::find_source(std::string_view name) const {
  for (std::size_t s = 0; s < source_names_.size(); ++s)
    if (source_names_[s] == name) return static_cast<SourceIndex>(s);
  return std::nullopt;
}

const std::string& MultipartiteGraph::entity_name(EntityRef r) const {
  if (r.is_null()) throw ContractError("entity_name: null entity has no name");
  return entity_names_.at(r.source).at(r.entity);
}

std::optional<EntityRef> MultipartiteGraph::find_entity(SourceIndex s, std::string_view name) const {
  const auto& lookup = entity_lookup_.at(s);
  auto it = lookup.find(std::string(name));
  if (it == lookup.end()) return std::nullopt;
  return EntityRef{s, it->second};
}

EntityRef MultipartiteGraph::ref_of(std::size_t global) const {
  auto it = std::upper_bound(source_offset_.begin(), source_offset_.end(), global);
  const auto s = static_cast<SourceIndex>(it - source_offset_.begin() - 1);
  return {s, static_cast<EntityIndex>(global - source_offset_[s])};
}

std::span<const Neighbor> MultipartiteGraph::neighbors(EntityRef r) const {
  const std::size_t v = global_index(r);
  return {adjacency_.data() + adj_start_[v], adj_start_[v + 1] - adj_start_[v]};
}

std::span<const Neighbor> MultipartiteGraph::neighbors(EntityRef r, SourceIndex s) const {
  const std::size_t m = source_count();
  const std::size_t* table = &adj_source_start_[global_index(r) * (m + 1)];
  return {adjacency_.data() + table[s], table[s + 1] - table[s]};
}

double MultipartiteGraph::pair_score(EntityRef a, EntityRef b) const {
  if (a.source == b.source) throw ContractError("pair_score: both entities are in source " + std::to_string(a.source));
  if (a.is_null() || b.is_null()) return 0.0;
  const auto& from = neighbors(a, b.source);
  const auto& to = neighbors(b, a.source);
  const auto& seg = from.size() <= to.size() ? from : to;
  const EntityRef target = from.size() <= to.size() ? b : a;
  auto it = std::lower_bound(seg.begin(), seg.end(), target,
                             [](const Neighbor& n, const EntityRef& r) { return n.ref < r; });
  return (it != seg.end() && it->ref == target) ? it->score : 0.0;
}

double MultipartiteGraph::max_score() const {
  double best = 0.0;
  for (const Edge& e : edges_) best = std::max(best, e.score);
  return best;
}

// --- builder -----------------------------------------------------------------

std::size_t GraphBuilder::PairKeyHash::operator()(const PairKey& k) const noexcept {
  std::uint64_t h = (static_cast<std::uint64_t>(k.sa) << 32) ^ k.sb;
  h = h * 0x9E3779B97F4A7C15ull ^ ((static_cast<std::uint64_t>(k.ea) << 32) | k.eb);
  h ^= h >> 29;
  h *= 0xBF58476D1CE4E5B9ull;
  return static_cast<std::size_t>(h ^ (h >> 32));
}

SourceIndex GraphBuilder::add_source(std::string_view name) {
  auto [it, inserted] = source_lookup_.try_emplace(std::string(name), static_cast<SourceIndex>(source_names_.size()));
  if (inserted) {
    source_names_.emplace_back(name);
    entity_names_.emplace_back();
    entity_lookup_.emplace_back();
  }
  return it->second;
}

EntityRef GraphBuilder::add_entity(SourceIndex source, std::string_view name) {
  if (source >= source_names_.size()) throw ContractError("add_entity: unknown source index");
  auto& lookup = entity_lookup_[source];
  auto [it, inserted] = lookup.try_emplace(std::string(name), static_cast<EntityIndex>(entity_names_[source].size()));
  if (inserted) entity_names_[source].emplace_back(name);
  return {source, it->second};
}

bool GraphBuilder::add_edge(EntityRef a, EntityRef b, double score) {
  if (a.is_null() || b.is_null()) throw ContractError("add_edge: null entity cannot carry a score");
  if (a.source == b.source) throw ContractError("add_edge: same-source pair in source " + source_names_.at(a.source));
  if (!std::isfinite(score)) throw DataError("add_edge: score is not finite");
  if (score < 0.0) throw DataError("add_edge: negative score");
  if (b.source < a.source) std::swap(a, b);
  auto [it, inserted] = scores_.try_emplace(PairKey{a.source, b.source, a.entity, b.entity}, score);
  if (!inserted) {
    ++duplicates_;
    it->second = std::max(it->second, score);
  }
  return !inserted;
}

MultipartiteGraph GraphBuilder::build() && {
  std::vector<Edge> edges;
  edges.reserve(scores_.size());
  for (const auto& [k, score] : scores_) edges.push_back({{k.sa, k.ea}, {k.sb, k.eb}, score});
  std::sort(edges.begin(), edges.end(), edge_key_less);
  return MultipartiteGraph(std::move(source_names_), std::move(entity_names_), std::move(edges));
}

// --- cliques & matchings -----------------------------------------------------

std::size_t Clique::non_null_size() const {
  return static_cast<std::size_t>(std::count_if(members.begin(), members.end(), [](EntityRef r) { return !r.is_null(); }));
}

Matching canonical(Matching m) {
  for (Clique& c : m.cliques) {
    std::erase_if(c.members, [](EntityRef r) { return r.is_null(); });
    std::sort(c.members.begin(), c.members.end());
  }
  std::erase_if(m.cliques, [](const Clique& c) { return c.members.empty(); });
  std::sort(m.cliques.begin(), m.cliques.end(),
            [](const Clique& x, const Clique& y) { return x.members < y.members; });
  return m;
}

double clique_weight(const MultipartiteGraph& g, const Clique& c) {
  double total = 0.0;
  for (std::size_t x = 0; x < c.members.size(); ++x) {
    if (c.members[x].is_null()) continue;
    for (std::size_t y = x + 1; y < c.members.size(); ++y) {
      if (c.members[y].is_null() || c.members[y].source == c.members[x].source) continue;
      total += g.pair_score(c.members[x], c.members[y]);
    }
  }
  return total;
}

double matching_weight(const MultipartiteGraph& g, const Matching& m) {
  double total = 0.0;
  for (const Clique& c : m.cliques) total += clique_weight(g, c);
  return total;
}

std::vector<Violation> validate_one_to_one(const Matching& m) {
  std::vector<Violation> out;
  std::map<EntityRef, std::vector<std::size_t>> seen;
  for (std::size_t ci = 0; ci < m.cliques.size(); ++ci) {
    std::map<SourceIndex, EntityRef> slots;
    for (EntityRef r : m.cliques[ci].members) {
      if (r.is_null()) continue;
      auto [slot, fresh] = slots.try_emplace(r.source, r);
      if (!fresh) {
        out.push_back({Violation::Kind::SourceClash, r, {ci}});
        continue;
      }
      seen[r].push_back(ci);
    }
  }
  for (auto& [ref, where] : seen)
    if (where.size() > 1) out.push_back({Violation::Kind::DuplicateEntity, ref, where});
  return out;
}

MultipartiteGraph apply_threshold(const MultipartiteGraph& g, double threshold) {
  if (threshold < 0.0) throw ContractError("apply_threshold: threshold must be >= 0");
  return g.filter_edges([threshold](const Edge& e) { return e.score >= threshold; });
}

std::vector<EntityRef> unmatched_entities(const MultipartiteGraph& g, const Matching& m) {
  std::vector<char> covered(g.total_entities(), 0);
  for (const Clique& c : m.cliques)
    for (EntityRef r : c.members)
      if (!r.is_null()) covered[g.global_index(r)] = 1;
  std::vector<EntityRef> out;
  for (std::size_t v = 0; v < covered.size(); ++v)
    if (!covered[v]) out.push_back(g.ref_of(v));
  return out;
}

}  // namespace multimatch
