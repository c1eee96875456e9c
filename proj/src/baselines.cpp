#include "multimatch/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "multimatch/assignment.hpp"
#include "multimatch/errors.hpp"

namespace multimatch {

namespace {

Clique make_clique(std::vector<EntityRef> members) {
  std::sort(members.begin(), members.end());
  return Clique{std::move(members)};
}

// Exhaustive search state for exact_multipartite_bruteforce.
class PartitionSearch {
 public:
  PartitionSearch(const MultipartiteGraph& g, double threshold) : g_(g), n_(g.total_entities()) {
    score_.assign(n_ * n_, 0.0);
    for (const Edge& e : g.edges()) {
      if (e.score < threshold) continue;
      const std::size_t a = g.global_index(e.a), b = g.global_index(e.b);
      score_[a * n_ + b] = score_[b * n_ + a] = e.score;
    }
    source_of_.resize(n_);
    for (std::size_t v = 0; v < n_; ++v) source_of_[v] = g.ref_of(v).source;
    memo_.assign(std::size_t{1} << n_, std::numeric_limits<double>::quiet_NaN());
  }

  double best(std::uint64_t used) {
    if (used == full()) return 0.0;
    double& slot = memo_[used];
    if (!std::isnan(slot)) return slot;
    double result = -1.0;
    for_each_option(used, [&](std::uint64_t clique, double weight) {
      result = std::max(result, weight + best(used | clique));
    });
    slot = result;
    return result;
  }

  Matching reconstruct() {
    Matching m;
    std::uint64_t used = 0;
    while (used != full()) {
      const double target = best(used);
      std::uint64_t chosen = 0;
      for_each_option(used, [&](std::uint64_t clique, double weight) {
        if (chosen == 0 && weight + best(used | clique) == target) chosen = clique;
      });
      if (std::popcount(chosen) >= 2) {
        std::vector<EntityRef> members;
        for (std::size_t v = 0; v < n_; ++v)
          if (chosen >> v & 1) members.push_back(g_.ref_of(v));
        m.cliques.push_back(make_clique(std::move(members)));
      }
      used |= chosen;
    }
    return m;
  }

 private:
  std::uint64_t full() const { return n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1; }

  // Every clique whose first member is the lowest unused entity: one unused
  // entity or none from each later source.
  template <typename Fn>
  void for_each_option(std::uint64_t used, Fn&& fn) {
    std::size_t first = 0;
    while (used >> first & 1) ++first;
    std::vector<std::size_t> members{first};
    extend(used, source_of_[first] + 1, std::uint64_t{1} << first, 0.0, members, fn);
  }

  template <typename Fn>
  void extend(std::uint64_t used, std::size_t source, std::uint64_t clique, double weight,
              std::vector<std::size_t>& members, Fn& fn) {
    if (source >= g_.source_count()) {
      fn(clique, weight);
      return;
    }
    extend(used, source + 1, clique, weight, members, fn);
    const std::size_t begin = g_.global_index({static_cast<SourceIndex>(source), 0});
    const std::size_t end = begin + g_.entity_count(static_cast<SourceIndex>(source));
    for (std::size_t v = begin; v < end; ++v) {
      if (used >> v & 1) continue;
      double add = 0.0;
      for (std::size_t u : members) add += score_[u * n_ + v];
      members.push_back(v);
      extend(used, source + 1, clique | std::uint64_t{1} << v, weight + add, members, fn);
      members.pop_back();
    }
  }

  const MultipartiteGraph& g_;
  std::size_t n_;
  std::vector<double> score_;
  std::vector<SourceIndex> source_of_;
  std::vector<double> memo_;
};

}  // namespace

ManyManyResolution many_many(const MultipartiteGraph& g, double threshold) {
  if (threshold < 0.0) throw ContractError("many_many: threshold must be >= 0");
  ManyManyResolution out;
  for (const Edge& e : g.edges())
    if (e.score >= threshold) out.pairs.push_back(e);
  return out;
}

Matching exact_bipartite(const MultipartiteGraph& g, SourceIndex s1, SourceIndex s2, double threshold) {
  if (s1 == s2 || s1 >= g.source_count() || s2 >= g.source_count())
    throw ContractError("exact_bipartite: needs two distinct existing sources");
  const std::size_t rows = g.entity_count(s1), cols = g.entity_count(s2);
  std::vector<double> w(rows * cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (const Neighbor& nb : g.neighbors({s1, static_cast<EntityIndex>(r)}, s2))
      if (nb.score >= threshold) w[r * cols + nb.ref.entity] = nb.score;
  const auto assign = max_weight_assignment(rows, cols, w);
  Matching m;
  for (std::size_t r = 0; r < rows; ++r) {
    if (assign[r] == kUnassigned) continue;
    const auto c = static_cast<std::size_t>(assign[r]);
    if (w[r * cols + c] <= 0.0) continue;
    m.cliques.push_back(make_clique({{s1, static_cast<EntityIndex>(r)}, {s2, static_cast<EntityIndex>(c)}}));
  }
  return m;
}

Matching exact_multipartite_bruteforce(const MultipartiteGraph& g, double threshold, std::size_t state_limit) {
  if (threshold < 0.0) throw ContractError("exact_multipartite_bruteforce: threshold must be >= 0");
  const std::size_t n = g.total_entities();
  if (n == 0) return {};
  double estimate = std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(n, 1000)));
  for (SourceIndex s = 1; s < g.source_count(); ++s) estimate *= static_cast<double>(g.entity_count(s) + 1);
  if (n > 40 || estimate > static_cast<double>(state_limit))
    throw ResourceLimitError("exact_multipartite_bruteforce: estimated " + std::to_string(estimate) +
                             " states exceeds the limit of " + std::to_string(state_limit));
  PartitionSearch search(g, threshold);
  search.best(0);
  return search.reconstruct();
}

Matching sequential_bipartite(const MultipartiteGraph& g, std::span<const SourceIndex> order, double threshold) {
  const std::size_t m = g.source_count();
  std::vector<char> seen(m, 0);
  if (order.size() != m) throw ContractError("sequential_bipartite: order must list every source exactly once");
  for (SourceIndex s : order) {
    if (s >= m || seen[s]) throw ContractError("sequential_bipartite: order must be a permutation of the sources");
    seen[s] = 1;
  }
  if (m < 2) return {};

  std::vector<std::vector<EntityRef>> cliques;
  std::vector<char> covered(g.total_entities(), 0);
  for (const Clique& c : exact_bipartite(g, order[0], order[1], threshold).cliques) {
    for (EntityRef r : c.members) covered[g.global_index(r)] = 1;
    cliques.push_back(c.members);
  }
  for (SourceIndex s : {order[0], order[1]})
    for (EntityIndex e = 0; e < g.entity_count(s); ++e)
      if (!covered[g.global_index({s, e})]) cliques.push_back({{s, e}});

  for (std::size_t step = 2; step < m; ++step) {
    const SourceIndex t = order[step];
    const std::size_t rows = cliques.size(), cols = g.entity_count(t);
    std::vector<double> w(rows * cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
      for (EntityRef u : cliques[r])
        for (const Neighbor& nb : g.neighbors(u, t))
          if (nb.score >= threshold) w[r * cols + nb.ref.entity] += nb.score;
    const auto assign = max_weight_assignment(rows, cols, w);
    std::vector<char> joined(cols, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      if (assign[r] == kUnassigned) continue;
      const auto c = static_cast<std::size_t>(assign[r]);
      if (w[r * cols + c] <= 0.0) continue;
      cliques[r].push_back({t, static_cast<EntityIndex>(c)});
      joined[c] = 1;
    }
    for (std::size_t c = 0; c < cols; ++c)
      if (!joined[c]) cliques.push_back({{t, static_cast<EntityIndex>(c)}});
  }

  Matching out;
  for (auto& c : cliques)
    if (c.size() >= 2) out.cliques.push_back(make_clique(std::move(c)));
  return canonical(std::move(out));
}

}  // namespace multimatch
