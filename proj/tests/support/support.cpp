#include "support.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <string>

namespace multimatch::testing {

MultipartiteGraph tripartite_graph() {
  GraphBuilder b;
  const char letters[] = {'a', 'b', 'c'};
  for (int s = 0; s < 3; ++s) {
    const SourceIndex src = b.add_source(std::to_string(s + 1));
    for (char l : letters) b.add_entity(src, std::string(1, l) + std::to_string(s + 1));
  }
  for (EntityIndex i = 0; i < 3; ++i)
    for (EntityIndex j = 0; j < 3; ++j) {
      double s12 = 0.6;
      if (i == 0 && j == 0) s12 = 0.5;
      if (i == 2 && j == 2) s12 = 1.0;
      b.add_edge({0, i}, {1, j}, s12);
      const double s3 = i == j ? 1.0 : 0.1;
      b.add_edge({0, i}, {2, j}, s3);
      b.add_edge({1, i}, {2, j}, s3);
    }
  return std::move(b).build();
}

Matching tripartite_truth() {
  Matching m;
  for (EntityIndex i = 0; i < 3; ++i) m.cliques.push_back(Clique{{{0, i}, {1, i}, {2, i}}});
  return canonical(m);
}

MultipartiteGraph pathological_bipartite() {
  GraphBuilder b;
  const SourceIndex a = b.add_source("A"), c = b.add_source("B");
  b.add_entity(a, "a1");
  b.add_entity(a, "a2");
  b.add_entity(c, "b1");
  b.add_entity(c, "b2");
  b.add_edge({a, 0}, {c, 0}, 1.1);
  b.add_edge({a, 0}, {c, 1}, 1.0);
  b.add_edge({a, 1}, {c, 0}, 1.0);
  return std::move(b).build();
}

MultipartiteGraph random_graph(std::mt19937_64& rng, const std::vector<std::size_t>& sizes, double density) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GraphBuilder b;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const SourceIndex src = b.add_source(std::to_string(s));
    for (std::size_t i = 0; i < sizes[s]; ++i) b.add_entity(src, "e" + std::to_string(i));
  }
  for (SourceIndex sa = 0; sa < sizes.size(); ++sa)
    for (SourceIndex sb = sa + 1; sb < sizes.size(); ++sb)
      for (EntityIndex i = 0; i < sizes[sa]; ++i)
        for (EntityIndex j = 0; j < sizes[sb]; ++j) {
          const double keep = unit(rng);
          const double score = unit(rng);
          if (keep < density) b.add_edge({sa, i}, {sb, j}, score);
        }
  return std::move(b).build();
}

double brute_bipartite_weight(const MultipartiteGraph& g, SourceIndex s1, SourceIndex s2, double threshold) {
  if (g.entity_count(s1) > g.entity_count(s2)) std::swap(s1, s2);
  const std::size_t rows = g.entity_count(s1), cols = g.entity_count(s2);
  std::vector<char> used(cols, 0);
  std::function<double(std::size_t)> best = [&](std::size_t r) -> double {
    if (r == rows) return 0.0;
    double result = best(r + 1);
    for (std::size_t c = 0; c < cols; ++c) {
      if (used[c]) continue;
      const double w = g.pair_score({s1, static_cast<EntityIndex>(r)}, {s2, static_cast<EntityIndex>(c)});
      if (w < threshold || w <= 0.0) continue;
      used[c] = 1;
      result = std::max(result, w + best(r + 1));
      used[c] = 0;
    }
    return result;
  };
  return best(0);
}

double flow_bipartite_weight(const MultipartiteGraph& g, SourceIndex s1, SourceIndex s2, double threshold) {
  const std::size_t rows = g.entity_count(s1), cols = g.entity_count(s2);
  const std::size_t source = rows + cols, sink = source + 1, nodes = sink + 1;
  struct Arc {
    std::size_t to;
    int cap;
    double cost;
  };
  std::vector<Arc> arcs;
  std::vector<std::vector<std::size_t>> out(nodes);
  auto add = [&](std::size_t u, std::size_t v, double cost) {
    out[u].push_back(arcs.size());
    arcs.push_back({v, 1, cost});
    out[v].push_back(arcs.size());
    arcs.push_back({u, 0, -cost});
  };
  for (std::size_t r = 0; r < rows; ++r) add(source, r, 0.0);
  for (std::size_t c = 0; c < cols; ++c) add(rows + c, sink, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const double w = g.pair_score({s1, static_cast<EntityIndex>(r)}, {s2, static_cast<EntityIndex>(c)});
      if (w >= threshold && w > 0.0) add(r, rows + c, -w);
    }

  double total = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<double> dist(nodes, inf);
    std::vector<std::size_t> via(nodes, arcs.size());
    dist[source] = 0.0;
    for (std::size_t round = 0; round + 1 < nodes; ++round) {
      bool relaxed = false;
      for (std::size_t u = 0; u < nodes; ++u) {
        if (dist[u] == inf) continue;
        for (std::size_t id : out[u]) {
          const Arc& a = arcs[id];
          if (a.cap > 0 && dist[u] + a.cost < dist[a.to] - 1e-12) {
            dist[a.to] = dist[u] + a.cost;
            via[a.to] = id;
            relaxed = true;
          }
        }
      }
      if (!relaxed) break;
    }
    if (dist[sink] == inf || dist[sink] >= 0.0) break;
    total -= dist[sink];
    for (std::size_t v = sink; v != source;) {
      const std::size_t id = via[v];
      arcs[id].cap -= 1;
      arcs[id ^ 1].cap += 1;
      v = arcs[id ^ 1].to;
    }
  }
  return total;
}

double brute_multipartite_weight(const MultipartiteGraph& g) {
  const std::size_t n = g.total_entities(), m = g.source_count();
  std::vector<char> used(n, 0);
  std::function<double()> best = [&]() -> double {
    std::size_t first = 0;
    while (first < n && used[first]) ++first;
    if (first == n) return 0.0;
    used[first] = 1;
    const EntityRef head = g.ref_of(first);
    std::vector<EntityRef> members{head};
    double result = -1.0;
    std::function<void(SourceIndex, double)> pick = [&](SourceIndex s, double weight) {
      if (s == m) {
        result = std::max(result, weight + best());
        return;
      }
      pick(s + 1, weight);
      for (EntityIndex e = 0; e < g.entity_count(s); ++e) {
        const std::size_t v = g.global_index({s, e});
        if (used[v]) continue;
        double add = 0.0;
        for (EntityRef u : members) add += g.pair_score(u, {s, e});
        used[v] = 1;
        members.push_back({s, e});
        pick(s + 1, weight + add);
        members.pop_back();
        used[v] = 0;
      }
    };
    pick(head.source + 1, 0.0);
    used[first] = 0;
    return result;
  };
  return best();
}

namespace {

std::vector<Tuple> all_tuples(const MultipartiteGraph& g, EntityRef self) {
  std::vector<Tuple> out;
  Tuple t(g.source_count(), kNullEntity);
  t[self.source] = self.entity;
  std::function<void(SourceIndex)> fill = [&](SourceIndex s) {
    if (s == g.source_count()) {
      out.push_back(t);
      return;
    }
    if (s == self.source) {
      fill(s + 1);
      return;
    }
    t[s] = kNullEntity;
    fill(s + 1);
    for (EntityIndex e = 0; e < g.entity_count(s); ++e) {
      t[s] = e;
      fill(s + 1);
    }
    t[s] = kNullEntity;
  };
  fill(0);
  return out;
}

double similarity(const MultipartiteGraph& g, const Tuple& t) {
  double total = 0.0;
  for (SourceIndex a = 0; a < t.size(); ++a)
    for (SourceIndex b = a + 1; b < t.size(); ++b) total += g.pair_score({a, t[a]}, {b, t[b]});
  return total;
}

}  // namespace

FullAlphaTable::FullAlphaTable(const MultipartiteGraph& g) : g_(g) {
  for (std::size_t v = 0; v < g.total_entities(); ++v) {
    tuples_.push_back(all_tuples(g, g.ref_of(v)));
    alpha_.emplace_back(tuples_.back().size(), 0.0);
  }
}

double FullAlphaTable::alpha(std::size_t v, const Tuple& tuple) const {
  const auto& list = tuples_[v];
  const auto it = std::find(list.begin(), list.end(), tuple);
  return alpha_[v][static_cast<std::size_t>(it - list.begin())];
}

void FullAlphaTable::update() {
  std::vector<std::vector<double>> next = alpha_;
  for (std::size_t v = 0; v < tuples_.size(); ++v) {
    const SourceIndex self = g_.ref_of(v).source;
    const auto& list = tuples_[v];
    std::vector<double> beta(list.size());
    for (std::size_t c = 0; c < list.size(); ++c) {
      beta[c] = similarity(g_, list[c]);
      for (SourceIndex t = 0; t < list[c].size(); ++t)
        if (t != self && list[c][t] != kNullEntity) beta[c] += alpha(g_.global_index({t, list[c][t]}), list[c]);
    }
    for (std::size_t c = 0; c < list.size(); ++c) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t d = 0; d < list.size(); ++d)
        if (d != c) best = std::max(best, beta[d]);
      next[v][c] = -best;
    }
  }
  alpha_ = std::move(next);
}

}  // namespace multimatch::testing
