#pragma once

// Fixtures and independent oracles shared by the unit and acceptance tests.

#include <cstdint>
#include <random>
#include <vector>

#include "multimatch/graph.hpp"
#include "multimatch/mp_solver.hpp"

namespace multimatch::testing {

// Three sources "1", "2", "3" holding a<j>, b<j>, c<j>. Complete between
// every pair of sources: 1-2 pairs score 0.6 except a1-a2 = 0.5 and
// c1-c2 = 1; pairs with source 3 score 1 for same-letter entities, 0.1
// otherwise.
MultipartiteGraph tripartite_graph();
// {a1,a2,a3}, {b1,b2,b3}, {c1,c2,c3} in canonical form.
Matching tripartite_truth();

// s(a1,b1)=1.1, s(a1,b2)=1.0, s(a2,b1)=1.0, a2-b2 absent.
MultipartiteGraph pathological_bipartite();

// Sources "0".."m-1" with sizes[s] entities each. Each cross-source pair gets
// a score uniform on [0,1) with probability `density`.
MultipartiteGraph random_graph(std::mt19937_64& rng, const std::vector<std::size_t>& sizes, double density = 1.0);

// Best bipartite matching weight by enumerating every injective assignment
// of the smaller side (with "unmatched" allowed).
double brute_bipartite_weight(const MultipartiteGraph& g, SourceIndex s1, SourceIndex s2, double threshold = 0.0);

// Best bipartite matching weight via successive shortest paths on a
// min-cost-flow network (Bellman-Ford), stopping once paths stop paying.
double flow_bipartite_weight(const MultipartiteGraph& g, SourceIndex s1, SourceIndex s2, double threshold = 0.0);

// Best multi-partite matching weight by recursive partitioning: the first
// unassigned entity picks its clique among every set of later-source
// entities (or stays alone). No memoization; tiny instances only.
double brute_multipartite_weight(const MultipartiteGraph& g);

// Max-sum messages stored for every (entity, partner combination) pair, no
// compression. Same Jacobi schedule and zero start as the solver.
class FullAlphaTable {
 public:
  explicit FullAlphaTable(const MultipartiteGraph& g);

  void update();
  // Message from entity v (global index) to the tuple containing it.
  double alpha(std::size_t v, const Tuple& tuple) const;
  // Every tuple that contains v in its own slot.
  const std::vector<Tuple>& tuples_of(std::size_t v) const { return tuples_[v]; }

 private:
  const MultipartiteGraph& g_;
  std::vector<std::vector<Tuple>> tuples_;
  std::vector<std::vector<double>> alpha_;
};

}  // namespace multimatch::testing
