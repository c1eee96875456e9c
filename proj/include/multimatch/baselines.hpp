#pragma once

// Reference and baseline matchers.

#include <cstddef>
#include <span>
#include <vector>

#include "multimatch/graph.hpp"

namespace multimatch {

// Unconstrained resolution: every pair scoring at least the threshold. Not
// one-to-one.
struct ManyManyResolution {
  std::vector<Edge> pairs;
};

ManyManyResolution many_many(const MultipartiteGraph& g, double threshold);

// Maximum-weight one-to-one matching between two sources over edges scoring
// at least the threshold. Only positive-weight pairs are reported.
Matching exact_bipartite(const MultipartiteGraph& g, SourceIndex s1, SourceIndex s2, double threshold);

inline constexpr std::size_t kBruteForceStateLimit = 10'000'000;

// Exhaustive maximum-weight multi-partite matching. Memoizes the best
// completion for every set of already-assigned entities, so the work is
// bounded by 2^N * (combinations per step); instances whose estimate exceeds
// `state_limit` are refused with ResourceLimitError.
Matching exact_multipartite_bruteforce(const MultipartiteGraph& g, double threshold,
                                       std::size_t state_limit = kBruteForceStateLimit);

// Resolves sources one at a time in `order`: an exact bipartite matching of
// the first two, then an exact assignment of each following source's
// entities onto the cliques built so far (clique-to-entity score is the sum
// of pair scores to all clique members). Earlier decisions are never revised.
Matching sequential_bipartite(const MultipartiteGraph& g, std::span<const SourceIndex> order, double threshold);

}  // namespace multimatch
