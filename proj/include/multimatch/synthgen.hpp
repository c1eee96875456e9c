#pragma once

// Synthetic worlds: n latent entities with k uniform features, observed in
// each of m sources through Gaussian noise, scored by cosine similarity.
//
// Random stream (std::mt19937_64 seeded with `seed`): the n x k true features
// row-major, then for each source, entity and feature one normal deviate.
// Uniforms use the top 53 bits of a draw; normals use Box-Muller, one pair
// per two deviates. Both transforms are fixed here so worlds reproduce
// across standard library implementations.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "multimatch/graph.hpp"

namespace multimatch {

struct SynthConfig {
  std::size_t n = 100;  // entities per source
  std::size_t m = 3;    // sources
  std::size_t k = 5;    // features per entity
  double sigma = 0.06;
  std::uint64_t seed = 1;

  // Throws ContractError when a field is out of range.
  void validate() const;
};

struct SynthWorld {
  SynthConfig config;
  std::vector<double> true_features;  // n x k, row-major
  std::vector<double> observed;       // m x n x k
  MultipartiteGraph graph;            // every cross-source pair, zeros included
  TruthSet truth;                     // (s_a, i) ~ (s_b, i) for all a < b

  std::span<const double> observed_row(std::size_t source, std::size_t entity) const {
    return {observed.data() + (source * config.n + entity) * config.k, config.k};
  }
};

// Cosine of the angle between `a` and `b`, clamped to [0, 1]; 0 if either is
// the zero vector.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

SynthWorld generate(const SynthConfig& cfg);

// Source names are "s<j>", entity names "e<i>".
std::string synth_source_name(std::size_t j);
std::string synth_entity_name(std::size_t i);

// world.json payload.
std::string world_metadata_json(const SynthConfig& cfg);

}  // namespace multimatch
