#pragma once

// Approximate max-weight multi-partite matching by max-sum message passing.
//
// Every tuple of entities (one slot per source, empty slots allowed) is a
// binary variable; a similarity factor rewards selecting it and one
// constraint factor per entity allows at most one selected tuple containing
// that entity. Only the differences between the "selected" and "not
// selected" constraint-to-variable messages (alpha) are tracked. For a fixed
// entity the alpha over all of its partner combinations takes just two
// values: the negated best partner objective everywhere except at the
// maximizing combination, which gets the negated second-best. AlphaStore
// keeps exactly that: 2 reals and one key tuple per entity.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "multimatch/graph.hpp"

namespace multimatch {

enum class Execution { Serial, Parallel };

// How an entity's best partner combination is found. Stepwise is the
// coordinate-ascent search used in production; Exhaustive enumerates every
// combination and is only feasible for tiny instances.
enum class SearchMode { Stepwise, Exhaustive };

struct MpConfig {
  std::size_t max_iters = 200;
  double convergence_fraction = 0.01;  // stop once fewer than this share of entries change
  double change_epsilon = 1e-6;
  std::size_t starts = 4;      // L: starting combinations per search
  std::size_t step_cap = 20;   // T: slot updates per start
  bool key_starts = true;      // also start from every message key that contains the entity
  double damping = 0.5;        // new = damping * old + (1 - damping) * computed
  SearchMode search = SearchMode::Stepwise;
  Execution execution = Execution::Parallel;
  bool track_weight = true;    // run a provisional selection after every round

  // Throws ContractError when a field is out of range.
  void validate() const;
};

// One slot per source: an entity index or kNullEntity. When a tuple is seen
// from an entity, that entity occupies its own slot.
using Tuple = std::vector<EntityIndex>;

class AlphaStore {
 public:
  AlphaStore() = default;
  // All-zero messages for every entity of `g`.
  explicit AlphaStore(const MultipartiteGraph& g);

  std::size_t size() const { return normal_.size(); }
  std::size_t source_count() const { return sources_; }

  double normal(std::size_t v) const { return normal_[v]; }
  double exception(std::size_t v) const { return exception_[v]; }
  std::span<const EntityIndex> exception_key(std::size_t v) const { return {keys_.data() + v * sources_, sources_}; }

  void set(std::size_t v, double normal, std::span<const EntityIndex> key, double exception);

  // Message from entity v's constraint to the variable `tuple` (which must
  // contain v): the exception value at the key, the normal value elsewhere.
  double value(std::size_t v, std::span<const EntityIndex> tuple) const;

  friend bool operator==(const AlphaStore&, const AlphaStore&) = default;

 private:
  std::size_t sources_ = 0;
  std::vector<double> normal_;
  std::vector<double> exception_;
  std::vector<EntityIndex> keys_;
};

struct SearchResult {
  Tuple best;
  double best_value = 0.0;
  double second_value = 0.0;
};

// Optional record of a stepwise search: every tuple the ascent stood on and,
// per start, the objective after each slot update.
struct SearchTrace {
  std::vector<Tuple> visited;
  std::vector<std::vector<double>> ascent;
};

// Sum of pair scores among the non-null slots of `tuple`.
double tuple_similarity(const MultipartiteGraph& g, std::span<const EntityIndex> tuple);

// The quantity an entity in source `self` maximizes over its partner
// combinations: alpha of every other non-null member for this tuple plus the
// tuple similarity.
double partner_objective(const MultipartiteGraph& g, const AlphaStore& alphas, std::span<const EntityIndex> tuple,
                         SourceIndex self);

// Selection score of a tuple: alpha of every non-null member plus similarity.
double selection_score(const MultipartiteGraph& g, const AlphaStore& alphas, std::span<const EntityIndex> tuple);

// Coordinate ascent over partner slots from up to cfg.starts starting tuples
// built from the two most similar entities per other source, plus (with
// cfg.key_starts) every exception key that contains `self`. The empty slot
// is always a candidate. Returns the best and second-best distinct tuples
// evaluated anywhere in the search; the all-empty tuple (value 0) is always
// among them.
SearchResult stepwise_search(const MultipartiteGraph& g, const AlphaStore& alphas, EntityRef self,
                             const MpConfig& cfg, SearchTrace* trace = nullptr);

// Exact best and second-best over every partner combination.
SearchResult exhaustive_search(const MultipartiteGraph& g, const AlphaStore& alphas, EntityRef self);

struct RoundResult {
  AlphaStore alphas;
  double changed_fraction = 0.0;
};

// One synchronous round: every entity's messages are recomputed from
// `previous`. Dispatches on cfg.execution; both paths give identical results.
RoundResult update_round(const MultipartiteGraph& g, const AlphaStore& previous, const MpConfig& cfg);
RoundResult update_round_serial(const MultipartiteGraph& g, const AlphaStore& previous, const MpConfig& cfg);
RoundResult update_round_parallel(const MultipartiteGraph& g, const AlphaStore& previous, const MpConfig& cfg);

// Candidate tuples (each entity's key plus the tuples its stepwise search
// stands on) with selection score >= 0, admitted greedily by descending
// score while they stay one-to-one.
Matching final_selection(const MultipartiteGraph& g, const AlphaStore& alphas, const MpConfig& cfg);

struct MpDiagnostics {
  std::size_t iterations_run = 0;
  std::vector<double> changed_fraction;
  std::vector<double> total_weight;  // NaN when weight tracking is off
  bool converged = false;
};

struct MpResult {
  Matching matching;
  MpDiagnostics diagnostics;
  AlphaStore alphas;
};

// Thresholds `g`, starts from zero messages and iterates until the changed
// share drops below cfg.convergence_fraction or cfg.max_iters rounds ran.
// Reported weights are measured on the unthresholded graph.
MpResult solve_mp(const MultipartiteGraph& g, double threshold, const MpConfig& cfg = {});

inline constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

// Matching weight for a one-to-one matching, kInfeasible otherwise.
double objective_value(const MultipartiteGraph& g, const Matching& m);

}  // namespace multimatch
