#pragma once

// Metrics, solver dispatch, threshold sweeps and weight comparisons.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "multimatch/graph.hpp"
#include "multimatch/mp_solver.hpp"
#include "multimatch/synthgen.hpp"

namespace multimatch {

using EntityPair = std::pair<EntityRef, EntityRef>;

struct PrecisionRecall {
  double precision = 1.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// 2pr / (p + r), or 0 when both are 0.
double f1_score(double precision, double recall);

// Every non-null member pair of every clique, oriented so first.source <
// second.source, sorted and deduplicated.
std::vector<EntityPair> matching_pairs(const Matching& m);

// Two-source protocol against labeled positives and negatives. Predicted
// pairs are the projection of `pairs` onto (s1, s2). A predicted pair is a
// false positive once per clause it meets: labeled negative (a negative
// (x, null) rejects every pair containing x), its first entity has a
// different labeled partner, or its second entity has one. Precision is 1
// when nothing is predicted or labeled; recall is 1 when there are no
// positives. Throws DataError when a labeled pair leaves {s1, s2}.
PrecisionRecall pr_real(std::span<const EntityPair> pairs, const TruthSet& truth, SourceIndex s1, SourceIndex s2);
PrecisionRecall pr_real(const Matching& m, const TruthSet& truth, SourceIndex s1, SourceIndex s2);

// All-pairs protocol: precision = C / T over the T predicted pairs of which C
// are positives (1 when T = 0); recall = C / |positives|.
PrecisionRecall pr_synth(std::span<const EntityPair> pairs, std::span<const EntityPair> positives);
// Recall denominator n * m * (m - 1) / 2 from the world's configuration.
PrecisionRecall pr_synth(const Matching& m, const SynthWorld& world);

// Chooses between the two protocols.
class Evaluator {
 public:
  static Evaluator real(TruthSet truth, SourceIndex s1, SourceIndex s2);
  static Evaluator synthetic(TruthSet truth);

  PrecisionRecall evaluate(std::span<const EntityPair> pairs) const;
  // "a|b" for the two-source protocol, every source name joined by '|' otherwise.
  std::string sources_label(const MultipartiteGraph& g) const;

 private:
  Evaluator() = default;
  TruthSet truth_;
  bool real_ = false;
  SourceIndex s1_ = 0, s2_ = 1;
};

enum class Algorithm { Greedy, Mp, ManyMany, Sequential, ExactBipartite, ExactBrute };

std::optional<Algorithm> parse_algorithm(std::string_view name);
std::string_view algorithm_name(Algorithm a);

struct AlgorithmOptions {
  MpConfig mp;
  std::vector<SourceIndex> order;  // sequential; empty means 0, 1, ..., m-1
  SourceIndex s1 = 0, s2 = 1;      // exact-bipartite
};

struct Resolution {
  Matching matching;                         // empty for many-many
  std::vector<EntityPair> pairs;             // resolved pairs, every algorithm
  double total_weight = 0.0;                 // on the unthresholded graph
  std::optional<MpDiagnostics> diagnostics;  // mp only
};

Resolution run_algorithm(const MultipartiteGraph& g, Algorithm a, double threshold, const AlgorithmOptions& opts);

struct PrPoint {
  double threshold = 0.0;
  double precision = 1.0;
  double recall = 0.0;
  double f1 = 0.0;
  double total_weight = 0.0;
};

// from, from + step, ... up to `to` inclusive (with 1e-9 slack in step
// units), each rounded to 10 decimals.
std::vector<double> threshold_range(double from, double to, double step);

// One independent solve per threshold on up to `jobs` threads; the result is
// ordered like `thresholds`.
std::vector<PrPoint> pr_curve(const MultipartiteGraph& g, Algorithm a, std::span<const double> thresholds,
                              const Evaluator& evaluator, const AlgorithmOptions& opts = {}, int jobs = 1);

double best_f1(std::span<const PrPoint> points);

inline constexpr std::string_view kPrHeader = "threshold,precision,recall,f1,total_weight,algorithm,sources";

void write_pr_rows(std::ostream& out, std::span<const PrPoint> points, std::string_view algorithm,
                   std::string_view sources);

struct WeightRow {
  std::string name;
  double weight = 0.0;
  double relative = 1.0;
};

// Weights relative to the entry named "mp" when present, else the first.
// A zero reference gives 1 for zero weights and +inf otherwise.
std::vector<WeightRow> weight_report(const MultipartiteGraph& g,
                                     std::span<const std::pair<std::string, Matching>> matchings);

}  // namespace multimatch
