#include "multimatch/eval.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

#include "multimatch/baselines.hpp"
#include "multimatch/errors.hpp"
#include "multimatch/greedy.hpp"
#include "multimatch/io.hpp"

namespace multimatch {

namespace {

EntityPair oriented(EntityRef a, EntityRef b) { return a.source < b.source ? EntityPair{a, b} : EntityPair{b, a}; }

double ratio_or(double num, double den, double fallback) { return den == 0.0 ? fallback : num / den; }

}  // namespace

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

std::vector<EntityPair> matching_pairs(const Matching& m) {
  std::vector<EntityPair> out;
  for (const Clique& c : m.cliques)
    for (std::size_t i = 0; i < c.members.size(); ++i) {
      if (c.members[i].is_null()) continue;
      for (std::size_t j = i + 1; j < c.members.size(); ++j)
        if (!c.members[j].is_null() && c.members[j].source != c.members[i].source)
          out.push_back(oriented(c.members[i], c.members[j]));
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PrecisionRecall pr_real(std::span<const EntityPair> pairs, const TruthSet& truth, SourceIndex s1, SourceIndex s2) {
  auto in_scope = [&](EntityRef r) { return r.source == s1 || r.source == s2; };
  // Orient every pair as (s1 side, s2 side).
  auto local = [&](EntityRef a, EntityRef b) { return a.source == s1 ? EntityPair{a, b} : EntityPair{b, a}; };

  std::set<EntityPair> positives;
  std::set<EntityPair> negatives;
  std::set<EntityRef> no_match;
  std::set<EntityRef> left_labeled, right_labeled;
  for (const auto& [a, b] : truth.positives) {
    if (!in_scope(a) || !in_scope(b) || a.source == b.source)
      throw DataError("truth pair outside the evaluated sources");
    const EntityPair p = local(a, b);
    positives.insert(p);
    left_labeled.insert(p.first);
    right_labeled.insert(p.second);
  }
  for (const auto& [a, b] : truth.negatives) {
    if (!in_scope(a) || !in_scope(b)) throw DataError("truth pair outside the evaluated sources");
    if (b.is_null()) {
      no_match.insert(a);
    } else if (a.is_null()) {
      no_match.insert(b);
    } else {
      if (a.source == b.source) throw DataError("truth pair outside the evaluated sources");
      negatives.insert(local(a, b));
    }
  }

  std::set<EntityPair> predicted;
  for (const auto& [a, b] : pairs) {
    if (a.is_null() || b.is_null()) continue;
    if ((a.source == s1 && b.source == s2) || (a.source == s2 && b.source == s1)) predicted.insert(local(a, b));
  }

  std::size_t tp = 0, fp = 0;
  for (const EntityPair& p : predicted) {
    const bool positive = positives.contains(p);
    tp += positive ? 1 : 0;
    if (negatives.contains(p) || no_match.contains(p.first) || no_match.contains(p.second)) ++fp;
    if (!positive && left_labeled.contains(p.first)) ++fp;
    if (!positive && right_labeled.contains(p.second)) ++fp;
  }
  const std::size_t fn = positives.size() - tp;
  PrecisionRecall out;
  out.precision = ratio_or(static_cast<double>(tp), static_cast<double>(tp + fp), 1.0);
  out.recall = ratio_or(static_cast<double>(tp), static_cast<double>(tp + fn), 1.0);
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

PrecisionRecall pr_real(const Matching& m, const TruthSet& truth, SourceIndex s1, SourceIndex s2) {
  return pr_real(matching_pairs(m), truth, s1, s2);
}

PrecisionRecall pr_synth(std::span<const EntityPair> pairs, std::span<const EntityPair> positives) {
  std::set<EntityPair> truth;
  for (const auto& [a, b] : positives) truth.insert(oriented(a, b));
  std::set<EntityPair> predicted;
  for (const auto& [a, b] : pairs)
    if (!a.is_null() && !b.is_null()) predicted.insert(oriented(a, b));
  std::size_t correct = 0;
  for (const EntityPair& p : predicted) correct += truth.contains(p) ? 1 : 0;
  PrecisionRecall out;
  out.precision = ratio_or(static_cast<double>(correct), static_cast<double>(predicted.size()), 1.0);
  out.recall = ratio_or(static_cast<double>(correct), static_cast<double>(truth.size()), 1.0);
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

PrecisionRecall pr_synth(const Matching& m, const SynthWorld& world) {
  const auto pairs = matching_pairs(m);
  const double n = static_cast<double>(world.config.n), sources = static_cast<double>(world.config.m);
  std::size_t correct = 0;
  for (const auto& [a, b] : pairs) correct += a.entity == b.entity ? 1 : 0;
  PrecisionRecall out;
  out.precision = ratio_or(static_cast<double>(correct), static_cast<double>(pairs.size()), 1.0);
  out.recall = ratio_or(2.0 * static_cast<double>(correct), n * sources * (sources - 1.0), 1.0);
  out.f1 = f1_score(out.precision, out.recall);
  return out;
}

Evaluator Evaluator::real(TruthSet truth, SourceIndex s1, SourceIndex s2) {
  if (s1 == s2) throw ContractError("Evaluator: the two sources must differ");
  Evaluator e;
  e.truth_ = std::move(truth);
  e.real_ = true;
  e.s1_ = s1;
  e.s2_ = s2;
  return e;
}

Evaluator Evaluator::synthetic(TruthSet truth) {
  Evaluator e;
  e.truth_ = std::move(truth);
  return e;
}

PrecisionRecall Evaluator::evaluate(std::span<const EntityPair> pairs) const {
  return real_ ? pr_real(pairs, truth_, s1_, s2_) : pr_synth(pairs, truth_.positives);
}

std::string Evaluator::sources_label(const MultipartiteGraph& g) const {
  if (real_) return g.source_name(s1_) + "|" + g.source_name(s2_);
  std::string out;
  for (SourceIndex s = 0; s < g.source_count(); ++s) {
    if (s) out += '|';
    out += g.source_name(s);
  }
  return out;
}

namespace {

constexpr std::pair<Algorithm, std::string_view> kAlgorithmNames[] = {
    {Algorithm::Greedy, "greedy"},
    {Algorithm::Mp, "mp"},
    {Algorithm::ManyMany, "manymany"},
    {Algorithm::Sequential, "sequential"},
    {Algorithm::ExactBipartite, "exact-bipartite"},
    {Algorithm::ExactBrute, "exact-brute"},
};

}  // namespace

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (const auto& [a, n] : kAlgorithmNames)
    if (n == name) return a;
  return std::nullopt;
}

std::string_view algorithm_name(Algorithm a) {
  for (const auto& [alg, n] : kAlgorithmNames)
    if (alg == a) return n;
  return "unknown";
}

Resolution run_algorithm(const MultipartiteGraph& g, Algorithm a, double threshold, const AlgorithmOptions& opts) {
  Resolution r;
  switch (a) {
    case Algorithm::Greedy:
      r.matching = greedy_match(g, threshold);
      break;
    case Algorithm::Mp: {
      MpResult res = solve_mp(g, threshold, opts.mp);
      r.matching = std::move(res.matching);
      r.diagnostics = std::move(res.diagnostics);
      break;
    }
    case Algorithm::ManyMany: {
      for (const Edge& e : many_many(g, threshold).pairs) {
        r.pairs.emplace_back(e.a, e.b);
        r.total_weight += e.score;
      }
      return r;
    }
    case Algorithm::Sequential: {
      std::vector<SourceIndex> order = opts.order;
      if (order.empty()) {
        order.resize(g.source_count());
        std::iota(order.begin(), order.end(), SourceIndex{0});
      }
      r.matching = sequential_bipartite(g, order, threshold);
      break;
    }
    case Algorithm::ExactBipartite:
      r.matching = exact_bipartite(g, opts.s1, opts.s2, threshold);
      break;
    case Algorithm::ExactBrute:
      r.matching = exact_multipartite_bruteforce(g, threshold);
      break;
  }
  r.matching = canonical(std::move(r.matching));
  r.pairs = matching_pairs(r.matching);
  r.total_weight = matching_weight(g, r.matching);
  return r;
}

std::vector<double> threshold_range(double from, double to, double step) {
  if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to) || to < from)
    throw ContractError("threshold_range: needs finite from <= to and step > 0");
  const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::round((from + static_cast<double>(i) * step) * 1e10) / 1e10;
  return out;
}

std::vector<PrPoint> pr_curve(const MultipartiteGraph& g, Algorithm a, std::span<const double> thresholds,
                              const Evaluator& evaluator, const AlgorithmOptions& opts, int jobs) {
  const auto n = static_cast<std::ptrdiff_t>(thresholds.size());
  std::vector<PrPoint> out(thresholds.size());
  std::vector<std::exception_ptr> errors(thresholds.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, jobs))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const double theta = thresholds[static_cast<std::size_t>(i)];
      const Resolution r = run_algorithm(g, a, theta, opts);
      const PrecisionRecall pr = evaluator.evaluate(r.pairs);
      out[static_cast<std::size_t>(i)] = {theta, pr.precision, pr.recall, pr.f1, r.total_weight};
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double best_f1(std::span<const PrPoint> points) {
  double best = 0.0;
  for (const PrPoint& p : points) best = std::max(best, p.f1);
  return best;
}

void write_pr_rows(std::ostream& out, std::span<const PrPoint> points, std::string_view algorithm,
                   std::string_view sources) {
  for (const PrPoint& p : points)
    out << format_number(p.threshold) << ',' << format_number(p.precision) << ',' << format_number(p.recall) << ','
        << format_number(p.f1) << ',' << format_number(p.total_weight) << ',' << csv_field(algorithm) << ','
        << csv_field(sources) << '\n';
}

std::vector<WeightRow> weight_report(const MultipartiteGraph& g,
                                     std::span<const std::pair<std::string, Matching>> matchings) {
  std::vector<WeightRow> rows;
  for (const auto& [name, m] : matchings) rows.push_back({name, matching_weight(g, m), 1.0});
  if (rows.empty()) return rows;
  auto ref = std::find_if(rows.begin(), rows.end(), [](const WeightRow& r) { return r.name == "mp"; });
  const double reference = ref != rows.end() ? ref->weight : rows.front().weight;
  for (WeightRow& r : rows) {
    if (reference == 0.0)
      r.relative = r.weight == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    else
      r.relative = r.weight / reference;
  }
  return rows;
}

}  // namespace multimatch
