#include "multimatch/mp_solver.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <optional>

#include "multimatch/errors.hpp"

namespace multimatch {

namespace {

constexpr std::size_t kMaxStartCombos = 64;

bool same_tuple(std::span<const EntityIndex> a, std::span<const EntityIndex> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

std::size_t non_null_count(std::span<const EntityIndex> t) {
  return static_cast<std::size_t>(std::count_if(t.begin(), t.end(), [](EntityIndex e) { return e != kNullEntity; }));
}

// Best and second-best distinct tuples seen so far.
class TopTwo {
 public:
  void offer(std::span<const EntityIndex> t, double value) {
    if (has_best_ && same_tuple(t, best_)) return;
    if (has_second_ && same_tuple(t, second_)) return;
    if (!has_best_ || value > best_value_) {
      if (has_best_) {
        second_.swap(best_);
        second_value_ = best_value_;
        has_second_ = true;
      }
      best_.assign(t.begin(), t.end());
      best_value_ = value;
      has_best_ = true;
    } else if (!has_second_ || value > second_value_) {
      second_.assign(t.begin(), t.end());
      second_value_ = value;
      has_second_ = true;
    }
  }

  // Without any alternative the exception value collapses onto the normal one.
  SearchResult result() const { return {best_, best_value_, has_second_ ? second_value_ : best_value_}; }

 private:
  Tuple best_, second_;
  double best_value_ = 0.0, second_value_ = 0.0;
  bool has_best_ = false, has_second_ = false;
};

// For every entity, the entities whose exception key contains it (itself
// included). Alpha departs from its normal value only at these tuples.
class KeyIndex {
 public:
  KeyIndex(const MultipartiteGraph& g, const AlphaStore& alphas) : offsets_(alphas.size() + 1, 0) {
    const std::size_t n = alphas.size();
    auto each_member = [&](auto&& fn) {
      for (std::size_t v = 0; v < n; ++v) {
        const auto key = alphas.exception_key(v);
        if (non_null_count(key) < 2) continue;
        for (SourceIndex s = 0; s < key.size(); ++s)
          if (key[s] != kNullEntity) fn(g.global_index({s, key[s]}), v);
      }
    };
    each_member([&](std::size_t u, std::size_t) { ++offsets_[u + 1]; });
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    owners_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    each_member([&](std::size_t u, std::size_t v) { owners_[fill[u]++] = v; });
  }

  std::span<const std::size_t> owners(std::size_t u) const {
    return {owners_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> owners_;
};

// Per-thread search state: dense score accumulators per source.
class SearchEngine {
 public:
  SearchEngine(const MultipartiteGraph& g, const AlphaStore& alphas, const MpConfig& cfg,
               const KeyIndex* keys = nullptr)
      : g_(g), alphas_(alphas), cfg_(cfg), keys_(keys), m_(g.source_count()), acc_(m_) {
    for (SourceIndex s = 0; s < m_; ++s) acc_[s].assign(g.entity_count(s), 0.0);
  }

  SearchResult stepwise(EntityRef self, SearchTrace* trace) {
    TopTwo top;
    Tuple tuple(m_, kNullEntity);
    tuple[self.source] = self.entity;
    top.offer(tuple, 0.0);
    std::vector<SourceIndex> others;
    for (SourceIndex s = 0; s < m_; ++s)
      if (s != self.source) others.push_back(s);
    if (others.empty()) return top.result();

    for (Tuple& start : start_tuples(self, others)) {
      tuple = std::move(start);
      double value = partner_objective(g_, alphas_, tuple, self.source);
      top.offer(tuple, value);
      if (trace) {
        trace->visited.push_back(tuple);
        trace->ascent.push_back({value});
      }
      std::size_t idle = 0, k = 0;
      for (std::size_t step = 0; step < cfg_.step_cap && idle < others.size(); ++step) {
        const SourceIndex slot = others[k++ % others.size()];
        const auto [choice, current, improved] = optimize_slot(tuple, self.source, slot, top);
        if (improved > current) {
          tuple[slot] = choice;
          value = improved;
          idle = 0;
          if (trace) trace->visited.push_back(tuple);
        } else {
          ++idle;
        }
        if (trace) trace->ascent.back().push_back(value);
      }
    }
    return top.result();
  }

  SearchResult exhaustive(EntityRef self) {
    TopTwo top;
    Tuple tuple(m_, kNullEntity);
    tuple[self.source] = self.entity;
    std::vector<SourceIndex> others;
    for (SourceIndex s = 0; s < m_; ++s)
      if (s != self.source) others.push_back(s);
    // Odometer; each slot runs null, 0, 1, ..., n_s - 1.
    while (true) {
      top.offer(tuple, partner_objective(g_, alphas_, tuple, self.source));
      std::size_t pos = 0;
      for (; pos < others.size(); ++pos) {
        EntityIndex& digit = tuple[others[pos]];
        const auto limit = static_cast<EntityIndex>(g_.entity_count(others[pos]));
        digit = (digit == kNullEntity) ? 0 : digit + 1;
        if (digit < limit) break;
        digit = kNullEntity;
      }
      if (pos == others.size()) break;
    }
    return top.result();
  }

 private:
  struct SlotOutcome {
    EntityIndex choice;
    double current;   // objective with the slot's present occupant
    double improved;  // best objective over the slot's candidates
  };

  // Re-optimizes one slot with every other slot fixed. Each candidate's
  // objective is the fixed-pair similarity plus its pair scores to the fixed
  // members plus the alpha terms, which depend on the candidate only through
  // key equality.
  SlotOutcome optimize_slot(Tuple& tuple, SourceIndex self, SourceIndex slot, TopTwo& top) {
    const EntityIndex occupant = tuple[slot];
    fixed_.clear();
    double fixed_pairs = 0.0;
    for (SourceIndex u = 0; u < m_; ++u) {
      if (u == slot || tuple[u] == kNullEntity) continue;
      for (const FixedMember& f : fixed_)
        fixed_pairs += g_.pair_score({f.source, tuple[f.source]}, {u, tuple[u]});
      FixedMember f{u, 0.0, 0.0, false, kNullEntity};
      if (u != self) {
        const std::size_t v = g_.global_index({u, tuple[u]});
        const auto key = alphas_.exception_key(v);
        f.normal = alphas_.normal(v);
        f.exception = alphas_.exception(v);
        f.key_matches_elsewhere = true;
        for (SourceIndex w = 0; w < m_; ++w)
          if (w != slot && key[w] != tuple[w]) {
            f.key_matches_elsewhere = false;
            break;
          }
        f.key_at_slot = key[slot];
      }
      fixed_.push_back(f);
    }

    auto& acc = acc_[slot];
    touched_.clear();
    for (const FixedMember& f : fixed_) {
      for (const Neighbor& nb : g_.neighbors({f.source, tuple[f.source]}, slot)) {
        if (acc[nb.ref.entity] == 0.0) touched_.push_back(nb.ref.entity);
        acc[nb.ref.entity] += nb.score;
      }
    }
    if (occupant != kNullEntity && acc[occupant] == 0.0) touched_.push_back(occupant);
    std::sort(touched_.begin(), touched_.end());
    touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());

    auto fixed_alpha = [&](EntityIndex candidate) {
      double sum = 0.0;
      for (const FixedMember& f : fixed_) {
        if (f.source == self) continue;
        sum += (f.key_matches_elsewhere && f.key_at_slot == candidate) ? f.exception : f.normal;
      }
      return sum;
    };

    tuple[slot] = kNullEntity;
    double value = fixed_pairs + fixed_alpha(kNullEntity);
    top.offer(tuple, value);
    EntityIndex choice = kNullEntity;
    double best = value;
    double current = value;
    for (EntityIndex x : touched_) {
      tuple[slot] = x;
      const double own = alphas_.value(g_.global_index({slot, x}), tuple);
      value = fixed_pairs + acc[x] + fixed_alpha(x) + own;
      acc[x] = 0.0;
      top.offer(tuple, value);
      if (x == occupant) current = value;
      if (value > best) {
        best = value;
        choice = x;
      }
    }
    // Ties keep the present occupant.
    if (best == current) choice = occupant;
    tuple[slot] = occupant;
    return {choice, current, best};
  }

  std::vector<Tuple> start_tuples(EntityRef self, const std::vector<SourceIndex>& others) {
    std::vector<std::vector<EntityIndex>> options(others.size());
    for (std::size_t j = 0; j < others.size(); ++j) {
      auto nbs = g_.neighbors(self, others[j]);
      std::vector<Neighbor> top(nbs.begin(), nbs.end());
      const std::size_t keep = std::min<std::size_t>(2, top.size());
      std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(keep), top.end(),
                        [](const Neighbor& a, const Neighbor& b) {
                          if (a.score != b.score) return a.score > b.score;
                          return a.ref.entity < b.ref.entity;
                        });
      for (std::size_t i = 0; i < keep; ++i) options[j].push_back(top[i].ref.entity);
      if (options[j].size() < 2) options[j].push_back(kNullEntity);
    }
    std::size_t combos = 1;
    for (std::size_t j = 0; j < others.size() && combos < kMaxStartCombos; ++j) combos *= options[j].size();
    combos = std::min(combos, kMaxStartCombos);

    std::vector<std::pair<double, Tuple>> ranked;
    for (std::size_t code = 0; code < combos; ++code) {
      Tuple t(m_, kNullEntity);
      t[self.source] = self.entity;
      std::size_t rest = code;
      for (std::size_t j = 0; j < others.size(); ++j) {
        t[others[j]] = options[j][rest % options[j].size()];
        rest /= options[j].size();
      }
      const bool dup = std::any_of(ranked.begin(), ranked.end(), [&](const auto& r) { return r.second == t; });
      if (!dup) ranked.emplace_back(partner_objective(g_, alphas_, t, self.source), std::move(t));
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<Tuple> out;
    for (std::size_t i = 0; i < ranked.size() && out.size() < cfg_.starts; ++i) out.push_back(std::move(ranked[i].second));
    if (keys_) {
      for (std::size_t owner : keys_->owners(g_.global_index(self))) {
        const auto key = alphas_.exception_key(owner);
        if (std::none_of(out.begin(), out.end(), [&](const Tuple& t) { return same_tuple(t, key); }))
          out.emplace_back(key.begin(), key.end());
      }
    }
    return out;
  }

  struct FixedMember {
    SourceIndex source;
    double normal, exception;
    bool key_matches_elsewhere;
    EntityIndex key_at_slot;
  };

  const MultipartiteGraph& g_;
  const AlphaStore& alphas_;
  const MpConfig& cfg_;
  const KeyIndex* keys_;
  std::size_t m_;
  std::vector<std::vector<double>> acc_;
  std::vector<EntityIndex> touched_;
  std::vector<FixedMember> fixed_;
};

// Recomputes entity v's messages into `next`; returns whether they moved.
bool update_entity(SearchEngine& engine, const MultipartiteGraph& g, const AlphaStore& previous, AlphaStore& next,
                   const MpConfig& cfg, std::size_t v) {
  const EntityRef self = g.ref_of(v);
  const SearchResult r = cfg.search == SearchMode::Stepwise ? engine.stepwise(self, nullptr) : engine.exhaustive(self);
  double normal = -r.best_value;
  double exception = -r.second_value;
  if (cfg.damping > 0.0) {
    // Blend with the previous message at the same tuples: its value at the
    // new key is the old exception only if the key did not move.
    normal = cfg.damping * previous.normal(v) + (1.0 - cfg.damping) * normal;
    exception = cfg.damping * previous.value(v, r.best) + (1.0 - cfg.damping) * exception;
  }
  next.set(v, normal, r.best, exception);
  return std::abs(normal - previous.normal(v)) > cfg.change_epsilon ||
         std::abs(exception - previous.exception(v)) > cfg.change_epsilon ||
         !same_tuple(r.best, previous.exception_key(v));
}

std::unique_ptr<KeyIndex> key_index(const MultipartiteGraph& g, const AlphaStore& alphas, const MpConfig& cfg) {
  return cfg.key_starts ? std::make_unique<KeyIndex>(g, alphas) : nullptr;
}

double fraction(std::size_t count, std::size_t total) {
  return total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
}

}  // namespace

void MpConfig::validate() const {
  if (max_iters < 1) throw ContractError("MpConfig: max_iters must be >= 1");
  if (!(convergence_fraction > 0.0 && convergence_fraction <= 1.0))
    throw ContractError("MpConfig: convergence_fraction must lie in (0, 1]");
  if (!(change_epsilon >= 0.0)) throw ContractError("MpConfig: change_epsilon must be >= 0");
  if (starts < 1) throw ContractError("MpConfig: starts must be >= 1");
  if (step_cap < 1) throw ContractError("MpConfig: step_cap must be >= 1");
  if (!(damping >= 0.0 && damping < 1.0)) throw ContractError("MpConfig: damping must lie in [0, 1)");
}

AlphaStore::AlphaStore(const MultipartiteGraph& g)
    : sources_(g.source_count()),
      normal_(g.total_entities(), 0.0),
      exception_(g.total_entities(), 0.0),
      keys_(g.total_entities() * g.source_count(), kNullEntity) {
  for (std::size_t v = 0; v < normal_.size(); ++v) {
    const EntityRef r = g.ref_of(v);
    keys_[v * sources_ + r.source] = r.entity;
  }
}

void AlphaStore::set(std::size_t v, double normal, std::span<const EntityIndex> key, double exception) {
  normal_[v] = normal;
  exception_[v] = exception;
  std::copy(key.begin(), key.end(), keys_.begin() + static_cast<std::ptrdiff_t>(v * sources_));
}

double AlphaStore::value(std::size_t v, std::span<const EntityIndex> tuple) const {
  return same_tuple(exception_key(v), tuple) ? exception_[v] : normal_[v];
}

double tuple_similarity(const MultipartiteGraph& g, std::span<const EntityIndex> tuple) {
  double total = 0.0;
  for (SourceIndex a = 0; a < tuple.size(); ++a) {
    if (tuple[a] == kNullEntity) continue;
    for (SourceIndex b = a + 1; b < tuple.size(); ++b)
      if (tuple[b] != kNullEntity) total += g.pair_score({a, tuple[a]}, {b, tuple[b]});
  }
  return total;
}

double partner_objective(const MultipartiteGraph& g, const AlphaStore& alphas, std::span<const EntityIndex> tuple,
                         SourceIndex self) {
  double total = tuple_similarity(g, tuple);
  for (SourceIndex t = 0; t < tuple.size(); ++t)
    if (t != self && tuple[t] != kNullEntity) total += alphas.value(g.global_index({t, tuple[t]}), tuple);
  return total;
}

double selection_score(const MultipartiteGraph& g, const AlphaStore& alphas, std::span<const EntityIndex> tuple) {
  double total = tuple_similarity(g, tuple);
  for (SourceIndex t = 0; t < tuple.size(); ++t)
    if (tuple[t] != kNullEntity) total += alphas.value(g.global_index({t, tuple[t]}), tuple);
  return total;
}

SearchResult stepwise_search(const MultipartiteGraph& g, const AlphaStore& alphas, EntityRef self,
                             const MpConfig& cfg, SearchTrace* trace) {
  if (self.is_null()) throw ContractError("stepwise_search: entity must be non-null");
  std::optional<KeyIndex> keys;
  if (cfg.key_starts) keys.emplace(g, alphas);
  SearchEngine engine(g, alphas, cfg, keys ? &*keys : nullptr);
  return engine.stepwise(self, trace);
}

SearchResult exhaustive_search(const MultipartiteGraph& g, const AlphaStore& alphas, EntityRef self) {
  if (self.is_null()) throw ContractError("exhaustive_search: entity must be non-null");
  MpConfig cfg;
  SearchEngine engine(g, alphas, cfg);
  return engine.exhaustive(self);
}

RoundResult update_round_serial(const MultipartiteGraph& g, const AlphaStore& previous, const MpConfig& cfg) {
  const std::size_t n = g.total_entities();
  RoundResult out{previous, 0.0};
  const auto keys = key_index(g, previous, cfg);
  SearchEngine engine(g, previous, cfg, keys.get());
  std::size_t changed = 0;
  for (std::size_t v = 0; v < n; ++v) changed += update_entity(engine, g, previous, out.alphas, cfg, v) ? 1 : 0;
  out.changed_fraction = fraction(changed, n);
  return out;
}

RoundResult update_round_parallel(const MultipartiteGraph& g, const AlphaStore& previous, const MpConfig& cfg) {
  const auto n = static_cast<std::ptrdiff_t>(g.total_entities());
  RoundResult out{previous, 0.0};
  std::ptrdiff_t changed = 0;
  const auto keys = key_index(g, previous, cfg);
#pragma omp parallel reduction(+ : changed)
  {
    SearchEngine engine(g, previous, cfg, keys.get());
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t v = 0; v < n; ++v)
      changed += update_entity(engine, g, previous, out.alphas, cfg, static_cast<std::size_t>(v)) ? 1 : 0;
  }
  out.changed_fraction = fraction(static_cast<std::size_t>(changed), static_cast<std::size_t>(n));
  return out;
}

RoundResult update_round(const MultipartiteGraph& g, const AlphaStore& previous, const MpConfig& cfg) {
  return cfg.execution == Execution::Parallel ? update_round_parallel(g, previous, cfg)
                                              : update_round_serial(g, previous, cfg);
}

Matching final_selection(const MultipartiteGraph& g, const AlphaStore& alphas, const MpConfig& cfg) {
  const std::size_t m = g.source_count();
  const auto n = static_cast<std::ptrdiff_t>(g.total_entities());
  std::vector<std::vector<Tuple>> per_entity(static_cast<std::size_t>(n));
  const auto keys = key_index(g, alphas, cfg);

  auto collect = [&](SearchEngine& engine, std::size_t v) {
    SearchTrace trace;
    engine.stepwise(g.ref_of(v), &trace);
    auto& pool = per_entity[v];
    const auto key = alphas.exception_key(v);
    pool.emplace_back(key.begin(), key.end());
    for (Tuple& t : trace.visited) pool.push_back(std::move(t));
    std::erase_if(pool, [](const Tuple& t) { return non_null_count(t) < 2; });
  };
  if (cfg.execution == Execution::Parallel) {
#pragma omp parallel
    {
      SearchEngine engine(g, alphas, cfg, keys.get());
#pragma omp for schedule(dynamic, 16)
      for (std::ptrdiff_t v = 0; v < n; ++v) collect(engine, static_cast<std::size_t>(v));
    }
  } else {
    SearchEngine engine(g, alphas, cfg, keys.get());
    for (std::ptrdiff_t v = 0; v < n; ++v) collect(engine, static_cast<std::size_t>(v));
  }

  std::vector<Tuple> pool;
  for (auto& list : per_entity)
    for (Tuple& t : list) pool.push_back(std::move(t));
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  std::vector<double> score(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) score[i] = selection_score(g, alphas, pool[i]);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  std::vector<char> used(static_cast<std::size_t>(n), 0);
  Matching out;
  for (std::size_t i : order) {
    if (score[i] < 0.0) break;
    const Tuple& t = pool[i];
    bool free = true;
    for (SourceIndex s = 0; s < m && free; ++s)
      if (t[s] != kNullEntity && used[g.global_index({s, t[s]})]) free = false;
    if (!free) continue;
    Clique c;
    for (SourceIndex s = 0; s < m; ++s) {
      if (t[s] == kNullEntity) continue;
      used[g.global_index({s, t[s]})] = 1;
      c.members.push_back({s, t[s]});
    }
    out.cliques.push_back(std::move(c));
  }
  return canonical(std::move(out));
}

MpResult solve_mp(const MultipartiteGraph& g, double threshold, const MpConfig& cfg) {
  cfg.validate();
  const MultipartiteGraph graph = apply_threshold(g, threshold);
  MpResult result;
  result.alphas = AlphaStore(graph);
  auto& diag = result.diagnostics;
  bool have_selection = false;
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    RoundResult round = update_round(graph, result.alphas, cfg);
    result.alphas = std::move(round.alphas);
    diag.changed_fraction.push_back(round.changed_fraction);
    ++diag.iterations_run;
    if (cfg.track_weight) {
      result.matching = final_selection(graph, result.alphas, cfg);
      diag.total_weight.push_back(matching_weight(g, result.matching));
      have_selection = true;
    } else {
      diag.total_weight.push_back(std::numeric_limits<double>::quiet_NaN());
      have_selection = false;
    }
    if (round.changed_fraction < cfg.convergence_fraction) {
      diag.converged = true;
      break;
    }
  }
  if (!have_selection) result.matching = final_selection(graph, result.alphas, cfg);
  return result;
}

double objective_value(const MultipartiteGraph& g, const Matching& m) {
  if (!validate_one_to_one(m).empty()) return kInfeasible;
  return matching_weight(g, m);
}

}  // namespace multimatch
