#include "multimatch/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "multimatch/errors.hpp"

namespace multimatch {

namespace {

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace

void SynthConfig::validate() const {
  if (n < 1 || m < 1 || k < 1) throw ContractError("SynthConfig: n, m and k must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ContractError("SynthConfig: sigma must be finite and >= 0");
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    dot += a[t] * b[t];
    na += a[t] * a[t];
    nb += b[t] * b[t];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

std::string synth_source_name(std::size_t j) { return "s" + std::to_string(j); }
std::string synth_entity_name(std::size_t i) { return "e" + std::to_string(i); }

SynthWorld generate(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n, m = cfg.m, k = cfg.k;
  SynthWorld w;
  w.config = cfg;
  Stream rng(cfg.seed);
  w.true_features.resize(n * k);
  for (double& f : w.true_features) f = rng.uniform();
  w.observed.resize(m * n * k);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < k; ++t)
        w.observed[(j * n + i) * k + t] = w.true_features[i * k + t] + cfg.sigma * rng.normal();

  GraphBuilder b;
  for (std::size_t j = 0; j < m; ++j) {
    const SourceIndex s = b.add_source(synth_source_name(j));
    for (std::size_t i = 0; i < n; ++i) b.add_entity(s, synth_entity_name(i));
  }
  for (std::size_t sa = 0; sa < m; ++sa)
    for (std::size_t sb = sa + 1; sb < m; ++sb)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const EntityRef a{static_cast<SourceIndex>(sa), static_cast<EntityIndex>(i)};
          const EntityRef c{static_cast<SourceIndex>(sb), static_cast<EntityIndex>(j)};
          b.add_edge(a, c, cosine_similarity(w.observed_row(sa, i), w.observed_row(sb, j)));
          if (i == j) w.truth.positives.emplace_back(a, c);
        }
  w.graph = std::move(b).build();
  return w;
}

std::string world_metadata_json(const SynthConfig& cfg) {
  nlohmann::ordered_json j;
  j["entities"] = cfg.n;
  j["sources"] = cfg.m;
  j["features"] = cfg.k;
  j["sigma"] = cfg.sigma;
  j["seed"] = cfg.seed;
  j["rng"] = "mt19937_64";
  return j.dump(2) + "\n";
}

}  // namespace multimatch
