#include <gtest/gtest.h>

#include <cmath>
#include <json.hpp>

#include "multimatch/baselines.hpp"
#include "multimatch/errors.hpp"
#include "multimatch/eval.hpp"
#include "multimatch/synthgen.hpp"

namespace mm = multimatch;

namespace {

mm::SynthConfig config(std::size_t n, std::size_t m, std::size_t k, double sigma, std::uint64_t seed) {
  mm::SynthConfig c;
  c.n = n;
  c.m = m;
  c.k = k;
  c.sigma = sigma;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(SynthConfig, RejectsBadValues) {
  EXPECT_THROW(config(0, 3, 5, 0.1, 1).validate(), mm::ContractError);
  EXPECT_THROW(config(3, 0, 5, 0.1, 1).validate(), mm::ContractError);
  EXPECT_THROW(config(3, 3, 0, 0.1, 1).validate(), mm::ContractError);
  EXPECT_THROW(config(3, 3, 5, -0.1, 1).validate(), mm::ContractError);
  EXPECT_NO_THROW(config(3, 3, 5, 0.0, 1).validate());
}

TEST(Cosine, BasicValues) {
  const std::vector<double> a{1, 0}, b{0, 1}, c{2, 0}, d{-1, 0}, z{0, 0};
  EXPECT_DOUBLE_EQ(mm::cosine_similarity(a, b), 0.0);
  EXPECT_DOUBLE_EQ(mm::cosine_similarity(a, c), 1.0);
  EXPECT_DOUBLE_EQ(mm::cosine_similarity(a, d), 0.0);
  EXPECT_DOUBLE_EQ(mm::cosine_similarity(a, z), 0.0);
  const std::vector<double> p{0.3, 0.7, 0.1};
  EXPECT_EQ(mm::cosine_similarity(p, p), 1.0);
}

TEST(Generate, SizesAndDenseScores) {
  const auto w = mm::generate(config(7, 4, 3, 0.05, 9));
  EXPECT_EQ(w.true_features.size(), 7u * 3u);
  EXPECT_EQ(w.observed.size(), 4u * 7u * 3u);
  EXPECT_EQ(w.graph.source_count(), 4u);
  EXPECT_EQ(w.graph.edge_count(), 7u * 7u * 4u * 3u / 2u);
  EXPECT_EQ(w.truth.positives.size(), 7u * 4u * 3u / 2u);
  for (double f : w.true_features) {
    EXPECT_GE(f, 0.0);
    EXPECT_LT(f, 1.0);
  }
  for (const auto& e : w.graph.edges()) {
    EXPECT_GE(e.score, 0.0);
    EXPECT_LE(e.score, 1.0);
  }
  EXPECT_EQ(w.graph.source_name(2), "s2");
  EXPECT_EQ(w.graph.entity_name({1, 5}), "e5");
}

TEST(Generate, ScoresMatchObservedCosine) {
  const auto w = mm::generate(config(5, 3, 4, 0.3, 2));
  for (const auto& e : w.graph.edges())
    EXPECT_EQ(e.score, mm::cosine_similarity(w.observed_row(e.a.source, e.a.entity),
                                             w.observed_row(e.b.source, e.b.entity)));
}

TEST(Generate, ZeroNoiseMakesCopiesIdentical) {
  const auto w = mm::generate(config(6, 3, 5, 0.0, 4));
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t s = 1; s < 3; ++s)
      for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(w.observed_row(s, i)[t], w.observed_row(0, i)[t]);
    const mm::EntityRef self{0, static_cast<mm::EntityIndex>(i)};
    const double own = w.graph.pair_score(self, {1, static_cast<mm::EntityIndex>(i)});
    EXPECT_EQ(own, 1.0);
    for (const auto& nb : w.graph.neighbors(self, 1)) EXPECT_LE(nb.score, own);
  }
}

TEST(Generate, ZeroNoiseBruteForceRecoversIdentity) {
  const auto w = mm::generate(config(3, 3, 5, 0.0, 5));
  const auto m = mm::exact_multipartite_bruteforce(w.graph, 0.0);
  const auto pr = mm::pr_synth(m, w);
  EXPECT_DOUBLE_EQ(pr.f1, 1.0);
}

TEST(Generate, SameSeedSameWorld) {
  const auto a = mm::generate(config(10, 3, 5, 0.1, 77));
  const auto b = mm::generate(config(10, 3, 5, 0.1, 77));
  const auto c = mm::generate(config(10, 3, 5, 0.1, 78));
  EXPECT_EQ(a.observed, b.observed);
  EXPECT_EQ(a.true_features, b.true_features);
  EXPECT_NE(a.observed, c.observed);
}

TEST(Generate, NoiseHasRequestedSpread) {
  const double sigma = 0.2;
  const auto w = mm::generate(config(400, 3, 5, sigma, 6));
  double sum = 0, sq = 0;
  std::size_t count = 0;
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t i = 0; i < 400; ++i)
      for (std::size_t t = 0; t < 5; ++t) {
        const double d = w.observed_row(s, i)[t] - w.true_features[i * 5 + t];
        sum += d;
        sq += d * d;
        ++count;
      }
  const double mean = sum / static_cast<double>(count);
  const double sd = std::sqrt(sq / static_cast<double>(count) - mean * mean);
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(sd, sigma, 0.01);
}

TEST(Generate, ObservedFeaturesAreNotClamped) {
  const auto w = mm::generate(config(200, 2, 5, 0.3, 8));
  const bool outside = std::any_of(w.observed.begin(), w.observed.end(), [](double x) { return x < 0.0 || x > 1.0; });
  EXPECT_TRUE(outside);
}

TEST(WorldMetadata, EchoesConfig) {
  const auto j = nlohmann::json::parse(mm::world_metadata_json(config(10, 3, 5, 0.06, 7)));
  EXPECT_EQ(j["entities"], 10);
  EXPECT_EQ(j["sources"], 3);
  EXPECT_EQ(j["features"], 5);
  EXPECT_DOUBLE_EQ(j["sigma"].get<double>(), 0.06);
  EXPECT_EQ(j["seed"], 7);
}
