#include <gtest/gtest.h>

#include <cmath>

#include "autotune/errors.hpp"
#include "autotune/parzen.hpp"
#include "autotune/rng.hpp"
#include "fixtures.hpp"

using namespace autotune;

TEST(Parzen, GoodCount) {
  EXPECT_EQ(parzen_good_count(10, 0.15), 2u);
  EXPECT_EQ(parzen_good_count(20, 0.15), 3u);
  EXPECT_EQ(parzen_good_count(2, 0.15), 1u);
  EXPECT_EQ(parzen_good_count(4, 0.99), 3u);
}

TEST(Parzen, DensitiesSumToOne) {
  const SearchSpace space;
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Observation> history;
    const int n = 2 + static_cast<int>(rng.uniform_int(0, 200));
    for (int i = 0; i < n; ++i) history.push_back({space.sample_uniform(rng, false), rng.uniform01()});
    const double w = 0.01 + 0.99 * rng.uniform01();
    const auto pair = parzen_fit(history, space, 0.15, w);
    for (std::size_t d = 0; d < kDimensions; ++d) {
      double g = 0.0, b = 0.0;
      for (double v : pair.good[d]) {
        EXPECT_GT(v, 0.0);
        g += v;
      }
      for (double v : pair.bad[d]) b += v;
      EXPECT_NEAR(g, 1.0, 1e-12);
      EXPECT_NEAR(b, 1.0, 1e-12);
    }
  }
}

TEST(Parzen, IdenticalConfigurationsGiveUnitRatio) {
  const SearchSpace space;
  std::vector<Observation> history;
  for (int i = 0; i < 10; ++i) history.push_back({{3, 4, 5, 2, 2, 2}, 1.0 + i});
  const auto pair = parzen_fit(history, space);
  Rng rng(2);
  EXPECT_EQ(parzen_score(pair, {3, 4, 5, 2, 2, 2}), 1.0);
  for (int i = 0; i < 100; ++i) EXPECT_NEAR(parzen_score(pair, space.sample_uniform(rng, false)), 1.0, 1e-12);
}

TEST(Parzen, GoodOnlyConfigurationScoresAboveOne) {
  const SearchSpace space;
  std::vector<Observation> history{{{1, 1, 1, 1, 1, 1}, 0.5}};
  for (int i = 0; i < 9; ++i) history.push_back({{9, 9, 9, 5, 5, 5}, 2.0 + i});
  const auto pair = parzen_fit(history, space, 0.1, 0.9);
  EXPECT_GT(parzen_score(pair, {1, 1, 1, 1, 1, 1}), 1.0);
  EXPECT_LT(parzen_score(pair, {9, 9, 9, 5, 5, 5}), 1.0);
}

TEST(Parzen, HandComputedFourObservationFixture) {
  const auto space = SearchSpace::uniform({1, 2}, {1, 2});
  const std::vector<Observation> history{
      {{2, 2, 2, 2, 1, 1}, 4.0},
      {{1, 1, 1, 1, 1, 1}, 1.0},
      {{2, 2, 1, 1, 1, 1}, 3.0},
      {{2, 1, 1, 1, 1, 1}, 2.0},
  };
  const auto pair = parzen_fit(history, space, 0.25, 0.5);
  EXPECT_EQ(pair.good_count, 1u);
  EXPECT_EQ(pair.bad_count, 3u);
  EXPECT_DOUBLE_EQ(pair.good_density(0, 1), 0.75);
  EXPECT_DOUBLE_EQ(pair.bad_density(1, 2), 0.5 * 2.0 / 3.0 + 0.25);
  // 3 * 3/7 * 9/7 * 9/7 * 1 * 1
  EXPECT_NEAR(parzen_score(pair, {1, 2, 1, 1, 2, 1}), 729.0 / 343.0, 1e-12);
}

TEST(Parzen, SamplesFollowGoodDensity) {
  const auto space = SearchSpace::uniform({1, 4}, {1, 2});
  std::vector<Observation> history;
  history.push_back({{4, 1, 1, 1, 1, 1}, 0.1});
  for (int i = 0; i < 9; ++i) history.push_back({{1, 1, 1, 1, 1, 1}, 1.0});
  const auto pair = parzen_fit(history, space, 0.1, 0.2);
  Rng rng(3);
  int hits = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) hits += parzen_sample_good(pair, rng).xt() == 4 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(hits) / n, pair.good_density(0, 4), 0.01);
}

TEST(Parzen, Errors) {
  const SearchSpace space;
  std::vector<Observation> one{{Configuration{}, 1.0}};
  EXPECT_THROW(parzen_fit(one, space), DomainError);
  std::vector<Observation> two{{Configuration{}, 1.0}, {Configuration{}, 2.0}};
  EXPECT_THROW(parzen_fit(two, space, 1.0), DomainError);
  EXPECT_THROW(parzen_fit(two, space, 0.5, 0.0), DomainError);
}
