#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "autotune/errors.hpp"
#include "autotune/gaussian_process.hpp"
#include "autotune/rng.hpp"
#include "dense_gp.hpp"

using namespace autotune;

namespace {

const std::vector<Observation> kFivePoints{
    {{1, 1, 1, 1, 1, 1}, 3.0},  {{4, 8, 2, 2, 4, 1}, 1.5},  {{16, 3, 9, 8, 1, 4}, 2.25},
    {{7, 7, 7, 4, 4, 4}, 0.75}, {{12, 15, 1, 1, 8, 2}, 4.0},
};

}  // namespace

TEST(GaussianProcess, MatchesDenseTextbookPosterior) {
  const SearchSpace space;
  Rng rng(1);
  for (double ls : {0.1, 0.2, 0.5, 1.0}) {
    for (double noise : {0.0, 0.01, 0.1}) {
      const auto model = GpModel::fit_with_length_scale(kFivePoints, space, ls, noise);
      const fixture::DenseGp oracle(kFivePoints, space, ls, noise + model.jitter());
      for (int i = 0; i < 50; ++i) {
        const auto c = i < 5 ? kFivePoints[static_cast<std::size_t>(i)].config : space.sample_uniform(rng, false);
        const auto got = model.posterior(c);
        const auto want = oracle.at(space, c);
        EXPECT_NEAR(got.mean, want.mean, 1e-8) << "ls=" << ls << " noise=" << noise;
        EXPECT_NEAR(got.variance, std::max(0.0, want.variance), 1e-8) << "ls=" << ls << " noise=" << noise;
      }
    }
  }
}

TEST(GaussianProcess, BatchAndSinglePosteriorAgree) {
  const SearchSpace space;
  const auto model = GpModel::fit(kFivePoints, space);
  Rng rng(2);
  std::vector<Configuration> queries;
  for (int i = 0; i < 20; ++i) queries.push_back(space.sample_uniform(rng, false));
  const auto batch = model.posterior(queries);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto one = model.posterior(queries[i]);
    EXPECT_NEAR(batch[i].mean, one.mean, 1e-12);
    EXPECT_NEAR(batch[i].variance, one.variance, 1e-12);
  }
}

TEST(GaussianProcess, NoiselessInterpolation) {
  const SearchSpace space;
  const auto model = GpModel::fit_with_length_scale(kFivePoints, space, 0.2, 0.0);
  for (const auto& o : kFivePoints) {
    const auto p = model.posterior(o.config);
    // Only the jitter separates these from exact interpolation.
    EXPECT_NEAR(p.mean, o.runtime, 1e-4);
    EXPECT_LT(p.variance, 1e-5);
  }
}

TEST(GaussianProcess, RevertsToPriorFarFromData) {
  const SearchSpace space;
  const std::vector<Observation> corner{{{1, 1, 1, 1, 1, 1}, 1.0}, {{1, 1, 2, 1, 1, 1}, 3.0}};
  const auto model = GpModel::fit_with_length_scale(corner, space, 0.01, 0.01);
  const auto p = model.posterior({16, 16, 16, 8, 8, 8});
  EXPECT_NEAR(p.mean, model.prior_mean(), 1e-9);
  EXPECT_NEAR(p.variance, model.prior_variance(), 1e-9);
  EXPECT_DOUBLE_EQ(model.prior_mean(), 2.0);
  EXPECT_DOUBLE_EQ(model.prior_variance(), 1.0);
}

TEST(GaussianProcess, VarianceIsNonNegative) {
  const SearchSpace space;
  Rng rng(3);
  std::vector<Observation> data;
  for (int i = 0; i < 60; ++i) {
    const auto c = space.sample_uniform(rng, false);
    data.push_back({c, std::log(1.0 + c.xt() + c.xw())});
  }
  const auto model = GpModel::fit(data, space);
  for (int i = 0; i < 500; ++i) EXPECT_GE(model.posterior(space.sample_uniform(rng, false)).variance, 0.0);
  for (const auto& o : data) EXPECT_GE(model.posterior(o.config).variance, 0.0);
}

TEST(GaussianProcess, GridPicksLargestLikelihood) {
  const SearchSpace space;
  const GpOptions options;
  const auto model = GpModel::fit(kFivePoints, space, options);
  double best = -std::numeric_limits<double>::infinity();
  double best_ls = 0.0;
  for (double ls : options.length_scale_grid) {
    const auto m = GpModel::fit_with_length_scale(kFivePoints, space, ls, options.noise_variance);
    if (m.log_marginal_likelihood() > best) {
      best = m.log_marginal_likelihood();
      best_ls = ls;
    }
  }
  EXPECT_EQ(model.length_scale(), best_ls);
  EXPECT_EQ(model.log_marginal_likelihood(), best);
}

TEST(GaussianProcess, SingularCovarianceIsNumericalError) {
  const SearchSpace space;
  EXPECT_THROW(GpModel::fit_with_length_scale(kFivePoints, space, 1e12, 0.0, 1e-17, 1e-16), NumericalError);
}

TEST(GaussianProcess, DuplicateInputsRecoverThroughJitter) {
  const SearchSpace space;
  const std::vector<Observation> dup{{{2, 2, 2, 2, 2, 2}, 1.0}, {{2, 2, 2, 2, 2, 2}, 1.0}, {{3, 2, 2, 2, 2, 2}, 2.0}};
  const auto model = GpModel::fit_with_length_scale(dup, space, 0.5, 0.0);
  EXPECT_GE(model.jitter(), 1e-6);
  EXPECT_LE(model.jitter(), 1e-3);
}

TEST(GaussianProcess, EmptyDataIsDomainError) {
  const SearchSpace space;
  EXPECT_THROW(GpModel::fit({}, space), DomainError);
}

TEST(ExpectedImprovement, ClosedFormCases) {
  const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  EXPECT_NEAR(expected_improvement(3.0, 1.0, 3.0), phi0, 1e-9);
  EXPECT_EQ(expected_improvement(5.0, 0.0, 4.0), 0.0);
  EXPECT_EQ(expected_improvement(4.0, 0.0, 4.0), 0.0);
  EXPECT_EQ(expected_improvement(3.0, 0.0, 4.0), 1.0);
}

TEST(ExpectedImprovement, MonteCarloCrossCheck) {
  Rng rng(4);
  const double mean = 1.3, sigma = 0.7, best = 1.0;
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) sum += std::max(0.0, best - (mean + sigma * rng.normal()));
  EXPECT_NEAR(expected_improvement(mean, sigma * sigma, best), sum / n, 2e-3);
}

TEST(ExpectedImprovement, DominatesPlainImprovement) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double mean = rng.uniform01() * 4.0 - 2.0;
    const double var = rng.uniform01() * 3.0;
    const double best = rng.uniform01() * 4.0 - 2.0;
    const double ei = expected_improvement(mean, var, best);
    EXPECT_GE(ei, 0.0);
    EXPECT_GE(ei + 1e-12, std::max(0.0, best - mean));
  }
}
