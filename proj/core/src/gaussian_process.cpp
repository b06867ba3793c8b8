#include "autotune/gaussian_process.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "autotune/errors.hpp"
#include "autotune/stats.hpp"

namespace autotune {

struct GpModel::State {
  SearchSpace space;
  Eigen::MatrixXd inputs;  // n x 6, unit cube
  Eigen::VectorXd alpha;
  Eigen::LLT<Eigen::MatrixXd> cholesky;
  double y_mean = 0.0;
  double y_scale = 1.0;
  double length_scale = 0.2;
  double noise_variance = 0.0;
  double jitter = 0.0;
  double log_marginal_likelihood = 0.0;
};

namespace {

Eigen::MatrixXd cross_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                 double length_scale) {
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      k(i, j) = matern52((a.row(i) - b.row(j)).norm() / length_scale);
    }
  }
  return k;
}

}  // namespace

double matern52(double r) {
  const double s = std::sqrt(5.0) * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

std::array<double, kDimensions> GpModel::normalize(const SearchSpace& space,
                                                   const Configuration& c) {
  std::array<double, kDimensions> x{};
  for (std::size_t d = 0; d < kDimensions; ++d) {
    const IntRange& r = space.range(d);
    x[d] = r.size() > 1 ? static_cast<double>(c[d] - r.lo) / static_cast<double>(r.hi - r.lo) : 0.0;
  }
  return x;
}

GpModel::GpModel(std::unique_ptr<State> state) : state_(std::move(state)) {}
GpModel::GpModel(GpModel&&) noexcept = default;
GpModel& GpModel::operator=(GpModel&&) noexcept = default;
GpModel::~GpModel() = default;

GpModel GpModel::fit_with_length_scale(std::span<const Observation> samples,
                                       const SearchSpace& space, double length_scale,
                                       double noise_variance, double jitter, double max_jitter) {
  if (samples.empty()) throw DomainError("gaussian process: no training data");
  if (!(length_scale > 0.0)) throw DomainError("gaussian process: length scale must be positive");
  if (noise_variance < 0.0) throw DomainError("gaussian process: noise variance must be >= 0");

  auto state = std::make_unique<State>();
  state->space = space;
  const auto n = static_cast<Eigen::Index>(samples.size());
  state->inputs.resize(n, static_cast<Eigen::Index>(kDimensions));
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto x = normalize(space, samples[static_cast<std::size_t>(i)].config);
    for (std::size_t d = 0; d < kDimensions; ++d) {
      state->inputs(i, static_cast<Eigen::Index>(d)) = x[d];
    }
    y(i) = samples[static_cast<std::size_t>(i)].runtime;
  }

  state->y_mean = y.mean();
  const double sd = std::sqrt((y.array() - state->y_mean).square().mean());
  state->y_scale = sd > 1e-12 * std::max(1.0, std::abs(state->y_mean)) ? sd : 1.0;
  const Eigen::VectorXd z = (y.array() - state->y_mean) / state->y_scale;

  state->length_scale = length_scale;
  state->noise_variance = noise_variance;
  const Eigen::MatrixXd k = cross_covariance(state->inputs, state->inputs, length_scale);

  double j = jitter;
  for (;;) {
    Eigen::MatrixXd kn = k;
    kn.diagonal().array() += noise_variance + j;
    state->cholesky.compute(kn);
    if (state->cholesky.info() == Eigen::Success) break;
    j *= 10.0;
    if (j > max_jitter * (1.0 + 1e-12)) {
      throw NumericalError("gaussian process: covariance not positive definite after jitter " +
                           std::to_string(max_jitter));
    }
  }
  state->jitter = j;
  state->alpha = state->cholesky.solve(z);

  const Eigen::MatrixXd l = state->cholesky.matrixL();
  state->log_marginal_likelihood = -0.5 * z.dot(state->alpha) -
                                   l.diagonal().array().log().sum() -
                                   0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  return GpModel(std::move(state));
}

GpModel GpModel::fit(std::span<const Observation> samples, const SearchSpace& space,
                     const GpOptions& options) {
  if (options.length_scale_grid.empty()) throw DomainError("gaussian process: empty length scale grid");
  std::unique_ptr<State> best;
  for (double ls : options.length_scale_grid) {
    try {
      GpModel candidate = fit_with_length_scale(samples, space, ls, options.noise_variance,
                                                options.jitter, options.max_jitter);
      if (!best || candidate.state_->log_marginal_likelihood > best->log_marginal_likelihood) {
        best = std::move(candidate.state_);
      }
    } catch (const NumericalError&) {
    }
  }
  if (!best) throw NumericalError("gaussian process: no length scale could be fitted");
  return GpModel(std::move(best));
}

std::vector<Posterior> GpModel::posterior(std::span<const Configuration> queries) const {
  const auto m = static_cast<Eigen::Index>(queries.size());
  Eigen::MatrixXd q(m, static_cast<Eigen::Index>(kDimensions));
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto x = normalize(state_->space, queries[static_cast<std::size_t>(i)]);
    for (std::size_t d = 0; d < kDimensions; ++d) q(i, static_cast<Eigen::Index>(d)) = x[d];
  }
  const Eigen::MatrixXd ks = cross_covariance(q, state_->inputs, state_->length_scale);
  const Eigen::VectorXd mean = ks * state_->alpha;
  const Eigen::MatrixXd v = state_->cholesky.matrixL().solve(ks.transpose());
  const Eigen::VectorXd explained = v.colwise().squaredNorm().transpose();

  const double scale2 = state_->y_scale * state_->y_scale;
  std::vector<Posterior> out(queries.size());
  for (Eigen::Index i = 0; i < m; ++i) {
    out[static_cast<std::size_t>(i)] = {state_->y_mean + state_->y_scale * mean(i),
                                        std::max(0.0, 1.0 - explained(i)) * scale2};
  }
  return out;
}

Posterior GpModel::posterior(const Configuration& c) const {
  return posterior(std::span<const Configuration>(&c, 1)).front();
}

double GpModel::length_scale() const { return state_->length_scale; }
double GpModel::noise_variance() const { return state_->noise_variance; }
double GpModel::jitter() const { return state_->jitter; }
double GpModel::log_marginal_likelihood() const { return state_->log_marginal_likelihood; }
double GpModel::prior_mean() const { return state_->y_mean; }
double GpModel::prior_variance() const { return state_->y_scale * state_->y_scale; }

double expected_improvement(double mean, double variance, double best_observed) {
  const double gain = best_observed - mean;
  if (!(variance > 0.0)) return std::max(0.0, gain);
  const double sigma = std::sqrt(variance);
  const double z = gain / sigma;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(0.0, gain * stats::normal_cdf(z) + sigma * pdf);
}

}  // namespace autotune
