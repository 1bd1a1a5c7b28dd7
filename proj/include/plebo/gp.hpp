#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "plebo/errors.hpp"
#include "plebo/numerics.hpp"
#include "plebo/rng.hpp"
#include "plebo/types.hpp"

namespace plebo {

// Observations of one task: n points of dimension d, row-major, plus outputs.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::size_t dim) : dim_(dim) {}
  Dataset(std::size_t dim, std::vector<double> xs, std::vector<double> ys);

  std::size_t size() const { return ys_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return ys_.empty(); }

  void add(std::span<const double> x, double y);

  std::span<const double> point(std::size_t i) const {
    return {xs_.data() + i * dim_, dim_};
  }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  double y(std::size_t i) const { return ys_[i]; }

 private:
  std::size_t dim_ = 0;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

// Pointwise posterior mean and variance. Variance is clamped at zero.
struct Prediction {
  std::vector<double> mean;
  std::vector<double> variance;
};

// k_RBF(tau) = signal_variance * exp(-tau.tau / (2 l^2))
double rbf_kernel(std::span<const double> tau, const HyperParams& theta);

// Gram matrix K_ij = k_RBF(x_i - x_j) + noise_variance * [i == j].
SquareMatrix gram(const Dataset& d, const HyperParams& theta);

// Lower-triangular matrix of pairwise squared distances (and its dense
// rectangular counterpart); shared by the gram and predictive paths so the
// distances are computed once when many hyperparameter sets are scored.
std::vector<double> pairwise_sq_dists(const Dataset& d);
std::vector<double> cross_sq_dists(std::span<const double> query_xs,
                                   std::size_t dim, const Dataset& d);

// Gram matrix from precomputed pairwise squared distances (full n*n array).
SquareMatrix gram_from_sq_dists(std::span<const double> sq, std::size_t n,
                                const HyperParams& theta);

// log p(y | X, theta) for the zero-mean GP. Throws LikelihoodUndefined when
// the gram matrix cannot be factored.
double log_marginal_likelihood(const Dataset& d, const HyperParams& theta);

// As above but returns nullopt instead of throwing; the MCMC inner loop
// treats that as log-likelihood -inf.
std::optional<double> try_log_marginal_likelihood(
    const Dataset& d, const HyperParams& theta) noexcept;

// Gradient of the LML with respect to (log l, log signal_variance).
std::array<double, 2> lml_gradient(const Dataset& d, const HyperParams& theta);

// Posterior mean/variance at query points (row-major m*d). An empty dataset
// yields the prior: mean 0, variance signal_variance (+ noise if requested).
Prediction posterior_predictive(const Dataset& d, const HyperParams& theta,
                                std::span<const double> query_xs,
                                bool include_noise);

struct FitOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-7;
  double min_step = 1e-14;
  // Log-space clamps keeping the line search out of overflow territory.
  double log_lengthscale_min = std::log(1e-8);
  double log_lengthscale_max = std::log(1e8);
  double log_variance_min = std::log(1e-12);
  double log_variance_max = std::log(1e12);
};

// Accepted objective values, one per line-search acceptance; non-decreasing
// within each restart.
struct FitTrace {
  std::vector<std::vector<double>> per_restart;
};

// Multi-start backtracking gradient ascent over two log-parameters
// (log l, log signal_variance); shared by fit_map and fit_shared. The
// objective/gradient return nullopt where undefined. Throws FitFailed when
// every start point is undefined.
struct AscentProblem {
  std::function<std::optional<double>(const std::array<double, 2>&)> objective;
  std::function<std::optional<std::array<double, 2>>(
      const std::array<double, 2>&)>
      gradient;
};
std::array<double, 2> ascend_two_params(
    const AscentProblem& problem,
    std::span<const std::array<double, 2>> inits, const FitOptions& options,
    FitTrace* trace);

// Log-space start boxes derived from the data: lengthscale between the
// smallest nonzero pairwise distance and the diameter, signal variance
// bracketing var(y).
std::vector<std::array<double, 2>> sample_fit_inits(const Dataset& d,
                                                    int restarts,
                                                    RngStream& rng,
                                                    const FitOptions& options);

// Maximum-likelihood (or MAP, when a gamma prior is given) hyperparameters by
// multi-start gradient ascent with backtracking line search in
// (log l, log signal_variance). Throws FitFailed when no restart finds a
// point with defined likelihood.
HyperParams fit_map(const Dataset& d, const std::optional<HyperPrior>& prior,
                    int restarts, RngStream& rng, double noise_variance,
                    const FitOptions& options = {}, FitTrace* trace = nullptr);

}  // namespace plebo
