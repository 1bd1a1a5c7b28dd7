#include "plebo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plebo/distributions.hpp"
#include "plebo/kernels.hpp"

namespace plebo {

Dataset::Dataset(std::size_t dim, std::vector<double> xs,
                 std::vector<double> ys)
    : dim_(dim), xs_(std::move(xs)), ys_(std::move(ys)) {
  if (dim_ == 0 || xs_.size() != ys_.size() * dim_)
    throw DimensionMismatch("Dataset: xs/ys size mismatch");
}

void Dataset::add(std::span<const double> x, double y) {
  if (dim_ == 0) dim_ = x.size();
  if (x.size() != dim_) throw DimensionMismatch("Dataset::add: wrong dim");
  xs_.insert(xs_.end(), x.begin(), x.end());
  ys_.push_back(y);
}

double rbf_kernel(std::span<const double> tau, const HyperParams& theta) {
  double sq = 0.0;
  for (double t : tau) sq += t * t;
  return theta.signal_variance *
         std::exp(-sq / (2.0 * theta.lengthscale * theta.lengthscale));
}

std::vector<double> pairwise_sq_dists(const Dataset& d) {
  const auto& ops = kernels::active();
  const std::size_t n = d.size();
  std::vector<double> sq(n * n);
  for (std::size_t i = 0; i < n; ++i)
    ops.sq_dist(d.point(i).data(), d.xs().data(), n, d.dim(),
                sq.data() + i * n);
  return sq;
}

std::vector<double> cross_sq_dists(std::span<const double> query_xs,
                                   std::size_t dim, const Dataset& d) {
  if (dim != d.dim() && !d.empty())
    throw DimensionMismatch("cross_sq_dists: dimension mismatch");
  const auto& ops = kernels::active();
  const std::size_t m = query_xs.size() / dim;
  const std::size_t n = d.size();
  std::vector<double> sq(m * n);
  for (std::size_t j = 0; j < m; ++j)
    ops.sq_dist(query_xs.data() + j * dim, d.xs().data(), n, dim,
                sq.data() + j * n);
  return sq;
}

SquareMatrix gram_from_sq_dists(std::span<const double> sq, std::size_t n,
                                const HyperParams& theta) {
  const auto& ops = kernels::active();
  SquareMatrix k(n);
  const double gamma = 1.0 / (2.0 * theta.lengthscale * theta.lengthscale);
  ops.rbf_from_sqdist(theta.signal_variance, gamma, sq.data(), k.data(),
                      n * n);
  for (std::size_t i = 0; i < n; ++i) k.at(i, i) += theta.noise_variance;
  return k;
}

SquareMatrix gram(const Dataset& d, const HyperParams& theta) {
  if (d.empty()) throw DimensionMismatch("gram: empty dataset");
  auto sq = pairwise_sq_dists(d);
  return gram_from_sq_dists(sq, d.size(), theta);
}

namespace {

double lml_from_factor(const CholeskyFactor& f, const Dataset& d) {
  const std::size_t n = d.size();
  std::vector<double> alpha = solve_chol(f, d.ys());
  double fit = kernels::active().dot(d.ys().data(), alpha.data(), n);
  return -0.5 * fit - 0.5 * log_det(f) -
         0.5 * static_cast<double>(n) * kLogTwoPi;
}

}  // namespace

double log_marginal_likelihood(const Dataset& d, const HyperParams& theta) {
  if (d.empty())
    throw std::invalid_argument("log_marginal_likelihood: empty dataset");
  try {
    CholeskyFactor f = cholesky(gram(d, theta));
    double value = lml_from_factor(f, d);
    if (!std::isfinite(value))
      throw LikelihoodUndefined("log_marginal_likelihood: non-finite value");
    return value;
  } catch (const NotPositiveDefinite& e) {
    throw LikelihoodUndefined(e.what());
  }
}

std::optional<double> try_log_marginal_likelihood(
    const Dataset& d, const HyperParams& theta) noexcept {
  try {
    return log_marginal_likelihood(d, theta);
  } catch (...) {
    return std::nullopt;
  }
}

std::array<double, 2> lml_gradient(const Dataset& d,
                                   const HyperParams& theta) {
  if (d.empty()) throw std::invalid_argument("lml_gradient: empty dataset");
  const std::size_t n = d.size();
  auto sq = pairwise_sq_dists(d);
  CholeskyFactor f;
  try {
    f = cholesky(gram_from_sq_dists(sq, n, theta));
  } catch (const NotPositiveDefinite& e) {
    throw LikelihoodUndefined(e.what());
  }
  std::vector<double> alpha = solve_chol(f, d.ys());

  // Explicit K^{-1}, column by column.
  SquareMatrix kinv(n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    solve_chol_in_place(f, e);
    for (std::size_t i = 0; i < n; ++i) kinv.at(i, j) = e[i];
  }

  const double inv_l2 = 1.0 / (theta.lengthscale * theta.lengthscale);
  const double gamma = 0.5 * inv_l2;
  double grad_log_l = 0.0;
  double grad_log_v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double k_rbf =
          theta.signal_variance * std::exp(-gamma * sq[i * n + j]);
      const double a = alpha[i] * alpha[j] - kinv.at(i, j);
      // dK/dlog l = K_rbf * sq / l^2,  dK/dlog v = K_rbf
      grad_log_l += 0.5 * a * k_rbf * sq[i * n + j] * inv_l2;
      grad_log_v += 0.5 * a * k_rbf;
    }
  }
  return {grad_log_l, grad_log_v};
}

Prediction posterior_predictive(const Dataset& d, const HyperParams& theta,
                                std::span<const double> query_xs,
                                bool include_noise) {
  const std::size_t dim = d.dim();
  if (dim == 0 && !query_xs.empty())
    throw DimensionMismatch("posterior_predictive: dataset dimension unset");
  if (dim > 0 && query_xs.size() % dim != 0)
    throw DimensionMismatch("posterior_predictive: query size mismatch");

  Prediction pred;
  if (d.empty()) {
    // Prior reversion: iteration 0 with no start points.
    const std::size_t count = dim == 0 ? 0 : query_xs.size() / dim;
    pred.mean.assign(count, 0.0);
    pred.variance.assign(
        count, theta.signal_variance +
                   (include_noise ? theta.noise_variance : 0.0));
    return pred;
  }

  const std::size_t n = d.size();
  CholeskyFactor f;
  try {
    f = cholesky(gram(d, theta));
  } catch (const NotPositiveDefinite& e) {
    throw LikelihoodUndefined(e.what());
  }
  std::vector<double> alpha = solve_chol(f, d.ys());

  const auto& ops = kernels::active();
  const double gamma = 1.0 / (2.0 * theta.lengthscale * theta.lengthscale);
  const std::size_t count = query_xs.size() / dim;
  pred.mean.resize(count);
  pred.variance.resize(count);
  std::vector<double> sq(n);
  std::vector<double> ks(n);
  for (std::size_t j = 0; j < count; ++j) {
    ops.sq_dist(query_xs.data() + j * dim, d.xs().data(), n, dim, sq.data());
    ops.rbf_from_sqdist(theta.signal_variance, gamma, sq.data(), ks.data(), n);
    pred.mean[j] = ops.dot(ks.data(), alpha.data(), n);
    forward_solve_in_place(f, ks);
    double var = theta.signal_variance - ops.dot(ks.data(), ks.data(), n);
    if (include_noise) var += theta.noise_variance;
    pred.variance[j] = std::max(var, 0.0);
  }
  return pred;
}

namespace {

struct InitRanges {
  double log_l_lo, log_l_hi;
  double log_v_lo, log_v_hi;
};

InitRanges init_ranges(const Dataset& d) {
  const std::size_t n = d.size();
  double min_sq = std::numeric_limits<double>::infinity();
  double max_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double sq = 0.0;
      auto a = d.point(i);
      auto b = d.point(j);
      for (std::size_t k = 0; k < d.dim(); ++k) {
        double diff = a[k] - b[k];
        sq += diff * diff;
      }
      if (sq > 0.0) min_sq = std::min(min_sq, sq);
      max_sq = std::max(max_sq, sq);
    }
  }
  double l_lo = std::isfinite(min_sq) ? std::sqrt(min_sq) : 1e-3;
  double l_hi = max_sq > 0.0 ? std::sqrt(max_sq) : 1.0;
  if (!(l_hi > l_lo * (1.0 + 1e-12))) {
    l_lo *= 0.1;
    l_hi *= 10.0;
  }

  double mean = 0.0;
  for (double y : d.ys()) mean += y;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double y : d.ys()) var += (y - mean) * (y - mean);
  var /= static_cast<double>(n);
  const double eps = 1e-8;
  double v_lo = 0.01 * var + eps;
  double v_hi = 100.0 * var + eps;
  if (!(v_hi > v_lo * (1.0 + 1e-12))) {
    v_lo *= 0.1;
    v_hi *= 10.0;
  }
  return {std::log(l_lo), std::log(l_hi), std::log(v_lo), std::log(v_hi)};
}

}  // namespace

std::vector<std::array<double, 2>> sample_fit_inits(const Dataset& d,
                                                    int restarts,
                                                    RngStream& rng,
                                                    const FitOptions& options) {
  const InitRanges ranges = init_ranges(d);
  const auto clamp_u = [&](std::array<double, 2> u) {
    u[0] = std::clamp(u[0], options.log_lengthscale_min,
                      options.log_lengthscale_max);
    u[1] =
        std::clamp(u[1], options.log_variance_min, options.log_variance_max);
    return u;
  };
  std::vector<std::array<double, 2>> inits;
  inits.reserve(restarts);
  for (int i = 0; i < restarts; ++i)
    inits.push_back(clamp_u(
        {ranges.log_l_lo + rng.uniform() * (ranges.log_l_hi - ranges.log_l_lo),
         ranges.log_v_lo +
             rng.uniform() * (ranges.log_v_hi - ranges.log_v_lo)}));
  return inits;
}

std::array<double, 2> ascend_two_params(
    const AscentProblem& problem,
    std::span<const std::array<double, 2>> inits, const FitOptions& options,
    FitTrace* trace) {
  if (inits.empty())
    throw std::invalid_argument("ascend_two_params: no start points");

  const auto clamp_u = [&](std::array<double, 2> u) {
    u[0] = std::clamp(u[0], options.log_lengthscale_min,
                      options.log_lengthscale_max);
    u[1] =
        std::clamp(u[1], options.log_variance_min, options.log_variance_max);
    return u;
  };

  bool any_defined = false;
  double best_value = -std::numeric_limits<double>::infinity();
  std::array<double, 2> best_u{0.0, 0.0};

  for (std::array<double, 2> u : inits) {
    auto value = problem.objective(u);
    if (trace) trace->per_restart.emplace_back();
    if (!value) continue;
    any_defined = true;
    if (trace) trace->per_restart.back().push_back(*value);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
      auto g = problem.gradient(u);
      if (!g) break;
      double gnorm = std::max(std::abs((*g)[0]), std::abs((*g)[1]));
      if (gnorm < options.gradient_tolerance) break;
      double gg = (*g)[0] * (*g)[0] + (*g)[1] * (*g)[1];

      bool accepted = false;
      for (double step = 1.0; step >= options.min_step; step *= 0.5) {
        std::array<double, 2> candidate =
            clamp_u({u[0] + step * (*g)[0], u[1] + step * (*g)[1]});
        auto candidate_value = problem.objective(candidate);
        if (candidate_value && *candidate_value >= *value + 1e-4 * step * gg) {
          u = candidate;
          value = candidate_value;
          if (trace) trace->per_restart.back().push_back(*value);
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }

    if (*value > best_value) {
      best_value = *value;
      best_u = u;
    }
  }

  if (!any_defined)
    throw FitFailed("ascend_two_params: objective undefined at every start");
  return best_u;
}

HyperParams fit_map(const Dataset& d, const std::optional<HyperPrior>& prior,
                    int restarts, RngStream& rng, double noise_variance,
                    const FitOptions& options, FitTrace* trace) {
  if (d.size() < 2)
    throw std::invalid_argument("fit_map: needs at least two points");
  if (restarts < 1) throw std::invalid_argument("fit_map: restarts >= 1");

  const auto theta_of = [&](const std::array<double, 2>& u) {
    return HyperParams{std::exp(u[0]), std::exp(u[1]), noise_variance};
  };

  AscentProblem problem;
  problem.objective =
      [&, prior](const std::array<double, 2>& u) -> std::optional<double> {
    HyperParams theta = theta_of(u);
    auto lml = try_log_marginal_likelihood(d, theta);
    if (!lml) return std::nullopt;
    double value = *lml;
    if (prior) {
      value += gamma_logpdf(theta.lengthscale, prior->l_shape, prior->l_scale);
      value +=
          gamma_logpdf(theta.signal_variance, prior->v_shape, prior->v_scale);
    }
    return std::isfinite(value) ? std::optional<double>(value) : std::nullopt;
  };
  problem.gradient = [&, prior](const std::array<double, 2>& u)
      -> std::optional<std::array<double, 2>> {
    HyperParams theta = theta_of(u);
    std::array<double, 2> g;
    try {
      g = lml_gradient(d, theta);
    } catch (const LikelihoodUndefined&) {
      return std::nullopt;
    }
    if (prior) {
      g[0] += (prior->l_shape - 1.0) - theta.lengthscale / prior->l_scale;
      g[1] += (prior->v_shape - 1.0) - theta.signal_variance / prior->v_scale;
    }
    if (!std::isfinite(g[0]) || !std::isfinite(g[1])) return std::nullopt;
    return g;
  };

  const auto inits = sample_fit_inits(d, restarts, rng, options);
  std::array<double, 2> best_u;
  try {
    best_u = ascend_two_params(problem, inits, options, trace);
  } catch (const FitFailed&) {
    throw FitFailed("fit_map: likelihood undefined at every restart");
  }
  return theta_of(best_u);
}

}  // namespace plebo
