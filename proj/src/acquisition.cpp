#include "plebo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plebo/distributions.hpp"
#include "plebo/kernels.hpp"

namespace plebo {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kSigmaFloor = 1e-12;
}  // namespace

std::vector<double> expected_improvement(const Prediction& pred, double best) {
  const std::size_t m = pred.mean.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double gap = pred.mean[i] - best;
    const double sigma = std::sqrt(std::max(pred.variance[i], 0.0));
    if (sigma <= kSigmaFloor) {
      out[i] = std::max(gap, 0.0);
    } else {
      const double z = gap / sigma;
      out[i] = std::max(gap * normal_cdf(z) + sigma * normal_pdf(z), 0.0);
    }
  }
  return out;
}

std::vector<double> ucb(const Prediction& pred, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("ucb: beta must be positive");
  const double root_beta = std::sqrt(beta);
  const std::size_t m = pred.mean.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i)
    out[i] = pred.mean[i] +
             root_beta * std::sqrt(std::max(pred.variance[i], 0.0));
  return out;
}

std::vector<double> base_acquisition(const AcquisitionSpec& spec,
                                     const Prediction& pred, double best) {
  switch (spec.kind) {
    case AcquisitionSpec::Kind::UCB:
      return ucb(pred, spec.ucb_beta);
    case AcquisitionSpec::Kind::EI:
    default:
      return expected_improvement(pred, best);
  }
}

std::vector<double> candidate_log_weights(const CandidateSet& cands,
                                          const Dataset& d) {
  std::vector<double> log_w(cands.size());
  if (d.empty()) return log_w;  // uniform by convention
  bool any_finite = false;
  for (std::size_t h = 0; h < cands.size(); ++h) {
    auto lml = try_log_marginal_likelihood(d, cands.thetas[h]);
    log_w[h] = lml ? *lml : kNegInf;
    any_finite = any_finite || std::isfinite(log_w[h]);
  }
  if (!any_finite)
    throw AllWeightsZero("candidate_log_weights: every candidate undefined");
  return log_w;
}

std::vector<double> weighted_mixture(
    std::span<const double> log_weights,
    const std::vector<std::vector<double>>& per_candidate) {
  if (log_weights.size() != per_candidate.size())
    throw DimensionMismatch("weighted_mixture: size mismatch");
  double max_lw = kNegInf;
  for (double lw : log_weights)
    if (std::isfinite(lw)) max_lw = std::max(max_lw, lw);
  if (!log_weights.empty() && !std::isfinite(max_lw))
    throw AllWeightsZero("weighted_mixture: all weights zero");

  std::size_t m = 0;
  for (const auto& a : per_candidate)
    if (!a.empty()) {
      m = a.size();
      break;
    }
  std::vector<double> acc(m, 0.0);
  double total = 0.0;
  const auto& ops = kernels::active();
  for (std::size_t h = 0; h < log_weights.size(); ++h) {
    const double w = std::exp(log_weights[h] - max_lw);
    if (w <= 0.0) continue;
    if (per_candidate[h].size() != m)
      throw DimensionMismatch("weighted_mixture: ragged acquisition vectors");
    ops.axpy(w, per_candidate[h].data(), acc.data(), m);
    total += w;
  }
  for (double& v : acc) v /= total;
  return acc;
}

std::vector<double> plebo_acquisition(const CandidateSet& cands,
                                      const Dataset& d,
                                      std::span<const double> grid_xs,
                                      std::size_t dim,
                                      const AcquisitionSpec& base,
                                      double best) {
  if (grid_xs.empty())
    throw std::invalid_argument("plebo_acquisition: empty grid");
  if (dim == 0 || grid_xs.size() % dim != 0)
    throw DimensionMismatch("plebo_acquisition: bad grid layout");
  const std::size_t m = grid_xs.size() / dim;
  const std::size_t h_count = cands.size();

  std::vector<double> log_w(h_count, 0.0);
  std::vector<std::vector<double>> per_candidate(h_count);

  if (d.empty()) {
    for (std::size_t h = 0; h < h_count; ++h) {
      Prediction pred;
      pred.mean.assign(m, 0.0);
      pred.variance.assign(m, cands.thetas[h].signal_variance);
      per_candidate[h] = base_acquisition(base, pred, best);
    }
    return weighted_mixture(log_w, per_candidate);
  }

  const std::size_t n = d.size();
  // Squared distances are hyperparameter-independent; computed once and
  // reused by all H candidates.
  const std::vector<double> sq_dd = pairwise_sq_dists(d);
  const std::vector<double> sq_gd = cross_sq_dists(grid_xs, dim, d);

  const auto& ops = kernels::active();
  bool any_finite = false;
  std::vector<double> ks(n);
  for (std::size_t h = 0; h < h_count; ++h) {
    const HyperParams& theta = cands.thetas[h];
    CholeskyFactor f;
    try {
      f = cholesky(gram_from_sq_dists(sq_dd, n, theta));
    } catch (const NotPositiveDefinite&) {
      log_w[h] = kNegInf;
      continue;
    }
    std::vector<double> alpha = solve_chol(f, d.ys());
    const double fit = ops.dot(d.ys().data(), alpha.data(), n);
    const double lml = -0.5 * fit - 0.5 * log_det(f) -
                       0.5 * static_cast<double>(n) * kLogTwoPi;
    if (!std::isfinite(lml)) {
      log_w[h] = kNegInf;
      continue;
    }
    log_w[h] = lml;
    any_finite = true;

    const double gamma = 1.0 / (2.0 * theta.lengthscale * theta.lengthscale);
    Prediction pred;
    pred.mean.resize(m);
    pred.variance.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double* sq_row = sq_gd.data() + j * n;
      ops.rbf_from_sqdist(theta.signal_variance, gamma, sq_row, ks.data(), n);
      pred.mean[j] = ops.dot(ks.data(), alpha.data(), n);
      forward_solve_in_place(f, ks);
      pred.variance[j] = std::max(
          theta.signal_variance - ops.dot(ks.data(), ks.data(), n), 0.0);
    }
    per_candidate[h] = base_acquisition(base, pred, best);
  }
  if (!any_finite)
    throw AllWeightsZero("plebo_acquisition: every candidate undefined");
  return weighted_mixture(log_w, per_candidate);
}

}  // namespace plebo
