#pragma once

#include <span>
#include <vector>

#include "plebo/gp.hpp"
#include "plebo/prior.hpp"

namespace plebo {

struct AcquisitionSpec {
  enum class Kind { EI, UCB };
  Kind kind = Kind::EI;
  double ucb_beta = 4.0;
};

// EI per point: (mu - best) Phi(z) + sigma phi(z), z = (mu - best)/sigma;
// degenerates to max(mu - best, 0) when sigma <= 1e-12.
std::vector<double> expected_improvement(const Prediction& pred, double best);

// mu + sqrt(beta) * sigma per point.
std::vector<double> ucb(const Prediction& pred, double beta);

std::vector<double> base_acquisition(const AcquisitionSpec& spec,
                                     const Prediction& pred, double best);

// log w_h = LML(D, theta_h); -inf for candidates whose gram is not
// factorisable. Empty D gives uniform weights (all zeros). Throws
// AllWeightsZero when every candidate is -inf.
std::vector<double> candidate_log_weights(const CandidateSet& cands,
                                          const Dataset& d);

// (1/W) sum_h w_h a_h with w from log-weights via max-subtraction, summed in
// candidate-index order. Invariant to a constant shift of all log-weights.
std::vector<double> weighted_mixture(
    std::span<const double> log_weights,
    const std::vector<std::vector<double>>& per_candidate);

// Importance-weighted acquisition over the candidate set: per candidate, the
// base acquisition under its posterior predictive, mixed with weights
// p(D | theta_h). grid_xs is row-major m*dim.
std::vector<double> plebo_acquisition(const CandidateSet& cands,
                                      const Dataset& d,
                                      std::span<const double> grid_xs,
                                      std::size_t dim,
                                      const AcquisitionSpec& base, double best);

}  // namespace plebo
