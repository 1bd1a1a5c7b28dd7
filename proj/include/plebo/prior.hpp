#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "plebo/gp.hpp"
#include "plebo/types.hpp"

namespace plebo {

// Top-level prior p(eta): independent log-normal on each of the four eta
// coordinates. constant_offset is added to log p(eta); the sampler must be
// invariant to it.
struct HyperpriorConfig {
  double log_median = 0.0;
  double log_sigma = 2.0;
  double constant_offset = 0.0;
};

struct McmcConfig {
  int n_chains = 4;
  int n_warmup = 1000;
  int n_samples_per_chain = 1000;
  double proposal_scale = 0.5;   // initial random-walk step, log-space
  double adapt_target = 0.3;
  std::uint64_t seed = 0;
  double noise_variance = 1e-4;
  HyperpriorConfig hyperprior{};
};

// Pooled posterior draws of (eta, theta_1..N), aligned by draw index.
struct PosteriorSamples {
  std::vector<HyperPrior> eta_draws;
  std::vector<std::vector<HyperParams>> theta_draws;  // [draw][task]
  std::vector<int> chain_ids;
  std::vector<double> log_joint_values;
  std::size_t n_filtered = 0;
  std::uint64_t seed = 0;
  double noise_variance = 1e-4;

  // Per-chain, per-sweep proposal scales (eta block first, then one block
  // per task). Diagnostics only; not serialised.
  std::vector<std::vector<std::vector<double>>> adaptation_trace;

  std::size_t size() const { return eta_draws.size(); }
  std::size_t n_tasks() const {
    return theta_draws.empty() ? 0 : theta_draws.front().size();
  }
};

// H hyperparameter draws from the learned prior.
struct CandidateSet {
  std::vector<HyperParams> thetas;
  std::uint64_t source_seed = 0;

  std::size_t size() const { return thetas.size(); }
};

double log_eta_prior(const HyperPrior& eta, const HyperpriorConfig& cfg);

// log p(eta) + sum_n [ log Gamma(l_n; eta) + log Gamma(v_n; eta) +
// LML(D_n, theta_n) ]. Returns -inf when any LML is undefined.
double log_joint(const HyperPrior& eta, std::span<const HyperParams> thetas,
                 std::span<const Dataset> datasets,
                 const HyperpriorConfig& cfg);

// Adaptive random-walk Metropolis-within-Gibbs over the log-transformed
// coordinates (eta block, then one block per task), Robbins-Monro step
// adaptation during warmup only. Returns pooled, filtered post-warmup draws.
PosteriorSamples run_mcmc(std::span<const Dataset> datasets,
                          const McmcConfig& cfg);

// Removes draws with non-finite log_joint, then whole chains whose retained
// fraction is below 10%. Idempotent; n_filtered accumulates.
PosteriorSamples filter_samples(const PosteriorSamples& raw);

// For each of H candidates: pick one eta draw uniformly, then draw
// l ~ Gamma(l_shape, l_scale) and v ~ Gamma(v_shape, v_scale).
CandidateSet sample_candidates(const PosteriorSamples& post, int h,
                               std::uint64_t seed);

// Coordinate-wise mean of the eta draws.
HyperPrior summarize_eta(const PosteriorSamples& post);

// JSON round-trip for the files connecting fit-prior and run.
void save_posterior(const std::string& path, const PosteriorSamples& post);
PosteriorSamples load_posterior(const std::string& path);
void save_candidates(const std::string& path, const CandidateSet& cands);
CandidateSet load_candidates(const std::string& path, double noise_variance);

}  // namespace plebo
