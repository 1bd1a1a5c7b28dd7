#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plebo/acquisition.hpp"
#include "plebo/gp.hpp"
#include "plebo/prior.hpp"

namespace plebo {

enum class StrategyKind {
  RandomSearch,
  EI,
  UCB,
  DirectTrans,
  Initial,
  PLeBO,
  TruePLeBO,
  Gamma,
  Shared,
};

const char* strategy_name(StrategyKind kind);
StrategyKind strategy_from_name(const std::string& name);

struct StrategyConfig {
  StrategyKind kind = StrategyKind::RandomSearch;
  std::optional<CandidateSet> candidates;            // PLeBO
  std::optional<HyperPrior> eta_mean;                // Gamma
  std::optional<HyperParams> shared_theta;           // Shared
  std::optional<HyperParams> true_theta;             // TruePLeBO
  std::optional<Dataset> transfer_pool;              // DirectTrans
  std::optional<std::vector<std::vector<double>>> initial_points;  // Initial
  int refit_every = 1;
  int fit_restarts = 5;
  double noise_variance = 1e-4;
  AcquisitionSpec base{};  // EI unless kind == UCB

  void require_fields() const;  // throws ConfigError if the field matching
                                // `kind` is missing
};

struct StrategyState {
  Dataset observations;
  std::vector<std::size_t> observed_indices;
  int iteration = 0;  // number of proposals made
  std::optional<HyperParams> cached_theta;
  std::size_t initial_consumed = 0;
  int fit_count = 0;  // fit_map/fit_shared invocations, for assertions
};

// Next cell to evaluate: an unobserved grid index, dispatched on cfg.kind.
// Tie-breaking among acquisition values within 1e-12 of the max is uniform
// via `rng`, so a fixed seed fixes the full proposal sequence.
std::size_t propose_next(const StrategyConfig& cfg, StrategyState& state,
                         std::span<const double> grid_xs, std::size_t dim,
                         RngStream& rng);

// Single hyperparameter set maximising the summed LML over all tasks.
HyperParams fit_shared(std::span<const Dataset> datasets,
                       double noise_variance, int restarts, RngStream& rng);

// Union of past evaluations, capped by per-task stratified subsampling
// (round-robin remainder, deterministic given the rng seed).
Dataset build_transfer_pool(std::span<const Dataset> datasets, int cap,
                            RngStream& rng);

// Best input of each tuning task, ordered by descending observed maximum,
// ties broken by task index.
std::vector<std::vector<double>> extract_initial_points(
    std::span<const Dataset> datasets);

}  // namespace plebo
