#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plebo/benchmarks.hpp"
#include "plebo/prior.hpp"
#include "plebo/strategies.hpp"

namespace plebo {

struct IterationRecord {
  std::size_t chosen_index = 0;
  double observed_y = 0.0;
  double r = 0.0;       // max(Y_{:nstart+i}) / y_max
  double regret = 0.0;  // y_max - max(Y_{:nstart+i})
  double step_seconds = 0.0;
};

struct RunResult {
  std::string task_name;
  std::string strategy;
  std::uint64_t seed = 0;
  std::size_t n_start = 0;
  std::vector<IterationRecord> iterations;
  bool failed = false;
  std::string error;
};

struct AggregateCurve {
  std::vector<double> mean;
  std::vector<double> se;  // sample std / sqrt(J)
  std::size_t j = 0;
  std::string reference;  // non-empty for difference curves
};

// max(Y) / y_max. Throws MetricUndefined when y_max <= 0.
double normalized_best(std::span<const double> observed, double y_max);

// One BO run: state seeded with the task's start indices, then `iterations`
// propose/observe steps. Strategy errors mark the result failed and keep the
// partial trace.
RunResult run_bo(const GridTask& task, const StrategyConfig& cfg,
                 int iterations, std::uint64_t seed);

// Per-iteration mean and standard error of r over runs (which must share an
// iteration count).
AggregateCurve aggregate(std::span<const RunResult> results);

// Paired per-(task, seed) differences r_method - r_reference, then mean and
// standard error of the differences.
AggregateCurve difference_curve(std::span<const RunResult> method,
                                std::span<const RunResult> reference);

// Ground truth for the synthetic suite, when known.
struct PriorTruth {
  HyperPrior eta;
  std::vector<HyperParams> thetas;  // per tuning task
};

struct TaskQuality {
  std::string task;
  HyperParams posterior_mean_theta;
  double lml_at_posterior_mean = 0.0;
  std::optional<HyperParams> true_theta;
  std::optional<double> lml_at_true;
};

// Quantiles of the implied gamma densities over a fixed x-grid, for
// plotting the learned prior against the true one.
struct DensitySummary {
  std::vector<double> x;
  std::vector<double> q05, q50, q95;
};

struct PriorQualityReport {
  std::vector<TaskQuality> tasks;
  HyperPrior eta_posterior_mean;
  std::optional<HyperPrior> eta_true;
  // Fraction of tasks with LML(posterior mean) >= LML(true) - 2 nats.
  std::optional<double> fraction_within_two_nats;
  DensitySummary lengthscale_density;
  DensitySummary variance_density;
};

PriorQualityReport prior_quality_report(
    const PosteriorSamples& post, const std::optional<PriorTruth>& truth,
    std::span<const Dataset> tuning,
    std::span<const std::string> task_names = {});

void save_report_json(const std::string& path,
                      const PriorQualityReport& report);
void save_report_csv(const std::string& path, const PriorQualityReport& report);

}  // namespace plebo
