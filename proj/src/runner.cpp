#include "plebo/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "plebo/distributions.hpp"

namespace plebo {

double normalized_best(std::span<const double> observed, double y_max) {
  if (observed.empty())
    throw std::invalid_argument("normalized_best: no observations");
  if (!(y_max > 0.0))
    throw MetricUndefined("normalized_best: y_max must be positive");
  return *std::max_element(observed.begin(), observed.end()) / y_max;
}

RunResult run_bo(const GridTask& task, const StrategyConfig& cfg,
                 int iterations, std::uint64_t seed) {
  RunResult result;
  result.task_name = task.name;
  result.strategy = strategy_name(cfg.kind);
  result.seed = seed;
  result.n_start = task.start_indices.size();

  if (iterations < 1) {
    result.failed = true;
    result.error = "iterations must be >= 1";
    return result;
  }
  if (!(task.y_max > 0.0)) {
    // The ratio metric is meaningless here; the run is reported failed
    // rather than silently emitting unusable r values.
    result.failed = true;
    result.error = "MetricUndefined: task y_max <= 0";
    return result;
  }

  StrategyState state;
  state.observations = task.start_observations();
  state.observed_indices = task.start_indices;
  double running_max = state.observations.empty()
                           ? -std::numeric_limits<double>::infinity()
                           : *std::max_element(state.observations.ys().begin(),
                                               state.observations.ys().end());

  RngStream rng(seed);
  for (int i = 0; i < iterations; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t idx;
    try {
      idx = propose_next(cfg, state, task.xs, task.dim, rng);
    } catch (const Error& e) {
      result.failed = true;
      result.error = e.what();
      return result;
    }
    const double y = task.values[idx];
    state.observations.add(task.point(idx), y);
    state.observed_indices.push_back(idx);
    running_max = std::max(running_max, y);
    const auto t1 = std::chrono::steady_clock::now();

    IterationRecord rec;
    rec.chosen_index = idx;
    rec.observed_y = y;
    rec.r = running_max / task.y_max;
    rec.regret = task.y_max - running_max;
    rec.step_seconds = std::chrono::duration<double>(t1 - t0).count();
    result.iterations.push_back(rec);
  }
  return result;
}

AggregateCurve aggregate(std::span<const RunResult> results) {
  if (results.empty())
    throw std::invalid_argument("aggregate: no results");
  const std::size_t len = results.front().iterations.size();
  for (const RunResult& r : results)
    if (r.iterations.size() != len)
      throw LengthMismatch("aggregate: iteration counts differ");

  AggregateCurve curve;
  curve.j = results.size();
  curve.mean.resize(len);
  curve.se.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    double mean = 0.0;
    for (const RunResult& r : results) mean += r.iterations[i].r;
    mean /= static_cast<double>(curve.j);
    double var = 0.0;
    for (const RunResult& r : results) {
      const double d = r.iterations[i].r - mean;
      var += d * d;
    }
    curve.mean[i] = mean;
    curve.se[i] = curve.j > 1 ? std::sqrt(var / static_cast<double>(curve.j - 1)) /
                                    std::sqrt(static_cast<double>(curve.j))
                              : 0.0;
  }
  return curve;
}

AggregateCurve difference_curve(std::span<const RunResult> method,
                                std::span<const RunResult> reference) {
  using Key = std::pair<std::string, std::uint64_t>;
  std::map<Key, const RunResult*> ref_by_key;
  for (const RunResult& r : reference) ref_by_key[{r.task_name, r.seed}] = &r;
  if (method.size() != reference.size())
    throw TaskSetMismatch("difference_curve: run sets differ in size");

  std::size_t len = 0;
  std::vector<std::vector<double>> diffs;
  for (const RunResult& m : method) {
    auto it = ref_by_key.find({m.task_name, m.seed});
    if (it == ref_by_key.end())
      throw TaskSetMismatch("difference_curve: no reference run for task " +
                            m.task_name);
    const RunResult& ref = *it->second;
    if (m.iterations.size() != ref.iterations.size())
      throw LengthMismatch("difference_curve: iteration counts differ");
    if (diffs.empty()) len = m.iterations.size();
    if (m.iterations.size() != len)
      throw LengthMismatch("difference_curve: iteration counts differ");
    std::vector<double> d(len);
    for (std::size_t i = 0; i < len; ++i)
      d[i] = m.iterations[i].r - ref.iterations[i].r;
    diffs.push_back(std::move(d));
  }

  AggregateCurve curve;
  curve.j = diffs.size();
  curve.reference = reference.empty() ? "" : reference.front().strategy;
  curve.mean.resize(len);
  curve.se.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    double mean = 0.0;
    for (const auto& d : diffs) mean += d[i];
    mean /= static_cast<double>(curve.j);
    double var = 0.0;
    for (const auto& d : diffs) {
      const double dd = d[i] - mean;
      var += dd * dd;
    }
    curve.mean[i] = mean;
    curve.se[i] = curve.j > 1 ? std::sqrt(var / static_cast<double>(curve.j - 1)) /
                                    std::sqrt(static_cast<double>(curve.j))
                              : 0.0;
  }
  return curve;
}

namespace {

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  std::vector<double> xs(count);
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    xs[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                               static_cast<double>(count - 1));
  return xs;
}

double quantile(std::vector<double>& values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

DensitySummary density_summary(const PosteriorSamples& post, bool lengthscale,
                               std::vector<double> xs) {
  DensitySummary summary;
  summary.x = std::move(xs);
  const std::size_t n_draws = post.size();
  std::vector<double> densities(n_draws);
  for (double x : summary.x) {
    for (std::size_t i = 0; i < n_draws; ++i) {
      const HyperPrior& eta = post.eta_draws[i];
      const double shape = lengthscale ? eta.l_shape : eta.v_shape;
      const double scale = lengthscale ? eta.l_scale : eta.v_scale;
      densities[i] = std::exp(gamma_logpdf(x, shape, scale));
    }
    std::vector<double> copy = densities;
    summary.q05.push_back(quantile(copy, 0.05));
    summary.q50.push_back(quantile(copy, 0.50));
    summary.q95.push_back(quantile(copy, 0.95));
  }
  return summary;
}

}  // namespace

PriorQualityReport prior_quality_report(
    const PosteriorSamples& post, const std::optional<PriorTruth>& truth,
    std::span<const Dataset> tuning,
    std::span<const std::string> task_names) {
  if (post.size() == 0)
    throw std::invalid_argument("prior_quality_report: empty posterior");
  if (post.n_tasks() != tuning.size())
    throw DimensionMismatch(
        "prior_quality_report: posterior/task count mismatch");
  if (truth && truth->thetas.size() != tuning.size())
    throw DimensionMismatch("prior_quality_report: truth size mismatch");

  PriorQualityReport report;
  report.eta_posterior_mean = summarize_eta(post);
  if (truth) report.eta_true = truth->eta;

  std::size_t within = 0;
  for (std::size_t t = 0; t < tuning.size(); ++t) {
    TaskQuality tq;
    tq.task = t < task_names.size()
                  ? task_names[t]
                  : "tuning-" + std::to_string(t);
    HyperParams mean{0.0, 0.0, post.noise_variance};
    for (std::size_t i = 0; i < post.size(); ++i) {
      mean.lengthscale += post.theta_draws[i][t].lengthscale;
      mean.signal_variance += post.theta_draws[i][t].signal_variance;
    }
    mean.lengthscale /= static_cast<double>(post.size());
    mean.signal_variance /= static_cast<double>(post.size());
    tq.posterior_mean_theta = mean;
    auto lml = try_log_marginal_likelihood(tuning[t], mean);
    tq.lml_at_posterior_mean =
        lml ? *lml : -std::numeric_limits<double>::infinity();
    if (truth) {
      HyperParams true_theta = truth->thetas[t];
      true_theta.noise_variance = post.noise_variance;
      tq.true_theta = true_theta;
      auto true_lml = try_log_marginal_likelihood(tuning[t], true_theta);
      tq.lml_at_true =
          true_lml ? *true_lml : -std::numeric_limits<double>::infinity();
      if (tq.lml_at_posterior_mean >= *tq.lml_at_true - 2.0) ++within;
    }
    report.tasks.push_back(std::move(tq));
  }
  if (truth)
    report.fraction_within_two_nats =
        static_cast<double>(within) / static_cast<double>(tuning.size());

  report.lengthscale_density =
      density_summary(post, true, log_spaced(1e-3, 0.5, 64));
  report.variance_density =
      density_summary(post, false, log_spaced(5e-2, 30.0, 64));
  return report;
}

void save_report_json(const std::string& path,
                      const PriorQualityReport& report) {
  nlohmann::json j;
  j["eta_posterior_mean"] = {
      {"l_shape", report.eta_posterior_mean.l_shape},
      {"l_scale", report.eta_posterior_mean.l_scale},
      {"v_shape", report.eta_posterior_mean.v_shape},
      {"v_scale", report.eta_posterior_mean.v_scale}};
  if (report.eta_true)
    j["eta_true"] = {{"l_shape", report.eta_true->l_shape},
                     {"l_scale", report.eta_true->l_scale},
                     {"v_shape", report.eta_true->v_shape},
                     {"v_scale", report.eta_true->v_scale}};
  if (report.fraction_within_two_nats)
    j["fraction_within_two_nats"] = *report.fraction_within_two_nats;
  auto& tasks = j["tasks"] = nlohmann::json::array();
  for (const TaskQuality& tq : report.tasks) {
    nlohmann::json e;
    e["task"] = tq.task;
    e["posterior_mean_theta"] = {
        {"l", tq.posterior_mean_theta.lengthscale},
        {"v", tq.posterior_mean_theta.signal_variance}};
    e["lml_at_posterior_mean"] = tq.lml_at_posterior_mean;
    if (tq.true_theta)
      e["true_theta"] = {{"l", tq.true_theta->lengthscale},
                         {"v", tq.true_theta->signal_variance}};
    if (tq.lml_at_true) e["lml_at_true"] = *tq.lml_at_true;
    tasks.push_back(std::move(e));
  }
  const auto density_json = [](const DensitySummary& ds) {
    return nlohmann::json{
        {"x", ds.x}, {"q05", ds.q05}, {"q50", ds.q50}, {"q95", ds.q95}};
  };
  j["lengthscale_density"] = density_json(report.lengthscale_density);
  j["variance_density"] = density_json(report.variance_density);

  std::ofstream out(path);
  if (!out) throw Error("save_report_json: cannot open " + path);
  out << j.dump(2) << "\n";
}

void save_report_csv(const std::string& path,
                     const PriorQualityReport& report) {
  std::ofstream out(path);
  if (!out) throw Error("save_report_csv: cannot open " + path);
  const bool with_truth =
      !report.tasks.empty() && report.tasks.front().lml_at_true.has_value();
  out << "task,posterior_mean_l,posterior_mean_v,lml_at_posterior_mean";
  if (with_truth) out << ",true_l,true_v,lml_at_true,delta";
  out << "\n";
  char buf[64];
  const auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (const TaskQuality& tq : report.tasks) {
    out << tq.task << "," << fmt(tq.posterior_mean_theta.lengthscale) << ","
        << fmt(tq.posterior_mean_theta.signal_variance) << ","
        << fmt(tq.lml_at_posterior_mean);
    if (with_truth) {
      out << "," << fmt(tq.true_theta->lengthscale) << ","
          << fmt(tq.true_theta->signal_variance) << ","
          << fmt(*tq.lml_at_true) << ","
          << fmt(tq.lml_at_posterior_mean - *tq.lml_at_true);
    }
    out << "\n";
  }
}

}  // namespace plebo
