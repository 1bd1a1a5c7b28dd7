#include "plebo/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace plebo {

const char* strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::RandomSearch: return "RandomSearch";
    case StrategyKind::EI: return "EI";
    case StrategyKind::UCB: return "UCB";
    case StrategyKind::DirectTrans: return "DirectTrans";
    case StrategyKind::Initial: return "Initial";
    case StrategyKind::PLeBO: return "PLeBO";
    case StrategyKind::TruePLeBO: return "TruePLeBO";
    case StrategyKind::Gamma: return "Gamma";
    case StrategyKind::Shared: return "Shared";
  }
  return "?";
}

StrategyKind strategy_from_name(const std::string& name) {
  static const std::pair<const char*, StrategyKind> table[] = {
      {"RandomSearch", StrategyKind::RandomSearch},
      {"EI", StrategyKind::EI},
      {"UCB", StrategyKind::UCB},
      {"DirectTrans", StrategyKind::DirectTrans},
      {"Initial", StrategyKind::Initial},
      {"PLeBO", StrategyKind::PLeBO},
      {"TruePLeBO", StrategyKind::TruePLeBO},
      {"Gamma", StrategyKind::Gamma},
      {"Shared", StrategyKind::Shared},
  };
  for (const auto& [n, k] : table)
    if (name == n) return k;
  throw ConfigError("unknown strategy '" + name + "'");
}

void StrategyConfig::require_fields() const {
  switch (kind) {
    case StrategyKind::PLeBO:
      if (!candidates || candidates->size() == 0)
        throw ConfigError("PLeBO requires a candidate set");
      break;
    case StrategyKind::Gamma:
      if (!eta_mean) throw ConfigError("Gamma requires eta_mean");
      break;
    case StrategyKind::Shared:
      if (!shared_theta) throw ConfigError("Shared requires shared_theta");
      break;
    case StrategyKind::TruePLeBO:
      if (!true_theta) throw ConfigError("TruePLeBO requires true_theta");
      break;
    case StrategyKind::DirectTrans:
      if (!transfer_pool || transfer_pool->empty())
        throw ConfigError("DirectTrans requires a transfer pool");
      break;
    case StrategyKind::Initial:
      if (!initial_points) throw ConfigError("Initial requires initial_points");
      break;
    default:
      break;
  }
  if (refit_every < 1) throw ConfigError("refit_every must be >= 1");
}

namespace {

std::vector<std::size_t> unobserved_indices(const StrategyState& state,
                                            std::size_t total) {
  std::vector<bool> seen(total, false);
  for (std::size_t idx : state.observed_indices)
    if (idx < total) seen[idx] = true;
  std::vector<std::size_t> out;
  out.reserve(total - state.observed_indices.size());
  for (std::size_t i = 0; i < total; ++i)
    if (!seen[i]) out.push_back(i);
  return out;
}

double best_observed(const StrategyState& state) {
  if (state.observations.empty()) return 0.0;
  return *std::max_element(state.observations.ys().begin(),
                           state.observations.ys().end());
}

// Uniform choice among entries within 1e-12 of the maximum.
std::size_t argmax_tiebreak(std::span<const double> values, RngStream& rng) {
  const double vmax = *std::max_element(values.begin(), values.end());
  std::vector<std::size_t> top;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] >= vmax - 1e-12) top.push_back(i);
  return top[rng.below(top.size())];
}

std::vector<double> gather_points(std::span<const double> grid_xs,
                                  std::size_t dim,
                                  std::span<const std::size_t> indices) {
  std::vector<double> xs;
  xs.reserve(indices.size() * dim);
  for (std::size_t idx : indices)
    xs.insert(xs.end(), grid_xs.begin() + idx * dim,
              grid_xs.begin() + (idx + 1) * dim);
  return xs;
}

HyperParams refit_theta(const StrategyConfig& cfg, StrategyState& state,
                        const Dataset& data, RngStream& rng) {
  const bool due = !state.cached_theta ||
                   state.iteration % cfg.refit_every == 0;
  if (due) {
    if (data.size() >= 2) {
      std::optional<HyperPrior> prior;
      if (cfg.kind == StrategyKind::Gamma) prior = cfg.eta_mean;
      state.cached_theta = fit_map(data, prior, cfg.fit_restarts, rng,
                                   cfg.noise_variance);
      ++state.fit_count;
    } else {
      // Too little data to fit; any theta gives a flat acquisition.
      state.cached_theta = HyperParams{1.0, 1.0, cfg.noise_variance};
    }
  }
  return *state.cached_theta;
}

}  // namespace

std::size_t propose_next(const StrategyConfig& cfg, StrategyState& state,
                         std::span<const double> grid_xs, std::size_t dim,
                         RngStream& rng) {
  cfg.require_fields();
  if (dim == 0 || grid_xs.size() % dim != 0)
    throw DimensionMismatch("propose_next: bad grid layout");
  const std::size_t total = grid_xs.size() / dim;
  const std::vector<std::size_t> unobserved = unobserved_indices(state, total);
  if (unobserved.empty())
    throw NoUnobservedPoints("propose_next: grid exhausted");

  const auto finish = [&](std::size_t grid_index) {
    ++state.iteration;
    return grid_index;
  };

  if (cfg.kind == StrategyKind::RandomSearch)
    return finish(unobserved[rng.below(unobserved.size())]);

  if (cfg.kind == StrategyKind::Initial &&
      state.initial_consumed < cfg.initial_points->size()) {
    const std::vector<double>& target =
        (*cfg.initial_points)[state.initial_consumed];
    if (target.size() != dim)
      throw ConfigError("Initial: point dimension mismatch");
    ++state.initial_consumed;
    // Nearest unobserved cell to the replayed point; ties to lowest index.
    std::size_t best_idx = unobserved.front();
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t idx : unobserved) {
      double sq = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double diff = target[k] - grid_xs[idx * dim + k];
        sq += diff * diff;
      }
      if (sq < best_sq) {
        best_sq = sq;
        best_idx = idx;
      }
    }
    return finish(best_idx);
  }

  const std::vector<double> cand_xs = gather_points(grid_xs, dim, unobserved);
  const double best = best_observed(state);
  std::vector<double> acq;

  switch (cfg.kind) {
    case StrategyKind::PLeBO:
      acq = plebo_acquisition(*cfg.candidates, state.observations, cand_xs,
                              dim, cfg.base, best);
      break;
    case StrategyKind::Shared:
    case StrategyKind::TruePLeBO: {
      const HyperParams theta = cfg.kind == StrategyKind::Shared
                                    ? *cfg.shared_theta
                                    : *cfg.true_theta;
      Prediction pred =
          posterior_predictive(state.observations, theta, cand_xs, false);
      acq = base_acquisition(cfg.base, pred, best);
      break;
    }
    case StrategyKind::DirectTrans: {
      Dataset pooled = *cfg.transfer_pool;
      for (std::size_t i = 0; i < state.observations.size(); ++i)
        pooled.add(state.observations.point(i), state.observations.y(i));
      const HyperParams theta = refit_theta(cfg, state, pooled, rng);
      Prediction pred = posterior_predictive(pooled, theta, cand_xs, false);
      // Improvement target stays task-local; the pool defines it only
      // before the task has observations of its own.
      double pool_best = best;
      if (state.observations.empty())
        pool_best = *std::max_element(cfg.transfer_pool->ys().begin(),
                                      cfg.transfer_pool->ys().end());
      acq = base_acquisition(cfg.base, pred, pool_best);
      break;
    }
    case StrategyKind::EI:
    case StrategyKind::UCB:
    case StrategyKind::Gamma:
    case StrategyKind::Initial: {  // replay exhausted; behaves as EI
      const HyperParams theta =
          refit_theta(cfg, state, state.observations, rng);
      Prediction pred =
          posterior_predictive(state.observations, theta, cand_xs, false);
      AcquisitionSpec spec = cfg.base;
      if (cfg.kind == StrategyKind::UCB)
        spec.kind = AcquisitionSpec::Kind::UCB;
      acq = base_acquisition(spec, pred, best);
      break;
    }
    default:
      throw ConfigError("propose_next: unhandled strategy");
  }

  return finish(unobserved[argmax_tiebreak(acq, rng)]);
}

HyperParams fit_shared(std::span<const Dataset> datasets,
                       double noise_variance, int restarts, RngStream& rng) {
  if (datasets.empty())
    throw std::invalid_argument("fit_shared: no datasets");
  for (const Dataset& d : datasets)
    if (d.size() < 2)
      throw std::invalid_argument("fit_shared: every dataset needs >= 2 points");

  AscentProblem problem;
  problem.objective =
      [&](const std::array<double, 2>& u) -> std::optional<double> {
    HyperParams theta{std::exp(u[0]), std::exp(u[1]), noise_variance};
    double total = 0.0;
    for (const Dataset& d : datasets) {
      auto lml = try_log_marginal_likelihood(d, theta);
      if (!lml) return std::nullopt;
      total += *lml;
    }
    return std::isfinite(total) ? std::optional<double>(total) : std::nullopt;
  };
  problem.gradient = [&](const std::array<double, 2>& u)
      -> std::optional<std::array<double, 2>> {
    HyperParams theta{std::exp(u[0]), std::exp(u[1]), noise_variance};
    std::array<double, 2> total{0.0, 0.0};
    for (const Dataset& d : datasets) {
      std::array<double, 2> g;
      try {
        g = lml_gradient(d, theta);
      } catch (const LikelihoodUndefined&) {
        return std::nullopt;
      }
      total[0] += g[0];
      total[1] += g[1];
    }
    if (!std::isfinite(total[0]) || !std::isfinite(total[1]))
      return std::nullopt;
    return total;
  };

  // Start boxes from the pooled data.
  Dataset pooled(datasets.front().dim());
  for (const Dataset& d : datasets)
    for (std::size_t i = 0; i < d.size(); ++i) pooled.add(d.point(i), d.y(i));
  const FitOptions options;
  const auto inits = sample_fit_inits(pooled, restarts, rng, options);

  std::array<double, 2> u;
  try {
    u = ascend_two_params(problem, inits, options, nullptr);
  } catch (const FitFailed&) {
    throw FitFailed("fit_shared: likelihood undefined at every restart");
  }
  return HyperParams{std::exp(u[0]), std::exp(u[1]), noise_variance};
}

Dataset build_transfer_pool(std::span<const Dataset> datasets, int cap,
                            RngStream& rng) {
  if (cap < 1) throw std::invalid_argument("build_transfer_pool: cap >= 1");
  if (datasets.empty())
    throw std::invalid_argument("build_transfer_pool: no datasets");
  const std::size_t n_tasks = datasets.size();

  std::size_t total = 0;
  for (const Dataset& d : datasets) total += d.size();

  std::vector<std::size_t> quota(n_tasks, 0);
  if (total <= static_cast<std::size_t>(cap)) {
    for (std::size_t t = 0; t < n_tasks; ++t) quota[t] = datasets[t].size();
  } else {
    // Waterfill: tasks smaller than the fair share keep everything, the
    // remainder is split equally with round-robin leftovers by task index.
    std::vector<std::size_t> active(n_tasks);
    std::iota(active.begin(), active.end(), 0);
    std::size_t remaining = static_cast<std::size_t>(cap);
    for (;;) {
      const std::size_t share = remaining / active.size();
      std::vector<std::size_t> constrained;
      std::vector<std::size_t> free_tasks;
      for (std::size_t t : active) {
        if (datasets[t].size() <= share)
          constrained.push_back(t);
        else
          free_tasks.push_back(t);
      }
      if (constrained.empty()) {
        const std::size_t leftover = remaining % active.size();
        for (std::size_t i = 0; i < active.size(); ++i)
          quota[active[i]] = share + (i < leftover ? 1 : 0);
        break;
      }
      for (std::size_t t : constrained) {
        quota[t] = datasets[t].size();
        remaining -= datasets[t].size();
      }
      active = std::move(free_tasks);
      if (active.empty()) break;
    }
  }

  Dataset pool(datasets.front().dim());
  for (std::size_t t = 0; t < n_tasks; ++t) {
    const Dataset& d = datasets[t];
    std::vector<std::size_t> picked(d.size());
    std::iota(picked.begin(), picked.end(), 0);
    // Partial Fisher-Yates; selected indices restored to original order.
    for (std::size_t i = 0; i < quota[t]; ++i) {
      std::size_t j = i + rng.below(d.size() - i);
      std::swap(picked[i], picked[j]);
    }
    picked.resize(quota[t]);
    std::sort(picked.begin(), picked.end());
    for (std::size_t idx : picked) pool.add(d.point(idx), d.y(idx));
  }
  return pool;
}

std::vector<std::vector<double>> extract_initial_points(
    std::span<const Dataset> datasets) {
  struct Entry {
    double y;
    std::size_t task;
    std::vector<double> point;
  };
  std::vector<Entry> entries;
  for (std::size_t t = 0; t < datasets.size(); ++t) {
    const Dataset& d = datasets[t];
    if (d.empty())
      throw std::invalid_argument("extract_initial_points: empty dataset");
    std::size_t best = 0;
    for (std::size_t i = 1; i < d.size(); ++i)
      if (d.y(i) > d.y(best)) best = i;
    auto p = d.point(best);
    entries.push_back({d.y(best), t, {p.begin(), p.end()}});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) {
                     if (a.y != b.y) return a.y > b.y;
                     return a.task < b.task;
                   });
  std::vector<std::vector<double>> points;
  points.reserve(entries.size());
  for (Entry& e : entries) points.push_back(std::move(e.point));
  return points;
}

}  // namespace plebo
