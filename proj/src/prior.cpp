#include "plebo/prior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include <json.hpp>

#include "plebo/distributions.hpp"

namespace plebo {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_eta_prior(const HyperPrior& eta, const HyperpriorConfig& cfg) {
  return lognormal_logpdf(eta.l_shape, cfg.log_median, cfg.log_sigma) +
         lognormal_logpdf(eta.l_scale, cfg.log_median, cfg.log_sigma) +
         lognormal_logpdf(eta.v_shape, cfg.log_median, cfg.log_sigma) +
         lognormal_logpdf(eta.v_scale, cfg.log_median, cfg.log_sigma) +
         cfg.constant_offset;
}

double log_joint(const HyperPrior& eta, std::span<const HyperParams> thetas,
                 std::span<const Dataset> datasets,
                 const HyperpriorConfig& cfg) {
  if (thetas.size() != datasets.size() || thetas.empty())
    throw std::invalid_argument("log_joint: |thetas| must equal |datasets|");
  double total = log_eta_prior(eta, cfg);
  for (std::size_t n = 0; n < thetas.size(); ++n) {
    const HyperParams& theta = thetas[n];
    total += gamma_logpdf(theta.lengthscale, eta.l_shape, eta.l_scale);
    total += gamma_logpdf(theta.signal_variance, eta.v_shape, eta.v_scale);
    auto lml = try_log_marginal_likelihood(datasets[n], theta);
    if (!lml) return kNegInf;
    total += *lml;
  }
  return total;
}

namespace {

// Chain state over u = (log eta[4], log theta_1[2], ..., log theta_N[2]).
// Likelihood and prior terms are cached per block so a sweep recomputes
// only what the proposed block touches.
struct Chain {
  std::vector<double> u;
  double eta_prior = 0.0;
  std::vector<double> gamma_terms;  // per task
  std::vector<double> lml_terms;    // per task
  std::vector<double> block_scales;
  std::vector<int> block_steps;  // adaptation step counters
  RngStream rng{0};

  std::size_t n_tasks() const { return gamma_terms.size(); }

  HyperPrior eta() const {
    return {std::exp(u[0]), std::exp(u[1]), std::exp(u[2]), std::exp(u[3])};
  }
  HyperParams theta(std::size_t n, double noise) const {
    return {std::exp(u[4 + 2 * n]), std::exp(u[5 + 2 * n]), noise};
  }
  double log_joint_natural() const {
    double s = eta_prior;
    for (std::size_t n = 0; n < n_tasks(); ++n)
      s += gamma_terms[n] + lml_terms[n];
    return s;
  }
  double jacobian(std::size_t offset, std::size_t count) const {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += u[offset + i];
    return s;
  }
};

double gamma_term(const HyperPrior& eta, const HyperParams& theta) {
  return gamma_logpdf(theta.lengthscale, eta.l_shape, eta.l_scale) +
         gamma_logpdf(theta.signal_variance, eta.v_shape, eta.v_scale);
}

double lml_or_neg_inf(const Dataset& d, const HyperParams& theta) {
  auto lml = try_log_marginal_likelihood(d, theta);
  return lml ? *lml : kNegInf;
}

// Coordinates this far out in log-space carry no meaningful posterior mass
// under the broad hyperprior; proposals beyond are rejected outright, which
// also keeps exp(u) away from 0/inf.
constexpr double kLogBox = 60.0;

bool in_box(std::span<const double> u) {
  for (double v : u)
    if (!(std::abs(v) <= kLogBox)) return false;
  return true;
}

struct ChainOutput {
  std::vector<HyperPrior> eta_draws;
  std::vector<std::vector<HyperParams>> theta_draws;
  std::vector<double> log_joint_values;
  std::vector<std::vector<double>> scale_trace;
};

ChainOutput run_chain(std::span<const Dataset> datasets, const McmcConfig& cfg,
                      int chain_id, std::span<const HyperParams> theta_init,
                      const HyperPrior& eta_init) {
  const std::size_t n_tasks = datasets.size();
  const std::size_t dim = 4 + 2 * n_tasks;
  const std::size_t n_blocks = 1 + n_tasks;

  // The constant offset cancels from every acceptance ratio; keeping it out
  // of the cached terms makes trajectories bit-identical under shifts. It is
  // added back when draws are recorded.
  HyperpriorConfig hp = cfg.hyperprior;
  const double offset = hp.constant_offset;
  hp.constant_offset = 0.0;

  Chain chain;
  chain.rng = RngStream(cfg.seed).derive(0x6d636d63ull, chain_id);
  chain.u.resize(dim);
  chain.gamma_terms.resize(n_tasks);
  chain.lml_terms.resize(n_tasks);
  chain.block_scales.assign(n_blocks, cfg.proposal_scale);
  chain.block_steps.assign(n_blocks, 0);

  // Initialise near the per-task fits, jittered per chain, retrying until
  // the joint is finite.
  for (int attempt = 0;; ++attempt) {
    chain.u[0] = std::log(eta_init.l_shape) + 0.3 * chain.rng.normal();
    chain.u[1] = std::log(eta_init.l_scale) + 0.3 * chain.rng.normal();
    chain.u[2] = std::log(eta_init.v_shape) + 0.3 * chain.rng.normal();
    chain.u[3] = std::log(eta_init.v_scale) + 0.3 * chain.rng.normal();
    for (std::size_t n = 0; n < n_tasks; ++n) {
      chain.u[4 + 2 * n] =
          std::log(theta_init[n].lengthscale) + 0.2 * chain.rng.normal();
      chain.u[5 + 2 * n] =
          std::log(theta_init[n].signal_variance) + 0.2 * chain.rng.normal();
    }
    chain.eta_prior = log_eta_prior(chain.eta(), hp);
    bool finite = std::isfinite(chain.eta_prior);
    for (std::size_t n = 0; n < n_tasks; ++n) {
      HyperParams theta = chain.theta(n, cfg.noise_variance);
      chain.gamma_terms[n] = gamma_term(chain.eta(), theta);
      chain.lml_terms[n] = lml_or_neg_inf(datasets[n], theta);
      if (!std::isfinite(chain.gamma_terms[n]) ||
          !std::isfinite(chain.lml_terms[n]))
        finite = false;
    }
    if (finite) break;
    if (attempt > 50)
      throw InferenceFailed("run_mcmc: could not find a finite start point");
  }

  ChainOutput out;
  out.scale_trace.reserve(cfg.n_warmup + cfg.n_samples_per_chain);

  const int total_sweeps = cfg.n_warmup + cfg.n_samples_per_chain;
  std::vector<double> proposed;
  for (int sweep = 0; sweep < total_sweeps; ++sweep) {
    const bool warming = sweep < cfg.n_warmup;

    // Block 0: eta. The per-task LML terms do not depend on eta, so the
    // acceptance ratio needs no likelihood recomputation.
    {
      proposed.assign(chain.u.begin(), chain.u.begin() + 4);
      for (std::size_t i = 0; i < 4; ++i)
        proposed[i] += chain.block_scales[0] * chain.rng.normal();
      double delta = kNegInf;
      double new_eta_prior = 0.0;
      std::vector<double> new_gammas(n_tasks);
      if (in_box(proposed)) {
        HyperPrior eta_new{std::exp(proposed[0]), std::exp(proposed[1]),
                           std::exp(proposed[2]), std::exp(proposed[3])};
        new_eta_prior = log_eta_prior(eta_new, hp);
        double new_sum = new_eta_prior;
        double old_sum = chain.eta_prior;
        for (std::size_t n = 0; n < n_tasks; ++n) {
          new_gammas[n] =
              gamma_term(eta_new, chain.theta(n, cfg.noise_variance));
          new_sum += new_gammas[n];
          old_sum += chain.gamma_terms[n];
        }
        double jac_new = proposed[0] + proposed[1] + proposed[2] + proposed[3];
        delta = new_sum - old_sum + jac_new - chain.jacobian(0, 4);
      }
      double alpha = std::min(1.0, std::exp(delta));
      if (std::log(chain.rng.uniform_pos()) < delta) {
        std::copy(proposed.begin(), proposed.end(), chain.u.begin());
        chain.eta_prior = new_eta_prior;
        chain.gamma_terms = new_gammas;
      }
      if (warming) {
        int t = ++chain.block_steps[0];
        double g = std::pow(static_cast<double>(t), -0.6);
        double ls = std::log(chain.block_scales[0]) +
                    g * (alpha - cfg.adapt_target);
        chain.block_scales[0] = std::exp(std::clamp(ls, std::log(1e-6),
                                                    std::log(1e2)));
      }
    }

    // One block per task theta_n.
    for (std::size_t n = 0; n < n_tasks; ++n) {
      const std::size_t off = 4 + 2 * n;
      double p0 = chain.u[off] + chain.block_scales[1 + n] * chain.rng.normal();
      double p1 =
          chain.u[off + 1] + chain.block_scales[1 + n] * chain.rng.normal();
      double delta = kNegInf;
      double new_gamma = 0.0;
      double new_lml = kNegInf;
      const double box[2] = {p0, p1};
      if (in_box(box)) {
        HyperParams theta_new{std::exp(p0), std::exp(p1), cfg.noise_variance};
        new_gamma = gamma_term(chain.eta(), theta_new);
        new_lml = lml_or_neg_inf(datasets[n], theta_new);
        if (std::isfinite(new_lml)) {
          delta = (new_gamma + new_lml) -
                  (chain.gamma_terms[n] + chain.lml_terms[n]) +
                  (p0 + p1 - chain.u[off] - chain.u[off + 1]);
        }
      }
      double alpha = std::min(1.0, std::exp(delta));
      if (std::log(chain.rng.uniform_pos()) < delta) {
        chain.u[off] = p0;
        chain.u[off + 1] = p1;
        chain.gamma_terms[n] = new_gamma;
        chain.lml_terms[n] = new_lml;
      }
      if (warming) {
        int t = ++chain.block_steps[1 + n];
        double g = std::pow(static_cast<double>(t), -0.6);
        double ls = std::log(chain.block_scales[1 + n]) +
                    g * (alpha - cfg.adapt_target);
        chain.block_scales[1 + n] = std::exp(std::clamp(ls, std::log(1e-6),
                                                        std::log(1e2)));
      }
    }

    out.scale_trace.push_back(chain.block_scales);

    if (!warming) {
      out.eta_draws.push_back(chain.eta());
      std::vector<HyperParams> thetas(n_tasks);
      for (std::size_t n = 0; n < n_tasks; ++n)
        thetas[n] = chain.theta(n, cfg.noise_variance);
      out.theta_draws.push_back(std::move(thetas));
      out.log_joint_values.push_back(chain.log_joint_natural() + offset);
    }
  }
  return out;
}

}  // namespace

PosteriorSamples run_mcmc(std::span<const Dataset> datasets,
                          const McmcConfig& cfg) {
  if (datasets.empty())
    throw std::invalid_argument("run_mcmc: no tuning datasets");
  for (const Dataset& d : datasets)
    if (d.size() < 2)
      throw std::invalid_argument("run_mcmc: every dataset needs >= 2 points");
  if (cfg.n_chains < 1 || cfg.n_samples_per_chain < 1 ||
      cfg.adapt_target <= 0.0 || cfg.adapt_target >= 1.0)
    throw ConfigError("run_mcmc: invalid McmcConfig");

  const std::size_t n_tasks = datasets.size();

  // Shared starting point: per-task ML fits and a moment-matched eta.
  RngStream fit_rng = RngStream(cfg.seed).derive(0x66697421ull);
  std::vector<HyperParams> theta_init(n_tasks);
  for (std::size_t n = 0; n < n_tasks; ++n) {
    try {
      theta_init[n] =
          fit_map(datasets[n], std::nullopt, 3, fit_rng, cfg.noise_variance);
    } catch (const FitFailed&) {
      theta_init[n] = HyperParams{1.0, 1.0, cfg.noise_variance};
    }
  }
  const auto moment_match = [](std::span<const double> values) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    double shape = var > 1e-12 * mean * mean
                       ? std::clamp(mean * mean / var, 0.1, 1e3)
                       : 10.0;
    return std::pair<double, double>(shape, mean / shape);
  };
  std::vector<double> ls(n_tasks);
  std::vector<double> vs(n_tasks);
  for (std::size_t n = 0; n < n_tasks; ++n) {
    ls[n] = theta_init[n].lengthscale;
    vs[n] = theta_init[n].signal_variance;
  }
  auto [l_shape, l_scale] = moment_match(ls);
  auto [v_shape, v_scale] = moment_match(vs);
  HyperPrior eta_init{l_shape, l_scale, v_shape, v_scale};

  std::vector<ChainOutput> outputs(cfg.n_chains);
  {
    std::vector<std::thread> workers;
    workers.reserve(cfg.n_chains);
    for (int c = 0; c < cfg.n_chains; ++c)
      workers.emplace_back([&, c] {
        outputs[c] = run_chain(datasets, cfg, c, theta_init, eta_init);
      });
    for (auto& w : workers) w.join();
  }

  PosteriorSamples raw;
  raw.seed = cfg.seed;
  raw.noise_variance = cfg.noise_variance;
  for (int c = 0; c < cfg.n_chains; ++c) {
    auto& out = outputs[c];
    raw.adaptation_trace.push_back(std::move(out.scale_trace));
    for (std::size_t i = 0; i < out.eta_draws.size(); ++i) {
      raw.eta_draws.push_back(out.eta_draws[i]);
      raw.theta_draws.push_back(std::move(out.theta_draws[i]));
      raw.chain_ids.push_back(c);
      raw.log_joint_values.push_back(out.log_joint_values[i]);
    }
  }

  PosteriorSamples filtered = filter_samples(raw);
  const std::size_t minimum = static_cast<std::size_t>(cfg.n_chains) *
                              static_cast<std::size_t>(cfg.n_samples_per_chain) /
                              10;
  if (filtered.size() < std::max<std::size_t>(minimum, 1))
    throw InferenceFailed("run_mcmc: too few draws survived filtering (" +
                          std::to_string(filtered.size()) + ")");
  return filtered;
}

PosteriorSamples filter_samples(const PosteriorSamples& raw) {
  const std::size_t n = raw.size();
  std::vector<bool> finite(n);
  for (std::size_t i = 0; i < n; ++i)
    finite[i] = std::isfinite(raw.log_joint_values[i]);

  // Retained fraction per chain; chains below 10% are dropped entirely.
  std::map<int, std::pair<std::size_t, std::size_t>> counts;  // kept/total
  for (std::size_t i = 0; i < n; ++i) {
    auto& c = counts[raw.chain_ids[i]];
    c.first += finite[i] ? 1 : 0;
    c.second += 1;
  }

  PosteriorSamples out;
  out.seed = raw.seed;
  out.noise_variance = raw.noise_variance;
  out.adaptation_trace = raw.adaptation_trace;
  out.n_filtered = raw.n_filtered;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = counts[raw.chain_ids[i]];
    const bool chain_ok =
        10 * c.first >= c.second;  // retained fraction >= 10%
    if (finite[i] && chain_ok) {
      out.eta_draws.push_back(raw.eta_draws[i]);
      out.theta_draws.push_back(raw.theta_draws[i]);
      out.chain_ids.push_back(raw.chain_ids[i]);
      out.log_joint_values.push_back(raw.log_joint_values[i]);
    } else {
      ++out.n_filtered;
    }
  }
  if (out.eta_draws.empty())
    throw InferenceFailed("filter_samples: nothing left after filtering");
  return out;
}

CandidateSet sample_candidates(const PosteriorSamples& post, int h,
                               std::uint64_t seed) {
  if (post.size() == 0)
    throw std::invalid_argument("sample_candidates: empty posterior");
  if (h < 1) throw std::invalid_argument("sample_candidates: H >= 1");
  RngStream rng(seed);
  CandidateSet cands;
  cands.source_seed = seed;
  cands.thetas.reserve(h);
  for (int i = 0; i < h; ++i) {
    const HyperPrior& eta = post.eta_draws[rng.below(post.size())];
    double l = rng.gamma(eta.l_shape, eta.l_scale);
    double v = rng.gamma(eta.v_shape, eta.v_scale);
    cands.thetas.push_back(HyperParams{l, v, post.noise_variance});
  }
  return cands;
}

HyperPrior summarize_eta(const PosteriorSamples& post) {
  if (post.size() == 0)
    throw std::invalid_argument("summarize_eta: empty posterior");
  HyperPrior mean{0.0, 0.0, 0.0, 0.0};
  for (const HyperPrior& eta : post.eta_draws) {
    mean.l_shape += eta.l_shape;
    mean.l_scale += eta.l_scale;
    mean.v_shape += eta.v_shape;
    mean.v_scale += eta.v_scale;
  }
  const double inv = 1.0 / static_cast<double>(post.size());
  mean.l_shape *= inv;
  mean.l_scale *= inv;
  mean.v_shape *= inv;
  mean.v_scale *= inv;
  return mean;
}

void save_posterior(const std::string& path, const PosteriorSamples& post) {
  nlohmann::json j;
  j["seed"] = post.seed;
  j["noise_variance"] = post.noise_variance;
  j["n_filtered"] = post.n_filtered;
  auto& etas = j["eta_draws"] = nlohmann::json::array();
  for (const HyperPrior& eta : post.eta_draws)
    etas.push_back({{"l_shape", eta.l_shape},
                    {"l_scale", eta.l_scale},
                    {"v_shape", eta.v_shape},
                    {"v_scale", eta.v_scale}});
  // Serialised per tuning task, aligned by draw index.
  auto& thetas = j["theta_draws"] = nlohmann::json::array();
  const std::size_t n_tasks = post.n_tasks();
  for (std::size_t t = 0; t < n_tasks; ++t) {
    nlohmann::json task = nlohmann::json::array();
    for (std::size_t i = 0; i < post.size(); ++i)
      task.push_back({{"l", post.theta_draws[i][t].lengthscale},
                      {"v", post.theta_draws[i][t].signal_variance}});
    thetas.push_back(std::move(task));
  }
  j["log_joint"] = post.log_joint_values;
  j["chains"] = post.chain_ids;

  std::ofstream out(path);
  if (!out) throw Error("save_posterior: cannot open " + path);
  out << j.dump(2) << "\n";
}

PosteriorSamples load_posterior(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_posterior: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_posterior: " + std::string(e.what()));
  }
  PosteriorSamples post;
  post.seed = j.value("seed", 0ull);
  post.noise_variance = j.value("noise_variance", 1e-4);
  post.n_filtered = j.value("n_filtered", 0ull);
  for (const auto& eta : j.at("eta_draws"))
    post.eta_draws.push_back(HyperPrior{eta.at("l_shape"), eta.at("l_scale"),
                                        eta.at("v_shape"), eta.at("v_scale")});
  const auto& thetas = j.at("theta_draws");
  const std::size_t n_tasks = thetas.size();
  post.theta_draws.assign(post.eta_draws.size(),
                          std::vector<HyperParams>(n_tasks));
  for (std::size_t t = 0; t < n_tasks; ++t) {
    const auto& task = thetas.at(t);
    if (task.size() != post.size())
      throw ParseError("load_posterior: misaligned theta draws");
    for (std::size_t i = 0; i < post.size(); ++i)
      post.theta_draws[i][t] = HyperParams{task.at(i).at("l"),
                                           task.at(i).at("v"),
                                           post.noise_variance};
  }
  post.log_joint_values = j.at("log_joint").get<std::vector<double>>();
  post.chain_ids = j.at("chains").get<std::vector<int>>();
  if (post.chain_ids.size() != post.size() ||
      post.log_joint_values.size() != post.size())
    throw ParseError("load_posterior: misaligned draw arrays");
  return post;
}

void save_candidates(const std::string& path, const CandidateSet& cands) {
  nlohmann::json j;
  auto& thetas = j["thetas"] = nlohmann::json::array();
  for (const HyperParams& theta : cands.thetas)
    thetas.push_back({{"l", theta.lengthscale}, {"v", theta.signal_variance}});
  j["seed"] = cands.source_seed;
  std::ofstream out(path);
  if (!out) throw Error("save_candidates: cannot open " + path);
  out << j.dump(2) << "\n";
}

CandidateSet load_candidates(const std::string& path, double noise_variance) {
  std::ifstream in(path);
  if (!in) throw Error("load_candidates: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_candidates: " + std::string(e.what()));
  }
  CandidateSet cands;
  cands.source_seed = j.value("seed", 0ull);
  for (const auto& theta : j.at("thetas"))
    cands.thetas.push_back(
        HyperParams{theta.at("l"), theta.at("v"), noise_variance});
  if (cands.thetas.empty()) throw ParseError("load_candidates: no candidates");
  return cands;
}

}  // namespace plebo
