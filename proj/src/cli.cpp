#include "plebo/cli.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "plebo/benchmarks.hpp"
#include "plebo/kernels.hpp"
#include "plebo/plot.hpp"
#include "plebo/prior.hpp"
#include "plebo/runner.hpp"
#include "plebo/strategies.hpp"

namespace plebo::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// --seed flag with PLEBO_SEED as fallback.
std::uint64_t resolve_seed(const CLI::App& cmd, std::uint64_t flag_value) {
  if (cmd.count("--seed") > 0) return flag_value;
  if (const char* env = std::getenv("PLEBO_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw ConfigError("PLEBO_SEED is not a valid unsigned integer");
    }
  }
  return flag_value;
}

std::optional<PriorTruth> truth_from_suite(const LoadedSuite& suite) {
  if (!suite.l_prior || !suite.v_prior) return std::nullopt;
  PriorTruth truth;
  truth.eta = HyperPrior{suite.l_prior->shape, suite.l_prior->scale,
                         suite.v_prior->shape, suite.v_prior->scale};
  for (const GridTask& task : suite.tuning) {
    if (!task.true_theta) return std::nullopt;
    truth.thetas.push_back(*task.true_theta);
  }
  return truth;
}

std::vector<Dataset> tuning_datasets(const LoadedSuite& suite) {
  std::vector<Dataset> out;
  out.reserve(suite.tuning.size());
  for (const GridTask& task : suite.tuning)
    out.push_back(task.start_observations());
  return out;
}

// ---------------------------------------------------------------- gen ----

int cmd_gen_synthetic(const SuiteConfig& cfg, const std::string& out_dir) {
  cfg.validate();
  Suite suite = generate_suite_tasks(cfg);
  save_suite(out_dir, suite, cfg);
  std::cout << "wrote " << suite.tuning.size() << " tuning + "
            << suite.test.size() << " test tasks to " << out_dir
            << " (seed " << cfg.seed << ")\n";
  return 0;
}

// ----------------------------------------------------------- fit-prior ----

struct FitPriorArgs {
  std::string manifest;
  std::string out_dir;
  McmcConfig mcmc;
  int h = 200;
  bool noise_given = false;
};

int cmd_fit_prior(const FitPriorArgs& args) {
  LoadedSuite suite = load_suite(args.manifest);
  if (suite.tuning.empty())
    throw ConfigError("fit-prior: manifest has no tuning tasks");

  McmcConfig cfg = args.mcmc;
  if (!args.noise_given) cfg.noise_variance = suite.noise_variance;

  const std::vector<Dataset> tuning = tuning_datasets(suite);
  PosteriorSamples post;
  try {
    post = run_mcmc(tuning, cfg);
  } catch (const InferenceFailed& e) {
    std::cerr << "fit-prior: inference failed: " << e.what() << "\n"
              << "  chains=" << cfg.n_chains
              << " warmup=" << cfg.n_warmup
              << " samples/chain=" << cfg.n_samples_per_chain << "\n";
    return 1;
  }

  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  save_posterior((out / "posterior.json").string(), post);
  CandidateSet cands = sample_candidates(
      post, args.h, RngStream(cfg.seed).derive(0x63616e64ull).seed());
  save_candidates((out / "candidates.json").string(), cands);

  std::vector<std::string> names;
  for (const GridTask& task : suite.tuning) names.push_back(task.name);
  PriorQualityReport report = prior_quality_report(
      post, truth_from_suite(suite), tuning, names);
  save_report_json((out / "prior_quality.json").string(), report);
  save_report_csv((out / "prior_quality.csv").string(), report);

  const HyperPrior eta = report.eta_posterior_mean;
  std::cout << "fit-prior: " << post.size() << " draws (" << post.n_filtered
            << " filtered), eta mean: l ~ Gamma(" << eta.l_shape << ", "
            << eta.l_scale << "), v ~ Gamma(" << eta.v_shape << ", "
            << eta.v_scale << ")\n";
  return 0;
}

// ----------------------------------------------------------------- run ----

struct RunStrategySpec {
  StrategyKind kind = StrategyKind::RandomSearch;
  std::string candidates_file;  // PLeBO
  std::string posterior_file;   // Gamma
  double ucb_beta = 4.0;
  int transfer_cap = 100;
};

struct RunManifest {
  std::string suite;
  std::vector<RunStrategySpec> strategies;
  int iterations = 30;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "results";
  int h = 200;
  std::optional<double> noise_variance;
  int refit_every = 1;
  int fit_restarts = 5;
};

RunManifest parse_run_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("run: cannot open manifest " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("run: bad manifest JSON: " + std::string(e.what()));
  }
  RunManifest m;
  const fs::path base = fs::path(path).parent_path();
  const auto resolve = [&](const std::string& p) {
    return (fs::path(p).is_absolute() ? fs::path(p) : base / p).string();
  };
  if (!j.contains("suite")) throw ConfigError("run: manifest needs 'suite'");
  m.suite = resolve(j["suite"]);
  m.iterations = j.value("iterations", 30);
  if (j.contains("seeds"))
    m.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  else
    m.seeds = {j.value("seed", 0ull)};
  m.out_dir = j.contains("out_dir") ? resolve(j["out_dir"]) : "results";
  m.h = j.value("H", 200);
  if (j.contains("noise_variance"))
    m.noise_variance = j["noise_variance"].get<double>();
  m.refit_every = j.value("refit_every", 1);
  m.fit_restarts = j.value("fit_restarts", 5);
  if (!j.contains("strategies") || j["strategies"].empty())
    throw ConfigError("run: manifest needs a non-empty 'strategies' list");
  for (const auto& s : j["strategies"]) {
    RunStrategySpec spec;
    if (s.is_string()) {
      spec.kind = strategy_from_name(s.get<std::string>());
    } else {
      spec.kind = strategy_from_name(s.at("kind").get<std::string>());
      if (s.contains("candidates")) spec.candidates_file = resolve(s["candidates"]);
      if (s.contains("posterior")) spec.posterior_file = resolve(s["posterior"]);
      spec.ucb_beta = s.value("ucb_beta", 4.0);
      spec.transfer_cap = s.value("transfer_cap", 100);
    }
    m.strategies.push_back(std::move(spec));
  }
  if (m.seeds.empty()) throw ConfigError("run: empty seeds list");
  if (m.iterations < 1) throw ConfigError("run: iterations must be >= 1");
  return m;
}

struct PreparedStrategy {
  RunStrategySpec spec;
  StrategyConfig base_cfg;  // true_theta filled per task later
};

void write_results_csv(const std::string& path,
                       std::span<const RunResult> results) {
  std::ofstream out(path);
  if (!out) throw Error("run: cannot write " + path);
  out << "task,strategy,seed,iteration,chosen_index,observed_y,r,regret,"
         "step_seconds\n";
  for (const RunResult& r : results) {
    for (std::size_t i = 0; i < r.iterations.size(); ++i) {
      const IterationRecord& rec = r.iterations[i];
      char secs[32];
      std::snprintf(secs, sizeof(secs), "%.9f", rec.step_seconds);
      out << r.task_name << "," << r.strategy << "," << r.seed << ","
          << (i + 1) << "," << rec.chosen_index << ","
          << fmt17(rec.observed_y) << "," << fmt17(rec.r) << ","
          << fmt17(rec.regret) << "," << secs << "\n";
    }
  }
}

void write_aggregate_csv(const std::string& path,
                         const std::vector<std::pair<std::string, AggregateCurve>>&
                             curves) {
  std::ofstream out(path);
  if (!out) throw Error("run: cannot write " + path);
  out << "strategy,iteration,mean,stderr,J\n";
  for (const auto& [name, curve] : curves)
    for (std::size_t i = 0; i < curve.mean.size(); ++i)
      out << name << "," << (i + 1) << "," << fmt17(curve.mean[i]) << ","
          << fmt17(curve.se[i]) << "," << curve.j << "\n";
}

void write_difference_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, AggregateCurve>>& curves) {
  std::ofstream out(path);
  if (!out) throw Error("run: cannot write " + path);
  out << "strategy,reference,iteration,mean,stderr,J\n";
  for (const auto& [name, curve] : curves)
    for (std::size_t i = 0; i < curve.mean.size(); ++i)
      out << name << "," << curve.reference << "," << (i + 1) << ","
          << fmt17(curve.mean[i]) << "," << fmt17(curve.se[i]) << ","
          << curve.j << "\n";
}

int cmd_run(const std::string& manifest_path, int jobs,
            const std::string& out_override) {
  RunManifest manifest = parse_run_manifest(manifest_path);
  if (!out_override.empty()) manifest.out_dir = out_override;
  LoadedSuite suite = load_suite(manifest.suite);
  if (suite.test.empty()) throw ConfigError("run: suite has no test tasks");
  const double noise =
      manifest.noise_variance.value_or(suite.noise_variance);

  const std::vector<Dataset> tuning = tuning_datasets(suite);

  // Shared artifacts, prepared once per (strategy, seed).
  struct RunSpec {
    std::size_t task_index;
    std::size_t strategy_index;
    std::uint64_t seed;
  };
  std::vector<RunSpec> specs;

  // Per (strategy, seed) base configs; TruePLeBO's theta is per task.
  std::map<std::pair<std::size_t, std::uint64_t>, StrategyConfig> base_cfgs;
  for (std::size_t s = 0; s < manifest.strategies.size(); ++s) {
    const RunStrategySpec& spec = manifest.strategies[s];
    for (std::uint64_t seed : manifest.seeds) {
      StrategyConfig cfg;
      cfg.kind = spec.kind;
      cfg.noise_variance = noise;
      cfg.refit_every = manifest.refit_every;
      cfg.fit_restarts = manifest.fit_restarts;
      cfg.base.ucb_beta = spec.ucb_beta;
      switch (spec.kind) {
        case StrategyKind::PLeBO: {
          if (spec.candidates_file.empty())
            throw ConfigError("run: PLeBO needs a 'candidates' file");
          CandidateSet cands = load_candidates(spec.candidates_file, noise);
          if (manifest.h > 0 &&
              cands.size() > static_cast<std::size_t>(manifest.h))
            cands.thetas.resize(manifest.h);
          cfg.candidates = std::move(cands);
          break;
        }
        case StrategyKind::Gamma: {
          if (spec.posterior_file.empty())
            throw ConfigError("run: Gamma needs a 'posterior' file");
          cfg.eta_mean = summarize_eta(load_posterior(spec.posterior_file));
          break;
        }
        case StrategyKind::Shared: {
          if (tuning.empty())
            throw ConfigError("run: Shared needs tuning tasks in the suite");
          RngStream rng = RngStream(seed).derive(0x73686172ull);
          cfg.shared_theta =
              fit_shared(tuning, noise, manifest.fit_restarts, rng);
          break;
        }
        case StrategyKind::DirectTrans: {
          if (tuning.empty())
            throw ConfigError(
                "run: DirectTrans needs tuning tasks in the suite");
          RngStream rng = RngStream(seed).derive(0x706f6f6cull);
          cfg.transfer_pool =
              build_transfer_pool(tuning, spec.transfer_cap, rng);
          break;
        }
        case StrategyKind::Initial: {
          if (tuning.empty())
            throw ConfigError("run: Initial needs tuning tasks in the suite");
          cfg.initial_points = extract_initial_points(tuning);
          break;
        }
        case StrategyKind::TruePLeBO: {
          for (const GridTask& task : suite.test)
            if (!task.true_theta)
              throw ConfigError("run: TruePLeBO needs true theta for task " +
                                task.name);
          break;
        }
        default:
          break;
      }
      base_cfgs.emplace(std::make_pair(s, seed), std::move(cfg));
    }
  }

  for (std::uint64_t seed : manifest.seeds)
    for (std::size_t s = 0; s < manifest.strategies.size(); ++s)
      for (std::size_t t = 0; t < suite.test.size(); ++t)
        specs.push_back({t, s, seed});

  std::vector<RunResult> results(specs.size());
  std::atomic<std::size_t> cursor{0};
  const int n_workers =
      jobs > 0 ? jobs
               : std::max(1u, std::thread::hardware_concurrency());
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= specs.size()) break;
      const RunSpec& spec = specs[i];
      const GridTask& task = suite.test[spec.task_index];
      StrategyConfig cfg = base_cfgs.at({spec.strategy_index, spec.seed});
      if (cfg.kind == StrategyKind::TruePLeBO) cfg.true_theta = task.true_theta;
      const std::uint64_t run_seed = RngStream(spec.seed)
                                         .derive(spec.strategy_index,
                                                 spec.task_index)
                                         .seed();
      results[i] = run_bo(task, cfg, manifest.iterations, run_seed);
      results[i].seed = spec.seed;  // pairing key across strategies
    }
  };
  {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  fs::create_directories(manifest.out_dir);
  const fs::path out(manifest.out_dir);
  write_results_csv((out / "results.csv").string(), results);

  std::size_t failed = 0;
  std::map<std::string, std::vector<RunResult>> by_strategy;
  for (const RunResult& r : results) {
    if (r.failed) {
      ++failed;
      std::cerr << "run failed: " << r.task_name << "/" << r.strategy
                << " seed " << r.seed << ": " << r.error << "\n";
      continue;
    }
    by_strategy[r.strategy].push_back(r);
  }

  std::vector<std::pair<std::string, AggregateCurve>> aggregates;
  for (const RunStrategySpec& spec : manifest.strategies) {
    const std::string name = strategy_name(spec.kind);
    auto it = by_strategy.find(name);
    if (it != by_strategy.end() && !it->second.empty() &&
        std::all_of(it->second.begin(), it->second.end(),
                    [&](const RunResult& r) {
                      return r.iterations.size() ==
                             it->second.front().iterations.size();
                    }))
      aggregates.emplace_back(name, aggregate(it->second));
  }
  write_aggregate_csv((out / "aggregate.csv").string(), aggregates);

  if (by_strategy.count("PLeBO") > 0) {
    const auto& reference = by_strategy["PLeBO"];
    std::set<std::pair<std::string, std::uint64_t>> ref_keys;
    for (const RunResult& r : reference)
      ref_keys.insert({r.task_name, r.seed});
    std::vector<std::pair<std::string, AggregateCurve>> diffs;
    for (const auto& [name, runs] : by_strategy) {
      if (name == "PLeBO") continue;
      std::vector<RunResult> method;
      std::set<std::pair<std::string, std::uint64_t>> method_keys;
      for (const RunResult& r : runs)
        if (ref_keys.count({r.task_name, r.seed})) {
          method.push_back(r);
          method_keys.insert({r.task_name, r.seed});
        }
      std::vector<RunResult> ref_matched;
      for (const RunResult& r : reference)
        if (method_keys.count({r.task_name, r.seed})) ref_matched.push_back(r);
      if (!method.empty())
        diffs.emplace_back(name, difference_curve(method, ref_matched));
    }
    write_difference_csv((out / "differences.csv").string(), diffs);
  }

  const double success_rate =
      1.0 - static_cast<double>(failed) / static_cast<double>(results.size());
  std::cout << "run: " << results.size() - failed << "/" << results.size()
            << " runs succeeded; results in " << manifest.out_dir << "\n";
  return success_rate >= 0.9 ? 0 : 1;
}

// ---------------------------------------------------------------- plot ----

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("plot: cannot open " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t end = line.find(',', pos);
      fields.push_back(line.substr(pos, end - pos));
      if (end == std::string::npos) break;
      pos = end + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  if (table.header.empty()) throw ParseError("plot: empty CSV " + path);
  return table;
}

int cmd_plot(const std::string& input, const std::string& output,
             const std::string& title) {
  CsvTable table = read_csv(input);
  const auto col = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < table.header.size(); ++i)
      if (table.header[i] == name) return i;
    throw ParseError("plot: missing column '" + name + "' in " + input);
  };
  const std::size_t c_strategy = col("strategy");
  const std::size_t c_iteration = col("iteration");
  const std::size_t c_mean = col("mean");
  const std::size_t c_se = col("stderr");
  const bool difference_mode =
      std::find(table.header.begin(), table.header.end(), "reference") !=
      table.header.end();
  if (table.rows.empty()) throw ParseError("plot: no data rows in " + input);

  std::vector<PlotSeries> series;
  std::map<std::string, std::size_t> index;
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw ParseError("plot: ragged row in " + input);
    const std::string& name = row[c_strategy];
    if (index.find(name) == index.end()) {
      index[name] = series.size();
      series.push_back({name, {}, {}, {}});
    }
    PlotSeries& s = series[index[name]];
    try {
      s.x.push_back(std::stod(row[c_iteration]));
      s.mean.push_back(std::stod(row[c_mean]));
      s.se.push_back(std::stod(row[c_se]));
    } catch (...) {
      throw ParseError("plot: non-numeric cell in " + input);
    }
  }

  const std::string svg = render_curves_svg(series, difference_mode, title);
  std::ofstream out(output);
  if (!out) throw Error("plot: cannot write " + output);
  out << svg;
  std::cout << "wrote " << output << "\n";
  return 0;
}

// -------------------------------------------------------------- report ----

int cmd_report(const std::string& suite_path, const std::string& posterior,
               const std::string& out_dir) {
  LoadedSuite suite = load_suite(suite_path);
  if (suite.tuning.empty())
    throw ConfigError("report: manifest has no tuning tasks");
  PosteriorSamples post = load_posterior(posterior);
  std::vector<std::string> names;
  for (const GridTask& task : suite.tuning) names.push_back(task.name);
  PriorQualityReport report = prior_quality_report(
      post, truth_from_suite(suite), tuning_datasets(suite), names);
  fs::create_directories(out_dir);
  save_report_json((fs::path(out_dir) / "prior_quality.json").string(),
                   report);
  save_report_csv((fs::path(out_dir) / "prior_quality.csv").string(), report);
  std::cout << "wrote prior quality report to " << out_dir << "\n";
  return 0;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Prior-learning Bayesian optimisation benchmark tool"};
  app.require_subcommand(1);

  // gen-synthetic
  SuiteConfig suite_cfg;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-synthetic",
                                 "Generate a synthetic task suite");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--n-tuning", suite_cfg.n_tuning, "Number of tuning tasks");
  gen->add_option("--n-test", suite_cfg.n_test, "Number of test tasks");
  gen->add_option("--tuning-evals", suite_cfg.tuning_evals,
                  "Observed evaluations per tuning task");
  gen->add_option("--n-start", suite_cfg.n_start,
                  "Start evaluations per test task");
  gen->add_option("--grid-side", suite_cfg.grid_side, "Grid side length");
  gen->add_option("--x0", suite_cfg.x0, "Domain lower x");
  gen->add_option("--y0", suite_cfg.y0, "Domain lower y");
  gen->add_option("--x1", suite_cfg.x1, "Domain upper x");
  gen->add_option("--y1", suite_cfg.y1, "Domain upper y");
  gen->add_option("--l-shape", suite_cfg.l_prior.shape, "Lengthscale gamma shape");
  gen->add_option("--l-scale", suite_cfg.l_prior.scale, "Lengthscale gamma scale");
  gen->add_option("--v-shape", suite_cfg.v_prior.shape, "Variance gamma shape");
  gen->add_option("--v-scale", suite_cfg.v_prior.scale, "Variance gamma scale");
  gen->add_option("--noise", suite_cfg.noise_variance, "Noise variance");
  gen->add_option("--seed", suite_cfg.seed, "RNG seed (or PLEBO_SEED)");

  // fit-prior
  FitPriorArgs fit_args;
  auto* fit = app.add_subcommand("fit-prior",
                                 "Learn the hyperparameter prior by MCMC");
  fit->add_option("--manifest", fit_args.manifest, "Suite manifest")
      ->required();
  fit->add_option("--out", fit_args.out_dir, "Output directory")->required();
  fit->add_option("--chains", fit_args.mcmc.n_chains, "MCMC chains");
  fit->add_option("--warmup", fit_args.mcmc.n_warmup, "Warmup sweeps");
  fit->add_option("--samples", fit_args.mcmc.n_samples_per_chain,
                  "Post-warmup sweeps per chain");
  fit->add_option("--proposal-scale", fit_args.mcmc.proposal_scale,
                  "Initial proposal scale");
  fit->add_option("--adapt-target", fit_args.mcmc.adapt_target,
                  "Acceptance-rate target");
  fit->add_option("--H", fit_args.h, "Candidate count");
  auto* fit_noise = fit->add_option("--noise", fit_args.mcmc.noise_variance,
                                    "Noise variance override");
  fit->add_option("--seed", fit_args.mcmc.seed, "RNG seed (or PLEBO_SEED)");

  // run
  std::string run_manifest;
  std::string run_out_override;
  int run_jobs = 0;
  auto* runc = app.add_subcommand("run", "Execute benchmark runs");
  runc->add_option("--manifest", run_manifest, "Run manifest JSON")
      ->required();
  runc->add_option("--jobs", run_jobs, "Parallel runs (default: cores)");
  runc->add_option("--out", run_out_override, "Output directory override");

  // plot
  std::string plot_in, plot_out, plot_title;
  auto* plot = app.add_subcommand("plot", "Render curves from an aggregate CSV");
  plot->add_option("--input", plot_in, "Aggregate or difference CSV")
      ->required();
  plot->add_option("--out", plot_out, "Output SVG path")->required();
  plot->add_option("--title", plot_title, "Plot title");

  // report
  std::string rep_suite, rep_posterior, rep_out;
  auto* rep = app.add_subcommand("report", "Prior quality report");
  rep->add_option("--manifest", rep_suite, "Suite manifest")->required();
  rep->add_option("--posterior", rep_posterior, "Posterior JSON")->required();
  rep->add_option("--out", rep_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      suite_cfg.seed = resolve_seed(*gen, suite_cfg.seed);
      return cmd_gen_synthetic(suite_cfg, gen_out);
    }
    if (fit->parsed()) {
      fit_args.mcmc.seed = resolve_seed(*fit, fit_args.mcmc.seed);
      fit_args.noise_given = fit_noise->count() > 0;
      return cmd_fit_prior(fit_args);
    }
    if (runc->parsed()) return cmd_run(run_manifest, run_jobs, run_out_override);
    if (plot->parsed()) {
      try {
        return cmd_plot(plot_in, plot_out, plot_title);
      } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
      }
    }
    if (rep->parsed()) return cmd_report(rep_suite, rep_posterior, rep_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace plebo::cli
