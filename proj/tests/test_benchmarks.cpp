#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "plebo/benchmarks.hpp"

using namespace plebo;

namespace {

const std::string kTmp = "/tmp/plebo_test_benchmarks";

void write_file(const std::string& path, const std::string& content) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("sample_gp_on_grid single-point variance matches the prior") {
  HyperParams theta{0.1, 1.7, 1e-3};
  const double pt[2] = {0.25, 0.75};
  std::vector<double> samples;
  for (int s = 0; s < 10000; ++s) {
    RngStream rng(1000 + s);
    samples.push_back(sample_gp_on_grid(theta, {pt, 2}, 2, rng)[0]);
  }
  auto [mean, sd] = oracles::two_pass_mean_std(samples);
  CHECK(std::abs(mean) < 0.05);
  const double expected = theta.signal_variance + theta.noise_variance;
  CHECK(sd * sd == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("sample_gp_on_grid degenerates with vanishing signal") {
  HyperParams theta{0.1, 1e-12, 0.0};
  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) {
    grid.push_back(0.1 * i);
    grid.push_back(0.0);
  }
  RngStream rng(5);
  auto values = sample_gp_on_grid(theta, grid, 2, rng);
  for (double v : values) CHECK(std::abs(v) < 1e-3);
}

TEST_CASE("sample_gp_on_grid pair covariance matches the kernel") {
  HyperParams theta{0.3, 1.0, 0.0};
  const double pts[4] = {0.0, 0.0, 0.2, 0.0};
  const double tau[2] = {0.2, 0.0};
  const double k12 = rbf_kernel({tau, 2}, theta);

  const int n = 40000;
  double sum_ab = 0.0;
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (int s = 0; s < n; ++s) {
    RngStream rng(777000 + s);
    auto v = sample_gp_on_grid(theta, {pts, 4}, 2, rng);
    sum_ab += v[0] * v[1];
    sum_a += v[0];
    sum_b += v[1];
  }
  const double cov =
      sum_ab / n - (sum_a / n) * (sum_b / n);
  // Var(ab) ~ k11 k22 + k12^2 for zero-mean Gaussians.
  const double se = std::sqrt((1.0 + k12 * k12) / n);
  CHECK(std::abs(cov - k12) <= 4.0 * se);
}

TEST_CASE("generate_suite produces the configured counts") {
  SuiteConfig cfg;  // paper defaults: 10 tuning, 100 test, 20 evals, 10 starts
  cfg.seed = 2;
  auto [tuning, test] = generate_suite(cfg);
  REQUIRE(tuning.size() == 10);
  REQUIRE(test.size() == 100);
  for (const Dataset& d : tuning) CHECK(d.size() == 20);
  for (const GridTask& task : test) {
    CHECK(task.start_indices.size() == 10);
    CHECK(task.size() == 32 * 32);
    CHECK(task.true_theta.has_value());
    CHECK(task.y_max ==
          *std::max_element(task.values.begin(), task.values.end()));
    std::set<std::size_t> distinct(task.start_indices.begin(),
                                   task.start_indices.end());
    CHECK(distinct.size() == task.start_indices.size());
  }
}

TEST_CASE("generate_suite with no test tasks") {
  SuiteConfig cfg;
  cfg.n_tuning = 3;
  cfg.n_test = 0;
  cfg.grid_side = 8;
  cfg.seed = 3;
  auto [tuning, test] = generate_suite(cfg);
  CHECK(tuning.size() == 3);
  CHECK(test.empty());
}

TEST_CASE("generate_suite is seed-deterministic") {
  SuiteConfig cfg;
  cfg.n_tuning = 2;
  cfg.n_test = 2;
  cfg.grid_side = 8;
  cfg.seed = 11;
  auto a = generate_suite_tasks(cfg);
  auto b = generate_suite_tasks(cfg);
  REQUIRE(a.test.size() == b.test.size());
  for (std::size_t t = 0; t < a.test.size(); ++t) {
    CHECK(a.test[t].values == b.test[t].values);
    CHECK(a.test[t].start_indices == b.test[t].start_indices);
    CHECK(a.test[t].true_theta->lengthscale ==
          b.test[t].true_theta->lengthscale);
  }
  cfg.seed = 12;
  auto c = generate_suite_tasks(cfg);
  CHECK(a.test[0].values != c.test[0].values);
}

TEST_CASE("generated hyperparameters follow the configured gammas") {
  SuiteConfig cfg;
  cfg.n_tuning = 0;
  cfg.n_test = 500;
  cfg.grid_side = 6;  // keep the sampling cheap; theta draws are what matter
  cfg.n_start = 2;
  cfg.seed = 13;
  auto suite = generate_suite_tasks(cfg);
  std::vector<double> ls;
  std::vector<double> vs;
  for (const GridTask& task : suite.test) {
    ls.push_back(task.true_theta->lengthscale);
    vs.push_back(task.true_theta->signal_variance);
  }
  // 1% KS critical value is about 1.628 / sqrt(n).
  const double crit = 1.628 / std::sqrt(500.0);
  CHECK(oracles::ks_statistic(ls, [](double x) {
          return oracles::gamma_cdf(x, 5.0, 0.01);
        }) < crit);
  CHECK(oracles::ks_statistic(vs, [](double x) {
          return oracles::gamma_cdf(x, 2.0, 2.0);
        }) < crit);
}

TEST_CASE("grid csv basics") {
  const std::string path = kTmp + "/basic.csv";
  write_file(path,
             "# name=demo\n"
             "# rows=2 cols=2 x0=0 y0=0 dx=1 dy=1\n"
             "1,2\n"
             "3,4\n");
  auto task = load_grid_csv(path);
  CHECK(task.name == "demo");
  CHECK(task.size() == 4);
  CHECK(task.y_max == 4.0);
  CHECK(task.values == std::vector<double>{1, 2, 3, 4});
  // Row-major lattice: cell (r=1, c=0) is the third point, at (0, 1).
  CHECK(task.point(2)[0] == 0.0);
  CHECK(task.point(2)[1] == 1.0);
}

TEST_CASE("missing cells are excluded") {
  const std::string path = kTmp + "/missing.csv";
  write_file(path,
             "# name=gap\n"
             "# rows=2 cols=2 x0=0 y0=0 dx=1 dy=1\n"
             "1,nan\n"
             "3,4\n");
  auto task = load_grid_csv(path);
  CHECK(task.size() == 3);
  CHECK(task.y_max == 4.0);
  CHECK(task.cell_present == std::vector<std::uint8_t>{1, 0, 1, 1});
}

TEST_CASE("round trip preserves values bit-exactly") {
  SuiteConfig cfg;
  cfg.n_tuning = 1;
  cfg.n_test = 0;
  cfg.grid_side = 8;
  cfg.seed = 17;
  auto suite = generate_suite_tasks(cfg);
  GridTask& task = suite.tuning[0];
  task.values[5] = 0.1 + 0.2;  // not exactly representable as text unless %.17g
  task.recompute_y_max();

  const std::string path = kTmp + "/roundtrip.csv";
  save_grid_csv(path, task);
  auto loaded = load_grid_csv(path);
  CHECK(loaded.name == task.name);
  REQUIRE(loaded.size() == task.size());
  for (std::size_t i = 0; i < task.size(); ++i) {
    CHECK(loaded.values[i] == task.values[i]);
    CHECK(loaded.point(i)[0] == task.point(i)[0]);
    CHECK(loaded.point(i)[1] == task.point(i)[1]);
  }

  // Writing again yields byte-identical text.
  const std::string path2 = kTmp + "/roundtrip2.csv";
  save_grid_csv(path2, loaded);
  std::ifstream a(path), b(path2);
  std::string sa((std::istreambuf_iterator<char>(a)),
                 std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)),
                 std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}

TEST_CASE("csv parse errors carry line and column") {
  const std::string bad_header = kTmp + "/bad1.csv";
  write_file(bad_header, "nope\n");
  CHECK_THROWS_AS(load_grid_csv(bad_header), ParseError);

  const std::string bad_value = kTmp + "/bad2.csv";
  write_file(bad_value,
             "# name=x\n"
             "# rows=1 cols=2 x0=0 y0=0 dx=1 dy=1\n"
             "1,zap\n");
  CHECK_THROWS_WITH_AS(load_grid_csv(bad_value),
                       doctest::Contains(":3:"), ParseError);

  const std::string short_row = kTmp + "/bad3.csv";
  write_file(short_row,
             "# name=x\n"
             "# rows=1 cols=3 x0=0 y0=0 dx=1 dy=1\n"
             "1,2\n");
  CHECK_THROWS_AS(load_grid_csv(short_row), ParseError);

  const std::string all_missing = kTmp + "/bad4.csv";
  write_file(all_missing,
             "# name=x\n"
             "# rows=1 cols=2 x0=0 y0=0 dx=1 dy=1\n"
             "nan,nan\n");
  CHECK_THROWS_AS(load_grid_csv(all_missing), EmptyTask);
}

TEST_CASE("preprocess_pollution transforms and standardises") {
  GridTask task;
  task.name = "p";
  task.dim = 2;
  task.rows = 1;
  task.cols = 4;
  task.cell_present = {1, 1, 1, 1};
  for (int i = 0; i < 4; ++i) {
    task.xs.push_back(static_cast<double>(i));
    task.xs.push_back(0.0);
    task.values.push_back(std::exp(static_cast<double>(i + 1)));
  }
  task.recompute_y_max();

  auto out = preprocess_pollution(task);
  CHECK(out.log_transformed);
  // Post-log values 1..4 standardised: equally spaced, mean 0, std 1.
  double mean = 0.0;
  for (double v : out.values) mean += v;
  mean /= 4.0;
  CHECK(std::abs(mean) < 1e-12);
  double var = 0.0;
  for (double v : out.values) var += (v - mean) * (v - mean);
  CHECK(std::sqrt(var / 4.0) == doctest::Approx(1.0).epsilon(1e-12));
  const double gap = out.values[1] - out.values[0];
  for (int i = 1; i < 4; ++i)
    CHECK(out.values[i] - out.values[i - 1] == doctest::Approx(gap));
  CHECK(out.y_max == *std::max_element(out.values.begin(), out.values.end()));

  // Idempotent: the flag prevents a second log.
  auto twice = preprocess_pollution(out);
  for (int i = 0; i < 4; ++i)
    CHECK(twice.values[i] == doctest::Approx(out.values[i]).epsilon(1e-12));
}

TEST_CASE("preprocess_pollution error paths") {
  GridTask flat;
  flat.name = "flat";
  flat.dim = 2;
  flat.rows = 1;
  flat.cols = 3;
  flat.cell_present = {1, 1, 1};
  for (int i = 0; i < 3; ++i) {
    flat.xs.push_back(static_cast<double>(i));
    flat.xs.push_back(0.0);
    flat.values.push_back(2.5);
  }
  flat.recompute_y_max();
  CHECK_THROWS_AS(preprocess_pollution(flat), DegenerateTask);

  GridTask negative = flat;
  negative.values[1] = -1.0;
  negative.recompute_y_max();
  CHECK_THROWS_AS(preprocess_pollution(negative), DomainError);
}

TEST_CASE("random positive grid standardises to mean 0, std 1") {
  RngStream rng(23);
  GridTask task;
  task.name = "r";
  task.dim = 2;
  task.rows = 5;
  task.cols = 5;
  task.cell_present.assign(25, 1);
  for (int i = 0; i < 25; ++i) {
    task.xs.push_back(static_cast<double>(i % 5));
    task.xs.push_back(static_cast<double>(i / 5));
    task.values.push_back(0.1 + 5.0 * rng.uniform());
  }
  task.recompute_y_max();
  auto out = preprocess_pollution(task);
  double mean = 0.0;
  for (double v : out.values) mean += v;
  mean /= 25.0;
  double var = 0.0;
  for (double v : out.values) var += (v - mean) * (v - mean);
  CHECK(std::abs(mean) < 1e-12);
  CHECK(std::sqrt(var / 25.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("suite manifest round trip") {
  SuiteConfig cfg;
  cfg.n_tuning = 2;
  cfg.n_test = 3;
  cfg.grid_side = 6;
  cfg.tuning_evals = 5;
  cfg.n_start = 4;
  cfg.seed = 29;
  auto suite = generate_suite_tasks(cfg);
  const std::string dir = kTmp + "/suite";
  std::filesystem::remove_all(dir);
  save_suite(dir, suite, cfg);

  auto loaded = load_suite(dir + "/manifest.json");
  CHECK(loaded.seed == 29);
  CHECK(loaded.noise_variance == cfg.noise_variance);
  REQUIRE(loaded.tuning.size() == 2);
  REQUIRE(loaded.test.size() == 3);
  REQUIRE(loaded.l_prior.has_value());
  CHECK(loaded.l_prior->shape == 5.0);
  CHECK(loaded.v_prior->scale == 2.0);
  for (std::size_t t = 0; t < loaded.test.size(); ++t) {
    const GridTask& orig = suite.test[t];
    const GridTask& back = loaded.test[t];
    CHECK(back.values == orig.values);
    CHECK(back.start_indices == orig.start_indices);
    REQUIRE(back.true_theta.has_value());
    CHECK(back.true_theta->lengthscale == orig.true_theta->lengthscale);
  }
  for (std::size_t t = 0; t < loaded.tuning.size(); ++t)
    CHECK(loaded.tuning[t].start_indices.size() ==
          static_cast<std::size_t>(cfg.tuning_evals));
}

TEST_CASE("suite config validation") {
  SuiteConfig cfg;
  cfg.grid_side = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.tuning_evals = 10000;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.x1 = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
