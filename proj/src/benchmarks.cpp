#include "plebo/benchmarks.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "plebo/kernels.hpp"
#include "plebo/numerics.hpp"

namespace plebo {

namespace fs = std::filesystem;

void GridTask::recompute_y_max() {
  if (values.empty()) throw EmptyTask("GridTask: no retained cells");
  y_max = *std::max_element(values.begin(), values.end());
}

Dataset GridTask::observations(const std::vector<std::size_t>& indices) const {
  Dataset d(dim);
  for (std::size_t idx : indices) {
    if (idx >= size()) throw DimensionMismatch("GridTask: index out of range");
    d.add(point(idx), values[idx]);
  }
  return d;
}

void SuiteConfig::validate() const {
  if (n_tuning < 0 || n_test < 0 || tuning_evals < 1 || n_start < 0 ||
      grid_side < 2)
    throw ConfigError("SuiteConfig: counts out of range");
  const int cells = grid_side * grid_side;
  if (tuning_evals > cells || n_start > cells)
    throw ConfigError("SuiteConfig: more evaluations than grid cells");
  if (!(x1 > x0) || !(y1 > y0))
    throw ConfigError("SuiteConfig: empty domain box");
  if (!(l_prior.shape > 0.0) || !(l_prior.scale > 0.0) ||
      !(v_prior.shape > 0.0) || !(v_prior.scale > 0.0))
    throw ConfigError("SuiteConfig: gamma priors must be positive");
  if (!(noise_variance >= 0.0))
    throw ConfigError("SuiteConfig: negative noise variance");
}

std::vector<double> sample_gp_on_grid(const HyperParams& theta,
                                      std::span<const double> grid_xs,
                                      std::size_t dim, RngStream& rng) {
  if (!theta.valid()) throw ConfigError("sample_gp_on_grid: invalid theta");
  if (grid_xs.empty() || dim == 0 || grid_xs.size() % dim != 0)
    throw DimensionMismatch("sample_gp_on_grid: bad grid layout");
  const std::size_t n = grid_xs.size() / dim;

  const auto& ops = kernels::active();
  std::vector<double> sq(n * n);
  for (std::size_t i = 0; i < n; ++i)
    ops.sq_dist(grid_xs.data() + i * dim, grid_xs.data(), n, dim,
                sq.data() + i * n);
  CholeskyFactor f = cholesky(gram_from_sq_dists(sq, n, theta));

  std::vector<double> z(n);
  for (double& v : z) v = rng.normal();
  std::vector<double> sample(n);
  for (std::size_t i = 0; i < n; ++i)
    sample[i] = ops.dot(f.L.row(i), z.data(), i + 1);
  return sample;
}

namespace {

// k distinct indices from [0, n), ascending.
std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k,
                                         RngStream& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + rng.below(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

GridTask make_synthetic_task(const SuiteConfig& cfg, const std::string& name,
                             std::size_t n_observed, RngStream rng) {
  GridTask task;
  task.name = name;
  task.dim = 2;
  task.rows = static_cast<std::size_t>(cfg.grid_side);
  task.cols = static_cast<std::size_t>(cfg.grid_side);
  task.x0 = cfg.x0;
  task.y0 = cfg.y0;
  task.dx = (cfg.x1 - cfg.x0) / static_cast<double>(cfg.grid_side - 1);
  task.dy = (cfg.y1 - cfg.y0) / static_cast<double>(cfg.grid_side - 1);
  task.cell_present.assign(task.rows * task.cols, 1);

  task.xs.reserve(task.rows * task.cols * 2);
  for (std::size_t r = 0; r < task.rows; ++r) {
    for (std::size_t c = 0; c < task.cols; ++c) {
      task.xs.push_back(task.x0 + static_cast<double>(c) * task.dx);
      task.xs.push_back(task.y0 + static_cast<double>(r) * task.dy);
    }
  }

  HyperParams theta{rng.gamma(cfg.l_prior.shape, cfg.l_prior.scale),
                    rng.gamma(cfg.v_prior.shape, cfg.v_prior.scale),
                    cfg.noise_variance};
  task.true_theta = theta;
  task.values = sample_gp_on_grid(theta, task.xs, 2, rng);
  task.recompute_y_max();
  task.start_indices = sample_distinct(task.values.size(), n_observed, rng);
  return task;
}

}  // namespace

Suite generate_suite_tasks(const SuiteConfig& cfg) {
  cfg.validate();
  Suite suite;
  suite.tuning.resize(cfg.n_tuning);
  suite.test.resize(cfg.n_test);
  RngStream root(cfg.seed);

  // Tasks have independent substreams keyed on (kind, index), so they can be
  // generated on any thread without changing the output.
  const int total = cfg.n_tuning + cfg.n_test;
  std::atomic<int> cursor{0};
  const auto worker = [&] {
    char name[32];
    for (;;) {
      const int i = cursor.fetch_add(1);
      if (i >= total) break;
      if (i < cfg.n_tuning) {
        std::snprintf(name, sizeof(name), "tuning-%03d", i);
        suite.tuning[i] = make_synthetic_task(
            cfg, name, static_cast<std::size_t>(cfg.tuning_evals),
            root.derive(0x74756e65ull, i));
      } else {
        const int t = i - cfg.n_tuning;
        std::snprintf(name, sizeof(name), "test-%03d", t);
        suite.test[t] = make_synthetic_task(
            cfg, name, static_cast<std::size_t>(cfg.n_start),
            root.derive(0x74657374ull, t));
      }
    }
  };
  const unsigned n_workers =
      std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                         static_cast<unsigned>(total));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return suite;
}

std::pair<std::vector<Dataset>, std::vector<GridTask>> generate_suite(
    const SuiteConfig& cfg) {
  Suite suite = generate_suite_tasks(cfg);
  std::vector<Dataset> tuning;
  tuning.reserve(suite.tuning.size());
  for (const GridTask& task : suite.tuning)
    tuning.push_back(task.start_observations());
  return {std::move(tuning), std::move(suite.test)};
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             std::size_t column, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ":" +
                   std::to_string(column) + ": " + what);
}

}  // namespace

void save_grid_csv(const std::string& path, const GridTask& task) {
  std::ofstream out(path);
  if (!out) throw Error("save_grid_csv: cannot open " + path);
  out << "# name=" << task.name << "\n";
  out << "# rows=" << task.rows << " cols=" << task.cols
      << " x0=" << format_double(task.x0) << " y0=" << format_double(task.y0)
      << " dx=" << format_double(task.dx) << " dy=" << format_double(task.dy)
      << "\n";
  std::size_t next = 0;
  for (std::size_t r = 0; r < task.rows; ++r) {
    for (std::size_t c = 0; c < task.cols; ++c) {
      if (c > 0) out << ",";
      if (task.cell_present[r * task.cols + c])
        out << format_double(task.values[next++]);
      else
        out << "nan";
    }
    out << "\n";
  }
}

GridTask load_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_grid_csv: cannot open " + path);
  GridTask task;
  task.dim = 2;

  std::string line;
  if (!std::getline(in, line) || line.rfind("# name=", 0) != 0)
    parse_fail(path, 1, 1, "expected '# name=<id>'");
  task.name = line.substr(7);

  if (!std::getline(in, line))
    parse_fail(path, 2, 1, "missing geometry header");
  long long rows = -1, cols = -1;
  if (std::sscanf(line.c_str(), "# rows=%lld cols=%lld x0=%lf y0=%lf dx=%lf dy=%lf",
                  &rows, &cols, &task.x0, &task.y0, &task.dx,
                  &task.dy) != 6 ||
      rows < 1 || cols < 1)
    parse_fail(path, 2, 1, "bad geometry header");
  task.rows = static_cast<std::size_t>(rows);
  task.cols = static_cast<std::size_t>(cols);
  task.cell_present.assign(task.rows * task.cols, 0);

  for (std::size_t r = 0; r < task.rows; ++r) {
    if (!std::getline(in, line))
      parse_fail(path, 3 + r, 1, "missing data line");
    std::size_t field = 0;
    std::size_t pos = 0;
    while (field < task.cols) {
      std::size_t end = line.find(',', pos);
      if (end == std::string::npos) end = line.size();
      std::string_view cell(line.data() + pos, end - pos);
      // Trim spaces.
      while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
      while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
      if (cell.empty())
        parse_fail(path, 3 + r, pos + 1, "empty cell");
      double value;
      if (cell == "nan" || cell == "NaN" || cell == "NAN") {
        value = std::numeric_limits<double>::quiet_NaN();
      } else {
        auto res = std::from_chars(cell.data(), cell.data() + cell.size(),
                                   value);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
          parse_fail(path, 3 + r, pos + 1,
                     "bad value '" + std::string(cell) + "'");
      }
      if (std::isnan(value)) {
        // Missing cell: excluded from the grid.
      } else if (!std::isfinite(value)) {
        parse_fail(path, 3 + r, pos + 1, "non-finite value");
      } else {
        task.cell_present[r * task.cols + field] = 1;
        task.xs.push_back(task.x0 + static_cast<double>(field) * task.dx);
        task.xs.push_back(task.y0 + static_cast<double>(r) * task.dy);
        task.values.push_back(value);
      }
      ++field;
      if (end == line.size() && field < task.cols)
        parse_fail(path, 3 + r, end + 1, "too few columns");
      pos = end + 1;
    }
  }
  if (task.values.empty())
    throw EmptyTask("load_grid_csv: all cells missing in " + path);
  task.recompute_y_max();
  return task;
}

GridTask preprocess_pollution(const GridTask& input) {
  GridTask task = input;
  if (!task.log_transformed) {
    for (double v : task.values)
      if (!(v > 0.0))
        throw DomainError("preprocess_pollution: non-positive value");
    for (double& v : task.values) v = std::log(v);
    task.log_transformed = true;
  }
  const std::size_t n = task.values.size();
  double mean = 0.0;
  for (double v : task.values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : task.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double stddev = std::sqrt(var);
  if (stddev < 1e-12)
    throw DegenerateTask("preprocess_pollution: constant values");
  for (double& v : task.values) v = (v - mean) / stddev;
  task.recompute_y_max();
  return task;
}

namespace {

nlohmann::json manifest_entry(const GridTask& task, const std::string& role) {
  nlohmann::json e;
  e["file"] = task.name + ".csv";
  e["role"] = role;
  e["start_indices"] = task.start_indices;
  if (task.true_theta)
    e["true_theta"] = {{"l", task.true_theta->lengthscale},
                       {"v", task.true_theta->signal_variance}};
  return e;
}

}  // namespace

void save_suite(const std::string& directory, const Suite& suite,
                const SuiteConfig& cfg) {
  fs::create_directories(directory);
  nlohmann::json manifest;
  manifest["seed"] = cfg.seed;
  manifest["noise_variance"] = cfg.noise_variance;
  manifest["generator"] = {
      {"n_tuning", cfg.n_tuning},       {"n_test", cfg.n_test},
      {"tuning_evals", cfg.tuning_evals}, {"n_start", cfg.n_start},
      {"grid_side", cfg.grid_side},     {"x0", cfg.x0},
      {"y0", cfg.y0},                   {"x1", cfg.x1},
      {"y1", cfg.y1},
      {"l_shape", cfg.l_prior.shape},   {"l_scale", cfg.l_prior.scale},
      {"v_shape", cfg.v_prior.shape},   {"v_scale", cfg.v_prior.scale}};
  auto& tasks = manifest["tasks"] = nlohmann::json::array();
  for (const GridTask& task : suite.tuning) {
    save_grid_csv((fs::path(directory) / (task.name + ".csv")).string(), task);
    tasks.push_back(manifest_entry(task, "tuning"));
  }
  for (const GridTask& task : suite.test) {
    save_grid_csv((fs::path(directory) / (task.name + ".csv")).string(), task);
    tasks.push_back(manifest_entry(task, "test"));
  }
  std::ofstream out(fs::path(directory) / "manifest.json");
  if (!out) throw Error("save_suite: cannot write manifest");
  out << manifest.dump(2) << "\n";
}

SuiteManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("load_manifest: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("load_manifest: " + std::string(e.what()));
  }
  SuiteManifest manifest;
  manifest.seed = j.value("seed", 0ull);
  manifest.noise_variance = j.value("noise_variance", 1e-4);
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    if (g.contains("l_shape") && g.contains("l_scale"))
      manifest.l_prior = GammaSpec{g["l_shape"], g["l_scale"]};
    if (g.contains("v_shape") && g.contains("v_scale"))
      manifest.v_prior = GammaSpec{g["v_shape"], g["v_scale"]};
  }
  for (const auto& e : j.at("tasks")) {
    ManifestEntry entry;
    entry.file = e.at("file");
    entry.role = e.at("role");
    entry.start_indices =
        e.value("start_indices", std::vector<std::size_t>{});
    if (e.contains("true_theta"))
      entry.true_theta = HyperParams{e["true_theta"].at("l"),
                                     e["true_theta"].at("v"),
                                     manifest.noise_variance};
    if (entry.role != "tuning" && entry.role != "test")
      throw ParseError("load_manifest: unknown role '" + entry.role + "'");
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

LoadedSuite load_suite(const std::string& manifest_path) {
  SuiteManifest manifest = load_manifest(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  LoadedSuite suite;
  suite.seed = manifest.seed;
  suite.noise_variance = manifest.noise_variance;
  suite.l_prior = manifest.l_prior;
  suite.v_prior = manifest.v_prior;
  for (const ManifestEntry& entry : manifest.entries) {
    GridTask task = load_grid_csv((base / entry.file).string());
    task.start_indices = entry.start_indices;
    for (std::size_t idx : task.start_indices)
      if (idx >= task.size())
        throw ParseError("load_suite: start index out of range in " +
                         entry.file);
    task.true_theta = entry.true_theta;
    if (task.true_theta)
      task.true_theta->noise_variance = manifest.noise_variance;
    (entry.role == "tuning" ? suite.tuning : suite.test)
        .push_back(std::move(task));
  }
  return suite;
}

}  // namespace plebo
