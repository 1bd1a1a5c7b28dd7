#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "plebo/gp.hpp"
#include "plebo/rng.hpp"
#include "plebo/types.hpp"

namespace plebo {

// A discretised optimisation task: the retained cells of a rectangular
// lattice, in row-major order, with their values and the known maximum.
// Missing lattice cells are excluded from grid/values at load time.
struct GridTask {
  std::string name;
  std::size_t dim = 2;
  std::vector<double> xs;      // n * dim, row-major
  std::vector<double> values;  // n
  double y_max = 0.0;
  std::vector<std::size_t> start_indices;  // pre-evaluated cells
  std::optional<HyperParams> true_theta;
  bool log_transformed = false;

  // Lattice geometry, kept for bit-exact file round-trips.
  std::size_t rows = 0;
  std::size_t cols = 0;
  double x0 = 0.0, y0 = 0.0, dx = 1.0, dy = 1.0;
  std::vector<std::uint8_t> cell_present;  // rows * cols

  std::size_t size() const { return values.size(); }
  std::span<const double> point(std::size_t i) const {
    return {xs.data() + i * dim, dim};
  }
  void recompute_y_max();

  // The observations at the given cell indices as a Dataset.
  Dataset observations(const std::vector<std::size_t>& indices) const;
  Dataset start_observations() const { return observations(start_indices); }
};

struct GammaSpec {
  double shape = 1.0;
  double scale = 1.0;
};

struct SuiteConfig {
  int n_tuning = 10;
  int n_test = 100;
  int tuning_evals = 20;
  int n_start = 10;
  int grid_side = 32;
  double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
  GammaSpec l_prior{5.0, 0.01};
  GammaSpec v_prior{2.0, 2.0};
  double noise_variance = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;
};

// One draw from N(0, K) over the grid, K from the RBF kernel plus noise on
// the diagonal, via Cholesky and a standard normal vector.
std::vector<double> sample_gp_on_grid(const HyperParams& theta,
                                      std::span<const double> grid_xs,
                                      std::size_t dim, RngStream& rng);

// Full synthetic suite: per task, theta drawn from the gamma priors and a
// GP surface sampled on the lattice. Tuning tasks carry `tuning_evals`
// observed cells in start_indices; test tasks carry `n_start`.
struct Suite {
  std::vector<GridTask> tuning;
  std::vector<GridTask> test;
};
Suite generate_suite_tasks(const SuiteConfig& cfg);

// The spec-shaped view: tuning observations as Datasets plus test tasks.
std::pair<std::vector<Dataset>, std::vector<GridTask>> generate_suite(
    const SuiteConfig& cfg);

// Grid task file format. Line 1: "# name=<id>"; line 2:
// "# rows=<R> cols=<C> x0=<f> y0=<f> dx=<f> dy=<f>"; then R lines of C
// comma-separated values with "nan" for missing cells.
GridTask load_grid_csv(const std::string& path);
void save_grid_csv(const std::string& path, const GridTask& task);

// log transform (skipped when already applied) followed by per-task
// standardisation over the retained cells; y_max recomputed.
GridTask preprocess_pollution(const GridTask& task);

// Suite manifest: JSON listing task files, role, start indices, optional
// true theta, and the generator seed. Paths are relative to the manifest.
struct ManifestEntry {
  std::string file;
  std::string role;  // "tuning" | "test"
  std::vector<std::size_t> start_indices;
  std::optional<HyperParams> true_theta;
};
struct SuiteManifest {
  std::uint64_t seed = 0;
  double noise_variance = 1e-4;
  // Generator gamma priors, present for synthetic suites; they are the true
  // eta for prior-quality checks.
  std::optional<GammaSpec> l_prior;
  std::optional<GammaSpec> v_prior;
  std::vector<ManifestEntry> entries;
};

void save_suite(const std::string& directory, const Suite& suite,
                const SuiteConfig& cfg);
SuiteManifest load_manifest(const std::string& path);

// Loads every task listed in the manifest, attaching start indices and true
// theta from the manifest entries.
struct LoadedSuite {
  std::vector<GridTask> tuning;
  std::vector<GridTask> test;
  std::uint64_t seed = 0;
  double noise_variance = 1e-4;
  std::optional<GammaSpec> l_prior;
  std::optional<GammaSpec> v_prior;
};
LoadedSuite load_suite(const std::string& manifest_path);

}  // namespace plebo
