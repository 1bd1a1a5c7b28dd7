#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_binary() {
  const char* env = std::getenv("PLEBO_CLI");
  REQUIRE_MESSAGE(env != nullptr, "PLEBO_CLI must point at the plebo binary");
  return env;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_binary() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path("/tmp/" + name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
};

const std::string kGenFlags =
    " --n-tuning 2 --n-test 1 --grid-side 8 --tuning-evals 6 --n-start 3";

}  // namespace

TEST_CASE("gen-synthetic writes a deterministic suite") {
  TempDir dir("plebo_cli_gen");
  const std::string a = (dir.path / "a").string();
  const std::string b = (dir.path / "b").string();
  REQUIRE(run_cli("gen-synthetic --out " + a + kGenFlags + " --seed 5") == 0);
  REQUIRE(run_cli("gen-synthetic --out " + b + kGenFlags + " --seed 5") == 0);

  CHECK(fs::exists(fs::path(a) / "manifest.json"));
  CHECK(fs::exists(fs::path(a) / "tuning-001.csv"));
  CHECK(fs::exists(fs::path(a) / "test-000.csv"));
  for (const char* file :
       {"manifest.json", "tuning-000.csv", "tuning-001.csv", "test-000.csv"})
    CHECK(slurp(fs::path(a) / file) == slurp(fs::path(b) / file));

  // A different seed changes the surfaces.
  const std::string c = (dir.path / "c").string();
  REQUIRE(run_cli("gen-synthetic --out " + c + kGenFlags + " --seed 6") == 0);
  CHECK(slurp(fs::path(a) / "test-000.csv") !=
        slurp(fs::path(c) / "test-000.csv"));
}

TEST_CASE("gen-synthetic respects --n-test 0 and counts files") {
  TempDir dir("plebo_cli_gen0");
  const std::string out = (dir.path / "suite").string();
  REQUIRE(run_cli("gen-synthetic --out " + out +
                  " --n-tuning 3 --n-test 0 --grid-side 6 --tuning-evals 4"
                  " --seed 2") == 0);
  std::size_t csvs = 0;
  for (const auto& entry : fs::directory_iterator(out))
    if (entry.path().extension() == ".csv") ++csvs;
  CHECK(csvs == 3);
}

TEST_CASE("PLEBO_SEED is the seed fallback") {
  TempDir dir("plebo_cli_envseed");
  const std::string a = (dir.path / "a").string();
  const std::string b = (dir.path / "b").string();
  REQUIRE(run_cli("gen-synthetic --out " + a + kGenFlags + " --seed 77") == 0);
  const std::string cmd = "PLEBO_SEED=77 " + cli_binary() +
                          " gen-synthetic --out " + b + kGenFlags +
                          " >/dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(slurp(fs::path(a) / "test-000.csv") ==
        slurp(fs::path(b) / "test-000.csv"));
}

TEST_CASE("full pipeline: fit-prior, run, plot, report") {
  TempDir dir("plebo_cli_pipeline");
  const fs::path suite = dir.path / "suite";
  const fs::path fit = dir.path / "fit";
  REQUIRE(run_cli("gen-synthetic --out " + suite.string() + kGenFlags +
                  " --seed 3") == 0);

  // Small but real MCMC; must finish quickly.
  const std::string fit_flags = " --chains 2 --warmup 60 --samples 60 --H 16";
  REQUIRE(run_cli("fit-prior --manifest " + (suite / "manifest.json").string() +
                  " --out " + fit.string() + fit_flags + " --seed 4") == 0);
  CHECK(fs::exists(fit / "posterior.json"));
  CHECK(fs::exists(fit / "candidates.json"));
  CHECK(fs::exists(fit / "prior_quality.json"));
  CHECK(fs::exists(fit / "prior_quality.csv"));

  // Re-running with the same seed reproduces the candidates bit for bit.
  const fs::path fit2 = dir.path / "fit2";
  REQUIRE(run_cli("fit-prior --manifest " + (suite / "manifest.json").string() +
                  " --out " + fit2.string() + fit_flags + " --seed 4") == 0);
  CHECK(slurp(fit / "candidates.json") == slurp(fit2 / "candidates.json"));
  CHECK(slurp(fit / "posterior.json") == slurp(fit2 / "posterior.json"));

  // Run manifest with PLeBO and EI on the single test task.
  const fs::path manifest = dir.path / "run.json";
  {
    std::ofstream out(manifest);
    out << "{\n"
        << "  \"suite\": \"" << (suite / "manifest.json").string() << "\",\n"
        << "  \"iterations\": 5,\n"
        << "  \"seed\": 9,\n"
        << "  \"out_dir\": \"" << (dir.path / "results").string() << "\",\n"
        << "  \"strategies\": [\n"
        << "    {\"kind\": \"PLeBO\", \"candidates\": \""
        << (fit / "candidates.json").string() << "\"},\n"
        << "    \"EI\"\n"
        << "  ]\n"
        << "}\n";
  }
  REQUIRE(run_cli("run --manifest " + manifest.string() + " --jobs 2") == 0);
  const std::string results = slurp(dir.path / "results" / "results.csv");
  // Header + 2 strategies x 1 task x 5 iterations.
  CHECK(count_lines(results) == 1 + 10);
  CHECK(results.find("task,strategy,seed,iteration,chosen_index,observed_y,"
                     "r,regret,step_seconds") == 0);

  const std::string differences =
      slurp(dir.path / "results" / "differences.csv");
  CHECK(differences.find("EI,PLeBO,") != std::string::npos);

  // Determinism: a re-run reproduces every non-timing cell exactly.
  REQUIRE(run_cli("run --manifest " + manifest.string() + " --jobs 1 --out " +
                  (dir.path / "results2").string()) == 0);
  const std::string rerun = slurp(dir.path / "results2" / "results.csv");
  std::istringstream sa(results);
  std::istringstream sb(rerun);
  std::string la, lb;
  while (std::getline(sa, la) && std::getline(sb, lb)) {
    const auto cut = [](const std::string& s) {
      return s.substr(0, s.rfind(','));  // drop step_seconds
    };
    CHECK(cut(la) == cut(lb));
  }
  CHECK(slurp(dir.path / "results" / "aggregate.csv") ==
        slurp(dir.path / "results2" / "aggregate.csv"));

  // Plot both aggregate and difference CSVs; verify well-formed XML.
  REQUIRE(run_cli("plot --input " +
                  (dir.path / "results" / "aggregate.csv").string() +
                  " --out " + (dir.path / "agg.svg").string() +
                  " --title curves") == 0);
  const std::string svg = slurp(dir.path / "agg.svg");
  CHECK(oracles::xml_well_formed(svg));
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("PLeBO") != std::string::npos);

  REQUIRE(run_cli("plot --input " +
                  (dir.path / "results" / "differences.csv").string() +
                  " --out " + (dir.path / "diff.svg").string()) == 0);
  const std::string diff_svg = slurp(dir.path / "diff.svg");
  CHECK(oracles::xml_well_formed(diff_svg));
  CHECK(diff_svg.find("stroke-dasharray") != std::string::npos);  // zero line

  // Standalone report against the posterior.
  REQUIRE(run_cli("report --manifest " + (suite / "manifest.json").string() +
                  " --posterior " + (fit / "posterior.json").string() +
                  " --out " + (dir.path / "rep").string()) == 0);
  CHECK(fs::exists(dir.path / "rep" / "prior_quality.json"));
}

TEST_CASE("cli error handling and exit codes") {
  TempDir dir("plebo_cli_errors");
  // Unknown flags are errors, never ignored.
  CHECK(run_cli("gen-synthetic --out x --definitely-not-a-flag 1") == 2);
  CHECK(run_cli("not-a-subcommand") == 2);
  // Missing manifest: runtime failure.
  CHECK(run_cli("run --manifest /nonexistent/run.json") == 2);
  // Malformed CSV for plot: exit 2.
  const fs::path bad = dir.path / "bad.csv";
  {
    std::ofstream out(bad);
    out << "strategy,iteration,mean,stderr,J\n";  // header only, no data
  }
  CHECK(run_cli("plot --input " + bad.string() + " --out " +
                (dir.path / "x.svg").string()) == 2);
  const fs::path worse = dir.path / "worse.csv";
  {
    std::ofstream out(worse);
    out << "strategy,iteration,mean,stderr,J\nEI,1,abc,0,1\n";
  }
  CHECK(run_cli("plot --input " + worse.string() + " --out " +
                (dir.path / "y.svg").string()) == 2);

  // --help exits 0 on every subcommand.
  for (const char* sub : {"gen-synthetic", "fit-prior", "run", "plot",
                          "report"})
    CHECK(run_cli(std::string(sub) + " --help") == 0);
  CHECK(run_cli("--help") == 0);
}
