#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kraichnan/cli.hpp"

using namespace kraichnan;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / "kr_cli_tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("covariance_validate: constants JSON carries B(0) = pi at alpha = 1/2") {
  ExperimentConfig cfg;
  cfg.experiment = "covariance_validate";
  cfg.params = {{"alpha", 0.5}, {"tol", 1e-10}, {"radii", 5}};
  cfg.out_dir = fresh_dir("cov");
  CHECK(run_experiment(cfg) == 0);
  nlohmann::json constants;
  std::ifstream(cfg.out_dir / "constants.json") >> constants;
  CHECK(std::abs(constants["q0_diag"].get<double>() - M_PI) < 1e-6 * M_PI);
  CHECK(constants["beta_n"].get<double>() ==
        doctest::Approx(2.0 * constants["beta_l"].get<double>()).epsilon(1e-10));
  CHECK(fs::exists(cfg.out_dir / "covariance.csv"));
  CHECK(fs::exists(cfg.out_dir / "manifest.json"));
}

TEST_CASE("determinism: identical config and seed give byte-identical CSVs") {
  auto run_once = [&](const std::string& tag) {
    ExperimentConfig cfg;
    cfg.experiment = "two_point";
    cfg.params = {{"alpha", 0.25}, {"paths", 2000}, {"dt", 1e-4},
                  {"T", 0.005},    {"seed", 42}};
    cfg.out_dir = fresh_dir(tag);
    run_experiment(cfg);
    return slurp(cfg.out_dir / "two_point.csv");
  };
  const std::string a = run_once("det_a");
  const std::string b = run_once("det_b");
  REQUIRE(!a.empty());
  CHECK(a == b);
}

TEST_CASE("two_point experiment reports d_eff near 2/(1-alpha)") {
  ExperimentConfig cfg;
  cfg.experiment = "two_point";
  cfg.params = {{"alpha", 0.25}, {"paths", 4000}, {"dt", 1e-5},
                {"T", 0.01},     {"seed", 7}};
  cfg.out_dir = fresh_dir("bessel");
  run_experiment(cfg);
  nlohmann::json rep;
  std::ifstream(cfg.out_dir / "two_point.json") >> rep;
  const double expect = 8.0 / 3.0;
  CHECK(std::abs(rep["d_eff"].get<double>() - expect) < 0.05 * expect);
  CHECK(rep["survival_fraction"].get<double>() == 1.0);
}

TEST_CASE("manifest-first: a crashed run still leaves a parseable manifest") {
  ExperimentConfig cfg;
  cfg.experiment = "energy_budget";
  // realizations = 1 violates the budget precondition downstream
  cfg.params = {{"alpha", 0.5}, {"delta", 0.4}, {"L", 8.0}, {"N", 32},
                {"T", 0.002},   {"dt", 1e-3},   {"realizations", 1}};
  cfg.out_dir = fresh_dir("crash");
  CHECK_THROWS(run_experiment(cfg));
  nlohmann::json manifest;
  std::ifstream(cfg.out_dir / "manifest.json") >> manifest;
  CHECK(manifest["experiment"] == "energy_budget");
  CHECK(manifest["params"]["N"] == 32);
}

TEST_CASE("unknown experiment is a usage error naming the field") {
  ExperimentConfig cfg;
  cfg.experiment = "does_not_exist";
  cfg.out_dir = fresh_dir("bad");
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("coupling experiment artifacts: eps = 0 is exactly identical") {
  ExperimentConfig cfg;
  cfg.experiment = "coupling";
  cfg.params = {{"alpha", 0.5},  {"delta", 0.4}, {"L", 8.0},
                {"N", 32},       {"T", 0.005},   {"dt", 5e-4},
                {"eps", 0.0},    {"seed", 3},    {"band_hi", 0.6}};
  cfg.out_dir = fresh_dir("coupling0");
  run_experiment(cfg);
  nlohmann::json rep;
  std::ifstream(cfg.out_dir / "coupling.json") >> rep;
  CHECK(rep["bitwise_identical"].get<bool>());
  CHECK(rep["sup_dist_hm1"].get<double>() == 0.0);
}

TEST_CASE("binary increment dump round-trips its header") {
  KraichnanParams p;
  p.alpha = 0.5;
  p.delta = 0.5;
  p.box_len = 8.0;
  p.grid_n = 16;
  KraichnanNoise noise(p, Cutoff::sharp(p.delta));
  NoiseIncrement inc = noise.sample(11, 0, 3, 0.01);
  fs::path dir = fresh_dir("bin");
  write_increment_binary(dir / "inc.bin", inc, p.alpha, p.delta);
  std::ifstream in(dir / "inc.bin", std::ios::binary);
  double L, dt, alpha, delta;
  std::uint64_t n, seed, step;
  in.read(reinterpret_cast<char*>(&L), 8);
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&dt), 8);
  in.read(reinterpret_cast<char*>(&alpha), 8);
  in.read(reinterpret_cast<char*>(&delta), 8);
  in.read(reinterpret_cast<char*>(&seed), 8);
  in.read(reinterpret_cast<char*>(&step), 8);
  CHECK(L == 8.0);
  CHECK(n == 16);
  CHECK(dt == 0.01);
  CHECK(seed == 11);
  CHECK(step == 3);
  double v0;
  in.read(reinterpret_cast<char*>(&v0), 8);
  CHECK(v0 == inc.vx[0].real());
}
