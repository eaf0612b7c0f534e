#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "opse/ensemble.hpp"
#include "opse/haar.hpp"
#include "opse/results.hpp"
#include "opse/runs.hpp"
#include "oracles.hpp"

using namespace opse;
using nlohmann::json;

namespace {

std::string bell_density_json() {
  ComplexVector v(4);
  v << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
  return density_to_json(DensityOperator::from_state(StateVector(2, v)), 2, 2);
}

std::string werner_density_json(double p) {
  ComplexVector v(4);
  v << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
  const ComplexMatrix bell = v * v.adjoint();
  const ComplexMatrix w = p * bell + (1.0 - p) * ComplexMatrix::Identity(4, 4) / 4.0;
  return density_to_json(DensityOperator(4, w), 2, 2);
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/opse_test_") + name;
}

}  // namespace

TEST_CASE("experiment result round trip") {
  ExperimentResult r;
  r.command = "landscape";
  r.config = {{"grid", "50"}, {"measure", "tsallis-fd"}};
  r.seed = 42;
  r.version = "0.1.0";
  r.timestamp = "2025-01-01T00:00:00Z";
  r.payload = json{{"min_cost", 0.015625}, {"rows", 2500}};
  const ExperimentResult back = ExperimentResult::from_json(r.to_json());
  CHECK(back.command == r.command);
  CHECK(back.config == r.config);
  CHECK(back.seed == r.seed);
  CHECK(back.version == r.version);
  CHECK(back.timestamp == r.timestamp);
  CHECK(back.payload == r.payload);
  CHECK(back.to_json() == r.to_json());
}

TEST_CASE("config file parsing") {
  const auto kv = parse_config_file("# comment\n grid = 25 \n\nseed=7 # trailing\n");
  CHECK(kv.at("grid") == "25");
  CHECK(kv.at("seed") == "7");
  CHECK(kv.size() == 2);
  CHECK_THROWS_AS(parse_config_file("grid 25\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_file("a=1\na=2\n"), std::invalid_argument);
}

TEST_CASE("landscape command") {
  SUBCASE("1x1 grid emits a single row") {
    LandscapeConfig cfg;
    cfg.grid = 1;
    cfg.seed = 3;
    const CommandOutput out = run_landscape(cfg);
    CHECK(out.csv == "theta,phi,cost\n0,0,0\n");
  }
  SUBCASE("maximally mixed 50x50 grid: all costs nonnegative, minimum near zero") {
    LandscapeConfig cfg;
    cfg.grid = 50;
    cfg.seed = 3;
    const CommandOutput out = run_landscape(cfg);
    const ExperimentResult r = ExperimentResult::from_json(out.json);
    CHECK(r.payload.at("min_cost").get<double>() < 0.02);
    CHECK(r.payload.at("min_cost").get<double>() > -1e-12);
    CHECK(r.payload.at("rows").get<int>() == 2500);
  }
  SUBCASE("Bell with one padded ancilla qubit: convex-roof grid is constant 1/2") {
    const std::string path = temp_path("bell.json");
    write_file(path, bell_density_json());
    LandscapeConfig cfg;
    cfg.density_path = path;
    cfg.ancilla_qubits = 1;
    cfg.measure = "convex-roof-tsallis";
    cfg.grid = 6;
    const CommandOutput out = run_landscape(cfg);
    const ExperimentResult r = ExperimentResult::from_json(out.json);
    CHECK(r.payload.at("min_cost").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.payload.at("max_cost").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    std::remove(path.c_str());
  }
  SUBCASE("payload reruns byte-identically in exact mode") {
    LandscapeConfig cfg;
    cfg.grid = 8;
    cfg.seed = 11;
    const CommandOutput a = run_landscape(cfg);
    const CommandOutput b = run_landscape(cfg);
    CHECK(a.csv == b.csv);
    CHECK(ExperimentResult::from_json(a.json).payload ==
          ExperimentResult::from_json(b.json).payload);
  }
  SUBCASE("config echo carries every resolved value") {
    LandscapeConfig cfg;
    cfg.grid = 2;
    const ExperimentResult r = ExperimentResult::from_json(run_landscape(cfg).json);
    CHECK(r.config.at("grid") == "2");
    CHECK(r.config.at("measure") == "tsallis-fd");
    CHECK(r.config.at("density") == "maximally-mixed");
    CHECK(r.version == std::string("0.1.0"));
  }
  SUBCASE("invalid grid rejected") {
    LandscapeConfig cfg;
    cfg.grid = 0;
    CHECK_THROWS_AS(run_landscape(cfg), std::invalid_argument);
  }
}

TEST_CASE("landscape shot mode converges to exact") {
  LandscapeConfig exact_cfg;
  exact_cfg.grid = 2;
  exact_cfg.seed = 5;
  const CommandOutput exact_out = run_landscape(exact_cfg);

  // Average several shot-mode runs and compare the grid means under a
  // 5-sigma empirical error bound.
  const int runs = 10;
  std::vector<double> estimates;
  for (int r = 0; r < runs; ++r) {
    LandscapeConfig cfg = exact_cfg;
    cfg.shots = 20000;
    cfg.seed = 100 + static_cast<std::uint64_t>(r);
    const CommandOutput out = run_landscape(cfg);
    estimates.push_back(
        ExperimentResult::from_json(out.json).payload.at("min_cost").get<double>());
  }
  double mean = 0.0;
  for (double e : estimates) {
    mean += e;
  }
  mean /= runs;
  double var = 0.0;
  for (double e : estimates) {
    var += (e - mean) * (e - mean);
  }
  var /= (runs - 1);
  const double se = std::sqrt(var / runs) + 1e-6;
  const double exact_min =
      ExperimentResult::from_json(exact_out.json).payload.at("min_cost").get<double>();
  CHECK(std::abs(mean - exact_min) < 5.0 * se + 0.01);
}

TEST_CASE("converge command") {
  SUBCASE("Bell with padded ancilla: EoF trace is flat at 1") {
    const std::string path = temp_path("bell_converge.json");
    write_file(path, bell_density_json());
    ConvergeConfig cfg;
    cfg.density_path = path;
    cfg.ancilla_qubits = 1;
    cfg.measure = "eof";
    cfg.depth = 3;
    cfg.max_iters = 10;
    cfg.restarts = 2;
    cfg.seed = 7;
    const CommandOutput out = run_converge(cfg);
    const ExperimentResult r = ExperimentResult::from_json(out.json);
    CHECK(r.payload.at("best_cost").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    // every trace row carries cost 1.0
    std::istringstream csv(out.csv);
    std::string line;
    std::getline(csv, line);
    CHECK(line == "iter,cost,grad_norm");
    bool saw_row = false;
    while (std::getline(csv, line)) {
      saw_row = true;
      const auto first_comma = line.find(',');
      const auto second_comma = line.find(',', first_comma + 1);
      const double cost = std::stod(line.substr(first_comma + 1, second_comma - first_comma - 1));
      CHECK(cost == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(saw_row);
    std::remove(path.c_str());
  }
  SUBCASE("zero iterations reports the initial cost only") {
    ConvergeConfig cfg;
    cfg.max_iters = 0;
    cfg.restarts = 1;
    cfg.measure = "tsallis-fd";
    cfg.seed = 13;
    const CommandOutput out = run_converge(cfg);
    int rows = 0;
    std::istringstream csv(out.csv);
    std::string line;
    while (std::getline(csv, line)) {
      ++rows;
    }
    CHECK(rows == 2);  // header + single entry
  }
  SUBCASE("shots attach a sampled estimate of the final cost") {
    const std::string path = temp_path("bell_converge_shots.json");
    write_file(path, bell_density_json());
    ConvergeConfig cfg;
    cfg.density_path = path;
    cfg.ancilla_qubits = 1;
    cfg.measure = "eof";
    cfg.depth = 2;
    cfg.max_iters = 5;
    cfg.restarts = 1;
    cfg.shots = 100000;
    cfg.seed = 17;
    const CommandOutput out = run_converge(cfg);
    const ExperimentResult r = ExperimentResult::from_json(out.json);
    // every branch is the Bell state, so the sampled EoF estimate must sit
    // near the exact value 1
    CHECK(r.payload.at("best_cost_shot_estimate").get<double>() ==
          doctest::Approx(1.0).epsilon(0.05));
    std::remove(path.c_str());
  }
}

TEST_CASE("variance command") {
  SUBCASE("single-k scan has no fit") {
    VarianceCmdConfig cfg;
    cfg.k_min = 2;
    cfg.k_max = 2;
    cfg.samples = 60;
    cfg.seed = 3;
    const CommandOutput out = run_variance(cfg);
    const ExperimentResult r = ExperimentResult::from_json(out.json);
    CHECK_FALSE(r.payload.contains("fit"));
    CHECK(r.payload.at("points").size() == 1);
  }
  SUBCASE("seed repeat reproduces the CSV byte for byte") {
    VarianceCmdConfig cfg;
    cfg.k_min = 2;
    cfg.k_max = 3;
    cfg.samples = 60;
    cfg.seed = 9;
    const CommandOutput a = run_variance(cfg);
    cfg.workers = 2;
    const CommandOutput b = run_variance(cfg);
    CHECK(a.csv == b.csv);
  }
  SUBCASE("shots rejected") {
    VarianceCmdConfig cfg;
    cfg.shots = 100;
    CHECK_THROWS_AS(run_variance(cfg), std::invalid_argument);
  }
}

TEST_CASE("haar-check command") {
  SUBCASE("small run passes and reports structured checks") {
    HaarCheckConfig cfg;
    cfg.dims = {4};
    cfg.samples = 20000;
    cfg.q_dims = {4};
    cfg.q_samples = 4000;
    cfg.seed = 19;
    const CommandOutput out = run_haar_check(cfg);
    CHECK(out.passed);
    const ExperimentResult r = ExperimentResult::from_json(out.json);
    CHECK(r.payload.at("all_pass").get<bool>());
    CHECK(r.payload.at("checks").size() > 10);
  }
  SUBCASE("corrupted table is caught") {
    HaarCheckConfig cfg;
    cfg.dims = {4};
    cfg.samples = 20000;
    cfg.q_dims = {4};
    cfg.q_samples = 2000;
    cfg.seed = 19;
    auto corrupted = [](const CycleType& ct, double d) {
      const double v = weingarten(ct, d);
      return (ct == CycleType{2}) ? 2.0 * v : v;
    };
    const CommandOutput out = run_haar_check(cfg, corrupted);
    CHECK_FALSE(out.passed);
  }
  SUBCASE("shots rejected") {
    HaarCheckConfig cfg;
    cfg.shots = 5;
    CHECK_THROWS_AS(run_haar_check(cfg), std::invalid_argument);
  }
}

TEST_CASE("witness command") {
  SUBCASE("maximally mixed input yields separable evidence") {
    WitnessConfig cfg;
    cfg.density = DensityOperator::maximally_mixed(2);
    cfg.seed = 23;
    cfg.restarts = 6;
    cfg.max_iters = 300;
    const CommandOutput out = run_witness(cfg);
    const ExperimentResult r = ExperimentResult::from_json(out.json);
    CHECK(r.payload.at("verdict").get<std::string>() == "separable-evidence");
    CHECK(r.payload.at("achieved_cost").get<double>() < 1e-3);
    // the reported ensemble reconstructs the input
    const PureStateEnsemble best =
        ensemble_from_json(r.payload.at("best_ensemble").dump());
    const DensityOperator rho = reconstruct_density(best);
    CHECK((rho.matrix() - ComplexMatrix::Identity(4, 4) / 4.0).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("Bell projector yields entangled evidence at exactly 1/2 with the convex roof") {
    const std::string path = temp_path("bell_witness.json");
    write_file(path, bell_density_json());
    WitnessConfig cfg;
    cfg.density_path = path;
    cfg.measure = "convex-roof-tsallis";
    cfg.max_iters = 30;
    cfg.restarts = 2;
    cfg.seed = 29;
    const CommandOutput out = run_witness(cfg);
    const ExperimentResult r = ExperimentResult::from_json(out.json);
    CHECK(r.payload.at("verdict").get<std::string>() == "entangled-evidence");
    CHECK(r.payload.at("achieved_cost").get<double>() == doctest::Approx(0.5).epsilon(1e-9));
    std::remove(path.c_str());
  }
  SUBCASE("malformed density file reports a parse error") {
    const std::string path = temp_path("broken.json");
    write_file(path, "{\"dims\": [2, 2]}");
    WitnessConfig cfg;
    cfg.density_path = path;
    CHECK_THROWS(run_witness(cfg));
    std::remove(path.c_str());
  }
}

TEST_CASE("werner densities parse and validate") {
  const DensityOperator w = density_from_json(werner_density_json(0.2));
  CHECK(w.num_qubits() == 2);
}
