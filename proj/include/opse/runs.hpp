#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opse/ansatz.hpp"
#include "opse/ensemble.hpp"
#include "opse/haar.hpp"
#include "opse/measures.hpp"
#include "opse/plateau.hpp"
#include "opse/results.hpp"

namespace opse {

// Measure selector shared by the cost-based subcommands:
//   tsallis-fd           sum f(q_i) T_2(phi_i)       (f from the --f flag)
//   eof                  sum q_i EoF(phi_i)           (2-qubit systems)
//   convex-roof-tsallis  sum q_i T_2(phi_i)
struct MeasureSpec {
  MeasureKind kind;
  WeightFunction weight;
};

MeasureSpec parse_measure(const std::string& measure, const std::string& f);

// Density source: a JSON file path, or the maximally mixed state on
// `system_qubits` when the path is empty.
DensityOperator load_density(const std::string& path, int system_qubits);

struct CommandOutput {
  std::string csv;      // empty when the command has no CSV payload
  std::string json;
  std::string summary;  // one-line human summary for stdout
  bool passed = true;   // haar-check only
};

// --- landscape ---------------------------------------------------------------

struct LandscapeConfig {
  std::string density_path;  // empty = maximally mixed
  int system_qubits = 2;
  int ancilla_qubits = 2;
  std::string measure = "tsallis-fd";
  std::string f = "square";
  int grid = 50;
  std::uint64_t shots = 0;
  std::uint64_t seed = 1;

  std::map<std::string, std::string> echo() const;
};

CommandOutput run_landscape(const LandscapeConfig& cfg);

// --- converge ---------------------------------------------------------------

struct ConvergeConfig {
  std::string density_path;
  int system_qubits = 2;
  int ancilla_qubits = 2;
  std::string measure = "eof";
  std::string f = "identity";
  int depth = 8;
  double learning_rate = 0.1;
  int max_iters = 500;
  int restarts = 8;
  double grad_tol = 1e-6;
  std::uint64_t shots = 0;
  std::uint64_t seed = 1;

  std::map<std::string, std::string> echo() const;
};

CommandOutput run_converge(const ConvergeConfig& cfg);

// --- variance ---------------------------------------------------------------

struct VarianceCmdConfig {
  std::string density_path;
  int system_qubits = 2;
  int k_min = 2;
  int k_max = 5;
  std::string mode = "haar-exact";  // haar-exact | ansatz
  int depth = 1;                    // ansatz mode
  int samples = 2000;
  int layer_index = 0;  // 0 = middle
  int workers = 1;
  std::uint64_t shots = 0;  // must stay 0; the scan is analytic
  std::uint64_t seed = 1;

  std::map<std::string, std::string> echo() const;
};

CommandOutput run_variance(const VarianceCmdConfig& cfg);

// --- haar-check ---------------------------------------------------------------

struct HaarCheckConfig {
  std::vector<int> dims = {5, 8};       // Weingarten cross-check dimensions
  std::uint64_t samples = 200000;       // Monte Carlo samples per dimension
  std::vector<int> q_dims = {4, 8};     // E[q_i] / E[1/q_i^2] dimensions
  std::uint64_t q_samples = 20000;
  std::uint64_t shots = 0;  // must stay 0
  std::uint64_t seed = 1;

  std::map<std::string, std::string> echo() const;
};

// `wg_override` lets tests inject a corrupted Weingarten table.
CommandOutput run_haar_check(
    const HaarCheckConfig& cfg,
    const std::function<double(const CycleType&, double)>& wg_override = nullptr);

// --- witness ---------------------------------------------------------------

struct WitnessConfig {
  std::string density_path;  // required unless `density` is set directly
  std::optional<DensityOperator> density;
  int ancilla_qubits = 0;  // 0 = match the system dimension (d = dim H)
  std::string measure = "tsallis-fd";
  std::string f = "square";
  double threshold = 1e-3;
  int depth = 12;
  double learning_rate = 0.1;
  int max_iters = 500;
  int restarts = 8;
  double grad_tol = 1e-6;
  std::uint64_t shots = 0;
  std::uint64_t seed = 1;

  std::map<std::string, std::string> echo() const;
};

CommandOutput run_witness(const WitnessConfig& cfg);

}  // namespace opse
