#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "opse/ensemble.hpp"
#include "opse/rng.hpp"
#include "opse/tensor.hpp"

namespace opse {

enum class SampleMode {
  HaarExact,  // draw the two circuit pieces L, R directly from Haar
  Ansatz,     // draw a random ansatz of configured depth and random angles
};

struct VarianceScanConfig {
  std::vector<int> k_range;  // ancilla qubit counts, ascending, non-empty
  SampleMode mode = SampleMode::HaarExact;
  int depth = 1;             // layers per circuit piece (Ansatz mode)
  int n_samples = 2000;      // draws per k, at least 30
  int system_qubits = 2;
  // Spectral ensemble of this density seeds the purification; empty means
  // the maximally mixed state on the system register.
  std::optional<DensityOperator> source;
  std::string source_label = "maximally-mixed";
  int layer_index = 0;  // 1-based theta_j to differentiate; 0 = middle layer
  std::uint64_t seed = 0;
  int workers = 1;

  void validate() const;
};

struct ScanPoint {
  int k;
  double d;
  double mean_grad;
  double stderr_mean;
  double var_grad;
  double stderr_var;  // delete-1 jackknife
  int n;
};

struct ScanFit {
  double slope;  // of log2(var) against k
  double intercept;
  double slope_stderr;
  double slope_ci95_lo;
  double slope_ci95_hi;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  std::optional<ScanFit> fit;  // absent for single-k scans
  std::uint64_t seed = 0;
};

// Layers needed before the random-circuit variance becomes statistically
// indistinguishable from the Haar-spliced one (the compatibility tests hold
// this number accountable).
inline int depth_4design(int num_qubits) { return 16 * num_qubits; }

// One draw of the theta_j derivative of the quadratic Tsallis cost for the
// given ancilla size. HaarExact splices two independent Haar factors around
// a random Pauli-string generator; Ansatz draws a random circuit and random
// angles and differentiates layer j analytically.
double sample_gradient(int k, SampleMode mode, int depth, int layer_index,
                       const Purification& purification, const BipartiteSplit& split, Rng& rng);

// Per-k mean/variance statistics of a custom sampler. The engine behind
// variance_scan; exposed so tests can inject degenerate samplers. Sample s
// of point k always uses stream seed.split(k).split(s), making results
// independent of the worker count.
ScanResult scan_statistics(const std::vector<int>& k_range, int n_samples, std::uint64_t seed,
                           int workers,
                           const std::function<double(int k, Rng& rng)>& sampler);

ScanResult variance_scan(const VarianceScanConfig& cfg);

// Same scan, reported for its per-k means; no variance fit attached.
ScanResult mean_scan(const VarianceScanConfig& cfg);

// CSV payload: header + one row per k.
std::string scan_to_csv(const ScanResult& result);

}  // namespace opse
