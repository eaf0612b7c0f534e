#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opse/rng.hpp"
#include "opse/tensor.hpp"

namespace opse {

enum class GateKind {
  RX,
  RY,
  RZ,
  PHASE,
  H,
  X,
  Y,
  Z,
  CX,
  CZ,
  SWAP,
  CSWAP,
  R_CONC,
  UNITARY,
};

int gate_arity(GateKind kind);

// One gate application. For UNITARY the payload matrix must be unitary and
// sized 2^targets.
struct Gate {
  GateKind kind;
  std::vector<int> targets;
  double parameter = 0.0;
  ComplexMatrix payload;

  static Gate rx(int q, double theta);
  static Gate ry(int q, double theta);
  static Gate rz(int q, double theta);
  static Gate phase(int q, double theta);
  static Gate h(int q);
  static Gate x(int q);
  static Gate y(int q);
  static Gate z(int q);
  static Gate cx(int control, int target);
  static Gate cz(int a, int b);
  static Gate swap(int a, int b);
  static Gate cswap(int control, int a, int b);
  static Gate r_conc(int q);
  static Gate unitary(ComplexMatrix u, std::vector<int> targets);

  // Dense matrix of this gate on its own targets (targets[0] is the most
  // significant index bit).
  ComplexMatrix matrix() const;

  void validate(int num_qubits) const;
};

struct Circuit {
  int num_qubits = 0;
  std::vector<Gate> gates;

  void validate() const;
};

struct ShotCounts {
  std::map<std::uint64_t, std::uint64_t> counts;
  std::uint64_t total_shots = 0;
};

struct MeasurementOutcome {
  std::uint64_t outcome;     // bits of the measured qubits, first target = MSB
  double probability;
  StateVector collapsed;     // full register, measured qubits projected
};

StateVector apply_gate(const StateVector& state, const Gate& gate);
StateVector apply_circuit(const StateVector& state, const Circuit& circuit);

// (I (x) u) restricted to `targets`; identity on the rest of the register.
StateVector apply_unitary_on_subsystem(const StateVector& state, const ComplexMatrix& u,
                                       const std::vector<int>& targets);

// Exact projective measurement of a subsystem: every outcome with
// probability above the prune tolerance, with its collapsed state.
std::vector<MeasurementOutcome> measure_subsystem_exact(const StateVector& state,
                                                        const std::vector<int>& targets);

// Exact outcome distribution over the measured qubits.
std::map<std::uint64_t, double> measurement_distribution(const StateVector& state,
                                                         const std::vector<int>& targets);

ShotCounts sample_shots(const std::map<std::uint64_t, double>& distribution, std::uint64_t shots,
                        Rng& rng);

// Swap-test estimate of |<psi|phi>|^2. shots = 0 computes the exact ancilla
// statistics; shots > 0 samples them and clamps the estimate to [0, 1].
double swap_test(const StateVector& psi, const StateVector& phi, std::uint64_t shots, Rng& rng);
double swap_test_exact(const StateVector& psi, const StateVector& phi);

// Two-copy concurrence readout: prepares |psi> (x) |psi>, runs the fixed
// 4-qubit gate block, and returns the |0000> amplitude. Its magnitude is
// C(psi) / (2 sqrt 2).
Complex concurrence_circuit_amplitude(const StateVector& psi);

// Gate order of the concurrence readout block (see sim.cpp).
const Circuit& concurrence_readout_block();

std::string bitstring(std::uint64_t outcome, int num_bits);

}  // namespace opse
