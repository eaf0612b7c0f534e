#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opse/tensor.hpp"

namespace opse {

// Convex decomposition of a density operator into pure states on the
// system register. Zero-weight entries are allowed (padding / pruned
// branches).
struct PureStateEnsemble {
  std::vector<double> probs;
  std::vector<StateVector> states;

  std::size_t size() const { return probs.size(); }
  void validate() const;
};

// Pure state on system (x) ancilla whose ancilla partial trace is the
// ensemble's density operator. System qubits come first: amplitude index
// = system_index * 2^ancilla_qubits + ancilla_index.
struct Purification {
  int system_qubits = 0;
  int ancilla_qubits = 0;
  StateVector state;

  Eigen::Index system_dim() const { return static_cast<Eigen::Index>(dim_of(system_qubits)); }
  Eigen::Index ancilla_dim() const { return static_cast<Eigen::Index>(dim_of(ancilla_qubits)); }
};

// |psi> = sum_i sqrt(p_i) |psi_i> (x) |i>. The ancilla has
// ceil(log2(max(d,2))) qubits, or more if min_ancilla_qubits asks for it;
// unused ancilla basis states carry zero amplitude.
Purification build_purification(const PureStateEnsemble& ensemble, int min_ancilla_qubits = 0);

// The rotated ensemble {q_i, |phi_i>} obtained by measuring the ancilla
// after applying `u` to it. Entries with q_i below the prune tolerance are
// returned with zero weight and a placeholder |0...0> state. Extracted
// states are phase-fixed (largest amplitude real positive).
PureStateEnsemble ensemble_from_unitary(const Purification& p, const ComplexMatrix& u);

// Unnormalized branch operator Phi_i = q_i |phi_i><phi_i| on the system.
ComplexMatrix unnormalized_phi(const Purification& p, const ComplexMatrix& u, std::uint64_t i);

// Ancilla-block amplitudes of (I (x) u)|psi>: column i is the unnormalized
// system-register vector whose squared norm is q_i. Shared kernel of the
// two operations above and of the cost functions.
ComplexMatrix rotated_branch_vectors(const Purification& p, const ComplexMatrix& u);

DensityOperator reconstruct_density(const PureStateEnsemble& ensemble);

// Canonical ensemble of a density operator: its spectral decomposition,
// padded with zero-weight entries to `min_length` if needed.
PureStateEnsemble spectral_ensemble(const DensityOperator& rho, std::size_t min_length = 0);

// --- JSON schemas (documented in the README) -------------------------------
//
// ensemble: {"schema_version":1, "dims":[dimA,dimB], "probs":[...],
//            "states":[[[re,im],...],...]}
// density:  {"schema_version":1, "dims":[dimA,dimB],
//            "matrix":[[[re,im],...],...]}  (row-major)

std::string ensemble_to_json(const PureStateEnsemble& ensemble, Eigen::Index dim_a,
                             Eigen::Index dim_b);
PureStateEnsemble ensemble_from_json(const std::string& text, Eigen::Index* dim_a = nullptr,
                                     Eigen::Index* dim_b = nullptr);

std::string density_to_json(const DensityOperator& rho, Eigen::Index dim_a, Eigen::Index dim_b);
DensityOperator density_from_json(const std::string& text, Eigen::Index* dim_a = nullptr,
                                  Eigen::Index* dim_b = nullptr);

}  // namespace opse
