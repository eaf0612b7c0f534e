#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "opse/tolerances.hpp"

namespace opse {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Basis-index convention used by the whole library: qubit 0 is the MOST
// significant bit of the basis index. For n qubits, basis state
// |b0 b1 ... b_{n-1}> has index b0*2^(n-1) + ... + b_{n-1}*2^0, so the
// ket label reads left-to-right as qubits 0..n-1.
inline int bit_of(std::uint64_t index, int qubit, int num_qubits) {
  return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1ull);
}

inline std::uint64_t dim_of(int num_qubits) { return 1ull << num_qubits; }

// Normalized pure state on a qubit register.
class StateVector {
 public:
  StateVector(int num_qubits, ComplexVector amplitudes);

  // |00...0>
  static StateVector zero(int num_qubits);
  // Computational basis state |index>
  static StateVector basis(int num_qubits, std::uint64_t index);

  int num_qubits() const { return num_qubits_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  Complex amplitude(std::uint64_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

  Complex inner(const StateVector& other) const;
  double norm() const { return amplitudes_.norm(); }

  StateVector tensor(const StateVector& other) const;

  // Largest-magnitude amplitude rotated to the positive real axis.
  StateVector phase_fixed() const;

 private:
  int num_qubits_;
  ComplexVector amplitudes_;
};

// Ordered, disjoint partition of a register into subsystems A and B.
struct BipartiteSplit {
  std::vector<int> qubits_a;
  std::vector<int> qubits_b;

  int num_qubits() const {
    return static_cast<int>(qubits_a.size() + qubits_b.size());
  }

  // Throws if the lists overlap or do not cover exactly 0..n-1.
  void validate(int num_qubits) const;

  // A = first na qubits, B = the rest.
  static BipartiteSplit leading(int na, int num_qubits);
};

enum class Subsystem { A, B };

// Density operator with validated invariants (Hermitian, unit trace, PSD).
class DensityOperator {
 public:
  DensityOperator(Eigen::Index dim, ComplexMatrix matrix);

  static DensityOperator from_state(const StateVector& psi);
  static DensityOperator maximally_mixed(int num_qubits);

  Eigen::Index dim() const { return dim_; }
  int num_qubits() const;
  const ComplexMatrix& matrix() const { return matrix_; }

  double purity() const { return (matrix_ * matrix_).trace().real(); }

  // Eigendecomposition as a probability-weighted set of orthonormal states,
  // descending eigenvalue order, weights below `floor` dropped.
  std::vector<std::pair<double, ComplexVector>> spectral(double floor = tol::kPrune) const;

  void validate() const;

 private:
  Eigen::Index dim_;
  ComplexMatrix matrix_;
};

// --- tensor-core operations ------------------------------------------------

// Kronecker product; (kron(a,b))[(i*rb+k),(j*cb+l)] = a(i,j) * b(k,l).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Partial trace of a density operator over one side of a bipartite split.
// The kept subsystem's qubits stay in the order listed by the split.
DensityOperator partial_trace(const DensityOperator& rho, const BipartiteSplit& split,
                              Subsystem keep);

// Partial trace straight on a matrix with an explicit kept-qubit list
// (indices into a num_qubits register, result ordered as listed).
ComplexMatrix partial_trace_keep(const ComplexMatrix& rho, const std::vector<int>& keep,
                                 int num_qubits);

// Reduced density of a pure state on the kept qubits; avoids forming the
// full |psi><psi|.
ComplexMatrix reduced_density(const StateVector& psi, const std::vector<int>& keep);

// Tensor product of single-qubit Paulis; spec is a string over {I,X,Y,Z},
// character k acting on qubit k.
ComplexMatrix pauli_string_matrix(const std::string& spec);

// exp(i*theta*P) = cos(theta) I + i sin(theta) P for involutory Hermitian P.
ComplexMatrix exp_i_theta_pauli(double theta, const std::string& pauli_spec);
ComplexMatrix exp_i_theta_involutory(double theta, const ComplexMatrix& p);

// Tr(a^dagger b)
Complex hilbert_schmidt_inner(const ComplexMatrix& a, const ComplexMatrix& b);

// --- checks ------------------------------------------------------------

bool is_unitary(const ComplexMatrix& u, double tolerance = tol::kNorm);
bool is_hermitian(const ComplexMatrix& m, double tolerance = tol::kNorm);
bool all_finite(const ComplexMatrix& m);

}  // namespace opse
