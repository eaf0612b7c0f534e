#pragma once

#include <string>
#include <vector>

#include "opse/ensemble.hpp"
#include "opse/measures.hpp"
#include "opse/rng.hpp"
#include "opse/tensor.hpp"

namespace opse {

enum class EntanglerKind {
  CxLadder,
  CzLadder,
  None,
};

struct AnsatzLayer {
  std::string generator;  // Pauli string over the ancilla register
  EntanglerKind entangler = EntanglerKind::CxLadder;
};

// Layered parametrized unitary U(theta) = F_1 F_2 ... F_L with
// F_l = exp(i theta_l V_l) E_l. Layer 1 is the leftmost factor, so the
// layer-L factor acts on a ket first; split_at reconstruction pins the
// convention.
struct Ansatz {
  int num_qubits = 0;
  std::vector<AnsatzLayer> layers;

  int depth() const { return static_cast<int>(layers.size()); }
  void validate() const;
};

using ParameterVector = std::vector<double>;

enum class GradientMode {
  Analytic,
  FiniteDiff,
};

struct OptimizerConfig {
  double learning_rate = 0.1;
  int max_iters = 500;
  double grad_tol = 1e-6;
  int restarts = 8;
  GradientMode gradient_mode = GradientMode::FiniteDiff;
  double fd_step = 1e-5;

  void validate() const;
};

struct TracePoint {
  double cost;
  double grad_norm;
};

struct OptimizeResult {
  ParameterVector best_theta;
  double best_cost = 0.0;
  std::vector<TracePoint> trace;  // trace of the best restart
  bool converged = false;         // grad_tol reached in the best restart
  std::vector<double> restart_costs;
};

// Parameter-free entangler matrix on n qubits. Ladders apply
// control q -> target q+1 in ascending q order.
ComplexMatrix entangler_matrix(EntanglerKind kind, int num_qubits);

ComplexMatrix build_unitary(const Ansatz& a, const ParameterVector& theta);

// Uniformly random non-identity Pauli-string generators, CX-ladder
// entanglers. Reproducible per seed.
Ansatz random_ansatz(int num_qubits, int depth, Rng& rng);

struct SplitParts {
  ComplexMatrix left;       // F_1 ... F_j
  ComplexMatrix generator;  // V_j
  ComplexMatrix right;      // F_{j+1} ... F_L
};

// Split around layer j (1-based); left * right rebuilds U.
SplitParts split_at(const Ansatz& a, const ParameterVector& theta, int layer);

// d/dtheta_j of U^dagger |i><i| U via the commutator form
// i R^dagger [V_j, L^dagger |i><i| L] R. The generator commutes with its
// own exponential but not with the entangler, so here L ends with
// exp(i theta_j V_j) and R starts with E_j.
ComplexMatrix grad_projector(const Ansatz& a, const ParameterVector& theta, int layer,
                             std::uint64_t ancilla_index);

// Gradient of sum_i f(q_i) mu(phi_i) with respect to every theta_l.
// Analytic mode is available exactly for (Tsallis2, Square); other
// combinations use central finite differences.
ParameterVector grad_cost(const Purification& p, const Ansatz& a, const ParameterVector& theta,
                          MeasureKind m, WeightFunction f, const BipartiteSplit& split,
                          GradientMode mode, double fd_step = 1e-5);

// Derivative of the quadratic Tsallis cost at a generic splice
// U = left * right with Hermitian generator v inserted between the parts:
// the value of d/dt sum_i (q_i^2 - Tr((Tr_A Phi_i)^2)) at t = 0 for
// U(t) = left exp(i t v) right. Shared by the layer gradient and the
// Haar-spliced gradient sampler.
double tsallis_fd_splice_derivative(const Purification& p, const BipartiteSplit& split,
                                    const ComplexMatrix& left, const ComplexMatrix& v,
                                    const ComplexMatrix& right);

// Single-layer analytic derivative of the quadratic Tsallis cost.
double tsallis_fd_layer_derivative(const Purification& p, const Ansatz& a,
                                   const ParameterVector& theta, int layer,
                                   const BipartiteSplit& split);

// Plain fixed-step gradient descent with restarts; returns the best run.
OptimizeResult optimize(const Purification& p, const Ansatz& a, const OptimizerConfig& cfg,
                        MeasureKind m, WeightFunction f, const BipartiteSplit& split,
                        const Rng& rng);

}  // namespace opse
