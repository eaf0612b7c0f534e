#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opse/ensemble.hpp"
#include "opse/rng.hpp"
#include "opse/tensor.hpp"

namespace opse {

enum class MeasureKind {
  Tsallis2,        // 1 - Tr((Tr_A |psi><psi|)^2)
  VonNeumann,      // entropy (base 2) of the reduced state
  ConcurrenceEof,  // binary-entropy EoF from the two-qubit concurrence
};

enum class WeightFunction {
  Square,    // f(x) = x^2
  Identity,  // f(x) = x
};

double apply_weight(WeightFunction f, double x);

// --- pure-state measures ----------------------------------------------------

double tsallis2_pure(const StateVector& psi, const BipartiteSplit& split);
double von_neumann_pure(const StateVector& psi, const BipartiteSplit& split);

// Two-qubit concurrence 2|c00 c11 - c01 c10|.
double concurrence(const StateVector& psi);

// h((1 + sqrt(1 - c^2)) / 2) with h the base-2 binary entropy.
double eof_from_concurrence(double c);

double binary_entropy(double x);

// Dispatch on MeasureKind; ConcurrenceEof requires a 2-qubit register.
double measure_pure(MeasureKind kind, const StateVector& psi, const BipartiteSplit& split);

// --- density-level Tsallis entropy -------------------------------------------

// T(X) = 1 - Tr(X^2) for a density operator X.
double tsallis_of_density(const DensityOperator& x);

// Same quantity from an overlap decomposition sum_i l_i |v_i><v_i| with the
// v_i not necessarily orthogonal: Tr(X^2) = sum_{ij} l_i l_j |<v_i|v_j>|^2.
// Overlaps are exact for shots = 0 and swap-test sampled otherwise.
double tsallis_overlap_form(const std::vector<double>& probs,
                            const std::vector<StateVector>& states, std::uint64_t shots = 0,
                            Rng* rng = nullptr);

// --- ensemble cost functions --------------------------------------------

// sum_i q_i mu(phi_i) over the ensemble extracted by `u` (pruned branches
// contribute nothing).
double cost_convex_roof(const Purification& p, const ComplexMatrix& u, MeasureKind m,
                        const BipartiteSplit& split);

// sum_i f(q_i) mu(phi_i); the f = x^2, mu = T_2 case also equals
// sum_i (q_i^2 - Tr((Tr_A Phi_i)^2)).
double cost_f_d(const Purification& p, const ComplexMatrix& u, MeasureKind m, WeightFunction f,
                const BipartiteSplit& split);

// The quadratic Tsallis cost evaluated through the branch operators
// directly: sum_i (q_i^2 - Tr((Tr_A Phi_i)^2)). Used as the second
// algebraic route in tests and as the gradient target.
double tsallis_fd_succinct(const Purification& p, const ComplexMatrix& u,
                           const BipartiteSplit& split);

// --- separability verdict ----------------------------------------------------

enum class Verdict {
  SeparableEvidence,
  EntangledEvidence,
};

struct VerdictResult {
  Verdict verdict;
  double achieved_cost;
  double threshold;
};

// Below threshold => separable evidence; at or above => entangled evidence.
// Only the separable direction is conclusive (the optimizer upper-bounds
// the infimum); entangled evidence is heuristic.
VerdictResult separability_verdict(double minimized_cost, double threshold);

std::string verdict_name(Verdict v);

}  // namespace opse
