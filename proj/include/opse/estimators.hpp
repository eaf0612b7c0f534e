#pragma once

#include <cstdint>

#include "opse/ensemble.hpp"
#include "opse/measures.hpp"
#include "opse/rng.hpp"
#include "opse/sim.hpp"

namespace opse {

// Measurement-based estimators of the ensemble costs, built from the
// two-copy circuits: both run one purification copy per register, rotate
// each ancilla by u, and read the cost off the joint outcome distribution.
//
// Tsallis: a swap test between the A registers of the two copies;
//   2 P[ancilla = 1 | both ensemble indices equal i] estimates T_2(phi_i).
// Concurrence/EoF: the concurrence readout block on the two system copies;
//   8 P[both system registers at 00 | indices equal i] estimates C(phi_i)^2.
//
// shots = 0 evaluates the same estimator on the exact distribution, which
// reproduces the algebraic cost; shots > 0 samples the distribution first.
double estimate_cost_shots(const Purification& p, const ComplexMatrix& u, MeasureKind m,
                           WeightFunction f, const BipartiteSplit& split, std::uint64_t shots,
                           Rng& rng);

// The two-copy joint states the estimators measure; exposed for tests.
StateVector tsallis_swap_circuit_state(const Purification& p, const ComplexMatrix& u,
                                       const BipartiteSplit& split);
StateVector eof_concurrence_circuit_state(const Purification& p, const ComplexMatrix& u);

}  // namespace opse
