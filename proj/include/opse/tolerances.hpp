#pragma once

// Central numeric tolerances. Every module reads these; nothing redefines
// its own epsilon.
namespace opse::tol {

// States, unitaries, densities: norm / hermiticity / trace checks.
inline constexpr double kNorm = 1e-9;

// Exact algebraic identities (trace preservation, closed forms).
inline constexpr double kAlgebra = 1e-12;

// Measurement outcomes below this probability are dropped.
inline constexpr double kPrune = 1e-12;

// Ensemble weights below this leave |phi_i> undefined (division by q_i);
// the branch is reported with zero weight and a placeholder state.
inline constexpr double kQPrune = 1e-12;

// Eigenvalues clipped here before log in entropies.
inline constexpr double kEntropyClip = 1e-15;

// PSD checks treat eigenvalues above this (negative) floor as zero.
inline constexpr double kPsdFloor = -1e-9;

}  // namespace opse::tol
