#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "opse/rng.hpp"
#include "opse/tensor.hpp"

namespace opse {

// Permutation of {0..p-1}, p <= 4.
struct Permutation {
  std::vector<int> images;

  int degree() const { return static_cast<int>(images.size()); }
  void validate() const;
  Permutation compose(const Permutation& other) const;  // this after other
  Permutation inverse() const;

  static std::vector<Permutation> all(int p);
};

// Sorted multiset of cycle lengths; a partition of p.
using CycleType = std::vector<int>;

CycleType cycle_type(const Permutation& sigma);

// Weingarten function values for S_1..S_4 as rational functions of the
// dimension. Throws on an evaluation at a pole of the rational form.
double weingarten(const CycleType& ct, double d);

// All cycle types with parts summing to 1..4, in table order.
std::vector<CycleType> weingarten_cycle_types();

// Exact Haar moment of a monomial in matrix entries:
//   int U_{i1 j1}...U_{ip jp} conj(U_{i'1 j'1})...conj(U_{i'q j'q}) dU
// Zero when p != q; p <= 4 supported.
double monomial_integral(const std::vector<int>& rows, const std::vector<int>& cols,
                         const std::vector<int>& conj_rows, const std::vector<int>& conj_cols,
                         double d);

// Haar-distributed unitary: Ginibre sample, QR, phase fix on R's diagonal.
ComplexMatrix haar_sample(Eigen::Index d, Rng& rng);

// Closed-form average gate fidelity (|<U,V>|^2 + d) / (d (d + 1)).
double avg_gate_fidelity_exact(const ComplexMatrix& u, const ComplexMatrix& v);

struct MonteCarloEstimate {
  double estimate;
  double stderr_;
  std::uint64_t samples;
};

// Monte Carlo average of |<psi0| W^dagger U^dagger V W |psi0>|^2 over Haar W.
MonteCarloEstimate avg_gate_fidelity_mc(const ComplexMatrix& u, const ComplexMatrix& v,
                                        std::uint64_t n_samples, Rng& rng);

}  // namespace opse
