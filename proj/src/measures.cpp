#include "opse/measures.hpp"

#include <cmath>
#include <stdexcept>

#include "opse/sim.hpp"

namespace opse {

namespace {

// Reduced state on B after tracing out A (matches the T_2 definition; the
// nonzero spectrum is split-side independent for pure states).
ComplexMatrix reduced_on_b(const StateVector& psi, const BipartiteSplit& split) {
  split.validate(psi.num_qubits());
  return reduced_density(psi, split.qubits_b);
}

}  // namespace

double apply_weight(WeightFunction f, double x) {
  switch (f) {
    case WeightFunction::Square:
      return x * x;
    case WeightFunction::Identity:
      return x;
  }
  throw std::logic_error("unhandled weight function");
}

double tsallis2_pure(const StateVector& psi, const BipartiteSplit& split) {
  const ComplexMatrix rho_b = reduced_on_b(psi, split);
  const double purity = (rho_b * rho_b).trace().real();
  return 1.0 - purity;
}

double von_neumann_pure(const StateVector& psi, const BipartiteSplit& split) {
  const ComplexMatrix rho_b = reduced_on_b(psi, split);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(rho_b, Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double w = solver.eigenvalues()(i);
    if (w > tol::kEntropyClip) {
      entropy -= w * std::log2(w);
    }
  }
  return entropy;
}

double concurrence(const StateVector& psi) {
  if (psi.num_qubits() != 2) {
    throw std::invalid_argument("concurrence is defined for 2-qubit states");
  }
  const Complex c00 = psi.amplitude(0);
  const Complex c01 = psi.amplitude(1);
  const Complex c10 = psi.amplitude(2);
  const Complex c11 = psi.amplitude(3);
  return 2.0 * std::abs(c00 * c11 - c01 * c10);
}

double binary_entropy(double x) {
  double h = 0.0;
  if (x > tol::kEntropyClip) {
    h -= x * std::log2(x);
  }
  if (1.0 - x > tol::kEntropyClip) {
    h -= (1.0 - x) * std::log2(1.0 - x);
  }
  return h;
}

double eof_from_concurrence(double c) {
  if (c < -tol::kNorm || c > 1.0 + tol::kNorm) {
    throw std::invalid_argument("concurrence outside [0, 1]");
  }
  const double clamped = std::min(std::max(c, 0.0), 1.0);
  return binary_entropy((1.0 + std::sqrt(1.0 - clamped * clamped)) / 2.0);
}

double measure_pure(MeasureKind kind, const StateVector& psi, const BipartiteSplit& split) {
  switch (kind) {
    case MeasureKind::Tsallis2:
      return tsallis2_pure(psi, split);
    case MeasureKind::VonNeumann:
      return von_neumann_pure(psi, split);
    case MeasureKind::ConcurrenceEof:
      if (psi.num_qubits() != 2) {
        throw std::invalid_argument("ConcurrenceEof needs a 2-qubit system register");
      }
      return eof_from_concurrence(concurrence(psi));
  }
  throw std::logic_error("unhandled measure kind");
}

double tsallis_of_density(const DensityOperator& x) { return 1.0 - x.purity(); }

double tsallis_overlap_form(const std::vector<double>& probs,
                            const std::vector<StateVector>& states, std::uint64_t shots,
                            Rng* rng) {
  if (probs.size() != states.size()) {
    throw std::invalid_argument("probs/states length mismatch");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) {
      throw std::invalid_argument("negative weight");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::kNorm) {
    throw std::invalid_argument("weights do not sum to 1");
  }
  if (shots > 0 && rng == nullptr) {
    throw std::invalid_argument("shot mode needs a generator");
  }

  double purity = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    purity += probs[i] * probs[i];  // |<v_i|v_i>|^2 = 1
    for (std::size_t j = i + 1; j < probs.size(); ++j) {
      const double w = probs[i] * probs[j];
      if (w == 0.0) {
        continue;
      }
      double overlap;
      if (shots == 0) {
        overlap = std::norm(states[i].inner(states[j]));
      } else {
        overlap = swap_test(states[i], states[j], shots, *rng);
      }
      purity += 2.0 * w * overlap;
    }
  }
  return 1.0 - purity;
}

double cost_convex_roof(const Purification& p, const ComplexMatrix& u, MeasureKind m,
                        const BipartiteSplit& split) {
  split.validate(p.system_qubits);
  const ComplexMatrix v = rotated_branch_vectors(p, u);
  double cost = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const double q = v.col(i).squaredNorm();
    if (q < tol::kQPrune) {
      continue;
    }
    const StateVector phi(p.system_qubits, v.col(i) / std::sqrt(q));
    cost += q * measure_pure(m, phi, split);
  }
  return cost;
}

double cost_f_d(const Purification& p, const ComplexMatrix& u, MeasureKind m, WeightFunction f,
                const BipartiteSplit& split) {
  split.validate(p.system_qubits);
  const ComplexMatrix v = rotated_branch_vectors(p, u);
  double cost = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const double q = v.col(i).squaredNorm();
    if (q < tol::kQPrune) {
      continue;
    }
    const StateVector phi(p.system_qubits, v.col(i) / std::sqrt(q));
    cost += apply_weight(f, q) * measure_pure(m, phi, split);
  }
  return cost;
}

double tsallis_fd_succinct(const Purification& p, const ComplexMatrix& u,
                           const BipartiteSplit& split) {
  split.validate(p.system_qubits);
  const ComplexMatrix v = rotated_branch_vectors(p, u);

  const int n = p.system_qubits;
  const int na = static_cast<int>(split.qubits_a.size());
  const int nb = static_cast<int>(split.qubits_b.size());
  const std::uint64_t da = dim_of(na);
  const std::uint64_t db = dim_of(nb);
  auto full_index = [&](std::uint64_t a_bits, std::uint64_t b_bits) {
    std::uint64_t idx = 0;
    for (int k = 0; k < na; ++k) {
      const int bit = static_cast<int>((a_bits >> (na - 1 - k)) & 1ull);
      idx |= static_cast<std::uint64_t>(bit)
             << (n - 1 - split.qubits_a[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k < nb; ++k) {
      const int bit = static_cast<int>((b_bits >> (nb - 1 - k)) & 1ull);
      idx |= static_cast<std::uint64_t>(bit)
             << (n - 1 - split.qubits_b[static_cast<std::size_t>(k)]);
    }
    return idx;
  };

  double cost = 0.0;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    // Tr_A Phi_i straight from the unnormalized branch vector; no division
    // by q_i, so degenerate branches need no special case.
    const double q = v.col(i).squaredNorm();
    ComplexMatrix phi_b =
        ComplexMatrix::Zero(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db));
    for (std::uint64_t a = 0; a < da; ++a) {
      ComplexVector col(static_cast<Eigen::Index>(db));
      for (std::uint64_t b = 0; b < db; ++b) {
        col(static_cast<Eigen::Index>(b)) = v(static_cast<Eigen::Index>(full_index(a, b)), i);
      }
      phi_b += col * col.adjoint();
    }
    cost += q * q - (phi_b * phi_b).trace().real();
  }
  return cost;
}

VerdictResult separability_verdict(double minimized_cost, double threshold) {
  const Verdict v = (minimized_cost < threshold) ? Verdict::SeparableEvidence
                                                 : Verdict::EntangledEvidence;
  return VerdictResult{v, minimized_cost, threshold};
}

std::string verdict_name(Verdict v) {
  return v == Verdict::SeparableEvidence ? "separable-evidence" : "entangled-evidence";
}

}  // namespace opse
