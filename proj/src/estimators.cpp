#include "opse/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace opse {

namespace {

// (I (x) u)|psi> as a full-register state.
StateVector rotated_purification(const Purification& p, const ComplexMatrix& u) {
  const ComplexMatrix v = rotated_branch_vectors(p, u);
  const Eigen::Index sys = p.system_dim();
  const Eigen::Index anc = p.ancilla_dim();
  ComplexVector amps(sys * anc);
  for (Eigen::Index s = 0; s < sys; ++s) {
    for (Eigen::Index w = 0; w < anc; ++w) {
      amps(s * anc + w) = v(s, w);
    }
  }
  return StateVector(p.system_qubits + p.ancilla_qubits, std::move(amps));
}

struct JointLayout {
  int total_qubits;
  std::vector<int> w1;  // first copy's ancilla qubits
  std::vector<int> w2;  // second copy's ancilla qubits
};

}  // namespace

StateVector tsallis_swap_circuit_state(const Purification& p, const ComplexMatrix& u,
                                       const BipartiteSplit& split) {
  split.validate(p.system_qubits);
  const StateVector copy = rotated_purification(p, u);
  // qubit 0: swap-test ancilla; then copy 1, then copy 2
  StateVector joint = StateVector::zero(1).tensor(copy).tensor(copy);
  const int per_copy = p.system_qubits + p.ancilla_qubits;
  Circuit c;
  c.num_qubits = joint.num_qubits();
  c.gates.push_back(Gate::h(0));
  for (int q : split.qubits_a) {
    c.gates.push_back(Gate::cswap(0, 1 + q, 1 + per_copy + q));
  }
  c.gates.push_back(Gate::h(0));
  return apply_circuit(joint, c);
}

StateVector eof_concurrence_circuit_state(const Purification& p, const ComplexMatrix& u) {
  if (p.system_qubits != 2) {
    throw std::invalid_argument("the concurrence estimator needs a 2-qubit system register");
  }
  const StateVector copy = rotated_purification(p, u);
  StateVector joint = copy.tensor(copy);
  const int per_copy = p.system_qubits + p.ancilla_qubits;
  // Concurrence readout block remapped onto (copy1 system, copy2 system).
  const std::vector<int> block_map = {0, 1, per_copy + 0, per_copy + 1};
  StateVector out = joint;
  for (const Gate& g : concurrence_readout_block().gates) {
    Gate remapped = g;
    for (int& t : remapped.targets) {
      t = block_map[static_cast<std::size_t>(t)];
    }
    out = apply_unitary_on_subsystem(out, remapped.matrix(), remapped.targets);
  }
  return out;
}

double estimate_cost_shots(const Purification& p, const ComplexMatrix& u, MeasureKind m,
                           WeightFunction f, const BipartiteSplit& split, std::uint64_t shots,
                           Rng& rng) {
  const int per_copy = p.system_qubits + p.ancilla_qubits;
  const int k = p.ancilla_qubits;
  const std::uint64_t anc_dim = dim_of(k);

  if (m == MeasureKind::VonNeumann) {
    throw std::invalid_argument("no measurement-based estimator for the von Neumann cost");
  }

  if (m == MeasureKind::Tsallis2) {
    const StateVector state = tsallis_swap_circuit_state(p, u, split);
    // targets: swap ancilla, then both ensemble registers
    std::vector<int> targets = {0};
    for (int q = 0; q < k; ++q) {
      targets.push_back(1 + p.system_qubits + q);
    }
    for (int q = 0; q < k; ++q) {
      targets.push_back(1 + per_copy + p.system_qubits + q);
    }
    std::map<std::uint64_t, double> dist = measurement_distribution(state, targets);

    // outcome bits: [t | i (k bits) | j (k bits)]
    auto accumulate = [&](const auto& table, auto weight_of) {
      std::vector<double> q_i(anc_dim, 0.0);
      std::vector<double> pair_ii(anc_dim, 0.0);
      std::vector<double> pair_t1_ii(anc_dim, 0.0);
      for (const auto& [outcome, w] : table) {
        const double weight = weight_of(w);
        const std::uint64_t j = outcome & (anc_dim - 1);
        const std::uint64_t i = (outcome >> k) & (anc_dim - 1);
        const std::uint64_t t = outcome >> (2 * k);
        q_i[i] += weight;
        if (i == j) {
          pair_ii[i] += weight;
          if (t == 1) {
            pair_t1_ii[i] += weight;
          }
        }
      }
      double cost = 0.0;
      for (std::uint64_t i = 0; i < anc_dim; ++i) {
        if (pair_ii[i] <= 0.0 || q_i[i] <= 0.0) {
          continue;
        }
        const double t2 = 2.0 * pair_t1_ii[i] / pair_ii[i];
        cost += apply_weight(f, q_i[i]) * t2;
      }
      return cost;
    };

    if (shots == 0) {
      return accumulate(dist, [](double p_out) { return p_out; });
    }
    const ShotCounts counts = sample_shots(dist, shots, rng);
    const double n = static_cast<double>(shots);
    return accumulate(counts.counts,
                      [n](std::uint64_t c) { return static_cast<double>(c) / n; });
  }

  // ConcurrenceEof
  const StateVector state = eof_concurrence_circuit_state(p, u);
  // targets: copy1 system (2), copy1 ancilla (k), copy2 system (2), copy2 ancilla (k)
  std::vector<int> targets;
  for (int q = 0; q < per_copy; ++q) {
    targets.push_back(q);
  }
  for (int q = 0; q < per_copy; ++q) {
    targets.push_back(per_copy + q);
  }
  std::map<std::uint64_t, double> dist = measurement_distribution(state, targets);

  auto accumulate = [&](const auto& table, auto weight_of) {
    std::vector<double> q_i(anc_dim, 0.0);
    std::vector<double> pair_ii(anc_dim, 0.0);
    std::vector<double> pair_00_ii(anc_dim, 0.0);
    for (const auto& [outcome, w] : table) {
      const double weight = weight_of(w);
      const std::uint64_t j = outcome & (anc_dim - 1);
      const std::uint64_t s2 = (outcome >> k) & 3ull;
      const std::uint64_t i = (outcome >> (k + 2)) & (anc_dim - 1);
      const std::uint64_t s1 = (outcome >> (2 * k + 2)) & 3ull;
      q_i[i] += weight;
      if (i == j) {
        pair_ii[i] += weight;
        if (s1 == 0 && s2 == 0) {
          pair_00_ii[i] += weight;
        }
      }
    }
    double cost = 0.0;
    for (std::uint64_t i = 0; i < anc_dim; ++i) {
      if (pair_ii[i] <= 0.0 || q_i[i] <= 0.0) {
        continue;
      }
      const double c_sq = std::min(1.0, 8.0 * pair_00_ii[i] / pair_ii[i]);
      cost += apply_weight(f, q_i[i]) * eof_from_concurrence(std::sqrt(c_sq));
    }
    return cost;
  };

  if (shots == 0) {
    return accumulate(dist, [](double p_out) { return p_out; });
  }
  const ShotCounts counts = sample_shots(dist, shots, rng);
  const double n = static_cast<double>(shots);
  return accumulate(counts.counts, [n](std::uint64_t c) { return static_cast<double>(c) / n; });
}

}  // namespace opse
