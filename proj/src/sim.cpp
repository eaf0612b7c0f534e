#include "opse/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opse {

namespace {

const Complex kI(0.0, 1.0);

ComplexMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::PHASE:
    case GateKind::H:
    case GateKind::X:
    case GateKind::Y:
    case GateKind::Z:
    case GateKind::R_CONC:
      return 1;
    case GateKind::CX:
    case GateKind::CZ:
    case GateKind::SWAP:
      return 2;
    case GateKind::CSWAP:
      return 3;
    case GateKind::UNITARY:
      return -1;  // taken from the target list
  }
  throw std::logic_error("unhandled gate kind");
}

Gate Gate::rx(int q, double theta) { return Gate{GateKind::RX, {q}, theta, {}}; }
Gate Gate::ry(int q, double theta) { return Gate{GateKind::RY, {q}, theta, {}}; }
Gate Gate::rz(int q, double theta) { return Gate{GateKind::RZ, {q}, theta, {}}; }
Gate Gate::phase(int q, double theta) { return Gate{GateKind::PHASE, {q}, theta, {}}; }
Gate Gate::h(int q) { return Gate{GateKind::H, {q}, 0.0, {}}; }
Gate Gate::x(int q) { return Gate{GateKind::X, {q}, 0.0, {}}; }
Gate Gate::y(int q) { return Gate{GateKind::Y, {q}, 0.0, {}}; }
Gate Gate::z(int q) { return Gate{GateKind::Z, {q}, 0.0, {}}; }
Gate Gate::cx(int control, int target) { return Gate{GateKind::CX, {control, target}, 0.0, {}}; }
Gate Gate::cz(int a, int b) { return Gate{GateKind::CZ, {a, b}, 0.0, {}}; }
Gate Gate::swap(int a, int b) { return Gate{GateKind::SWAP, {a, b}, 0.0, {}}; }
Gate Gate::cswap(int control, int a, int b) {
  return Gate{GateKind::CSWAP, {control, a, b}, 0.0, {}};
}
Gate Gate::r_conc(int q) { return Gate{GateKind::R_CONC, {q}, 0.0, {}}; }

Gate Gate::unitary(ComplexMatrix u, std::vector<int> targets) {
  if (u.rows() != u.cols() ||
      u.rows() != static_cast<Eigen::Index>(dim_of(static_cast<int>(targets.size())))) {
    throw std::invalid_argument("unitary payload shape does not match target count");
  }
  if (!is_unitary(u, tol::kNorm)) {
    throw std::invalid_argument("unitary payload is not unitary");
  }
  return Gate{GateKind::UNITARY, std::move(targets), 0.0, std::move(u)};
}

ComplexMatrix Gate::matrix() const {
  const double t = parameter;
  switch (kind) {
    case GateKind::RX:
      return mat2(std::cos(t / 2), -kI * std::sin(t / 2), -kI * std::sin(t / 2), std::cos(t / 2));
    case GateKind::RY:
      return mat2(std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2));
    case GateKind::RZ:
      return mat2(std::exp(-kI * (t / 2)), 0, 0, std::exp(kI * (t / 2)));
    case GateKind::PHASE:
      return mat2(1, 0, 0, std::exp(kI * t));
    case GateKind::H: {
      const double s = 1.0 / std::sqrt(2.0);
      return mat2(s, s, s, -s);
    }
    case GateKind::X:
      return mat2(0, 1, 1, 0);
    case GateKind::Y:
      return mat2(0, -kI, kI, 0);
    case GateKind::Z:
      return mat2(1, 0, 0, -1);
    case GateKind::R_CONC: {
      const double s = 1.0 / std::sqrt(2.0);
      return mat2(s, s, -s, s);
    }
    case GateKind::CX: {
      ComplexMatrix m = ComplexMatrix::Zero(4, 4);
      m(0, 0) = 1;
      m(1, 1) = 1;
      m(2, 3) = 1;
      m(3, 2) = 1;
      return m;
    }
    case GateKind::CZ: {
      ComplexMatrix m = ComplexMatrix::Identity(4, 4);
      m(3, 3) = -1;
      return m;
    }
    case GateKind::SWAP: {
      ComplexMatrix m = ComplexMatrix::Zero(4, 4);
      m(0, 0) = 1;
      m(1, 2) = 1;
      m(2, 1) = 1;
      m(3, 3) = 1;
      return m;
    }
    case GateKind::CSWAP: {
      ComplexMatrix m = ComplexMatrix::Identity(8, 8);
      m(5, 5) = 0;
      m(6, 6) = 0;
      m(5, 6) = 1;
      m(6, 5) = 1;
      return m;
    }
    case GateKind::UNITARY:
      return payload;
  }
  throw std::logic_error("unhandled gate kind");
}

void Gate::validate(int num_qubits) const {
  const int arity = gate_arity(kind);
  if (arity >= 0 && static_cast<int>(targets.size()) != arity) {
    throw std::invalid_argument("gate target count does not match arity");
  }
  if (kind == GateKind::UNITARY) {
    if (targets.empty()) {
      throw std::invalid_argument("UNITARY gate needs at least one target");
    }
    if (payload.rows() != static_cast<Eigen::Index>(dim_of(static_cast<int>(targets.size())))) {
      throw std::invalid_argument("unitary payload shape does not match target count");
    }
  }
  std::vector<int> sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("gate targets must be distinct");
  }
  for (int q : targets) {
    if (q < 0 || q >= num_qubits) {
      throw std::invalid_argument("gate target out of range");
    }
  }
}

void Circuit::validate() const {
  for (const Gate& g : gates) {
    g.validate(num_qubits);
  }
}

StateVector apply_unitary_on_subsystem(const StateVector& state, const ComplexMatrix& u,
                                       const std::vector<int>& targets) {
  const int n = state.num_qubits();
  const int m = static_cast<int>(targets.size());
  if (u.rows() != u.cols() || u.rows() != static_cast<Eigen::Index>(dim_of(m))) {
    throw std::invalid_argument("subsystem unitary dimension mismatch");
  }
  if (!is_unitary(u, tol::kNorm)) {
    throw std::invalid_argument("subsystem operator is not unitary");
  }
  std::vector<int> sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("duplicate target qubit");
  }
  for (int q : targets) {
    if (q < 0 || q >= n) {
      throw std::invalid_argument("target qubit out of range");
    }
  }

  // Bit positions (from LSB of the full index) of each target.
  std::vector<int> shift(targets.size());
  for (int i = 0; i < m; ++i) {
    shift[static_cast<std::size_t>(i)] = n - 1 - targets[static_cast<std::size_t>(i)];
  }

  const std::uint64_t dim = dim_of(n);
  const std::uint64_t block = dim_of(m);
  std::uint64_t target_mask = 0;
  for (int s : shift) {
    target_mask |= 1ull << s;
  }

  ComplexVector out = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  ComplexVector gathered(static_cast<Eigen::Index>(block));
  for (std::uint64_t base = 0; base < dim; ++base) {
    if ((base & target_mask) != 0) {
      continue;  // handled with its block representative
    }
    for (std::uint64_t sub = 0; sub < block; ++sub) {
      std::uint64_t idx = base;
      for (int i = 0; i < m; ++i) {
        if ((sub >> (m - 1 - i)) & 1ull) {
          idx |= 1ull << shift[static_cast<std::size_t>(i)];
        }
      }
      gathered(static_cast<Eigen::Index>(sub)) = state.amplitude(idx);
    }
    ComplexVector transformed = u * gathered;
    for (std::uint64_t sub = 0; sub < block; ++sub) {
      std::uint64_t idx = base;
      for (int i = 0; i < m; ++i) {
        if ((sub >> (m - 1 - i)) & 1ull) {
          idx |= 1ull << shift[static_cast<std::size_t>(i)];
        }
      }
      out(static_cast<Eigen::Index>(idx)) = transformed(static_cast<Eigen::Index>(sub));
    }
  }
  return StateVector(n, std::move(out));
}

StateVector apply_gate(const StateVector& state, const Gate& gate) {
  gate.validate(state.num_qubits());
  return apply_unitary_on_subsystem(state, gate.matrix(), gate.targets);
}

StateVector apply_circuit(const StateVector& state, const Circuit& circuit) {
  if (circuit.num_qubits != state.num_qubits()) {
    throw std::invalid_argument("circuit register size does not match state");
  }
  circuit.validate();
  StateVector current = state;
  for (const Gate& g : circuit.gates) {
    current = apply_gate(current, g);
  }
  return current;
}

std::map<std::uint64_t, double> measurement_distribution(const StateVector& state,
                                                         const std::vector<int>& targets) {
  if (targets.empty()) {
    throw std::invalid_argument("measurement needs at least one target");
  }
  const int n = state.num_qubits();
  const int m = static_cast<int>(targets.size());
  std::vector<int> shift(targets.size());
  for (int i = 0; i < m; ++i) {
    const int q = targets[static_cast<std::size_t>(i)];
    if (q < 0 || q >= n) {
      throw std::invalid_argument("measurement target out of range");
    }
    shift[static_cast<std::size_t>(i)] = n - 1 - q;
  }
  std::map<std::uint64_t, double> dist;
  const std::uint64_t dim = dim_of(n);
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    const double p = std::norm(state.amplitude(idx));
    if (p == 0.0) {
      continue;
    }
    std::uint64_t outcome = 0;
    for (int i = 0; i < m; ++i) {
      outcome |= ((idx >> shift[static_cast<std::size_t>(i)]) & 1ull) << (m - 1 - i);
    }
    dist[outcome] += p;
  }
  return dist;
}

std::vector<MeasurementOutcome> measure_subsystem_exact(const StateVector& state,
                                                        const std::vector<int>& targets) {
  const int n = state.num_qubits();
  const int m = static_cast<int>(targets.size());
  std::map<std::uint64_t, double> dist = measurement_distribution(state, targets);

  std::vector<int> shift(targets.size());
  for (int i = 0; i < m; ++i) {
    shift[static_cast<std::size_t>(i)] = n - 1 - targets[static_cast<std::size_t>(i)];
  }

  std::vector<MeasurementOutcome> outcomes;
  const std::uint64_t dim = dim_of(n);
  for (const auto& [outcome, prob] : dist) {
    if (prob < tol::kPrune) {
      continue;
    }
    ComplexVector collapsed = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
      bool match = true;
      for (int i = 0; i < m; ++i) {
        const std::uint64_t bit = (idx >> shift[static_cast<std::size_t>(i)]) & 1ull;
        if (bit != ((outcome >> (m - 1 - i)) & 1ull)) {
          match = false;
          break;
        }
      }
      if (match) {
        collapsed(static_cast<Eigen::Index>(idx)) = state.amplitude(idx);
      }
    }
    collapsed /= std::sqrt(prob);
    outcomes.push_back(MeasurementOutcome{outcome, prob, StateVector(n, std::move(collapsed))});
  }
  return outcomes;
}

ShotCounts sample_shots(const std::map<std::uint64_t, double>& distribution, std::uint64_t shots,
                        Rng& rng) {
  double sum = 0.0;
  for (const auto& [outcome, p] : distribution) {
    if (p < 0.0) {
      throw std::invalid_argument("negative probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument("probabilities do not sum to 1");
  }

  // Cumulative table in ascending outcome order keeps sampling reproducible.
  std::vector<std::pair<std::uint64_t, double>> cumulative;
  cumulative.reserve(distribution.size());
  double acc = 0.0;
  for (const auto& [outcome, p] : distribution) {
    acc += p;
    cumulative.emplace_back(outcome, acc);
  }

  ShotCounts result;
  result.total_shots = shots;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double x = rng.uniform() * sum;
    auto it = std::lower_bound(cumulative.begin(), cumulative.end(), x,
                               [](const auto& entry, double v) { return entry.second < v; });
    if (it == cumulative.end()) {
      --it;
    }
    result.counts[it->first] += 1;
  }
  return result;
}

namespace {

Circuit swap_test_circuit(int n) {
  Circuit c;
  c.num_qubits = 1 + 2 * n;
  c.gates.push_back(Gate::h(0));
  for (int q = 0; q < n; ++q) {
    c.gates.push_back(Gate::cswap(0, 1 + q, 1 + n + q));
  }
  c.gates.push_back(Gate::h(0));
  return c;
}

}  // namespace

double swap_test_exact(const StateVector& psi, const StateVector& phi) {
  if (psi.num_qubits() != phi.num_qubits()) {
    throw std::invalid_argument("swap test needs equal register sizes");
  }
  const int n = psi.num_qubits();
  StateVector input = StateVector::zero(1).tensor(psi).tensor(phi);
  StateVector output = apply_circuit(input, swap_test_circuit(n));
  std::map<std::uint64_t, double> dist = measurement_distribution(output, {0});
  const double p0 = dist.count(0) ? dist.at(0) : 0.0;
  return 2.0 * p0 - 1.0;
}

double swap_test(const StateVector& psi, const StateVector& phi, std::uint64_t shots, Rng& rng) {
  if (shots == 0) {
    return swap_test_exact(psi, phi);
  }
  if (psi.num_qubits() != phi.num_qubits()) {
    throw std::invalid_argument("swap test needs equal register sizes");
  }
  const int n = psi.num_qubits();
  StateVector input = StateVector::zero(1).tensor(psi).tensor(phi);
  StateVector output = apply_circuit(input, swap_test_circuit(n));
  std::map<std::uint64_t, double> dist = measurement_distribution(output, {0});
  ShotCounts counts = sample_shots(dist, shots, rng);
  const double p0 =
      static_cast<double>(counts.counts.count(0) ? counts.counts.at(0) : 0) /
      static_cast<double>(shots);
  return std::clamp(2.0 * p0 - 1.0, 0.0, 1.0);
}

const Circuit& concurrence_readout_block() {
  // Fixed wiring of the two-copy concurrence readout. The |0000> row of
  // this gate sequence is (<1100| - <0110|)/sqrt(2), so on |psi>(x)|psi>
  // the returned amplitude is (c11*c00 - c01*c10)/sqrt(2), whose magnitude
  // is C(psi)/(2 sqrt 2). Validated against the closed-form concurrence in
  // the test suite.
  static const Circuit block = [] {
    Circuit c;
    c.num_qubits = 4;
    c.gates = {
        Gate::r_conc(0), Gate::r_conc(0),  // R^2 on the first copy's A qubit
        Gate::r_conc(1), Gate::r_conc(1),  // R^2 on the first copy's B qubit
        Gate::cx(0, 2),
        Gate::r_conc(0),
    };
    return c;
  }();
  return block;
}

Complex concurrence_circuit_amplitude(const StateVector& psi) {
  if (psi.num_qubits() != 2) {
    throw std::invalid_argument("concurrence readout needs a 2-qubit state");
  }
  StateVector two_copies = psi.tensor(psi);
  StateVector out = apply_circuit(two_copies, concurrence_readout_block());
  return out.amplitude(0);
}

std::string bitstring(std::uint64_t outcome, int num_bits) {
  std::string s(static_cast<std::size_t>(num_bits), '0');
  for (int i = 0; i < num_bits; ++i) {
    if ((outcome >> (num_bits - 1 - i)) & 1ull) {
      s[static_cast<std::size_t>(i)] = '1';
    }
  }
  return s;
}

}  // namespace opse
