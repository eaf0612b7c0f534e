#include "opse/ansatz.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace opse {

namespace {

const Complex kI(0.0, 1.0);

// CX / CZ on (control, target) embedded into n qubits.
ComplexMatrix embedded_two_qubit(const ComplexMatrix& gate, int control, int target, int n) {
  const std::uint64_t dim = dim_of(n);
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim),
                                          static_cast<Eigen::Index>(dim));
  for (std::uint64_t col = 0; col < dim; ++col) {
    const int cb = bit_of(col, control, n);
    const int tb = bit_of(col, target, n);
    const Eigen::Index sub_col = cb * 2 + tb;
    for (Eigen::Index sub_row = 0; sub_row < 4; ++sub_row) {
      const Complex g = gate(sub_row, sub_col);
      if (g == Complex(0.0, 0.0)) {
        continue;
      }
      std::uint64_t row = col;
      const std::uint64_t cmask = 1ull << (n - 1 - control);
      const std::uint64_t tmask = 1ull << (n - 1 - target);
      row = (row & ~cmask) | (((sub_row >> 1) & 1) ? cmask : 0ull);
      row = (row & ~tmask) | ((sub_row & 1) ? tmask : 0ull);
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += g;
    }
  }
  return out;
}

ComplexMatrix cx_matrix() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

ComplexMatrix cz_matrix() {
  ComplexMatrix m = ComplexMatrix::Identity(4, 4);
  m(3, 3) = -1;
  return m;
}

ComplexMatrix layer_factor(const AnsatzLayer& layer, double theta, int n) {
  return exp_i_theta_pauli(theta, layer.generator) * entangler_matrix(layer.entangler, n);
}

bool analytic_supported(MeasureKind m, WeightFunction f) {
  return m == MeasureKind::Tsallis2 && f == WeightFunction::Square;
}

// Tr_A(a b^dagger) for system-register vectors a, b under the split.
ComplexMatrix partial_trace_a_outer(const ComplexVector& a, const ComplexVector& b,
                                    const BipartiteSplit& split, int n) {
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
  ComplexMatrix out =
      ComplexMatrix::Zero(static_cast<Eigen::Index>(db), static_cast<Eigen::Index>(db));
  for (std::uint64_t ab = 0; ab < da; ++ab) {
    for (std::uint64_t b1 = 0; b1 < db; ++b1) {
      const Complex lhs = a(static_cast<Eigen::Index>(full_index(ab, b1)));
      if (lhs == Complex(0.0, 0.0)) {
        continue;
      }
      for (std::uint64_t b2 = 0; b2 < db; ++b2) {
        out(static_cast<Eigen::Index>(b1), static_cast<Eigen::Index>(b2)) +=
            lhs * std::conj(b(static_cast<Eigen::Index>(full_index(ab, b2))));
      }
    }
  }
  return out;
}

// m_u[s] = sum_w psi[s, w] conj(u[w]); the system-register contraction of
// the purification against an ancilla vector.
ComplexVector contract_ancilla(const Purification& p, const ComplexVector& u) {
  const Eigen::Index sys = p.system_dim();
  const Eigen::Index anc = p.ancilla_dim();
  ComplexVector out = ComplexVector::Zero(sys);
  for (Eigen::Index s = 0; s < sys; ++s) {
    Complex acc = 0.0;
    for (Eigen::Index w = 0; w < anc; ++w) {
      acc += p.state.amplitude(static_cast<std::uint64_t>(s * anc + w)) * std::conj(u(w));
    }
    out(s) = acc;
  }
  return out;
}

}  // namespace

void Ansatz::validate() const {
  if (num_qubits < 1) {
    throw std::invalid_argument("ansatz needs at least one qubit");
  }
  if (layers.empty()) {
    throw std::invalid_argument("ansatz needs at least one layer");
  }
  for (const AnsatzLayer& l : layers) {
    if (static_cast<int>(l.generator.size()) != num_qubits) {
      throw std::invalid_argument("generator string length does not match qubit count");
    }
    for (char c : l.generator) {
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
        throw std::invalid_argument("generator must be a Pauli string");
      }
    }
  }
}

void OptimizerConfig::validate() const {
  if (learning_rate <= 0.0) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (fd_step <= 0.0) {
    throw std::invalid_argument("finite-difference step must be positive");
  }
  if (max_iters < 0 || restarts < 1) {
    throw std::invalid_argument("bad iteration/restart counts");
  }
}

ComplexMatrix entangler_matrix(EntanglerKind kind, int num_qubits) {
  const Eigen::Index dim = static_cast<Eigen::Index>(dim_of(num_qubits));
  ComplexMatrix e = ComplexMatrix::Identity(dim, dim);
  if (kind == EntanglerKind::None || num_qubits < 2) {
    return e;
  }
  const ComplexMatrix gate = (kind == EntanglerKind::CxLadder) ? cx_matrix() : cz_matrix();
  for (int q = 0; q + 1 < num_qubits; ++q) {
    e = embedded_two_qubit(gate, q, q + 1, num_qubits) * e;
  }
  return e;
}

ComplexMatrix build_unitary(const Ansatz& a, const ParameterVector& theta) {
  a.validate();
  if (static_cast<int>(theta.size()) != a.depth()) {
    throw std::invalid_argument("parameter count does not match ansatz depth");
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(dim_of(a.num_qubits));
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  for (int l = 0; l < a.depth(); ++l) {
    u = u * layer_factor(a.layers[static_cast<std::size_t>(l)],
                         theta[static_cast<std::size_t>(l)], a.num_qubits);
  }
  return u;
}

Ansatz random_ansatz(int num_qubits, int depth, Rng& rng) {
  if (depth < 1) {
    throw std::invalid_argument("depth must be at least 1");
  }
  if (num_qubits < 1) {
    throw std::invalid_argument("ansatz needs at least one qubit");
  }
  static const char kLabels[4] = {'I', 'X', 'Y', 'Z'};
  Ansatz a;
  a.num_qubits = num_qubits;
  std::uint64_t num_strings = 1;
  for (int q = 0; q < num_qubits; ++q) {
    num_strings *= 4;
  }
  for (int l = 0; l < depth; ++l) {
    // uniform over the 4^n - 1 non-identity strings
    std::uint64_t code = rng.uniform_index(num_strings - 1) + 1;
    std::string gen(static_cast<std::size_t>(num_qubits), 'I');
    for (int q = num_qubits - 1; q >= 0; --q) {
      gen[static_cast<std::size_t>(q)] = kLabels[code % 4];
      code /= 4;
    }
    a.layers.push_back(AnsatzLayer{gen, EntanglerKind::CxLadder});
  }
  return a;
}

SplitParts split_at(const Ansatz& a, const ParameterVector& theta, int layer) {
  a.validate();
  if (layer < 1 || layer > a.depth()) {
    throw std::invalid_argument("layer index out of range");
  }
  if (static_cast<int>(theta.size()) != a.depth()) {
    throw std::invalid_argument("parameter count does not match ansatz depth");
  }
  const Eigen::Index dim = static_cast<Eigen::Index>(dim_of(a.num_qubits));
  ComplexMatrix left = ComplexMatrix::Identity(dim, dim);
  ComplexMatrix right = ComplexMatrix::Identity(dim, dim);
  for (int l = 0; l < layer; ++l) {
    left = left * layer_factor(a.layers[static_cast<std::size_t>(l)],
                               theta[static_cast<std::size_t>(l)], a.num_qubits);
  }
  for (int l = layer; l < a.depth(); ++l) {
    right = right * layer_factor(a.layers[static_cast<std::size_t>(l)],
                                 theta[static_cast<std::size_t>(l)], a.num_qubits);
  }
  return SplitParts{std::move(left),
                    pauli_string_matrix(a.layers[static_cast<std::size_t>(layer - 1)].generator),
                    std::move(right)};
}

namespace {

// Derivative split around layer j: left = F_1 .. F_{j-1} exp(i theta_j V_j),
// right = E_j F_{j+1} .. F_L, so that d/dtheta_j U = i * left * V_j * right.
struct GradSplit {
  ComplexMatrix left;
  ComplexMatrix right;
  ComplexMatrix generator;
};

GradSplit grad_split(const Ansatz& a, const ParameterVector& theta, int layer) {
  const Eigen::Index dim = static_cast<Eigen::Index>(dim_of(a.num_qubits));
  ComplexMatrix left = ComplexMatrix::Identity(dim, dim);
  for (int l = 0; l + 1 < layer; ++l) {
    left = left * layer_factor(a.layers[static_cast<std::size_t>(l)],
                               theta[static_cast<std::size_t>(l)], a.num_qubits);
  }
  const AnsatzLayer& lj = a.layers[static_cast<std::size_t>(layer - 1)];
  left = left * exp_i_theta_pauli(theta[static_cast<std::size_t>(layer - 1)], lj.generator);
  ComplexMatrix right = entangler_matrix(lj.entangler, a.num_qubits);
  for (int l = layer; l < a.depth(); ++l) {
    right = right * layer_factor(a.layers[static_cast<std::size_t>(l)],
                                 theta[static_cast<std::size_t>(l)], a.num_qubits);
  }
  return GradSplit{std::move(left), std::move(right), pauli_string_matrix(lj.generator)};
}

}  // namespace

ComplexMatrix grad_projector(const Ansatz& a, const ParameterVector& theta, int layer,
                             std::uint64_t ancilla_index) {
  a.validate();
  if (layer < 1 || layer > a.depth()) {
    throw std::invalid_argument("layer index out of range");
  }
  if (ancilla_index >= dim_of(a.num_qubits)) {
    throw std::invalid_argument("ancilla basis index out of range");
  }
  const GradSplit gs = grad_split(a, theta, layer);
  // L^dagger e_i is the conjugated i-th row of L.
  const ComplexVector x = gs.left.row(static_cast<Eigen::Index>(ancilla_index)).adjoint();
  // dU = i L V R gives d(U^dagger Pi U) = i R^dagger [L^dagger Pi L, V] R;
  // with Pi = |i><i| the inner commutator is rank 2:
  // [x x^dagger, V] = x (Vx)^dagger - (Vx) x^dagger.
  const ComplexVector vx = gs.generator * x;
  const ComplexMatrix inner = x * vx.adjoint() - vx * x.adjoint();
  return kI * (gs.right.adjoint() * inner * gs.right);
}

ParameterVector grad_cost(const Purification& p, const Ansatz& a, const ParameterVector& theta,
                          MeasureKind m, WeightFunction f, const BipartiteSplit& split,
                          GradientMode mode, double fd_step) {
  a.validate();
  split.validate(p.system_qubits);
  if (static_cast<int>(theta.size()) != a.depth()) {
    throw std::invalid_argument("parameter count does not match ansatz depth");
  }
  if (static_cast<Eigen::Index>(dim_of(a.num_qubits)) != p.ancilla_dim()) {
    throw std::invalid_argument("ansatz register does not match the ancilla");
  }

  if (mode == GradientMode::FiniteDiff) {
    if (fd_step <= 0.0) {
      throw std::invalid_argument("finite-difference step must be positive");
    }
    ParameterVector grad(theta.size(), 0.0);
    ParameterVector probe = theta;
    for (std::size_t l = 0; l < theta.size(); ++l) {
      probe[l] = theta[l] + fd_step;
      const double up = cost_f_d(p, build_unitary(a, probe), m, f, split);
      probe[l] = theta[l] - fd_step;
      const double down = cost_f_d(p, build_unitary(a, probe), m, f, split);
      probe[l] = theta[l];
      grad[l] = (up - down) / (2.0 * fd_step);
    }
    return grad;
  }

  if (!analytic_supported(m, f)) {
    throw std::invalid_argument("analytic gradient is only available for the quadratic Tsallis cost");
  }

  ParameterVector grad(theta.size(), 0.0);
  for (int layer = 1; layer <= a.depth(); ++layer) {
    grad[static_cast<std::size_t>(layer - 1)] =
        tsallis_fd_layer_derivative(p, a, theta, layer, split);
  }
  return grad;
}

double tsallis_fd_splice_derivative(const Purification& p, const BipartiteSplit& split,
                                    const ComplexMatrix& left, const ComplexMatrix& v,
                                    const ComplexMatrix& right) {
  split.validate(p.system_qubits);
  const Eigen::Index d = p.ancilla_dim();
  if (left.rows() != d || right.rows() != d || v.rows() != d) {
    throw std::invalid_argument("splice factors do not match the ancilla dimension");
  }
  const ComplexMatrix u = left * right;
  const ComplexMatrix vl = v * left.adjoint();  // V L^dagger
  double derivative = 0.0;
  // Per branch: dq_i = 2 Im<m_z, m_x> and
  // d Tr((Tr_A Phi_i)^2) = -4 Im Tr(B_i Tr_A(m_z m_x^dagger)), both from
  // d(U^dagger Pi U) = i R^dagger [L^dagger Pi L, V] R contracted against
  // the purification.
  for (Eigen::Index i = 0; i < d; ++i) {
    const ComplexVector m_x = contract_ancilla(p, u.row(i).adjoint());
    const double q = m_x.squaredNorm();
    const ComplexVector z = right.adjoint() * vl.col(i);
    const ComplexVector m_z = contract_ancilla(p, z);
    const Complex c = m_z.dot(m_x);  // <m_z, m_x>
    const ComplexMatrix b = partial_trace_a_outer(m_x, m_x, split, p.system_qubits);
    const ComplexMatrix pt = partial_trace_a_outer(m_z, m_x, split, p.system_qubits);
    derivative += 4.0 * (q * c.imag() + (b * pt).trace().imag());
  }
  return derivative;
}

double tsallis_fd_layer_derivative(const Purification& p, const Ansatz& a,
                                   const ParameterVector& theta, int layer,
                                   const BipartiteSplit& split) {
  a.validate();
  if (layer < 1 || layer > a.depth()) {
    throw std::invalid_argument("layer index out of range");
  }
  const GradSplit gs = grad_split(a, theta, layer);
  return tsallis_fd_splice_derivative(p, split, gs.left, gs.generator, gs.right);
}

OptimizeResult optimize(const Purification& p, const Ansatz& a, const OptimizerConfig& cfg,
                        MeasureKind m, WeightFunction f, const BipartiteSplit& split,
                        const Rng& rng) {
  cfg.validate();
  a.validate();
  if (cfg.gradient_mode == GradientMode::Analytic && !analytic_supported(m, f)) {
    throw std::invalid_argument("analytic gradient is only available for the quadratic Tsallis cost");
  }

  OptimizeResult best;
  bool have_best = false;

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng stream = rng.split(static_cast<std::uint64_t>(restart));
    ParameterVector theta(static_cast<std::size_t>(a.depth()));
    for (double& t : theta) {
      t = stream.uniform(0.0, 2.0 * std::numbers::pi);
    }

    std::vector<TracePoint> trace;
    ParameterVector best_theta = theta;
    double best_cost = std::numeric_limits<double>::infinity();
    bool converged = false;

    for (int iter = 0;; ++iter) {
      const double cost = cost_f_d(p, build_unitary(a, theta), m, f, split);
      if (cost < best_cost) {
        best_cost = cost;
        best_theta = theta;
      }
      if (iter == cfg.max_iters) {
        trace.push_back(TracePoint{cost, 0.0});
        break;
      }
      const ParameterVector g =
          grad_cost(p, a, theta, m, f, split, cfg.gradient_mode, cfg.fd_step);
      double norm2 = 0.0;
      for (double gi : g) {
        norm2 += gi * gi;
      }
      const double grad_norm = std::sqrt(norm2);
      trace.push_back(TracePoint{cost, grad_norm});
      if (grad_norm < cfg.grad_tol) {
        converged = true;
        break;
      }
      for (std::size_t l = 0; l < theta.size(); ++l) {
        theta[l] -= cfg.learning_rate * g[l];
      }
    }

    if (!have_best || best_cost < best.best_cost) {
      have_best = true;
      best.best_theta = best_theta;
      best.best_cost = best_cost;
      best.trace = std::move(trace);
      best.converged = converged;
    }
    best.restart_costs.push_back(best_cost);
  }
  return best;
}

}  // namespace opse
