#include "opse/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace opse {

namespace {

const Complex kI(0.0, 1.0);

ComplexMatrix single_pauli(char label) {
  ComplexMatrix m(2, 2);
  switch (label) {
    case 'I':
      m << 1, 0, 0, 1;
      break;
    case 'X':
      m << 0, 1, 1, 0;
      break;
    case 'Y':
      m << 0, -kI, kI, 0;
      break;
    case 'Z':
      m << 1, 0, 0, -1;
      break;
    default:
      throw std::invalid_argument(std::string("unknown Pauli label '") + label + "'");
  }
  return m;
}

}  // namespace

StateVector::StateVector(int num_qubits, ComplexVector amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
  if (num_qubits_ < 0) {
    throw std::invalid_argument("negative qubit count");
  }
  if (amplitudes_.size() != static_cast<Eigen::Index>(dim_of(num_qubits_))) {
    throw std::invalid_argument("amplitude vector length is not 2^num_qubits");
  }
  const double n = amplitudes_.norm();
  if (std::abs(n - 1.0) > tol::kNorm) {
    throw std::invalid_argument("state vector is not normalized");
  }
  if (!amplitudes_.allFinite()) {
    throw std::invalid_argument("state vector has non-finite amplitudes");
  }
}

StateVector StateVector::zero(int num_qubits) { return basis(num_qubits, 0); }

StateVector StateVector::basis(int num_qubits, std::uint64_t index) {
  if (index >= dim_of(num_qubits)) {
    throw std::invalid_argument("basis index out of range");
  }
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim_of(num_qubits)));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(num_qubits, std::move(v));
}

Complex StateVector::inner(const StateVector& other) const {
  if (other.num_qubits_ != num_qubits_) {
    throw std::invalid_argument("inner product between different register sizes");
  }
  return amplitudes_.dot(other.amplitudes_);
}

StateVector StateVector::tensor(const StateVector& other) const {
  const Eigen::Index da = amplitudes_.size();
  const Eigen::Index db = other.amplitudes_.size();
  ComplexVector out(da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    out.segment(i * db, db) = amplitudes_(i) * other.amplitudes_;
  }
  return StateVector(num_qubits_ + other.num_qubits_, std::move(out));
}

StateVector StateVector::phase_fixed() const {
  Eigen::Index argmax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
    const double a = std::abs(amplitudes_(i));
    if (a > best) {
      best = a;
      argmax = i;
    }
  }
  if (best < tol::kAlgebra) {
    return *this;
  }
  const Complex phase = amplitudes_(argmax) / best;
  return StateVector(num_qubits_, amplitudes_ / phase);
}

void BipartiteSplit::validate(int num_qubits) const {
  std::vector<int> all = qubits_a;
  all.insert(all.end(), qubits_b.begin(), qubits_b.end());
  if (static_cast<int>(all.size()) != num_qubits) {
    throw std::invalid_argument("split does not cover the register");
  }
  std::vector<int> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  for (int q = 0; q < num_qubits; ++q) {
    if (sorted[static_cast<std::size_t>(q)] != q) {
      throw std::invalid_argument("split qubit lists must partition 0..n-1");
    }
  }
}

BipartiteSplit BipartiteSplit::leading(int na, int num_qubits) {
  BipartiteSplit s;
  for (int q = 0; q < na; ++q) {
    s.qubits_a.push_back(q);
  }
  for (int q = na; q < num_qubits; ++q) {
    s.qubits_b.push_back(q);
  }
  return s;
}

DensityOperator::DensityOperator(Eigen::Index dim, ComplexMatrix matrix)
    : dim_(dim), matrix_(std::move(matrix)) {
  if (matrix_.rows() != dim_ || matrix_.cols() != dim_) {
    throw std::invalid_argument("density matrix shape mismatch");
  }
  validate();
}

DensityOperator DensityOperator::from_state(const StateVector& psi) {
  const ComplexVector& a = psi.amplitudes();
  return DensityOperator(a.size(), a * a.adjoint());
}

DensityOperator DensityOperator::maximally_mixed(int num_qubits) {
  const Eigen::Index d = static_cast<Eigen::Index>(dim_of(num_qubits));
  return DensityOperator(d, ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

int DensityOperator::num_qubits() const {
  int n = 0;
  while ((Eigen::Index(1) << n) < dim_) {
    ++n;
  }
  if ((Eigen::Index(1) << n) != dim_) {
    throw std::logic_error("density dimension is not a power of two");
  }
  return n;
}

std::vector<std::pair<double, ComplexVector>> DensityOperator::spectral(double floor) const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_);
  std::vector<std::pair<double, ComplexVector>> out;
  for (Eigen::Index i = dim_ - 1; i >= 0; --i) {
    const double w = solver.eigenvalues()(i);
    if (w > floor) {
      out.emplace_back(w, solver.eigenvectors().col(i));
    }
  }
  return out;
}

void DensityOperator::validate() const {
  if (!all_finite(matrix_)) {
    throw std::invalid_argument("density matrix has non-finite entries");
  }
  if (!is_hermitian(matrix_, tol::kNorm)) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(matrix_.trace().real() - 1.0) > tol::kNorm ||
      std::abs(matrix_.trace().imag()) > tol::kNorm) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < tol::kPsdFloor) {
    throw std::invalid_argument("density matrix has a negative eigenvalue");
  }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::uint64_t ra = static_cast<std::uint64_t>(a.rows());
  const std::uint64_t rb = static_cast<std::uint64_t>(b.rows());
  const std::uint64_t ca = static_cast<std::uint64_t>(a.cols());
  const std::uint64_t cb = static_cast<std::uint64_t>(b.cols());
  const std::uint64_t limit = static_cast<std::uint64_t>(std::numeric_limits<Eigen::Index>::max());
  if (ra != 0 && (ra * rb) / ra != rb) {
    throw std::invalid_argument("kron dimension overflow");
  }
  if (ca != 0 && (ca * cb) / ca != cb) {
    throw std::invalid_argument("kron dimension overflow");
  }
  if (ra * rb > limit || ca * cb > limit) {
    throw std::invalid_argument("kron dimension overflow");
  }
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix partial_trace_keep(const ComplexMatrix& rho, const std::vector<int>& keep,
                                 int num_qubits) {
  const std::uint64_t dim = dim_of(num_qubits);
  if (rho.rows() != static_cast<Eigen::Index>(dim) || rho.cols() != static_cast<Eigen::Index>(dim)) {
    throw std::invalid_argument("partial trace dimension mismatch");
  }
  std::vector<int> traced;
  for (int q = 0; q < num_qubits; ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
      traced.push_back(q);
    }
  }
  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());
  const std::uint64_t dk = dim_of(nk);
  const std::uint64_t dt = dim_of(nt);

  // Composes a full-register index from (kept bits, traced bits).
  auto full_index = [&](std::uint64_t kept, std::uint64_t tr) {
    std::uint64_t idx = 0;
    for (int i = 0; i < nk; ++i) {
      const int bit = static_cast<int>((kept >> (nk - 1 - i)) & 1ull);
      idx |= static_cast<std::uint64_t>(bit) << (num_qubits - 1 - keep[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < nt; ++i) {
      const int bit = static_cast<int>((tr >> (nt - 1 - i)) & 1ull);
      idx |= static_cast<std::uint64_t>(bit) << (num_qubits - 1 - traced[static_cast<std::size_t>(i)]);
    }
    return idx;
  };

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::uint64_t m = 0; m < dk; ++m) {
    for (std::uint64_t n = 0; n < dk; ++n) {
      Complex sum = 0.0;
      for (std::uint64_t t = 0; t < dt; ++t) {
        sum += rho(static_cast<Eigen::Index>(full_index(m, t)),
                   static_cast<Eigen::Index>(full_index(n, t)));
      }
      out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = sum;
    }
  }
  return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const BipartiteSplit& split,
                              Subsystem keep) {
  const int n = rho.num_qubits();
  split.validate(n);
  const std::vector<int>& kept = (keep == Subsystem::A) ? split.qubits_a : split.qubits_b;
  ComplexMatrix reduced = partial_trace_keep(rho.matrix(), kept, n);
  const Eigen::Index dim = reduced.rows();
  return DensityOperator(dim, std::move(reduced));
}

ComplexMatrix reduced_density(const StateVector& psi, const std::vector<int>& keep) {
  const int n = psi.num_qubits();
  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
      traced.push_back(q);
    }
  }
  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());
  const std::uint64_t dk = dim_of(nk);
  const std::uint64_t dt = dim_of(nt);

  auto full_index = [&](std::uint64_t kept_bits, std::uint64_t tr) {
    std::uint64_t idx = 0;
    for (int i = 0; i < nk; ++i) {
      const int bit = static_cast<int>((kept_bits >> (nk - 1 - i)) & 1ull);
      idx |= static_cast<std::uint64_t>(bit) << (n - 1 - keep[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < nt; ++i) {
      const int bit = static_cast<int>((tr >> (nt - 1 - i)) & 1ull);
      idx |= static_cast<std::uint64_t>(bit) << (n - 1 - traced[static_cast<std::size_t>(i)]);
    }
    return idx;
  };

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::uint64_t t = 0; t < dt; ++t) {
    ComplexVector col(static_cast<Eigen::Index>(dk));
    for (std::uint64_t m = 0; m < dk; ++m) {
      col(static_cast<Eigen::Index>(m)) = psi.amplitude(full_index(m, t));
    }
    out += col * col.adjoint();
  }
  return out;
}

ComplexMatrix pauli_string_matrix(const std::string& spec) {
  if (spec.empty()) {
    throw std::invalid_argument("empty Pauli string");
  }
  ComplexMatrix out = single_pauli(spec[0]);
  for (std::size_t k = 1; k < spec.size(); ++k) {
    out = kron(out, single_pauli(spec[k]));
  }
  return out;
}

ComplexMatrix exp_i_theta_involutory(double theta, const ComplexMatrix& p) {
  if (p.rows() != p.cols()) {
    throw std::invalid_argument("generator must be square");
  }
  const Eigen::Index d = p.rows();
  return std::cos(theta) * ComplexMatrix::Identity(d, d) + kI * std::sin(theta) * p;
}

ComplexMatrix exp_i_theta_pauli(double theta, const std::string& pauli_spec) {
  return exp_i_theta_involutory(theta, pauli_string_matrix(pauli_spec));
}

Complex hilbert_schmidt_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("Hilbert-Schmidt inner product shape mismatch");
  }
  return (a.adjoint() * b).trace();
}

bool is_unitary(const ComplexMatrix& u, double tolerance) {
  if (u.rows() != u.cols()) {
    return false;
  }
  const ComplexMatrix should_be_id = u.adjoint() * u;
  return (should_be_id - ComplexMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <=
         tolerance;
}

bool is_hermitian(const ComplexMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) {
    return false;
  }
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tolerance;
}

bool all_finite(const ComplexMatrix& m) { return m.allFinite(); }

}  // namespace opse
