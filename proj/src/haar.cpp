#include "opse/haar.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace opse {

namespace {

// Weingarten rational forms, one row per cycle type of S_1..S_4.
struct WgRow {
  CycleType ct;
  double (*numerator)(double);
  double (*denominator)(double);
};

double d2(double d) { return d * d; }
double poly4(double d) { return d2(d) * d2(d) - 5.0 * d2(d) + 4.0; }            // d^4-5d^2+4
double poly4b(double d) { return d2(d) * d2(d) - 10.0 * d2(d) + 9.0; }          // d^4-10d^2+9
double poly6(double d) {                                                        // d^6-14d^4+49d^2-36
  const double x = d2(d);
  return x * x * x - 14.0 * x * x + 49.0 * x - 36.0;
}

const std::vector<WgRow>& wg_table() {
  static const std::vector<WgRow> rows = {
      {{1}, [](double) { return 1.0; }, [](double d) { return d; }},
      {{1, 1}, [](double) { return 1.0; }, [](double d) { return d2(d) - 1.0; }},
      {{2}, [](double) { return -1.0; }, [](double d) { return d * (d2(d) - 1.0); }},
      {{1, 1, 1}, [](double d) { return d2(d) - 2.0; }, [](double d) { return d * poly4(d); }},
      {{1, 2}, [](double) { return -1.0; }, [](double d) { return poly4(d); }},
      {{3}, [](double) { return 2.0; }, [](double d) { return d * poly4(d); }},
      {{1, 1, 1, 1},
       [](double d) { return d2(d) * d2(d) - 8.0 * d2(d) + 6.0; },
       [](double d) { return d2(d) * poly6(d); }},
      {{1, 1, 2}, [](double) { return -1.0; }, [](double d) { return d * poly4b(d); }},
      {{2, 2}, [](double d) { return d2(d) + 6.0; }, [](double d) { return d2(d) * poly6(d); }},
      {{1, 3}, [](double d) { return 2.0 * d2(d) - 3.0; }, [](double d) { return d2(d) * poly6(d); }},
      {{4}, [](double) { return -5.0; }, [](double d) { return d * poly6(d); }},
  };
  return rows;
}

}  // namespace

void Permutation::validate() const {
  const int p = degree();
  if (p < 1 || p > 4) {
    throw std::invalid_argument("permutation degree must be 1..4");
  }
  std::vector<bool> seen(static_cast<std::size_t>(p), false);
  for (int v : images) {
    if (v < 0 || v >= p || seen[static_cast<std::size_t>(v)]) {
      throw std::invalid_argument("not a bijection");
    }
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::compose(const Permutation& other) const {
  if (degree() != other.degree()) {
    throw std::invalid_argument("degree mismatch");
  }
  Permutation out;
  out.images.resize(images.size());
  for (int k = 0; k < degree(); ++k) {
    out.images[static_cast<std::size_t>(k)] =
        images[static_cast<std::size_t>(other.images[static_cast<std::size_t>(k)])];
  }
  return out;
}

Permutation Permutation::inverse() const {
  Permutation out;
  out.images.resize(images.size());
  for (int k = 0; k < degree(); ++k) {
    out.images[static_cast<std::size_t>(images[static_cast<std::size_t>(k)])] = k;
  }
  return out;
}

std::vector<Permutation> Permutation::all(int p) {
  std::vector<int> base(static_cast<std::size_t>(p));
  std::iota(base.begin(), base.end(), 0);
  std::vector<Permutation> out;
  do {
    out.push_back(Permutation{base});
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

CycleType cycle_type(const Permutation& sigma) {
  sigma.validate();
  const int p = sigma.degree();
  std::vector<bool> visited(static_cast<std::size_t>(p), false);
  CycleType ct;
  for (int start = 0; start < p; ++start) {
    if (visited[static_cast<std::size_t>(start)]) {
      continue;
    }
    int len = 0;
    int k = start;
    while (!visited[static_cast<std::size_t>(k)]) {
      visited[static_cast<std::size_t>(k)] = true;
      k = sigma.images[static_cast<std::size_t>(k)];
      ++len;
    }
    ct.push_back(len);
  }
  std::sort(ct.begin(), ct.end());
  return ct;
}

std::vector<CycleType> weingarten_cycle_types() {
  std::vector<CycleType> out;
  for (const WgRow& row : wg_table()) {
    out.push_back(row.ct);
  }
  return out;
}

double weingarten(const CycleType& ct, double d) {
  CycleType sorted = ct;
  std::sort(sorted.begin(), sorted.end());
  for (const WgRow& row : wg_table()) {
    if (row.ct == sorted) {
      const double den = row.denominator(d);
      if (std::abs(den) < 1e-12) {
        throw std::domain_error("Weingarten rational form has a pole at this dimension");
      }
      return row.numerator(d) / den;
    }
  }
  throw std::invalid_argument("cycle type outside S_1..S_4");
}

double monomial_integral(const std::vector<int>& rows, const std::vector<int>& cols,
                         const std::vector<int>& conj_rows, const std::vector<int>& conj_cols,
                         double d) {
  if (rows.size() != cols.size() || conj_rows.size() != conj_cols.size()) {
    throw std::invalid_argument("index lists must pair rows with columns");
  }
  if (rows.size() != conj_rows.size()) {
    return 0.0;  // p != q
  }
  const int p = static_cast<int>(rows.size());
  if (p < 1 || p > 4) {
    throw std::invalid_argument("only p = 1..4 supported");
  }
  double total = 0.0;
  for (const Permutation& sigma : Permutation::all(p)) {
    bool row_match = true;
    for (int k = 0; k < p; ++k) {
      if (rows[static_cast<std::size_t>(k)] !=
          conj_rows[static_cast<std::size_t>(sigma.images[static_cast<std::size_t>(k)])]) {
        row_match = false;
        break;
      }
    }
    if (!row_match) {
      continue;
    }
    for (const Permutation& tau : Permutation::all(p)) {
      bool col_match = true;
      for (int k = 0; k < p; ++k) {
        if (cols[static_cast<std::size_t>(k)] !=
            conj_cols[static_cast<std::size_t>(tau.images[static_cast<std::size_t>(k)])]) {
          col_match = false;
          break;
        }
      }
      if (!col_match) {
        continue;
      }
      total += weingarten(cycle_type(sigma.compose(tau.inverse())), d);
    }
  }
  return total;
}

ComplexMatrix haar_sample(Eigen::Index d, Rng& rng) {
  if (d < 1) {
    throw std::invalid_argument("dimension must be positive");
  }
  ComplexMatrix g(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      g(r, c) = Complex(rng.gaussian(), rng.gaussian()) / std::sqrt(2.0);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Phase fix makes the QR factorization unique, which is what turns
  // "orthonormalized Ginibre" into the Haar distribution.
  for (Eigen::Index k = 0; k < d; ++k) {
    const Complex rkk = r(k, k);
    const double mag = std::abs(rkk);
    q.col(k) *= (mag > 0.0) ? rkk / mag : Complex(1.0, 0.0);
  }
  return q;
}

double avg_gate_fidelity_exact(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols()) {
    throw std::invalid_argument("fidelity needs equal-dimension square matrices");
  }
  const double d = static_cast<double>(u.rows());
  const double overlap = std::norm(hilbert_schmidt_inner(u, v));
  return (overlap + d) / (d * (d + 1.0));
}

MonteCarloEstimate avg_gate_fidelity_mc(const ComplexMatrix& u, const ComplexMatrix& v,
                                        std::uint64_t n_samples, Rng& rng) {
  if (n_samples < 2) {
    throw std::invalid_argument("need at least two samples");
  }
  if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols()) {
    throw std::invalid_argument("fidelity needs equal-dimension square matrices");
  }
  const ComplexMatrix m = u.adjoint() * v;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t s = 0; s < n_samples; ++s) {
    const ComplexMatrix w = haar_sample(m.rows(), rng);
    const ComplexVector psi = w.col(0);  // W |psi_0> with |psi_0> = |0>
    const double val = std::norm(psi.dot(m * psi));
    sum += val;
    sum_sq += val * val;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return MonteCarloEstimate{mean, std::sqrt(var / n), n_samples};
}

}  // namespace opse
