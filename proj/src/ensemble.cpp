#include "opse/ensemble.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace opse {

namespace {

using nlohmann::json;

int ceil_log2(std::uint64_t x) {
  int n = 0;
  while (dim_of(n) < x) {
    ++n;
  }
  return n;
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("expected [re, im] pair");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

void PureStateEnsemble::validate() const {
  if (probs.size() != states.size()) {
    throw std::invalid_argument("ensemble probs/states length mismatch");
  }
  if (probs.empty()) {
    throw std::invalid_argument("empty ensemble");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) {
      throw std::invalid_argument("negative ensemble weight");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol::kNorm) {
    throw std::invalid_argument("ensemble weights do not sum to 1");
  }
  const int n = states.front().num_qubits();
  for (const StateVector& s : states) {
    if (s.num_qubits() != n) {
      throw std::invalid_argument("ensemble states live on different registers");
    }
    if (std::abs(s.norm() - 1.0) > tol::kNorm) {
      throw std::invalid_argument("ensemble state is not normalized");
    }
  }
}

Purification build_purification(const PureStateEnsemble& ensemble, int min_ancilla_qubits) {
  ensemble.validate();
  const std::uint64_t d = ensemble.size();
  const int system_qubits = ensemble.states.front().num_qubits();
  const int ancilla_qubits = std::max(ceil_log2(std::max<std::uint64_t>(d, 2)), min_ancilla_qubits);
  const std::uint64_t anc_dim = dim_of(ancilla_qubits);
  const std::uint64_t sys_dim = dim_of(system_qubits);

  ComplexVector amps = ComplexVector::Zero(static_cast<Eigen::Index>(sys_dim * anc_dim));
  for (std::uint64_t i = 0; i < d; ++i) {
    const double w = std::sqrt(ensemble.probs[i]);
    if (w == 0.0) {
      continue;
    }
    const ComplexVector& psi_i = ensemble.states[i].amplitudes();
    for (std::uint64_t s = 0; s < sys_dim; ++s) {
      amps(static_cast<Eigen::Index>(s * anc_dim + i)) = w * psi_i(static_cast<Eigen::Index>(s));
    }
  }
  return Purification{system_qubits, ancilla_qubits,
                      StateVector(system_qubits + ancilla_qubits, std::move(amps))};
}

ComplexMatrix rotated_branch_vectors(const Purification& p, const ComplexMatrix& u) {
  const Eigen::Index anc = p.ancilla_dim();
  const Eigen::Index sys = p.system_dim();
  if (u.rows() != anc || u.cols() != anc) {
    throw std::invalid_argument("ancilla unitary dimension mismatch");
  }
  if (!is_unitary(u, tol::kNorm)) {
    throw std::invalid_argument("ancilla operator is not unitary");
  }
  // column i = system-register block of (I (x) u)|psi> at ancilla value i
  ComplexMatrix blocks(sys, anc);
  for (Eigen::Index s = 0; s < sys; ++s) {
    for (Eigen::Index w = 0; w < anc; ++w) {
      blocks(s, w) = p.state.amplitude(static_cast<std::uint64_t>(s * anc + w));
    }
  }
  return blocks * u.transpose();  // out(s, i) = sum_w u(i, w) blocks(s, w)
}

PureStateEnsemble ensemble_from_unitary(const Purification& p, const ComplexMatrix& u) {
  const ComplexMatrix v = rotated_branch_vectors(p, u);
  PureStateEnsemble out;
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    const double q = v.col(i).squaredNorm();
    if (q < tol::kQPrune) {
      out.probs.push_back(0.0);
      out.states.push_back(StateVector::zero(p.system_qubits));
      continue;
    }
    out.probs.push_back(q);
    out.states.push_back(
        StateVector(p.system_qubits, v.col(i) / std::sqrt(q)).phase_fixed());
  }
  return out;
}

ComplexMatrix unnormalized_phi(const Purification& p, const ComplexMatrix& u, std::uint64_t i) {
  const ComplexMatrix v = rotated_branch_vectors(p, u);
  if (i >= static_cast<std::uint64_t>(v.cols())) {
    throw std::invalid_argument("branch index out of range");
  }
  const ComplexVector vi = v.col(static_cast<Eigen::Index>(i));
  return vi * vi.adjoint();
}

DensityOperator reconstruct_density(const PureStateEnsemble& ensemble) {
  ensemble.validate();
  const Eigen::Index dim = ensemble.states.front().dim();
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    if (ensemble.probs[i] == 0.0) {
      continue;
    }
    const ComplexVector& a = ensemble.states[i].amplitudes();
    rho += ensemble.probs[i] * (a * a.adjoint());
  }
  return DensityOperator(dim, std::move(rho));
}

PureStateEnsemble spectral_ensemble(const DensityOperator& rho, std::size_t min_length) {
  const int n = rho.num_qubits();
  PureStateEnsemble out;
  for (const auto& [w, vec] : rho.spectral()) {
    ComplexVector v = vec / vec.norm();
    out.probs.push_back(w);
    out.states.push_back(StateVector(n, std::move(v)).phase_fixed());
  }
  // renormalize tiny trace lost to dropped eigenvalues
  double sum = 0.0;
  for (double p : out.probs) {
    sum += p;
  }
  for (double& p : out.probs) {
    p /= sum;
  }
  while (out.size() < min_length) {
    out.probs.push_back(0.0);
    out.states.push_back(StateVector::zero(n));
  }
  return out;
}

std::string ensemble_to_json(const PureStateEnsemble& ensemble, Eigen::Index dim_a,
                             Eigen::Index dim_b) {
  ensemble.validate();
  json j;
  j["schema_version"] = 1;
  j["dims"] = json::array({dim_a, dim_b});
  j["probs"] = ensemble.probs;
  json states = json::array();
  for (const StateVector& s : ensemble.states) {
    json amps = json::array();
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
      amps.push_back(complex_to_json(s.amplitude(static_cast<std::uint64_t>(k))));
    }
    states.push_back(amps);
  }
  j["states"] = states;
  return j.dump(2);
}

PureStateEnsemble ensemble_from_json(const std::string& text, Eigen::Index* dim_a,
                                     Eigen::Index* dim_b) {
  const json j = json::parse(text);
  if (!j.contains("dims") || !j.contains("probs") || !j.contains("states")) {
    throw std::invalid_argument("ensemble JSON needs dims, probs and states");
  }
  const Eigen::Index da = j["dims"][0].get<Eigen::Index>();
  const Eigen::Index db = j["dims"][1].get<Eigen::Index>();
  if (dim_a != nullptr) {
    *dim_a = da;
  }
  if (dim_b != nullptr) {
    *dim_b = db;
  }
  const Eigen::Index dim = da * db;
  int n = 0;
  while ((Eigen::Index(1) << n) < dim) {
    ++n;
  }
  if ((Eigen::Index(1) << n) != dim) {
    throw std::invalid_argument("ensemble dims must multiply to a power of 2");
  }
  PureStateEnsemble out;
  out.probs = j["probs"].get<std::vector<double>>();
  for (const json& amps : j["states"]) {
    if (static_cast<Eigen::Index>(amps.size()) != dim) {
      throw std::invalid_argument("ensemble state length does not match dims");
    }
    ComplexVector v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      v(k) = complex_from_json(amps[static_cast<std::size_t>(k)]);
    }
    out.states.push_back(StateVector(n, std::move(v)));
  }
  out.validate();
  return out;
}

std::string density_to_json(const DensityOperator& rho, Eigen::Index dim_a, Eigen::Index dim_b) {
  json j;
  j["schema_version"] = 1;
  j["dims"] = json::array({dim_a, dim_b});
  json rows = json::array();
  for (Eigen::Index r = 0; r < rho.dim(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < rho.dim(); ++c) {
      row.push_back(complex_to_json(rho.matrix()(r, c)));
    }
    rows.push_back(row);
  }
  j["matrix"] = rows;
  return j.dump(2);
}

DensityOperator density_from_json(const std::string& text, Eigen::Index* dim_a,
                                  Eigen::Index* dim_b) {
  const json j = json::parse(text);
  if (!j.contains("dims") || !j.contains("matrix")) {
    throw std::invalid_argument("density JSON needs dims and matrix");
  }
  const Eigen::Index da = j["dims"][0].get<Eigen::Index>();
  const Eigen::Index db = j["dims"][1].get<Eigen::Index>();
  if (dim_a != nullptr) {
    *dim_a = da;
  }
  if (dim_b != nullptr) {
    *dim_b = db;
  }
  const Eigen::Index dim = da * db;
  const json& rows = j["matrix"];
  if (static_cast<Eigen::Index>(rows.size()) != dim) {
    throw std::invalid_argument("density matrix row count does not match dims");
  }
  ComplexMatrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != dim) {
      throw std::invalid_argument("density matrix is not square");
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
    }
  }
  return DensityOperator(dim, std::move(m));
}

}  // namespace opse
