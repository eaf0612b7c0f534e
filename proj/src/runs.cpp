#include "opse/runs.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "opse/estimators.hpp"
#include "opse/version.hpp"

namespace opse {

namespace {

using nlohmann::json;

std::string u64(std::uint64_t v) { return std::to_string(v); }

ExperimentResult make_envelope(const std::string& command,
                               const std::map<std::string, std::string>& config,
                               std::uint64_t seed, json payload) {
  ExperimentResult r;
  r.command = command;
  r.config = config;
  r.seed = seed;
  r.version = kVersion;
  r.timestamp = iso8601_utc_now();
  r.payload = std::move(payload);
  return r;
}

// Purification of the configured density with the configured ancilla size.
Purification purify_source(const DensityOperator& rho, int ancilla_qubits) {
  return build_purification(spectral_ensemble(rho), ancilla_qubits);
}

// Two-parameter landscape ansatz: a Z-string layer and an X-string layer,
// CX-ladder entanglers (single-qubit ancillas get no entangler).
Ansatz landscape_ansatz(int ancilla_qubits) {
  Ansatz a;
  a.num_qubits = ancilla_qubits;
  a.layers.push_back(
      AnsatzLayer{std::string(static_cast<std::size_t>(ancilla_qubits), 'Z'),
                  EntanglerKind::CxLadder});
  a.layers.push_back(
      AnsatzLayer{std::string(static_cast<std::size_t>(ancilla_qubits), 'X'),
                  EntanglerKind::CxLadder});
  return a;
}

double evaluate_cost(const Purification& p, const ComplexMatrix& u, const MeasureSpec& spec,
                     const BipartiteSplit& split, std::uint64_t shots, Rng& rng) {
  if (shots == 0) {
    return cost_f_d(p, u, spec.kind, spec.weight, split);
  }
  return estimate_cost_shots(p, u, spec.kind, spec.weight, split, shots, rng);
}

json verdict_json(const VerdictResult& v) {
  json j;
  j["verdict"] = verdict_name(v.verdict);
  j["achieved_cost"] = v.achieved_cost;
  j["threshold"] = v.threshold;
  return j;
}

}  // namespace

MeasureSpec parse_measure(const std::string& measure, const std::string& f) {
  WeightFunction weight;
  if (f == "square") {
    weight = WeightFunction::Square;
  } else if (f == "identity") {
    weight = WeightFunction::Identity;
  } else {
    throw std::invalid_argument("unknown weight function '" + f + "' (square|identity)");
  }
  if (measure == "tsallis-fd") {
    return MeasureSpec{MeasureKind::Tsallis2, weight};
  }
  if (measure == "eof") {
    return MeasureSpec{MeasureKind::ConcurrenceEof, WeightFunction::Identity};
  }
  if (measure == "convex-roof-tsallis") {
    return MeasureSpec{MeasureKind::Tsallis2, WeightFunction::Identity};
  }
  throw std::invalid_argument("unknown measure '" + measure +
                              "' (tsallis-fd|eof|convex-roof-tsallis)");
}

DensityOperator load_density(const std::string& path, int system_qubits) {
  if (path.empty()) {
    return DensityOperator::maximally_mixed(system_qubits);
  }
  return density_from_json(read_file(path));
}

// --- landscape ---------------------------------------------------------------

std::map<std::string, std::string> LandscapeConfig::echo() const {
  return {
      {"density", density_path.empty() ? "maximally-mixed" : density_path},
      {"system_qubits", std::to_string(system_qubits)},
      {"ancilla_qubits", std::to_string(ancilla_qubits)},
      {"measure", measure},
      {"f", f},
      {"grid", std::to_string(grid)},
      {"shots", u64(shots)},
      {"seed", u64(seed)},
  };
}

CommandOutput run_landscape(const LandscapeConfig& cfg) {
  if (cfg.grid < 1) {
    throw std::invalid_argument("grid resolution must be at least 1");
  }
  const MeasureSpec spec = parse_measure(cfg.measure, cfg.f);
  const DensityOperator rho = load_density(cfg.density_path, cfg.system_qubits);
  const int n = rho.num_qubits();
  const Purification p = purify_source(rho, cfg.ancilla_qubits);
  const BipartiteSplit split = BipartiteSplit::leading(n / 2, n);
  const Ansatz ansatz = landscape_ansatz(p.ancilla_qubits);
  Rng rng(cfg.seed);

  std::ostringstream csv;
  csv << "theta,phi,cost\n";
  double min_cost = std::numeric_limits<double>::infinity();
  double max_cost = -min_cost;
  const double step = 2.0 * std::numbers::pi / cfg.grid;
  for (int i = 0; i < cfg.grid; ++i) {
    for (int j = 0; j < cfg.grid; ++j) {
      const double theta = i * step;
      const double phi = j * step;
      const ComplexMatrix u = build_unitary(ansatz, {theta, phi});
      Rng point_rng = rng.split(static_cast<std::uint64_t>(i * cfg.grid + j));
      const double cost = evaluate_cost(p, u, spec, split, cfg.shots, point_rng);
      min_cost = std::min(min_cost, cost);
      max_cost = std::max(max_cost, cost);
      csv << format_double(theta) << ',' << format_double(phi) << ',' << format_double(cost)
          << '\n';
    }
  }

  json payload;
  payload["min_cost"] = min_cost;
  payload["max_cost"] = max_cost;
  payload["rows"] = cfg.grid * cfg.grid;

  CommandOutput out;
  out.csv = csv.str();
  out.json = make_envelope("landscape", cfg.echo(), cfg.seed, payload).to_json();
  out.summary = "landscape: " + std::to_string(cfg.grid * cfg.grid) +
                " points, min cost " + format_double(min_cost);
  return out;
}

// --- converge ---------------------------------------------------------------

std::map<std::string, std::string> ConvergeConfig::echo() const {
  return {
      {"density", density_path.empty() ? "maximally-mixed" : density_path},
      {"system_qubits", std::to_string(system_qubits)},
      {"ancilla_qubits", std::to_string(ancilla_qubits)},
      {"measure", measure},
      {"f", f},
      {"depth", std::to_string(depth)},
      {"lr", format_double(learning_rate)},
      {"iters", std::to_string(max_iters)},
      {"restarts", std::to_string(restarts)},
      {"grad_tol", format_double(grad_tol)},
      {"shots", u64(shots)},
      {"seed", u64(seed)},
  };
}

CommandOutput run_converge(const ConvergeConfig& cfg) {
  const MeasureSpec spec = parse_measure(cfg.measure, cfg.f);
  const DensityOperator rho = load_density(cfg.density_path, cfg.system_qubits);
  const int n = rho.num_qubits();
  const Purification p = purify_source(rho, cfg.ancilla_qubits);
  const BipartiteSplit split = BipartiteSplit::leading(n / 2, n);

  Rng rng(cfg.seed);
  Ansatz ansatz = random_ansatz(p.ancilla_qubits, cfg.depth, rng);

  OptimizerConfig opt;
  opt.learning_rate = cfg.learning_rate;
  opt.max_iters = cfg.max_iters;
  opt.grad_tol = cfg.grad_tol;
  opt.restarts = cfg.restarts;
  opt.gradient_mode = (spec.kind == MeasureKind::Tsallis2 && spec.weight == WeightFunction::Square)
                          ? GradientMode::Analytic
                          : GradientMode::FiniteDiff;

  const OptimizeResult result =
      optimize(p, ansatz, opt, spec.kind, spec.weight, split, rng.split(0x5eed));

  std::ostringstream csv;
  csv << "iter,cost,grad_norm\n";
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    csv << i << ',' << format_double(result.trace[i].cost) << ','
        << format_double(result.trace[i].grad_norm) << '\n';
  }

  json payload;
  payload["best_cost"] = result.best_cost;
  payload["converged"] = result.converged;
  payload["iterations"] = result.trace.size();
  payload["restart_costs"] = result.restart_costs;
  if (cfg.shots > 0) {
    Rng shot_rng = rng.split(0x5107);
    payload["best_cost_shot_estimate"] = estimate_cost_shots(
        p, build_unitary(ansatz, result.best_theta), spec.kind, spec.weight, split, cfg.shots,
        shot_rng);
  }

  CommandOutput out;
  out.csv = csv.str();
  out.json = make_envelope("converge", cfg.echo(), cfg.seed, payload).to_json();
  out.summary = "converge: best cost " + format_double(result.best_cost) + " after " +
                std::to_string(result.trace.size()) + " iterations (best restart)";
  return out;
}

// --- variance ---------------------------------------------------------------

std::map<std::string, std::string> VarianceCmdConfig::echo() const {
  return {
      {"density", density_path.empty() ? "maximally-mixed" : density_path},
      {"system_qubits", std::to_string(system_qubits)},
      {"k_min", std::to_string(k_min)},
      {"k_max", std::to_string(k_max)},
      {"mode", mode},
      {"depth", std::to_string(depth)},
      {"samples", std::to_string(samples)},
      {"layer_index", std::to_string(layer_index)},
      {"workers", std::to_string(workers)},
      {"shots", u64(shots)},
      {"seed", u64(seed)},
  };
}

CommandOutput run_variance(const VarianceCmdConfig& cfg) {
  if (cfg.shots != 0) {
    throw std::invalid_argument(
        "the variance scan differentiates the cost analytically; --shots does not apply");
  }
  if (cfg.k_min > cfg.k_max) {
    throw std::invalid_argument("k-min must not exceed k-max");
  }
  VarianceScanConfig scan;
  for (int k = cfg.k_min; k <= cfg.k_max; ++k) {
    scan.k_range.push_back(k);
  }
  if (cfg.mode == "haar-exact") {
    scan.mode = SampleMode::HaarExact;
  } else if (cfg.mode == "ansatz") {
    scan.mode = SampleMode::Ansatz;
  } else {
    throw std::invalid_argument("unknown mode '" + cfg.mode + "' (haar-exact|ansatz)");
  }
  scan.depth = cfg.depth;
  scan.n_samples = cfg.samples;
  scan.system_qubits = cfg.system_qubits;
  if (!cfg.density_path.empty()) {
    scan.source = load_density(cfg.density_path, cfg.system_qubits);
    scan.source_label = cfg.density_path;
  }
  scan.layer_index = cfg.layer_index;
  scan.seed = cfg.seed;
  scan.workers = cfg.workers;

  const ScanResult result = variance_scan(scan);

  json payload;
  json points = json::array();
  for (const ScanPoint& pt : result.points) {
    json row;
    row["k"] = pt.k;
    row["d"] = pt.d;
    row["mean_grad"] = pt.mean_grad;
    row["stderr_mean"] = pt.stderr_mean;
    row["var_grad"] = pt.var_grad;
    row["stderr_var"] = pt.stderr_var;
    row["n"] = pt.n;
    points.push_back(row);
  }
  payload["points"] = points;
  if (result.fit.has_value()) {
    json fit;
    fit["slope"] = result.fit->slope;
    fit["intercept"] = result.fit->intercept;
    fit["slope_stderr"] = result.fit->slope_stderr;
    fit["slope_ci95_lo"] = result.fit->slope_ci95_lo;
    fit["slope_ci95_hi"] = result.fit->slope_ci95_hi;
    payload["fit"] = fit;
  }

  CommandOutput out;
  out.csv = scan_to_csv(result);
  out.json = make_envelope("variance", cfg.echo(), cfg.seed, payload).to_json();
  out.summary = result.fit.has_value()
                    ? "variance: fitted log2 slope " + format_double(result.fit->slope)
                    : "variance: single-k scan, no fit";
  return out;
}

// --- haar-check ---------------------------------------------------------------

std::map<std::string, std::string> HaarCheckConfig::echo() const {
  std::string dims_str;
  for (int d : dims) {
    dims_str += (dims_str.empty() ? "" : ",") + std::to_string(d);
  }
  std::string qdims_str;
  for (int d : q_dims) {
    qdims_str += (qdims_str.empty() ? "" : ",") + std::to_string(d);
  }
  return {
      {"dims", dims_str},        {"samples", u64(samples)}, {"q_dims", qdims_str},
      {"q_samples", u64(q_samples)}, {"shots", u64(shots)},     {"seed", u64(seed)},
  };
}

namespace {

// Canonical permutation with the given cycle type: consecutive cycles.
Permutation canonical_permutation(const CycleType& ct) {
  Permutation sigma;
  int base = 0;
  for (int len : ct) {
    for (int k = 0; k < len; ++k) {
      sigma.images.push_back(base + (k + 1) % len);
    }
    base += len;
  }
  return sigma;
}

struct CheckRow {
  std::string name;
  double statistic;
  double expected;
  double score;  // |z| or margin, depending on the check
  bool pass;
};

json check_row_json(const CheckRow& row) {
  json j;
  j["check"] = row.name;
  j["statistic"] = row.statistic;
  j["expected"] = row.expected;
  j["score"] = row.score;
  j["pass"] = row.pass;
  return j;
}

}  // namespace

CommandOutput run_haar_check(const HaarCheckConfig& cfg,
                             const std::function<double(const CycleType&, double)>& wg_override) {
  if (cfg.shots != 0) {
    throw std::invalid_argument("haar-check is a moment cross-check; --shots does not apply");
  }
  const auto wg = wg_override ? wg_override
                              : [](const CycleType& ct, double d) { return weingarten(ct, d); };
  Rng rng(cfg.seed);
  std::vector<CheckRow> rows;

  // Table rows against Monte Carlo, every cycle type, every dimension.
  for (int d : cfg.dims) {
    const Eigen::Index dim = d;
    std::vector<CycleType> types = weingarten_cycle_types();

    // Index patterns isolating each row: distinct row/column indices force
    // sigma to the canonical permutation and tau to the identity, so the
    // monomial's Haar average is exactly Wg(cycle type).
    struct Pattern {
      CycleType ct;
      std::vector<int> rows, cols, conj_rows, conj_cols;
      double exact;
    };
    std::vector<Pattern> patterns;
    for (const CycleType& ct : types) {
      int p = 0;
      for (int part : ct) {
        p += part;
      }
      if (d < p) {
        continue;
      }
      Pattern pat;
      pat.ct = ct;
      const Permutation sigma = canonical_permutation(ct);
      for (int k = 0; k < p; ++k) {
        pat.rows.push_back(sigma.images[static_cast<std::size_t>(k)]);
        pat.cols.push_back(k);
        pat.conj_rows.push_back(k);
        pat.conj_cols.push_back(k);
      }
      pat.exact = wg(ct, static_cast<double>(d));
      patterns.push_back(pat);
    }

    // One stream of Haar samples serves every pattern at this dimension.
    std::vector<double> sums(patterns.size(), 0.0);
    std::vector<double> sums_sq(patterns.size(), 0.0);
    Rng stream = rng.split(static_cast<std::uint64_t>(d));
    for (std::uint64_t s = 0; s < cfg.samples; ++s) {
      const ComplexMatrix u = haar_sample(dim, stream);
      for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
        const Pattern& pat = patterns[pi];
        Complex prod(1.0, 0.0);
        for (std::size_t k = 0; k < pat.rows.size(); ++k) {
          prod *= u(pat.rows[k], pat.cols[k]);
        }
        for (std::size_t k = 0; k < pat.conj_rows.size(); ++k) {
          prod *= std::conj(u(pat.conj_rows[k], pat.conj_cols[k]));
        }
        sums[pi] += prod.real();
        sums_sq[pi] += prod.real() * prod.real();
      }
    }
    const double n = static_cast<double>(cfg.samples);
    for (std::size_t pi = 0; pi < patterns.size(); ++pi) {
      const double mean = sums[pi] / n;
      const double var = std::max(0.0, (sums_sq[pi] - n * mean * mean) / (n - 1.0));
      const double se = std::sqrt(var / n);
      const double z = se > 0.0 ? (mean - patterns[pi].exact) / se : 0.0;
      std::string ct_name;
      for (int part : patterns[pi].ct) {
        ct_name += (ct_name.empty() ? "" : ",") + std::to_string(part);
      }
      rows.push_back(CheckRow{"weingarten(" + ct_name + ") d=" + std::to_string(d), mean,
                              patterns[pi].exact, std::abs(z), std::abs(z) < 5.0});
    }
  }

  // Average gate fidelity: exact formula against Monte Carlo.
  for (int d : {2, 4}) {
    for (int pair = 0; pair < 5; ++pair) {
      Rng stream = rng.split(1000 + static_cast<std::uint64_t>(100 * d + pair));
      const ComplexMatrix u = haar_sample(d, stream);
      const ComplexMatrix v = haar_sample(d, stream);
      const double exact = avg_gate_fidelity_exact(u, v);
      const MonteCarloEstimate mc = avg_gate_fidelity_mc(u, v, cfg.samples / 2, stream);
      const double z = mc.stderr_ > 0.0 ? (mc.estimate - exact) / mc.stderr_ : 0.0;
      rows.push_back(CheckRow{"avg_gate_fidelity d=" + std::to_string(d) + " pair " +
                                  std::to_string(pair),
                              mc.estimate, exact, std::abs(z), std::abs(z) < 5.0});
    }
    Rng stream = rng.split(2000 + static_cast<std::uint64_t>(d));
    const ComplexMatrix u = haar_sample(d, stream);
    const double self = avg_gate_fidelity_exact(u, u);
    rows.push_back(
        CheckRow{"avg_gate_fidelity identity d=" + std::to_string(d), self, 1.0,
                 std::abs(self - 1.0), std::abs(self - 1.0) < 1e-12});
  }

  // E[q_i] = 1/d and E[1/q_i^2] >= d^2 over Haar ancilla rotations.
  // A random full-rank source keeps the q_i distribution non-degenerate
  // (the maximally mixed state at d = rank gives constant q_i).
  for (int d : cfg.q_dims) {
    int k = 0;
    while ((1 << k) < d) {
      ++k;
    }
    if ((1 << k) != d) {
      throw std::invalid_argument("q-check dimensions must be powers of two");
    }
    Rng source_rng = rng.split(4000 + static_cast<std::uint64_t>(d));
    ComplexMatrix g(4, 4);
    for (Eigen::Index a = 0; a < 4; ++a) {
      for (Eigen::Index b = 0; b < 4; ++b) {
        g(a, b) = Complex(source_rng.gaussian(), source_rng.gaussian());
      }
    }
    ComplexMatrix m = g * g.adjoint();
    m /= m.trace().real();
    const DensityOperator rho(4, std::move(m));
    const Purification p = build_purification(spectral_ensemble(rho), k);
    Rng stream = rng.split(3000 + static_cast<std::uint64_t>(d));
    double sum_q = 0.0, sum_q_sq = 0.0, sum_inv = 0.0;
    std::uint64_t clipped = 0;
    for (std::uint64_t s = 0; s < cfg.q_samples; ++s) {
      const ComplexMatrix u = haar_sample(d, stream);
      const ComplexMatrix v = rotated_branch_vectors(p, u);
      const std::uint64_t i = stream.uniform_index(static_cast<std::uint64_t>(d));
      double q = v.col(static_cast<Eigen::Index>(i)).squaredNorm();
      sum_q += q;
      sum_q_sq += q * q;
      if (q < 1e-6) {
        q = 1e-6;
        ++clipped;
      }
      sum_inv += 1.0 / (q * q);
    }
    const double n = static_cast<double>(cfg.q_samples);
    const double mean_q = sum_q / n;
    const double var_q = std::max(0.0, (sum_q_sq - n * mean_q * mean_q) / (n - 1.0));
    const double se_q = std::sqrt(var_q / n);
    const double z = se_q > 0.0 ? (mean_q - 1.0 / d) / se_q : 0.0;
    rows.push_back(CheckRow{"mean_q d=" + std::to_string(d), mean_q, 1.0 / d, std::abs(z),
                            std::abs(z) < 5.0});
    const double mean_inv = sum_inv / n;
    rows.push_back(CheckRow{"mean_inv_q_sq d=" + std::to_string(d) +
                                " (clipped " + std::to_string(clipped) + ")",
                            mean_inv, static_cast<double>(d) * d, mean_inv,
                            mean_inv >= static_cast<double>(d) * d});
  }

  bool all_pass = true;
  json checks = json::array();
  for (const CheckRow& row : rows) {
    all_pass = all_pass && row.pass;
    checks.push_back(check_row_json(row));
  }
  json payload;
  payload["checks"] = checks;
  payload["all_pass"] = all_pass;

  CommandOutput out;
  out.json = make_envelope("haar-check", cfg.echo(), cfg.seed, payload).to_json();
  out.passed = all_pass;
  out.summary = std::string("haar-check: ") + (all_pass ? "all checks passed" : "FAILURES") +
                " (" + std::to_string(rows.size()) + " checks)";
  return out;
}

// --- witness ---------------------------------------------------------------

std::map<std::string, std::string> WitnessConfig::echo() const {
  return {
      {"density", density_path.empty() ? "(inline)" : density_path},
      {"ancilla_qubits", std::to_string(ancilla_qubits)},
      {"measure", measure},
      {"f", f},
      {"threshold", format_double(threshold)},
      {"depth", std::to_string(depth)},
      {"lr", format_double(learning_rate)},
      {"iters", std::to_string(max_iters)},
      {"restarts", std::to_string(restarts)},
      {"shots", u64(shots)},
      {"seed", u64(seed)},
  };
}

CommandOutput run_witness(const WitnessConfig& cfg) {
  const MeasureSpec spec = parse_measure(cfg.measure, cfg.f);
  DensityOperator rho = cfg.density.has_value() ? *cfg.density
                                                : density_from_json(read_file(cfg.density_path));
  const int n = rho.num_qubits();
  const int ancilla = cfg.ancilla_qubits > 0 ? cfg.ancilla_qubits : n;
  const Purification p = purify_source(rho, ancilla);
  const BipartiteSplit split = BipartiteSplit::leading(n / 2, n);

  Rng rng(cfg.seed);
  Ansatz ansatz = random_ansatz(ancilla, cfg.depth, rng);

  OptimizerConfig opt;
  opt.learning_rate = cfg.learning_rate;
  opt.max_iters = cfg.max_iters;
  opt.grad_tol = cfg.grad_tol;
  opt.restarts = cfg.restarts;
  opt.gradient_mode = (spec.kind == MeasureKind::Tsallis2 && spec.weight == WeightFunction::Square)
                          ? GradientMode::Analytic
                          : GradientMode::FiniteDiff;

  const OptimizeResult result =
      optimize(p, ansatz, opt, spec.kind, spec.weight, split, rng.split(0x5eed));

  double reported_cost = result.best_cost;
  if (cfg.shots > 0) {
    Rng shot_rng = rng.split(0x5107);
    reported_cost = estimate_cost_shots(p, build_unitary(ansatz, result.best_theta), spec.kind,
                                        spec.weight, split, cfg.shots, shot_rng);
  }
  const VerdictResult verdict = separability_verdict(reported_cost, cfg.threshold);

  const PureStateEnsemble best =
      ensemble_from_unitary(p, build_unitary(ansatz, result.best_theta));

  json payload = verdict_json(verdict);
  payload["exact_best_cost"] = result.best_cost;
  payload["restart_costs"] = result.restart_costs;
  payload["converged"] = result.converged;
  payload["restarts"] = cfg.restarts;
  payload["best_ensemble"] = nlohmann::json::parse(
      ensemble_to_json(best, static_cast<Eigen::Index>(dim_of(n / 2)),
                       static_cast<Eigen::Index>(dim_of(n - n / 2))));

  CommandOutput out;
  out.json = make_envelope("witness", cfg.echo(), cfg.seed, payload).to_json();
  out.summary = "witness: " + verdict_name(verdict.verdict) + " (cost " +
                format_double(reported_cost) + ", threshold " + format_double(cfg.threshold) +
                ")";
  return out;
}

}  // namespace opse
