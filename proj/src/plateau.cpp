#include "opse/plateau.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "opse/ansatz.hpp"
#include "opse/haar.hpp"

namespace opse {

namespace {

std::string random_pauli_string(int num_qubits, Rng& rng) {
  static const char kLabels[4] = {'I', 'X', 'Y', 'Z'};
  std::uint64_t num_strings = 1;
  for (int q = 0; q < num_qubits; ++q) {
    num_strings *= 4;
  }
  std::uint64_t code = rng.uniform_index(num_strings - 1) + 1;
  std::string gen(static_cast<std::size_t>(num_qubits), 'I');
  for (int q = num_qubits - 1; q >= 0; --q) {
    gen[static_cast<std::size_t>(q)] = kLabels[code % 4];
    code /= 4;
  }
  return gen;
}

void run_partitioned(int n, int workers, const std::function<void(int, int)>& run_range) {
  if (workers <= 1 || n < 2 * workers) {
    run_range(0, n);
    return;
  }
  std::vector<std::thread> pool;
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) {
      break;
    }
    pool.emplace_back(run_range, lo, hi);
  }
  for (std::thread& t : pool) {
    t.join();
  }
}

// Delete-1 jackknife standard error of the sample variance, from running
// sums (O(n)).
double jackknife_var_stderr(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 3) {
    return 0.0;
  }
  double s1 = 0.0;
  double s2 = 0.0;
  for (double x : xs) {
    s1 += x;
    s2 += x * x;
  }
  const double nn = static_cast<double>(n);
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = (s1 - xs[i]) / (nn - 1.0);
    const double ss = s2 - xs[i] * xs[i];
    // unbiased variance of the n-1 remaining samples
    loo[i] = (ss - (nn - 1.0) * m * m) / (nn - 2.0);
    loo_mean += loo[i];
  }
  loo_mean /= nn;
  double acc = 0.0;
  for (double v : loo) {
    acc += (v - loo_mean) * (v - loo_mean);
  }
  return std::sqrt((nn - 1.0) / nn * acc);
}

ScanFit fit_log2_variance(const std::vector<ScanPoint>& points) {
  // Weighted least squares of y = log2(var) on x = k, weights from the
  // propagated jackknife errors se(y) = se(var) / (var ln 2).
  const double ln2 = std::numbers::ln2;
  double sw = 0.0, swx = 0.0, swy = 0.0;
  std::vector<double> x(points.size()), y(points.size()), w(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].var_grad <= 0.0) {
      throw std::domain_error("cannot fit log-variance of a degenerate scan");
    }
    x[i] = points[i].k;
    y[i] = std::log2(points[i].var_grad);
    const double se_y = points[i].stderr_var > 0.0
                            ? points[i].stderr_var / (points[i].var_grad * ln2)
                            : 1e-6;
    w[i] = 1.0 / (se_y * se_y);
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  ScanFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.slope_stderr = std::sqrt(1.0 / sxx);
  fit.slope_ci95_lo = fit.slope - 1.96 * fit.slope_stderr;
  fit.slope_ci95_hi = fit.slope + 1.96 * fit.slope_stderr;
  return fit;
}

Purification scan_purification(const VarianceScanConfig& cfg, int k) {
  const DensityOperator rho = cfg.source.has_value()
                                  ? *cfg.source
                                  : DensityOperator::maximally_mixed(cfg.system_qubits);
  const PureStateEnsemble ensemble = spectral_ensemble(rho);
  return build_purification(ensemble, k);
}

}  // namespace

void VarianceScanConfig::validate() const {
  if (k_range.empty()) {
    throw std::invalid_argument("empty k range");
  }
  for (std::size_t i = 1; i < k_range.size(); ++i) {
    if (k_range[i] <= k_range[i - 1]) {
      throw std::invalid_argument("k range must be strictly ascending");
    }
  }
  if (n_samples < 30) {
    throw std::invalid_argument("need at least 30 samples per k");
  }
  if (system_qubits < 2) {
    throw std::invalid_argument("need at least 2 system qubits for a bipartite split");
  }
  if (mode == SampleMode::Ansatz && depth < 1) {
    throw std::invalid_argument("ansatz depth must be at least 1");
  }
  if (workers < 1) {
    throw std::invalid_argument("worker count must be at least 1");
  }
  const DensityOperator rho =
      source.has_value() ? *source : DensityOperator::maximally_mixed(system_qubits);
  if (rho.num_qubits() != system_qubits) {
    throw std::invalid_argument("source density does not match the system register");
  }
  std::uint64_t d0 = spectral_ensemble(rho).size();
  for (int k : k_range) {
    if (dim_of(k) < d0) {
      throw std::invalid_argument("ancilla too small for the source's spectral ensemble");
    }
  }
}

double sample_gradient(int k, SampleMode mode, int depth, int layer_index,
                       const Purification& purification, const BipartiteSplit& split, Rng& rng) {
  const Eigen::Index d = static_cast<Eigen::Index>(dim_of(k));
  if (purification.ancilla_dim() != d) {
    throw std::invalid_argument("purification ancilla does not match k");
  }
  if (mode == SampleMode::HaarExact) {
    const ComplexMatrix left = haar_sample(d, rng);
    const ComplexMatrix right = haar_sample(d, rng);
    const ComplexMatrix v = pauli_string_matrix(random_pauli_string(k, rng));
    return tsallis_fd_splice_derivative(purification, split, left, v, right);
  }
  Ansatz a = random_ansatz(k, depth, rng);
  ParameterVector theta(static_cast<std::size_t>(depth));
  for (double& t : theta) {
    t = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  const int j = (layer_index >= 1 && layer_index <= depth) ? layer_index : (depth + 1) / 2;
  return tsallis_fd_layer_derivative(purification, a, theta, j, split);
}

ScanResult scan_statistics(const std::vector<int>& k_range, int n_samples, std::uint64_t seed,
                           int workers,
                           const std::function<double(int k, Rng& rng)>& sampler) {
  ScanResult result;
  result.seed = seed;
  const Rng base(seed);
  for (int k : k_range) {
    std::vector<double> draws(static_cast<std::size_t>(n_samples));
    const Rng k_stream = base.split(static_cast<std::uint64_t>(k));
    run_partitioned(n_samples, workers, [&](int lo, int hi) {
      for (int s = lo; s < hi; ++s) {
        Rng stream = k_stream.split(static_cast<std::uint64_t>(s));
        draws[static_cast<std::size_t>(s)] = sampler(k, stream);
      }
    });

    double sum = 0.0;
    for (double v : draws) {
      sum += v;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : draws) {
      ss += (v - mean) * (v - mean);
    }
    const double var = ss / (n - 1.0);

    ScanPoint point;
    point.k = k;
    point.d = static_cast<double>(dim_of(k));
    point.mean_grad = mean;
    point.stderr_mean = std::sqrt(var / n);
    point.var_grad = var;
    point.stderr_var = jackknife_var_stderr(draws);
    point.n = n_samples;
    result.points.push_back(point);
  }
  if (result.points.size() >= 2) {
    bool all_positive = true;
    for (const ScanPoint& p : result.points) {
      if (p.var_grad <= 0.0) {
        all_positive = false;
        break;
      }
    }
    if (all_positive) {
      result.fit = fit_log2_variance(result.points);
    }
  }
  return result;
}

ScanResult variance_scan(const VarianceScanConfig& cfg) {
  cfg.validate();
  const BipartiteSplit split = BipartiteSplit::leading(cfg.system_qubits / 2, cfg.system_qubits);

  // One purification per k, shared across that k's draws.
  std::vector<Purification> purifications;
  for (int k : cfg.k_range) {
    purifications.push_back(scan_purification(cfg, k));
  }
  auto sampler = [&](int k, Rng& rng) {
    std::size_t idx = 0;
    while (cfg.k_range[idx] != k) {
      ++idx;
    }
    return sample_gradient(k, cfg.mode, cfg.depth, cfg.layer_index, purifications[idx], split,
                           rng);
  };
  return scan_statistics(cfg.k_range, cfg.n_samples, cfg.seed, cfg.workers, sampler);
}

ScanResult mean_scan(const VarianceScanConfig& cfg) {
  ScanResult result = variance_scan(cfg);
  result.fit.reset();
  return result;
}

std::string scan_to_csv(const ScanResult& result) {
  std::ostringstream out;
  out << "k,d,mean_grad,stderr_mean,var_grad,stderr_var,n\n";
  char line[256];
  for (const ScanPoint& p : result.points) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", p.k, p.d,
                  p.mean_grad, p.stderr_mean, p.var_grad, p.stderr_var, p.n);
    out << line;
  }
  return out.str();
}

}  // namespace opse
