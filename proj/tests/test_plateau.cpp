#include <doctest.h>

#include <cmath>

#include "opse/ansatz.hpp"
#include "opse/haar.hpp"
#include "opse/measures.hpp"
#include "opse/plateau.hpp"
#include "oracles.hpp"

using namespace opse;

namespace {

VarianceScanConfig small_scan() {
  VarianceScanConfig cfg;
  cfg.k_range = {2, 3};
  cfg.n_samples = 200;
  cfg.seed = 77;
  return cfg;
}

}  // namespace

TEST_CASE("scan_statistics") {
  SUBCASE("constant sampler has zero variance at every k") {
    const ScanResult r = scan_statistics({2, 3, 4}, 50, 1, 1,
                                         [](int, Rng&) { return 0.25; });
    for (const ScanPoint& p : r.points) {
      CHECK(p.mean_grad == doctest::Approx(0.25));
      CHECK(p.var_grad == doctest::Approx(0.0));
    }
    CHECK_FALSE(r.fit.has_value());  // log fit impossible on zero variance
  }
  SUBCASE("results do not depend on the worker count") {
    auto sampler = [](int k, Rng& rng) { return rng.gaussian() / k; };
    const ScanResult serial = scan_statistics({2, 3}, 64, 9, 1, sampler);
    const ScanResult parallel = scan_statistics({2, 3}, 64, 9, 4, sampler);
    for (std::size_t i = 0; i < serial.points.size(); ++i) {
      CHECK(serial.points[i].mean_grad == parallel.points[i].mean_grad);
      CHECK(serial.points[i].var_grad == parallel.points[i].var_grad);
    }
  }
  SUBCASE("stderr shrinks like 1/sqrt(2) when samples double") {
    auto sampler = [](int, Rng& rng) { return rng.gaussian(); };
    const ScanResult small = scan_statistics({2}, 2000, 3, 1, sampler);
    const ScanResult large = scan_statistics({2}, 4000, 3, 1, sampler);
    const double ratio = large.points[0].stderr_mean / small.points[0].stderr_mean;
    CHECK(ratio == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.15));
  }
  SUBCASE("gaussian sampler with variance 2^-k fits slope -1") {
    auto sampler = [](int k, Rng& rng) {
      return rng.gaussian() * std::pow(2.0, -0.5 * k);
    };
    const ScanResult r = scan_statistics({2, 3, 4, 5}, 4000, 13, 2, sampler);
    REQUIRE(r.fit.has_value());
    CHECK(r.fit->slope == doctest::Approx(-1.0).epsilon(0.15));
    CHECK(r.fit->slope_ci95_hi < 0.0);
  }
}

TEST_CASE("sample_gradient") {
  const BipartiteSplit split = BipartiteSplit::leading(1, 2);
  SUBCASE("deterministic per stream") {
    const Purification p =
        build_purification(spectral_ensemble(DensityOperator::maximally_mixed(2)), 2);
    Rng a(5), b(5);
    const double x = sample_gradient(2, SampleMode::HaarExact, 0, 0, p, split, a);
    const double y = sample_gradient(2, SampleMode::HaarExact, 0, 0, p, split, b);
    CHECK(x == y);
    CHECK(std::isfinite(x));
  }
  SUBCASE("pure product source has identically zero cost, so zero gradient") {
    const PureStateEnsemble e{{1.0}, {StateVector::zero(2)}};
    const Purification p = build_purification(e, 2);
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      CHECK(std::abs(sample_gradient(2, SampleMode::HaarExact, 0, 0, p, split, rng)) < 1e-9);
    }
  }
  SUBCASE("ansatz mode works and is finite") {
    const Purification p =
        build_purification(spectral_ensemble(DensityOperator::maximally_mixed(2)), 2);
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      CHECK(std::isfinite(sample_gradient(2, SampleMode::Ansatz, 4, 2, p, split, rng)));
    }
  }
  SUBCASE("haar-exact agrees with a finite difference through the splice") {
    // d/dt of the cost at U(t) = L exp(itV) R, checked numerically.
    const Purification p =
        build_purification(spectral_ensemble(DensityOperator::maximally_mixed(2)), 2);
    Rng rng(13);
    const ComplexMatrix left = haar_sample(4, rng);
    const ComplexMatrix right = haar_sample(4, rng);
    const ComplexMatrix v = pauli_string_matrix("XZ");
    const double analytic = tsallis_fd_splice_derivative(p, split, left, v, right);
    const double step = 1e-6;
    auto cost_at = [&](double t) {
      return tsallis_fd_succinct(p, left * exp_i_theta_involutory(t, v) * right, split);
    };
    const double fd = (cost_at(step) - cost_at(-step)) / (2.0 * step);
    CHECK(analytic == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("variance_scan") {
  SUBCASE("config validation") {
    VarianceScanConfig bad = small_scan();
    bad.n_samples = 5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = small_scan();
    bad.k_range = {3, 2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = small_scan();
    bad.k_range = {1};  // cannot hold the 4-state spectral ensemble of I/4
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
  SUBCASE("seed-reproducible, non-negative variances, serialized CSV") {
    const ScanResult a = variance_scan(small_scan());
    const ScanResult b = variance_scan(small_scan());
    REQUIRE(a.points.size() == 2);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].var_grad >= 0.0);
      CHECK(a.points[i].var_grad == b.points[i].var_grad);
    }
    CHECK(scan_to_csv(a) == scan_to_csv(b));
    CHECK(scan_to_csv(a).substr(0, 2) == "k,");
  }
  SUBCASE("mean_scan strips the fit") {
    const ScanResult r = mean_scan(small_scan());
    CHECK_FALSE(r.fit.has_value());
    CHECK(r.points.size() == 2);
  }
  SUBCASE("variance decreases from k=2 to k=3") {
    VarianceScanConfig cfg = small_scan();
    cfg.n_samples = 500;
    const ScanResult r = variance_scan(cfg);
    CHECK(r.points[1].var_grad < r.points[0].var_grad);
  }
}

TEST_CASE("ansatz-mode scan is damped relative to its own deep limit") {
  // Shallow circuits are far from Haar; this only checks the machinery runs
  // end to end in ansatz mode with a fit.
  VarianceScanConfig cfg;
  cfg.k_range = {2, 3};
  cfg.mode = SampleMode::Ansatz;
  cfg.depth = 4;
  cfg.n_samples = 300;
  cfg.seed = 21;
  const ScanResult r = variance_scan(cfg);
  REQUIRE(r.points.size() == 2);
  for (const ScanPoint& p : r.points) {
    CHECK(p.var_grad > 0.0);
  }
}

TEST_CASE("deep random circuits reproduce the Haar-spliced variance") {
  for (int k : {2, 3}) {
    VarianceScanConfig cfg;
    cfg.k_range = {k};
    cfg.n_samples = 2500;
    cfg.seed = 424242;
    cfg.workers = 2;
    cfg.mode = SampleMode::HaarExact;
    const ScanPoint haar = variance_scan(cfg).points[0];
    cfg.mode = SampleMode::Ansatz;
    cfg.depth = depth_4design(k);
    const ScanPoint deep = variance_scan(cfg).points[0];
    const double z = (deep.var_grad - haar.var_grad) /
                     std::sqrt(deep.stderr_var * deep.stderr_var +
                               haar.stderr_var * haar.stderr_var);
    CHECK(std::abs(z) < 5.0);
  }
}

TEST_CASE("depth-1 circuits keep much larger gradient variance than Haar") {
  VarianceScanConfig cfg;
  cfg.k_range = {5};
  cfg.n_samples = 2000;
  cfg.seed = 515151;
  cfg.workers = 2;
  cfg.mode = SampleMode::HaarExact;
  const ScanPoint haar = variance_scan(cfg).points[0];
  cfg.mode = SampleMode::Ansatz;
  cfg.depth = 1;
  const ScanPoint shallow = variance_scan(cfg).points[0];
  const double z = (shallow.var_grad - haar.var_grad) /
                   std::sqrt(shallow.stderr_var * shallow.stderr_var +
                             haar.stderr_var * haar.stderr_var);
  CHECK(z > 5.0);
  CHECK(shallow.var_grad > 10.0 * haar.var_grad);
}
