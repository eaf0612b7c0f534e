#include <doctest.h>

#include <cmath>

#include "opse/haar.hpp"
#include "opse/tensor.hpp"

using namespace opse;

TEST_CASE("cycle types") {
  CHECK(cycle_type(Permutation{{0, 1, 2, 3}}) == CycleType{1, 1, 1, 1});
  CHECK(cycle_type(Permutation{{1, 0, 3, 2}}) == CycleType{2, 2});
  CHECK(cycle_type(Permutation{{1, 2, 3, 0}}) == CycleType{4});
  CHECK(cycle_type(Permutation{{0}}) == CycleType{1});
  CHECK_THROWS_AS(cycle_type(Permutation{{0, 0}}), std::invalid_argument);
}

TEST_CASE("permutation algebra") {
  const Permutation s{{1, 0, 2}};
  const Permutation t{{0, 2, 1}};
  const Permutation st = s.compose(t);  // s after t
  CHECK(st.images == std::vector<int>{1, 2, 0});
  CHECK(s.inverse().images == s.images);  // transposition is an involution
  CHECK(Permutation::all(3).size() == 6);
  CHECK(Permutation::all(4).size() == 24);
}

TEST_CASE("weingarten table values") {
  CHECK(weingarten({1}, 2) == doctest::Approx(0.5));
  CHECK(weingarten({2}, 2) == doctest::Approx(-1.0 / 6.0));
  CHECK(weingarten({1, 1}, 3) == doctest::Approx(1.0 / 8.0));
  CHECK(weingarten({1, 1, 1}, 3) == doctest::Approx(7.0 / 120.0));
  CHECK(weingarten({2, 1}, 3) == doctest::Approx(-1.0 / 40.0));
  CHECK(weingarten({3}, 4) == doctest::Approx(2.0 / 720.0));
  CHECK(weingarten({2, 2}, 4) == doctest::Approx(11.0 / 10080.0));
  CHECK(weingarten({1, 1, 1, 1}, 4) == doctest::Approx(67.0 / 10080.0));
  CHECK(weingarten({3, 1}, 4) == doctest::Approx(29.0 / 20160.0));
  CHECK(weingarten({2, 1, 1}, 4) == doctest::Approx(-1.0 / 420.0));
  CHECK(weingarten({4}, 5) == doctest::Approx(-1.0 / 8064.0));

  SUBCASE("cycle type order does not matter") {
    CHECK(weingarten({1, 2}, 5) == weingarten({2, 1}, 5));
  }
  SUBCASE("poles guarded") {
    CHECK_THROWS_AS(weingarten({2, 2}, 3), std::domain_error);
    CHECK_THROWS_AS(weingarten({2}, 1), std::domain_error);
    CHECK_THROWS_AS(weingarten({1, 1, 1}, 2), std::domain_error);
  }
  SUBCASE("unknown partitions rejected") {
    CHECK_THROWS_AS(weingarten({5}, 6), std::invalid_argument);
  }
  SUBCASE("table enumerates all 11 rows") {
    CHECK(weingarten_cycle_types().size() == 11);
  }
}

TEST_CASE("monomial integrals") {
  SUBCASE("unbalanced conjugation count vanishes") {
    CHECK(monomial_integral({0}, {0}, {}, {}, 4.0) == 0.0);
    CHECK(monomial_integral({0, 1}, {0, 1}, {0}, {0}, 4.0) == 0.0);
  }
  SUBCASE("second moment of one entry") {
    for (double d : {2.0, 3.0, 5.0}) {
      CHECK(monomial_integral({0}, {0}, {0}, {0}, d) == doctest::Approx(1.0 / d));
    }
  }
  SUBCASE("diagonal fourth moment at d = 2 is 1/6") {
    // int |U00|^2 |U01|^2 dU: both permutations of S_2 contribute on the
    // rows, only the identity on the columns.
    const double expected = weingarten({1, 1}, 2) + weingarten({2}, 2);
    CHECK(expected == doctest::Approx(1.0 / 6.0));
    CHECK(monomial_integral({0, 0}, {0, 1}, {0, 0}, {0, 1}, 2.0) ==
          doctest::Approx(1.0 / 6.0));
  }
  SUBCASE("distinct rows and columns isolate the identity permutation") {
    for (double d : {4.0, 6.0}) {
      CHECK(monomial_integral({0, 1}, {0, 1}, {0, 1}, {0, 1}, d) ==
            doctest::Approx(weingarten({1, 1}, d)));
    }
  }
  SUBCASE("Monte Carlo confirms the fourth-moment value") {
    Rng rng(101);
    const std::uint64_t n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (std::uint64_t s = 0; s < n; ++s) {
      const ComplexMatrix u = haar_sample(2, rng);
      const double v = std::norm(u(0, 0)) * std::norm(u(0, 1));
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = (sum_sq - n * mean * mean) / (static_cast<double>(n) - 1);
    const double se = std::sqrt(var / static_cast<double>(n));
    CHECK(std::abs(mean - 1.0 / 6.0) < 5.0 * se);
  }
}

TEST_CASE("haar_sample") {
  Rng rng(7);
  SUBCASE("unitary at several dimensions") {
    for (Eigen::Index d : {1, 2, 3, 5, 8}) {
      CHECK(is_unitary(haar_sample(d, rng), 1e-9));
    }
  }
  SUBCASE("d = 1 is a uniform phase") {
    double sum_re = 0.0, sum_im = 0.0;
    const int n = 20000;
    for (int s = 0; s < n; ++s) {
      const ComplexMatrix u = haar_sample(1, rng);
      CHECK(std::abs(std::abs(u(0, 0)) - 1.0) < 1e-12);
      sum_re += u(0, 0).real();
      sum_im += u(0, 0).imag();
    }
    // mean of a uniform phase is 0; stderr ~ 1/sqrt(2n)
    const double se = 1.0 / std::sqrt(2.0 * n);
    CHECK(std::abs(sum_re / n) < 5.0 * se);
    CHECK(std::abs(sum_im / n) < 5.0 * se);
  }
  SUBCASE("first and second moments at d = 2") {
    const std::uint64_t n = 100000;
    Complex first(0, 0);
    double second = 0.0, second_sq = 0.0;
    for (std::uint64_t s = 0; s < n; ++s) {
      const ComplexMatrix u = haar_sample(2, rng);
      first += u(0, 0);
      const double a = std::norm(u(0, 0));
      second += a;
      second_sq += a * a;
    }
    const double mean2 = second / static_cast<double>(n);
    const double var2 = (second_sq - n * mean2 * mean2) / (static_cast<double>(n) - 1);
    const double se2 = std::sqrt(var2 / static_cast<double>(n));
    CHECK(std::abs(mean2 - 0.5) < 3.0 * se2);
    // |U00| <= 1, so each real/imag part has variance at most 1
    CHECK(std::abs(first.real() / static_cast<double>(n)) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(first.imag() / static_cast<double>(n)) < 5.0 / std::sqrt(static_cast<double>(n)));
  }
  SUBCASE("left translation invariance of second moments") {
    const Eigen::Index d = 3;
    Rng rng_a(55), rng_b(56);
    ComplexMatrix p = haar_sample(d, rng);
    const std::uint64_t n = 50000;
    double plain = 0.0, translated = 0.0;
    double plain_sq = 0.0, translated_sq = 0.0;
    for (std::uint64_t s = 0; s < n; ++s) {
      const double a = std::norm(haar_sample(d, rng_a)(1, 2));
      const ComplexMatrix pu = p * haar_sample(d, rng_b);
      const double b = std::norm(pu(1, 2));
      plain += a;
      translated += b;
      plain_sq += a * a;
      translated_sq += b * b;
    }
    const double ma = plain / static_cast<double>(n);
    const double mb = translated / static_cast<double>(n);
    const double va = (plain_sq - n * ma * ma) / (static_cast<double>(n) - 1);
    const double vb = (translated_sq - n * mb * mb) / (static_cast<double>(n) - 1);
    const double se = std::sqrt(va / static_cast<double>(n) + vb / static_cast<double>(n));
    CHECK(std::abs(ma - mb) < 5.0 * se);
  }
}

TEST_CASE("average gate fidelity") {
  Rng rng(11);
  SUBCASE("identical unitaries give exactly 1") {
    for (Eigen::Index d : {2, 4}) {
      const ComplexMatrix u = haar_sample(d, rng);
      CHECK(std::abs(avg_gate_fidelity_exact(u, u) - 1.0) < 1e-12);
    }
  }
  SUBCASE("traceless relative rotation at d = 2 gives 1/3") {
    const ComplexMatrix x = pauli_string_matrix("X");
    CHECK(avg_gate_fidelity_exact(ComplexMatrix::Identity(2, 2), x) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("global phases do not matter") {
    const ComplexMatrix u = haar_sample(3, rng);
    const ComplexMatrix v = std::exp(Complex(0, 1.234)) * u;
    CHECK(avg_gate_fidelity_exact(u, v) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Monte Carlo matches the closed form") {
    for (Eigen::Index d : {2, 4}) {
      const ComplexMatrix u = haar_sample(d, rng);
      const ComplexMatrix v = haar_sample(d, rng);
      const double exact = avg_gate_fidelity_exact(u, v);
      const MonteCarloEstimate mc = avg_gate_fidelity_mc(u, v, 20000, rng);
      CHECK(std::abs(mc.estimate - exact) < 5.0 * mc.stderr_);
    }
  }
  SUBCASE("constant integrand has zero spread") {
    const ComplexMatrix u = haar_sample(2, rng);
    const MonteCarloEstimate mc = avg_gate_fidelity_mc(u, u, 50, rng);
    CHECK(mc.estimate == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mc.stderr_ < 1e-9);
  }
  SUBCASE("two samples is enough to not crash") {
    const ComplexMatrix u = haar_sample(2, rng);
    const ComplexMatrix v = haar_sample(2, rng);
    const MonteCarloEstimate mc = avg_gate_fidelity_mc(u, v, 2, rng);
    CHECK(std::isfinite(mc.stderr_));
  }
  CHECK_THROWS_AS(avg_gate_fidelity_mc(ComplexMatrix::Identity(2, 2),
                                       ComplexMatrix::Identity(2, 2), 1, rng),
                  std::invalid_argument);
}
