#include <doctest.h>

#include <cmath>

#include "opse/ensemble.hpp"
#include "opse/haar.hpp"
#include "opse/measures.hpp"
#include "oracles.hpp"

using namespace opse;
using opse::testing::random_product_state;
using opse::testing::random_state;

namespace {

const BipartiteSplit kSplit2 = BipartiteSplit::leading(1, 2);

StateVector bell_state() {
  ComplexVector v(4);
  v << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
  return StateVector(2, v);
}

StateVector schmidt_state(double t) {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = std::cos(t);
  v(3) = std::sin(t);
  return StateVector(2, v);
}

PureStateEnsemble canonical_mm2() {
  PureStateEnsemble e;
  for (std::uint64_t i = 0; i < 4; ++i) {
    e.probs.push_back(0.25);
    e.states.push_back(StateVector::basis(2, i));
  }
  return e;
}

}  // namespace

TEST_CASE("tsallis2_pure") {
  CHECK(tsallis2_pure(StateVector::zero(2), kSplit2) == doctest::Approx(0.0));
  CHECK(tsallis2_pure(bell_state(), kSplit2) == doctest::Approx(0.5).epsilon(1e-12));
  for (double t : {0.3, 0.9, 1.4}) {
    const double c2 = std::cos(t) * std::cos(t);
    const double s2 = std::sin(t) * std::sin(t);
    CHECK(tsallis2_pure(schmidt_state(t), kSplit2) ==
          doctest::Approx(1.0 - c2 * c2 - s2 * s2).epsilon(1e-12));
  }
}

TEST_CASE("von_neumann_pure") {
  CHECK(von_neumann_pure(StateVector::zero(2), kSplit2) == doctest::Approx(0.0));
  CHECK(von_neumann_pure(bell_state(), kSplit2) == doctest::Approx(1.0).epsilon(1e-12));
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = std::sqrt(0.9);
  v(3) = std::sqrt(0.1);
  CHECK(von_neumann_pure(StateVector(2, v), kSplit2) ==
        doctest::Approx(binary_entropy(0.1)).epsilon(1e-12));
  CHECK(binary_entropy(0.1) == doctest::Approx(0.468996).epsilon(1e-5));
}

TEST_CASE("concurrence") {
  CHECK(concurrence(StateVector::zero(2)) == doctest::Approx(0.0));
  CHECK(concurrence(bell_state()) == doctest::Approx(1.0).epsilon(1e-12));
  ComplexVector plus(4);
  plus << 0.5, 0.5, 0.5, 0.5;
  CHECK(concurrence(StateVector(2, plus)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(concurrence(StateVector::zero(3)), std::invalid_argument);
}

TEST_CASE("eof_from_concurrence") {
  CHECK(eof_from_concurrence(0.0) == doctest::Approx(0.0));
  CHECK(eof_from_concurrence(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eof_from_concurrence(0.6) == doctest::Approx(binary_entropy(0.9)).epsilon(1e-12));
  CHECK(eof_from_concurrence(0.6) == doctest::Approx(0.468996).epsilon(1e-5));
  CHECK_THROWS_AS(eof_from_concurrence(1.5), std::invalid_argument);
  SUBCASE("monotone increasing") {
    double prev = -1.0;
    for (double c = 0.0; c <= 1.0; c += 0.05) {
      const double v = eof_from_concurrence(c);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("tsallis_of_density") {
  CHECK(tsallis_of_density(DensityOperator::from_state(StateVector::zero(1))) ==
        doctest::Approx(0.0));
  CHECK(tsallis_of_density(DensityOperator::maximally_mixed(2)) ==
        doctest::Approx(1.0 - 0.25).epsilon(1e-12));
  ComplexMatrix diag34 = ComplexMatrix::Zero(2, 2);
  diag34(0, 0) = 0.75;
  diag34(1, 1) = 0.25;
  CHECK(tsallis_of_density(DensityOperator(2, diag34)) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("tsallis_overlap_form") {
  Rng rng(3);
  SUBCASE("single state gives zero") {
    CHECK(tsallis_overlap_form({1.0}, {random_state(2, rng)}) == doctest::Approx(0.0));
  }
  SUBCASE("orthonormal states give 1 - sum lambda^2") {
    const std::vector<double> probs = {0.5, 0.3, 0.2};
    const std::vector<StateVector> states = {StateVector::basis(2, 0), StateVector::basis(2, 1),
                                             StateVector::basis(2, 2)};
    CHECK(tsallis_overlap_form(probs, states) ==
          doctest::Approx(1.0 - 0.25 - 0.09 - 0.04).epsilon(1e-12));
  }
  SUBCASE("degenerate decomposition of a pure state") {
    const StateVector zero = StateVector::zero(1);
    CHECK(tsallis_overlap_form({0.5, 0.5}, {zero, zero}) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("matches tsallis_of_density for non-orthogonal decompositions") {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> probs = {0.4, 0.35, 0.25};
      std::vector<StateVector> states;
      ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
      for (std::size_t i = 0; i < probs.size(); ++i) {
        states.push_back(random_state(2, rng));
        const ComplexVector& a = states.back().amplitudes();
        rho += probs[i] * (a * a.adjoint());
      }
      CHECK(tsallis_overlap_form(probs, states) ==
            doctest::Approx(tsallis_of_density(DensityOperator(4, rho))).epsilon(1e-9));
    }
  }
  SUBCASE("shot mode converges") {
    std::vector<double> probs = {0.6, 0.4};
    std::vector<StateVector> states = {random_state(1, rng), random_state(1, rng)};
    const double exact = tsallis_overlap_form(probs, states);
    const double sampled = tsallis_overlap_form(probs, states, 200000, &rng);
    CHECK(std::abs(sampled - exact) < 0.02);
  }
}

TEST_CASE("faithfulness of every measure kind") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const StateVector product = random_product_state(1, 1, rng);
    for (MeasureKind kind :
         {MeasureKind::Tsallis2, MeasureKind::VonNeumann, MeasureKind::ConcurrenceEof}) {
      CHECK(measure_pure(kind, product, kSplit2) < 1e-9);
    }
  }
  int entangled_checked = 0;
  for (int trial = 0; trial < 200 && entangled_checked < 100; ++trial) {
    const StateVector psi = random_state(2, rng);
    const ComplexMatrix reduced = reduced_density(psi, {1});
    const double purity = (reduced * reduced).trace().real();
    if (purity > 1.0 - 1e-6) {
      continue;  // effectively Schmidt rank 1
    }
    ++entangled_checked;
    for (MeasureKind kind :
         {MeasureKind::Tsallis2, MeasureKind::VonNeumann, MeasureKind::ConcurrenceEof}) {
      CHECK(measure_pure(kind, psi, kSplit2) > 0.0);
    }
  }
  CHECK(entangled_checked == 100);
}

TEST_CASE("local unitary invariance") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const StateVector psi = random_state(2, rng);
    const ComplexMatrix ua = haar_sample(2, rng);
    const ComplexMatrix ub = haar_sample(2, rng);
    const ComplexVector rotated_amps = kron(ua, ub) * psi.amplitudes();
    const StateVector rotated(2, rotated_amps);
    for (MeasureKind kind :
         {MeasureKind::Tsallis2, MeasureKind::VonNeumann, MeasureKind::ConcurrenceEof}) {
      CHECK(measure_pure(kind, rotated, kSplit2) ==
            doctest::Approx(measure_pure(kind, psi, kSplit2)).epsilon(1e-9));
    }
  }
}

TEST_CASE("entropy equals the concurrence route") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const StateVector psi = random_state(2, rng);
    CHECK(von_neumann_pure(psi, kSplit2) ==
          doctest::Approx(eof_from_concurrence(concurrence(psi))).epsilon(1e-9));
  }
}

TEST_CASE("cost functions") {
  Rng rng(13);
  SUBCASE("single entangled branch: cost is the measure itself") {
    const PureStateEnsemble e{{1.0}, {bell_state()}};
    const Purification p = build_purification(e);
    for (int trial = 0; trial < 5; ++trial) {
      const ComplexMatrix u = haar_sample(2, rng);
      CHECK(cost_convex_roof(p, u, MeasureKind::Tsallis2, kSplit2) ==
            doctest::Approx(0.5).epsilon(1e-9));
    }
  }
  SUBCASE("canonical basis ensemble of I/4 has zero cost at u = I") {
    const Purification p = build_purification(canonical_mm2());
    const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
    CHECK(cost_convex_roof(p, id, MeasureKind::Tsallis2, kSplit2) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(cost_f_d(p, id, MeasureKind::Tsallis2, WeightFunction::Square, kSplit2) ==
          doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("Bell single-branch quadratic cost is 1/2") {
    const Purification p = build_purification(PureStateEnsemble{{1.0}, {bell_state()}});
    CHECK(cost_f_d(p, ComplexMatrix::Identity(2, 2), MeasureKind::Tsallis2,
                   WeightFunction::Square, kSplit2) == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("product ensemble of a separable state costs zero") {
    PureStateEnsemble e;
    e.probs = {0.3, 0.7};
    Rng local(17);
    e.states = {random_product_state(1, 1, local), random_product_state(1, 1, local)};
    const Purification p = build_purification(e);
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    CHECK(cost_f_d(p, id, MeasureKind::Tsallis2, WeightFunction::Square, kSplit2) < 1e-9);
  }
}

TEST_CASE("splitting decay: n-fold replication divides the quadratic cost by n") {
  Rng rng(19);
  PureStateEnsemble e;
  e.probs = {0.6, 0.4};
  e.states = {random_state(2, rng), random_state(2, rng)};
  const Purification pe = build_purification(e);
  const double base = cost_f_d(pe, ComplexMatrix::Identity(2, 2), MeasureKind::Tsallis2,
                               WeightFunction::Square, kSplit2);
  for (int n : {2, 4}) {
    PureStateEnsemble replicated;
    for (int rep = 0; rep < n; ++rep) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        replicated.probs.push_back(e.probs[i] / n);
        replicated.states.push_back(e.states[i]);
      }
    }
    const Purification pr = build_purification(replicated);
    const double split_cost =
        cost_f_d(pr, ComplexMatrix::Identity(pr.ancilla_dim(), pr.ancilla_dim()),
                 MeasureKind::Tsallis2, WeightFunction::Square, kSplit2);
    CHECK(split_cost == doctest::Approx(base / n).epsilon(1e-9));
  }
}

TEST_CASE("succinct form equals the weighted sum") {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    PureStateEnsemble e;
    const std::size_t len = 2 + rng.uniform_index(3);
    double sum = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      const double w = rng.uniform() + 0.05;
      e.probs.push_back(w);
      sum += w;
      e.states.push_back(random_state(2, rng));
    }
    for (double& p : e.probs) {
      p /= sum;
    }
    const Purification p = build_purification(e);
    const ComplexMatrix u = haar_sample(p.ancilla_dim(), rng);
    const double weighted =
        cost_f_d(p, u, MeasureKind::Tsallis2, WeightFunction::Square, kSplit2);
    const double succinct = tsallis_fd_succinct(p, u, kSplit2);
    CHECK(weighted == doctest::Approx(succinct).epsilon(1e-9));
    CHECK(succinct >= -1e-12);
  }
}

TEST_CASE("separability verdict") {
  CHECK(separability_verdict(1e-7, 1e-3).verdict == Verdict::SeparableEvidence);
  CHECK(separability_verdict(0.31, 1e-3).verdict == Verdict::EntangledEvidence);
  // boundary is strict: at the threshold the verdict stays entangled
  CHECK(separability_verdict(1e-3, 1e-3).verdict == Verdict::EntangledEvidence);
  CHECK(verdict_name(Verdict::SeparableEvidence) == "separable-evidence");
}

TEST_CASE("measure guards") {
  CHECK_THROWS_AS(measure_pure(MeasureKind::ConcurrenceEof, StateVector::zero(3),
                               BipartiteSplit::leading(1, 3)),
                  std::invalid_argument);
}
