#include <doctest.h>

#include "entwit/error.hpp"
#include "entwit/optim.hpp"
#include "entwit/qopt.hpp"
#include "support.hpp"

using namespace entwit;

TEST_SUITE("qopt") {

TEST_CASE("BFGS minimizes a shifted quadratic") {
  const Objective f = [](const RVector& x, RVector* g) {
    RVector c(3);
    c << 1.0, -2.0, 0.5;
    const RVector d = x - c;
    if (g) *g = 2.0 * d;
    return d.squaredNorm();
  };
  const BfgsResult r = bfgs_minimize(f, RVector::Zero(3));
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(1.0));
  CHECK(r.x(1) == doctest::Approx(-2.0));
  CHECK(r.x(2) == doctest::Approx(0.5));
}

TEST_CASE("angle parameterization") {
  CHECK(angle_count(1) == 0);
  CHECK(angle_count(3) == 6);
  CHECK(angle_count(4) == 12);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  RVector x(angle_count(4));
  for (int k = 0; k < x.size(); ++k) x(k) = u(rng);
  const StateAngles a = StateAngles::from_flat(x, 4);
  CHECK((a.flat() - x).norm() == 0.0);
  const auto states = build_states(a, 4);
  REQUIRE(states.size() == 4);
  CHECK(std::abs(states[0].amplitudes()(0)) == doctest::Approx(1.0));
  for (const auto& s : states) CHECK(s.amplitudes().norm() == doctest::Approx(1.0));
  // State 2 spans only the first two basis vectors.
  CHECK(std::abs(states[1].amplitudes()(2)) == 0.0);
}

TEST_CASE("config validation") {
  OptimizationConfig c;
  CHECK_NOTHROW(c.validate());
  c.starts = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.penalty_schedule = {100.0, 10.0};
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.penalty_schedule.clear();
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("quantum maxima") {
  OptimizationConfig c;
  c.starts = 16;
  CHECK(quantum_max(canonical_witness("I3"), c) == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(quantum_max(canonical_witness("R4"), c) == doctest::Approx(8.0).epsilon(1e-6));
}

TEST_CASE("minimum meets the constraint and is consistent") {
  OptimizationConfig c;
  c.starts = 16;
  const WitnessSpec spec = canonical_witness("I3");
  const QuantumMinimum q = min_quantum_entropy(spec, 3.622, c);
  CHECK(q.residual <= 1e-6);
  CHECK(q.bits == doctest::Approx(0.897).epsilon(5e-3));
  CHECK(testsupport::entropy_oracle(q.ensemble.average().matrix()) == doctest::Approx(q.bits).epsilon(1e-10));
  CHECK(eigen_sum_bound(q.ensemble, spec) == doctest::Approx(3.622).epsilon(1e-6));
  CHECK(quantum_value(q.ensemble, q.measurements, spec) == doctest::Approx(3.622).epsilon(1e-6));
  CHECK(q.ensemble.dim() == 3);
}

TEST_CASE("small W needs no entropy") {
  const WitnessSpec spec = canonical_witness("I3");
  // sum_y |sum_x alpha_xy| = 1 + 0 = 1 for I3.
  for (double W : {0.0, 0.4, 1.0}) {
    const QuantumMinimum q = min_quantum_entropy(spec, W, {});
    CHECK(q.bits == doctest::Approx(0.0));
    CHECK(quantum_value(q.ensemble, q.measurements, spec) == doctest::Approx(W).epsilon(1e-9));
  }
}

TEST_CASE("infeasible and invalid targets") {
  const WitnessSpec spec = canonical_witness("I3");
  OptimizationConfig c;
  c.starts = 8;
  CHECK_THROWS_AS(min_quantum_entropy(spec, -0.1, c), InvalidArgument);
  CHECK_THROWS_AS(min_quantum_entropy(spec, 5.5, c), Infeasible);
}

TEST_CASE("curves and gap") {
  OptimizationConfig c;
  c.starts = 16;
  const WitnessSpec spec = canonical_witness("I3");
  const std::vector<double> grid{1.5, 2.5, 3.5};
  const EntropyCurve q = entropy_curve(spec, CurveKind::quantum, grid, c);
  const EntropyCurve h = entropy_curve(spec, CurveKind::classical, grid, c);
  REQUIRE(q.samples.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK_FALSE(q.samples[k].error.has_value());
    CHECK(q.samples[k].value <= h.samples[k].value + 5e-3);
  }
  CHECK_THROWS_AS(entropy_curve(spec, CurveKind::classical, {2.0, 1.0}, c), InvalidArgument);
  const GapReport g = gap_report(spec, 3.622, c);
  CHECK(g.gap == doctest::Approx(g.H_min - g.S_min));
}

}
