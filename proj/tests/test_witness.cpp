#include <doctest.h>

#include "entwit/error.hpp"
#include "entwit/witness.hpp"
#include "support.hpp"

using namespace entwit;

namespace {

std::vector<CMatrix> random_pure_states(std::mt19937_64& rng, int n, int d) {
  std::vector<CMatrix> out;
  for (int x = 0; x < n; ++x) out.push_back(testsupport::random_density(rng, d, 1));
  return out;
}

double witness_oracle(const std::vector<CMatrix>& rhos, const std::vector<CMatrix>& ms, const RMatrix& alpha) {
  double w = 0.0;
  for (int x = 0; x < alpha.rows(); ++x) {
    for (int y = 0; y < alpha.cols(); ++y) w += alpha(x, y) * testsupport::expectation(rhos[x], ms[y]);
  }
  return w;
}

}  // namespace

TEST_SUITE("witness") {

TEST_CASE("canonical witness shapes") {
  CHECK(canonical_witness("I3").n() == 3);
  CHECK(canonical_witness("I3").l() == 2);
  CHECK(canonical_witness("I4").n() == 4);
  CHECK(canonical_witness("I4").l() == 3);
  CHECK(canonical_witness("R4").n() == 4);
  CHECK(canonical_witness("R4").l() == 2);
  CHECK_THROWS_AS(canonical_witness("I5"), InvalidArgument);
}

TEST_CASE("quantum value is the weighted sum of expectations") {
  std::mt19937_64 rng(11);
  const WitnessSpec spec = canonical_witness("I4");
  for (int trial = 0; trial < 20; ++trial) {
    const auto rhos = random_pure_states(rng, 4, 3);
    std::vector<CMatrix> ms;
    std::vector<Measurement> meas;
    for (int y = 0; y < 3; ++y) {
      ms.push_back(testsupport::random_pm_observable(rng, 3));
      meas.push_back(Measurement::from_operator(ms.back()));
    }
    std::vector<DensityMatrix> states;
    for (const auto& r : rhos) states.emplace_back(r);
    const QuantumEnsemble ens(states);
    CHECK(quantum_value(ens, meas, spec) == doctest::Approx(witness_oracle(rhos, ms, spec.alpha())).epsilon(1e-10));
  }
}

TEST_CASE("eigen-sum bound dominates and is attained by sign measurements") {
  std::mt19937_64 rng(12);
  const WitnessSpec spec = canonical_witness("R4");
  for (int trial = 0; trial < 20; ++trial) {
    const auto rhos = random_pure_states(rng, 4, 4);
    std::vector<DensityMatrix> states;
    for (const auto& r : rhos) states.emplace_back(r);
    const QuantumEnsemble ens(states);
    const double bound = eigen_sum_bound(ens, spec);
    // Oracle: sum of |eigenvalues| of each column operator.
    double oracle = 0.0;
    for (int y = 0; y < spec.l(); ++y) {
      CMatrix op = CMatrix::Zero(4, 4);
      for (int x = 0; x < 4; ++x) op += spec(x, y) * rhos[x];
      Eigen::SelfAdjointEigenSolver<CMatrix> es(op);
      oracle += es.eigenvalues().cwiseAbs().sum();
    }
    CHECK(bound == doctest::Approx(oracle).epsilon(1e-10));
    std::vector<Measurement> random;
    for (int y = 0; y < spec.l(); ++y) random.push_back(Measurement::from_operator(testsupport::random_pm_observable(rng, 4)));
    CHECK(quantum_value(ens, random, spec) <= bound + 1e-12);
    CHECK(quantum_value(ens, recover_measurements(ens, spec), spec) == doctest::Approx(bound).epsilon(1e-10));
    // Lower limit: sum_y |sum_x alpha_xy|.
    CHECK(bound >= 4.0 - 1e-12);
  }
}

TEST_CASE("measurement constructors") {
  CVector m(2);
  m << 1.0, 0.0;
  const Measurement p = Measurement::projective(m);
  CHECK(p.op()(0, 0).real() == doctest::Approx(-1.0));
  CHECK(p.op()(1, 1).real() == doctest::Approx(1.0));
  CHECK(p.minus_rank() == 1);
  CHECK_THROWS_AS(Measurement::from_operator(CMatrix::Identity(2, 2) * 0.5), InvalidArgument);
  CHECK(Measurement::identity(3).minus_rank() == 0);
  CVector u(3), v(3);
  u << 1, 1, 0;
  v << 0, 1, 1;
  const Measurement two = Measurement::from_minus_subspace({u, v});
  CHECK(two.minus_rank() == 2);
  CHECK((two.op() * two.op() - CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(Measurement::from_minus_subspace({u, 2.0 * u}), InvalidArgument);
}

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS(QuantumEnsemble(std::vector<DensityMatrix>{}), InvalidArgument);
  CHECK_THROWS_AS(QuantumEnsemble({DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(3)}),
                  DimensionMismatch);
  const QuantumEnsemble ens({DensityMatrix::maximally_mixed(2), DensityMatrix::maximally_mixed(2)});
  CHECK_THROWS_AS(quantum_value(ens, {Measurement::identity(2)}, canonical_witness("I3")), DimensionMismatch);
}

}
