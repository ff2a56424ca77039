#include <doctest.h>

#include <numbers>

#include "entwit/decomp.hpp"
#include "entwit/error.hpp"
#include "support.hpp"

using namespace entwit;

namespace {

void check_split(const CMatrix& rho, const CMatrix& M, const SplitResult& r, bool allow_remainder) {
  const double target = testsupport::expectation(rho, M);
  double total = 0.0;
  CMatrix sum = CMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& p : r.parts) {
    CHECK(p.weight >= -1e-12);
    CHECK(testsupport::rank_oracle(p.state.matrix()) == 1);
    CHECK(testsupport::expectation(p.state.matrix(), M) == doctest::Approx(target).epsilon(1e-8));
    total += p.weight;
    sum += p.weight * p.state.matrix();
  }
  if (r.remainder) {
    CHECK(allow_remainder);
    CHECK(testsupport::rank_oracle(r.remainder->state.matrix()) < testsupport::rank_oracle(rho));
    CHECK(testsupport::expectation(r.remainder->state.matrix(), M) == doctest::Approx(target).epsilon(1e-7));
    total += r.remainder->weight;
    sum += r.remainder->weight * r.remainder->state.matrix();
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  CHECK((sum - rho).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((r.reconstruct() - rho).cwiseAbs().maxCoeff() < 1e-8);
}

}  // namespace

TEST_SUITE("decomp") {

TEST_CASE("rank-2 split keeps the expectation") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 4;
    const CMatrix rho = testsupport::random_density(rng, d, 2);
    const CMatrix M = testsupport::random_hermitian(rng, d);
    const SplitResult r = split_rank2(DensityMatrix(rho), HermitianOp(M));
    CHECK(r.parts.size() == 2);
    check_split(rho, M, r, false);
  }
}

TEST_CASE("equal populations along the mixed directions") {
  CMatrix rho = CMatrix::Identity(2, 2) / 2.0;
  CMatrix M = CMatrix::Zero(2, 2);
  M(0, 0) = 1.0;
  M(1, 1) = -1.0;
  const SplitResult r = split_rank2(DensityMatrix(rho), HermitianOp(M));
  CHECK(r.theta1 == doctest::Approx(std::numbers::pi / 4));
  CHECK(r.theta2 == doctest::Approx(-std::numbers::pi / 4));
  check_split(rho, M, r, false);
}

TEST_CASE("peel on the maximally mixed qutrit") {
  const CMatrix rho = CMatrix::Identity(3, 3) / 3.0;
  CMatrix M = CMatrix::Zero(3, 3);
  M(0, 0) = 1.0;
  M(2, 2) = -1.0;
  const SplitResult r = peel(DensityMatrix(rho), HermitianOp(M));
  CHECK(r.branch == "2.2");
  CHECK(r.theta1 == doctest::Approx(std::numbers::pi / 4));
  CHECK(r.theta2 == doctest::Approx(-std::numbers::pi / 4));
  check_split(rho, M, r, true);
}

TEST_CASE("peel and full decomposition on random inputs") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 3 + trial % 4;
    const int rank = 3 + static_cast<int>(rng() % static_cast<unsigned>(d - 2));
    const CMatrix rho = testsupport::random_density(rng, d, rank);
    const CMatrix M = testsupport::random_hermitian(rng, d);
    check_split(rho, M, peel(DensityMatrix(rho), HermitianOp(M)), true);
    const SplitResult full = rank1_decompose(DensityMatrix(rho), HermitianOp(M));
    CHECK_FALSE(full.remainder.has_value());
    check_split(rho, M, full, false);
  }
}

TEST_CASE("input validation") {
  const CMatrix rho = CMatrix::Identity(3, 3) / 3.0;
  CHECK_THROWS_AS(split_rank2(DensityMatrix(rho), HermitianOp(CMatrix::Identity(3, 3))), InvalidArgument);
  CHECK_THROWS_AS(rank1_decompose(DensityMatrix(rho), HermitianOp(CMatrix::Identity(2, 2))), DimensionMismatch);
  CMatrix pure = CMatrix::Zero(2, 2);
  pure(0, 0) = 1.0;
  const SplitResult r = split_rank2(DensityMatrix(pure), HermitianOp(CMatrix::Identity(2, 2)));
  CHECK(r.branch == "rank1");
  CHECK(r.parts.size() == 1);
}

TEST_CASE("ensemble reduction keeps the witness and lowers entropy") {
  std::mt19937_64 rng(23);
  const WitnessSpec spec = canonical_witness("I3");
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + trial % 4;
    std::vector<DensityMatrix> states;
    std::vector<CMatrix> raw;
    for (int x = 0; x < 3; ++x) {
      raw.push_back(testsupport::random_density(rng, d, 1 + static_cast<int>(rng() % static_cast<unsigned>(d))));
      states.emplace_back(raw.back());
    }
    std::vector<Measurement> meas;
    std::vector<CMatrix> ms;
    for (int y = 0; y < 2; ++y) {
      ms.push_back(testsupport::random_pm_observable(rng, d));
      meas.push_back(Measurement::from_operator(ms.back()));
    }
    const ReducedEnsemble r = reduce_ensemble(QuantumEnsemble(states), meas, spec);
    double w_before = 0.0, w_after = 0.0;
    CMatrix avg_before = CMatrix::Zero(d, d), avg_after = CMatrix::Zero(d, d);
    for (int x = 0; x < 3; ++x) {
      for (int y = 0; y < 2; ++y) {
        w_before += spec(x, y) * testsupport::expectation(raw[x], ms[y]);
        w_after += spec(x, y) * testsupport::expectation(r.lifted[x].matrix(), ms[y]);
      }
      avg_before += raw[x] / 3.0;
      avg_after += r.lifted[x].matrix() / 3.0;
      CHECK(testsupport::rank_oracle(r.lifted[x].matrix()) == 1);
      CHECK((r.frame * r.reduced[x].matrix() * r.frame.adjoint() - r.lifted[x].matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK(w_after == doctest::Approx(w_before).epsilon(1e-9));
    CHECK(testsupport::entropy_oracle(avg_after) <= testsupport::entropy_oracle(avg_before) + 1e-9);
    CHECK(r.reduced.dim() == std::min(3, d));
  }
}

}
