#include <doctest.h>

#include "entwit/error.hpp"
#include "entwit/qcore.hpp"
#include "support.hpp"

using namespace entwit;

TEST_SUITE("qcore") {

TEST_CASE("maximally mixed state has log2 d bits") {
  for (int d = 1; d <= 6; ++d) {
    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(d)) == doctest::Approx(std::log2(d)).epsilon(1e-12));
  }
}

TEST_CASE("entropy matches a direct eigenvalue sum") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 5;
    const CMatrix rho = testsupport::random_density(rng, d, 1 + trial % d);
    CHECK(von_neumann_entropy(DensityMatrix(rho)) == doctest::Approx(testsupport::entropy_oracle(rho)).epsilon(1e-10));
  }
}

TEST_CASE("qubit with spectrum 5/8, 3/8") {
  const double expected = -(0.625 * std::log2(0.625) + 0.375 * std::log2(0.375));
  CMatrix rho = CMatrix::Zero(2, 2);
  rho(0, 0) = 0.625;
  rho(1, 1) = 0.375;
  CHECK(von_neumann_entropy(DensityMatrix(rho)) == doctest::Approx(expected));
  CHECK(expected == doctest::Approx(0.954).epsilon(1e-3));
}

TEST_CASE("Shannon entropy and probability validation") {
  CHECK(shannon_entropy(ProbVector({0.5, 0.25, 0.25})) == doctest::Approx(1.5));
  CHECK(shannon_entropy(ProbVector({1.0, 0.0})) == 0.0);
  CHECK_THROWS_AS(ProbVector({0.6, 0.6}), InvalidDistribution);
  CHECK_THROWS_AS(ProbVector({1.1, -0.1}), InvalidDistribution);
  CHECK_THROWS_AS(ProbVector({}), InvalidDistribution);
  const ProbVector tiny({1.0 + 5e-13, -5e-13});
  CHECK(tiny[1] == 0.0);
}

TEST_CASE("density matrix validation") {
  CMatrix bad = CMatrix::Identity(2, 2) / 2.0;
  bad(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix{bad}, InvalidState);
  CHECK_THROWS_AS(DensityMatrix{CMatrix::Identity(2, 2)}, InvalidState);
  CMatrix negative = CMatrix::Zero(2, 2);
  negative(0, 0) = 1.0 + 1e-6;
  negative(1, 1) = -1e-6;
  CHECK_THROWS_AS(DensityMatrix{negative}, InvalidState);
  CMatrix roundoff = CMatrix::Zero(2, 2);
  roundoff(0, 0) = 1.0 + 1e-11;
  roundoff(1, 1) = -1e-11;
  CHECK_NOTHROW(DensityMatrix{roundoff});
  CHECK_THROWS_AS(DensityMatrix{CMatrix::Zero(2, 3)}, DimensionMismatch);
}

TEST_CASE("pure states compare up to a global phase") {
  CVector a(2);
  a << 1.0 / std::sqrt(2.0), cplx(0.0, 1.0 / std::sqrt(2.0));
  const PureState p(a);
  const PureState q(cplx(0.0, 1.0) * a);
  CHECK(p == q);
  CVector b(2);
  b << 1.0, 0.0;
  CHECK_FALSE(p == PureState(b));
  CHECK_THROWS_AS(PureState(CVector::Ones(2)), InvalidState);
  CHECK(PureState::normalized(CVector::Ones(2)).amplitudes().norm() == doctest::Approx(1.0));
}

TEST_CASE("eigh sorts eigenvalues in descending order") {
  std::mt19937_64 rng(5);
  const CMatrix h = testsupport::random_hermitian(rng, 5);
  const Spectrum sp = eigh(h);
  for (int k = 0; k + 1 < 5; ++k) CHECK(sp.values(k) >= sp.values(k + 1));
  const CMatrix back = sp.vectors * sp.values.cast<cplx>().asDiagonal() * sp.vectors.adjoint();
  CHECK((back - h).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("numerical rank") {
  RVector v(4);
  v << 0.5, 0.5, 1e-9, 0.0;
  CHECK(numerical_rank(v) == 2);
}

}
