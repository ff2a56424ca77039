#include <doctest.h>

#include <sstream>

#include "entwit/error.hpp"
#include "entwit/io.hpp"
#include "entwit/tomo.hpp"
#include "support.hpp"

using namespace entwit;

namespace {

int design_rank(const TomographySettings& ts) {
  const auto nus = ts.projectors();
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(nus.size()), ts.s * ts.s);
  for (std::size_t j = 0; j < nus.size(); ++j) {
    const CMatrix p = nus[j] * nus[j].adjoint();
    for (int a = 0; a < ts.s; ++a) {
      for (int b = 0; b < ts.s; ++b) A(static_cast<Eigen::Index>(j), a * ts.s + b) = p(a, b);
    }
  }
  return static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXcd>(A).rank());
}

}  // namespace

TEST_SUITE("tomo") {

TEST_CASE("designs are informationally complete") {
  for (TomoCase c : {TomoCase::I3, TomoCase::I4R4}) {
    const TomographySettings ts = tomo_settings(c);
    CHECK(static_cast<int>(ts.settings.size()) == ts.s * ts.s);
    CHECK(static_cast<int>(ts.recon.size()) == ts.s * ts.s);
    CHECK(design_rank(ts) == ts.s * ts.s);
    for (std::size_t j = 0; j < ts.recon.size(); ++j) {
      const double expected = static_cast<int>(j) < ts.s ? 1.0 : 0.0;
      CHECK(ts.recon[j].trace().real() == doctest::Approx(expected));
      CHECK((ts.recon[j] - ts.recon[j].adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("linear inversion round trip") {
  std::mt19937_64 rng(31);
  for (TomoCase c : {TomoCase::I3, TomoCase::I4R4}) {
    const TomographySettings ts = tomo_settings(c);
    for (int trial = 0; trial < 20; ++trial) {
      const CMatrix rho = testsupport::random_density(rng, ts.s, 1 + trial % ts.s);
      const double N = 1000.0 * (1 + trial);
      const CMatrix back = linear_reconstruct(forward_counts(rho, ts, N), ts);
      CHECK((back - rho).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(back.trace().real() == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("maximum likelihood repairs a non-positive estimate") {
  const TomographySettings ts = tomo_settings(TomoCase::I4R4);
  CMatrix rho = CMatrix::Zero(4, 4);
  rho(0, 0) = 1.0;
  std::vector<double> counts = forward_counts(rho, ts, 5000.0);
  std::mt19937_64 rng(32);
  std::normal_distribution<double> noise(0.0, 40.0);
  for (double& d : counts) d = std::max(0.0, std::round(d + noise(rng)));
  const CMatrix lin = linear_reconstruct(counts, ts);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(lin);
  REQUIRE(es.eigenvalues().minCoeff() < 0.0);

  const DensityMatrix seed = psd_projection(lin);
  const DensityMatrix mle = mle_repair(counts, ts);
  Eigen::SelfAdjointEigenSolver<CMatrix> em(mle.matrix());
  CHECK(em.eigenvalues().minCoeff() >= -1e-12);
  CHECK(mle.matrix().trace().real() == doctest::Approx(1.0));
  CHECK(log_likelihood(counts, mle.matrix(), ts) > log_likelihood(counts, seed.matrix(), ts));
  CHECK(fidelity(mle, DensityMatrix(rho)) > 0.95);
}

TEST_CASE("fidelity") {
  std::mt19937_64 rng(33);
  const CMatrix a = testsupport::random_density(rng, 3, 1);
  const CMatrix b = testsupport::random_density(rng, 3, 1);
  CHECK(fidelity(DensityMatrix(a), DensityMatrix(a)) == doctest::Approx(1.0));
  // Pure states: |<a|b>|^2 = tr(a b).
  CHECK(fidelity(DensityMatrix(a), DensityMatrix(b)) == doctest::Approx((a * b).trace().real()).epsilon(1e-8));
  const CMatrix mixed = testsupport::random_density(rng, 3, 3);
  CHECK(fidelity(DensityMatrix(mixed), DensityMatrix(a)) == doctest::Approx((mixed * a).trace().real()).epsilon(1e-8));
}

TEST_CASE("input validation") {
  const TomographySettings ts = tomo_settings(TomoCase::I3);
  CHECK_THROWS_AS(linear_reconstruct(std::vector<double>(8, 1.0), ts), DimensionMismatch);
  CHECK_THROWS_AS(linear_reconstruct(std::vector<double>(9, -1.0), ts), InvalidArgument);
  CHECK_THROWS_AS(mle_repair(std::vector<double>(9, 0.0), ts), InvalidArgument);
  CHECK_THROWS_AS(average_state({}), InvalidArgument);
}

TEST_CASE("counts CSV round trip") {
  TomographyDataset d;
  d.counts = {{1, 2, 3}, {4, 5, 6}};
  std::stringstream ss;
  io::write_tomography_csv(ss, d);
  const TomographyDataset back = io::read_tomography_csv(ss);
  CHECK(back.counts == d.counts);
  std::istringstream bad("state_index,setting_index,count\n0,0,1\n0,0,2\n");
  CHECK_THROWS_AS(io::read_tomography_csv(bad), InvalidArgument);
  std::istringstream gap("state_index,setting_index,count\n0,1,1\n");
  CHECK_THROWS_AS(io::read_tomography_csv(gap), InvalidArgument);
}

}
