#pragma once

// Test-only helpers: random matrices and straightforward reference
// implementations that do not go through the library code paths.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "entwit/qcore.hpp"

namespace testsupport {

using entwit::CMatrix;
using entwit::CVector;
using entwit::cplx;

inline CMatrix gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = cplx(g(rng), g(rng));
  }
  return m;
}

/// Random density matrix of the given rank (Wishart with rank columns).
inline CMatrix random_density(std::mt19937_64& rng, int d, int rank) {
  const CMatrix g = gaussian(rng, d, rank);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline CMatrix random_hermitian(std::mt19937_64& rng, int d) {
  const CMatrix g = gaussian(rng, d, d);
  return 0.5 * (g + g.adjoint());
}

inline CMatrix random_unitary(std::mt19937_64& rng, int d) {
  Eigen::HouseholderQR<CMatrix> qr(gaussian(rng, d, d));
  return qr.householderQ();
}

/// U diag(+-1) U^dagger with random signs.
inline CMatrix random_pm_observable(std::mt19937_64& rng, int d) {
  const CMatrix u = random_unitary(rng, d);
  std::bernoulli_distribution coin;
  Eigen::VectorXcd s(d);
  for (int k = 0; k < d; ++k) s(k) = coin(rng) ? 1.0 : -1.0;
  return u * s.asDiagonal() * u.adjoint();
}

inline double expectation(const CMatrix& rho, const CMatrix& m) { return (rho * m).trace().real(); }

/// -tr(rho log2 rho) via Eigen directly.
inline double entropy_oracle(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()));
  double s = 0.0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const double v = es.eigenvalues()(k);
    if (v > 1e-15) s -= v * std::log2(v);
  }
  return s;
}

inline double shannon_oracle(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) {
    if (v > 0.0) s -= v * std::log2(v);
  }
  return s;
}

inline int rank_oracle(const CMatrix& m, double tol = 1e-7) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  int r = 0;
  for (int k = 0; k < es.eigenvalues().size(); ++k) r += es.eigenvalues()(k) > tol;
  return r;
}

/// max |P_a - P_b| for the projectors of two (normalized) kets.
inline double projector_gap(CVector a, CVector b) {
  a.normalize();
  b.normalize();
  return (a * a.adjoint() - b * b.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace testsupport
