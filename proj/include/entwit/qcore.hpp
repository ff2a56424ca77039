#pragma once

// Numeric primitives: Hermitian algebra, probability vectors and the two
// entropy functionals (Shannon, von Neumann). All entropies are in bits.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "entwit/error.hpp"

namespace entwit {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

namespace tol {
inline constexpr double kHermitian = 1e-10;
inline constexpr double kTrace = 1e-9;
inline constexpr double kNegativeEigen = 1e-9;
inline constexpr double kProbSum = 1e-9;
inline constexpr double kProbEntry = 1e-12;
inline constexpr double kUnitNorm = 1e-10;
inline constexpr double kProjectorEqual = 1e-8;
}  // namespace tol

/// Discrete probability distribution over a message alphabet.
class ProbVector {
 public:
  /// Validates and stores `p`; entries in [-1e-12, 0) are clamped to zero.
  explicit ProbVector(std::vector<double> p);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const noexcept { return p_; }

 private:
  std::vector<double> p_;
};

/// Complex conjugate-symmetric matrix (checked elementwise to 1e-10).
class HermitianOp {
 public:
  explicit HermitianOp(CMatrix m);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const CMatrix& matrix() const noexcept { return m_; }

 private:
  CMatrix m_;
};

/// Hermitian, unit trace, no eigenvalue below -1e-9.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix m);

  static DensityMatrix maximally_mixed(Eigen::Index d);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const CMatrix& matrix() const noexcept { return m_; }

 private:
  CMatrix m_;
};

/// Unit vector in C^d. Equality ignores the global phase.
class PureState {
 public:
  /// Requires squared norm 1 within 1e-10.
  explicit PureState(CVector amplitudes);
  /// Rescales `v` to unit norm; `v` must be non-zero.
  static PureState normalized(const CVector& v);

  Eigen::Index dim() const noexcept { return a_.size(); }
  const CVector& amplitudes() const noexcept { return a_; }
  CMatrix projector() const { return a_ * a_.adjoint(); }
  DensityMatrix density() const { return DensityMatrix(projector()); }

  friend bool operator==(const PureState& a, const PureState& b);

 private:
  CVector a_;
};

/// Largest elementwise modulus of the difference of two projectors.
double projector_distance(const CVector& a, const CVector& b);

/// Eigen-decomposition with eigenvalues sorted in descending order.
struct Spectrum {
  RVector values;
  CMatrix vectors;  // columns are eigenvectors
};

Spectrum eigh(const HermitianOp& h);
/// Same as above for a raw matrix; throws InvalidState when not Hermitian.
Spectrum eigh(const CMatrix& m);

double shannon_entropy(const ProbVector& p);
double von_neumann_entropy(const DensityMatrix& rho);

/// -sum x log2 x over the given eigenvalues/probabilities, 0 log 0 := 0.
/// No validation; values are clipped to [0, 1].
double entropy_bits(std::span<const double> values);
double entropy_bits(const RVector& values);

/// Entropy of a matrix assumed Hermitian and PSD (optimizer hot path).
double von_neumann_entropy_unchecked(const CMatrix& rho);

bool is_hermitian(const CMatrix& m, double tolerance = tol::kHermitian);

/// Count of eigenvalues strictly above `threshold`.
int numerical_rank(const RVector& values, double threshold = 1e-8);

/// |v><v| for an arbitrary (not necessarily normalized) vector.
inline CMatrix outer(const CVector& v) { return v * v.adjoint(); }

}  // namespace entwit
