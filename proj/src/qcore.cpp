#include "entwit/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace entwit {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionMismatch(std::string(what) + ": matrix must be square and non-empty, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

// Fix the phase of each eigenvector so its largest-modulus entry is real
// positive; gives reproducible output for identical input.
void canonicalize_phases(CMatrix& v) {
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      const double a = std::abs(v(r, c));
      if (a > best_abs + 1e-12) {
        best_abs = a;
        best = r;
      }
    }
    if (best_abs > 0.0) {
      const cplx phase = std::conj(v(best, c)) / best_abs;
      v.col(c) *= phase;
    }
  }
}

}  // namespace

ProbVector::ProbVector(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw InvalidDistribution("probability vector is empty");
  double sum = 0.0;
  for (double& x : p_) {
    if (!std::isfinite(x)) throw InvalidDistribution("probability vector has a non-finite entry");
    if (x < -tol::kProbEntry) {
      throw InvalidDistribution("probability vector has negative entry " + std::to_string(x));
    }
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol::kProbSum) {
    throw InvalidDistribution("probability vector sums to " + std::to_string(sum));
  }
}

bool is_hermitian(const CMatrix& m, double tolerance) {
  if (m.rows() != m.cols()) return false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) {
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tolerance) return false;
    }
  }
  return m.allFinite();
}

HermitianOp::HermitianOp(CMatrix m) : m_(std::move(m)) {
  require_square(m_, "HermitianOp");
  if (!is_hermitian(m_)) throw InvalidState("operator is not Hermitian");
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

DensityMatrix::DensityMatrix(CMatrix m) : m_(std::move(m)) {
  require_square(m_, "DensityMatrix");
  if (!is_hermitian(m_)) throw InvalidState("density matrix is not Hermitian");
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
  const double tr = m_.trace().real();
  if (std::abs(tr - 1.0) > tol::kTrace) {
    throw InvalidState("density matrix has trace " + std::to_string(tr));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol::kNegativeEigen) {
    throw InvalidState("density matrix has negative eigenvalue " +
                       std::to_string(es.eigenvalues().minCoeff()));
  }
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index d) {
  return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d));
}

PureState::PureState(CVector amplitudes) : a_(std::move(amplitudes)) {
  if (a_.size() == 0) throw DimensionMismatch("pure state is empty");
  if (std::abs(a_.squaredNorm() - 1.0) > tol::kUnitNorm) {
    throw InvalidState("pure state has squared norm " + std::to_string(a_.squaredNorm()));
  }
}

PureState PureState::normalized(const CVector& v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw InvalidState("cannot normalize a zero vector");
  return PureState(v / n);
}

double projector_distance(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("projector_distance: dimension mismatch");
  return (outer(a) - outer(b)).cwiseAbs().maxCoeff();
}

bool operator==(const PureState& a, const PureState& b) {
  return a.dim() == b.dim() && projector_distance(a.a_, b.a_) <= tol::kProjectorEqual;
}

Spectrum eigh(const CMatrix& m) {
  require_square(m, "eigh");
  if (!is_hermitian(m)) throw InvalidState("eigh: input is not Hermitian");
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw InvalidState("eigh: decomposition failed");
  const Eigen::Index d = h.rows();
  Spectrum s{RVector(d), CMatrix(d, d)};
  // Eigen returns ascending order.
  for (Eigen::Index k = 0; k < d; ++k) {
    s.values(k) = es.eigenvalues()(d - 1 - k);
    s.vectors.col(k) = es.eigenvectors().col(d - 1 - k);
  }
  canonicalize_phases(s.vectors);
  return s;
}

Spectrum eigh(const HermitianOp& h) { return eigh(h.matrix()); }

double entropy_bits(std::span<const double> values) {
  double h = 0.0;
  for (double x : values) {
    const double p = std::clamp(x, 0.0, 1.0);
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double entropy_bits(const RVector& values) {
  return entropy_bits(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

double shannon_entropy(const ProbVector& p) { return entropy_bits(p.values()); }

double von_neumann_entropy_unchecked(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho, Eigen::EigenvaluesOnly);
  return entropy_bits(es.eigenvalues());
}

double von_neumann_entropy(const DensityMatrix& rho) {
  // The constructor already rejected eigenvalues below -1e-9; the rest are
  // clipped to zero inside entropy_bits.
  return von_neumann_entropy_unchecked(rho.matrix());
}

int numerical_rank(const RVector& values, double threshold) {
  return static_cast<int>((values.array() > threshold).count());
}

}  // namespace entwit
