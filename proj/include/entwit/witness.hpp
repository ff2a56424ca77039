#pragma once

// Linear dimension witnesses w = sum_xy alpha_xy tr(rho_x M_y), their
// evaluation on quantum ensembles, and the eigenvalue-sum upper bound
// sum_y sum_k |eig_k(sum_x alpha_xy rho_x)| together with the sign-operator
// measurements that saturate it.

#include <string>
#include <string_view>
#include <vector>

#include "entwit/qcore.hpp"

namespace entwit {

class WitnessSpec {
 public:
  /// `alpha` is n x l (preparations x measurements); all entries finite.
  explicit WitnessSpec(RMatrix alpha, std::string name = {});

  int n() const noexcept { return static_cast<int>(alpha_.rows()); }
  int l() const noexcept { return static_cast<int>(alpha_.cols()); }
  const RMatrix& alpha() const noexcept { return alpha_; }
  double operator()(int x, int y) const { return alpha_(x, y); }
  const std::string& name() const noexcept { return name_; }

  WitnessSpec scaled(double c) const { return WitnessSpec(c * alpha_, name_); }

 private:
  RMatrix alpha_;
  std::string name_;
};

/// "I3", "I4" or "R4"; throws InvalidArgument otherwise.
WitnessSpec canonical_witness(std::string_view name);

/// n states of equal dimension with uniform prior 1/n.
class QuantumEnsemble {
 public:
  explicit QuantumEnsemble(std::vector<DensityMatrix> states);
  /// Normalizes each ket and stores its projector.
  static QuantumEnsemble from_kets(const std::vector<CVector>& kets);

  int size() const noexcept { return static_cast<int>(states_.size()); }
  Eigen::Index dim() const noexcept { return states_.front().dim(); }
  const std::vector<DensityMatrix>& states() const noexcept { return states_; }
  const DensityMatrix& operator[](int x) const { return states_.at(static_cast<std::size_t>(x)); }

  DensityMatrix average() const;
  std::vector<CMatrix> matrices() const;

 private:
  std::vector<DensityMatrix> states_;
};

/// A +-1 valued observable stored as signed projectors; the spectrum
/// invariant holds by construction.
class Measurement {
 public:
  struct SignedProjector {
    int sign;        // +1 or -1
    CMatrix basis;   // orthonormal columns spanning the eigenspace
  };

  /// M = V diag(signs) V^dagger for unitary V.
  static Measurement from_sign_basis(const CMatrix& basis, const std::vector<int>& signs);
  /// M = 1 - 2|m><m| (m is normalized first).
  static Measurement projective(const CVector& m);
  /// M = 1 - 2 P where P projects onto span(vectors); the vectors are
  /// orthonormalized first, so the -1 eigenspace has rank vectors.size().
  static Measurement from_minus_subspace(const std::vector<CVector>& vectors);
  /// Accepts a Hermitian operator whose eigenvalues are +-1 within 1e-8.
  static Measurement from_operator(const CMatrix& op);
  static Measurement identity(Eigen::Index d);

  Eigen::Index dim() const noexcept { return dim_; }
  const std::vector<SignedProjector>& projectors() const noexcept { return parts_; }
  int minus_rank() const;
  CMatrix op() const;

 private:
  Measurement(Eigen::Index d, std::vector<SignedProjector> parts);

  Eigen::Index dim_ = 0;
  std::vector<SignedProjector> parts_;
};

/// sum_x sum_y alpha_xy tr(rho_x M_y).
double quantum_value(const QuantumEnsemble& ens, const std::vector<Measurement>& meas,
                     const WitnessSpec& spec);

/// rho^(y) = sum_x alpha_xy rho_x for every y.
std::vector<CMatrix> column_operators(const std::vector<CMatrix>& rhos, const RMatrix& alpha);

/// sum_y sum_k |lambda_yk|; the supremum of quantum_value over measurements.
double eigen_sum_bound(const QuantumEnsemble& ens, const WitnessSpec& spec);
/// Unchecked variant on raw matrices (optimizer hot path).
double eigen_sum_bound(const std::vector<CMatrix>& rhos, const RMatrix& alpha);

/// M_y = sum_k sign(lambda_yk) |v_yk><v_yk|, zero eigenvalues mapped to +1.
std::vector<Measurement> recover_measurements(const QuantumEnsemble& ens, const WitnessSpec& spec);

}  // namespace entwit
