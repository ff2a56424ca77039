#pragma once

// Constructive rank-1 decompositions of a density matrix that keep the
// expectation value of a fixed observable, and the ensemble reduction that
// turns any ensemble into rank-1 states spanning at most n dimensions
// without changing the witness value or raising the average-state entropy.

#include <optional>
#include <string>
#include <vector>

#include "entwit/qcore.hpp"
#include "entwit/witness.hpp"

namespace entwit {

/// Eigenvalues below this are treated as zero.
inline constexpr double kRankThreshold = 1e-8;

struct SplitPart {
  double weight;
  DensityMatrix state;
  CVector ket;  // unit vector with state = |ket><ket|; empty for a remainder
};

struct SplitResult {
  std::vector<SplitPart> parts;
  std::optional<SplitPart> remainder;

  // How the split was built: "rank1", "1" (equal diagonals), "2", "2.1", "2.2".
  std::string branch;
  double theta1 = 0.0;  // root in (0, pi/2); 0 when not used
  double theta2 = 0.0;  // root in (-pi/2, 0)
  int i = -1;           // eigenbasis indices of the two mixed directions
  int j = -1;

  double total_weight() const;
  CMatrix reconstruct() const;
};

/// Two rank-1 states with equal tr(. M). Rank-1 input returns itself with
/// weight 1; rank > 2 throws InvalidArgument.
SplitResult split_rank2(const DensityMatrix& rho, const HermitianOp& M);

/// Removes one eigen-direction: two rank-1 parts with tr(. M) = tr(rho M)
/// plus a remainder of strictly lower rank. Requires rank > 2.
SplitResult peel(const DensityMatrix& rho, const HermitianOp& M);

/// Repeated peel followed by split_rank2; every part is rank-1 and keeps
/// tr(rho M). Never returns a remainder.
SplitResult rank1_decompose(const DensityMatrix& rho, const HermitianOp& M);

struct ReducedEnsemble {
  QuantumEnsemble reduced;   // coordinates in the orthonormal frame, dim min(n, d)
  QuantumEnsemble lifted;    // the chosen rank-1 states in the input dimension
  CMatrix frame;             // d x k orthonormal columns (k <= n)
  std::vector<int> choice;   // part index chosen for each x
  double witness_before = 0.0;
  double witness_after = 0.0;
  double entropy_before = 0.0;
  double entropy_after = 0.0;
};

inline constexpr std::size_t kMaxCombinations = 1000000;

/// Decomposes each rho_x against M^(x) = sum_y alpha_xy M_y, picks the part
/// combination with the smallest average-state entropy (first in scan order,
/// x = 0 most significant) and re-expresses it in a Gram-Schmidt frame.
ReducedEnsemble reduce_ensemble(const QuantumEnsemble& ens, const std::vector<Measurement>& meas,
                                const WitnessSpec& spec);

}  // namespace entwit
