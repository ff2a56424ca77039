#pragma once

// State tomography with the fixed projection settings of the experiment:
// linear inversion with tabulated reconstruction matrices and a
// maximum-likelihood repair that enforces positivity.

#include <vector>

#include "entwit/polsim.hpp"
#include "entwit/qcore.hpp"

namespace entwit {

enum class TomoCase { I3, I4R4 };

struct TomographySettings {
  TomoCase tcase = TomoCase::I3;
  int s = 3;
  std::vector<ProjectionAngles> settings;  // s^2 rows
  std::vector<CMatrix> recon;              // s^2 reconstruction matrices M_j

  /// |nu_j>: the projection states restricted to the first s amplitudes
  /// (not renormalized).
  std::vector<CVector> projectors() const;
};

TomographySettings tomo_settings(TomoCase c);

/// counts[x][j]: coincidences D_ab(|nu_j>) for prepared state x.
struct TomographyDataset {
  std::vector<std::vector<double>> counts;
};

/// Noiseless D_j = N <nu_j|rho|nu_j>.
std::vector<double> forward_counts(const CMatrix& rho, const TomographySettings& ts, double N);

/// rho = sum_j M_j D_j / sum_j tr(M_j) D_j. Trace exactly 1, Hermitian.
CMatrix linear_reconstruct(const std::vector<double>& counts, const TomographySettings& ts);
std::vector<CMatrix> linear_reconstruct(const TomographyDataset& data, const TomographySettings& ts);

/// Poisson log-likelihood with the total flux profiled out:
/// sum_j D_j log p_j - N log sum_j p_j, p_j = <nu_j|rho|nu_j>.
double log_likelihood(const std::vector<double>& counts, const CMatrix& rho, const TomographySettings& ts);

/// Eigenvalues clipped at zero, trace renormalized.
DensityMatrix psd_projection(const CMatrix& m);

struct MleOptions {
  int max_iters = 5000;
  double tol = 1e-9;  // stop when the log-likelihood gains less than this
};

/// Maximizes log_likelihood over rho = T^dagger T / tr, T lower triangular,
/// starting from psd_projection(linear_reconstruct).
DensityMatrix mle_repair(const std::vector<double>& counts, const TomographySettings& ts,
                         const MleOptions& opt = {});
std::vector<DensityMatrix> mle_repair(const TomographyDataset& data, const TomographySettings& ts,
                                      const MleOptions& opt = {});

DensityMatrix average_state(const std::vector<DensityMatrix>& states);

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace entwit
