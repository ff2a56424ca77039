#pragma once

// Minimal von Neumann entropy of the average state at a fixed value of the
// eigenvalue-sum bound, over n rank-1 states in C^n.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entwit/classical.hpp"
#include "entwit/qcore.hpp"
#include "entwit/witness.hpp"

namespace entwit {

/// Hyperspherical angles of states 2..n: row i-1 of `theta` / `phi` holds
/// the i angles theta_{i,1..i} / phi_{i,1..i}.
struct StateAngles {
  std::vector<std::vector<double>> theta;
  std::vector<std::vector<double>> phi;

  static StateAngles zeros(int n);
  /// Flat layout used by the optimizer: per state, i thetas then i phis.
  static StateAngles from_flat(const RVector& x, int n);
  RVector flat() const;
};

/// Number of real parameters for n states: n(n-1).
int angle_count(int n);

/// State 1 is e_0; state i+1 is cos t1, e^{i p1} sin t1 cos t2, ...
std::vector<PureState> build_states(const StateAngles& angles, int n);

struct OptimizationConfig {
  int starts = 64;
  int max_iters = 400;
  std::vector<double> penalty_schedule{10.0, 100.0, 1000.0};
  double objective_tol = 1e-8;
  double constraint_tol = 1e-6;
  std::uint64_t seed = 20240521;

  /// Throws InvalidArgument on starts < 1, an empty or non-increasing
  /// schedule, or non-positive tolerances.
  void validate() const;
};

struct QuantumMinimum {
  double bits = 0.0;
  QuantumEnsemble ensemble;
  std::vector<Measurement> measurements;
  double residual = 0.0;     // |eigen_sum_bound - W|
  int starts_converged = 0;  // starts that met constraint_tol
};

/// Largest eigen_sum_bound over n pure states in C^n (multistart).
double quantum_max(const WitnessSpec& spec, const OptimizationConfig& cfg);

/// Penalized multistart minimization of S(average) with eigen_sum_bound = W.
/// For W <= sum_y |sum_x alpha_xy| a repeated pure state with weakened
/// measurements attains W at zero entropy. Throws InvalidArgument for W < 0,
/// Infeasible above the quantum maximum, NonConvergence when no start
/// reaches constraint_tol.
QuantumMinimum min_quantum_entropy(const WitnessSpec& spec, double W, const OptimizationConfig& cfg);

enum class CurveKind { classical, quantum };

struct CurveSample {
  double W = 0.0;
  double value = 0.0;  // H_min or S_min in bits
  double residual = 0.0;
  int starts_converged = 0;
  bool monotone_fix = false;  // replaced by a later upper bound
  std::optional<std::string> error;
};

struct EntropyCurve {
  CurveKind kind = CurveKind::quantum;
  std::vector<CurveSample> samples;
};

/// Samples the chosen minimizer on a strictly increasing grid. Per-point
/// failures are recorded in the sample. On the quantum curve a value that
/// exceeds a later sample by more than 2e-3 is replaced by that later value.
EntropyCurve entropy_curve(const WitnessSpec& spec, CurveKind kind, const std::vector<double>& grid,
                           const OptimizationConfig& cfg);

struct GapReport {
  double W = 0.0;
  double H_min = 0.0;
  double S_min = 0.0;
  double gap = 0.0;
};

GapReport gap_report(const WitnessSpec& spec, double W, const OptimizationConfig& cfg);

}  // namespace entwit
