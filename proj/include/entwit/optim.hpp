#pragma once

// Small dense quasi-Newton minimizer used by the quantum optimizer and the
// tomography likelihood fit.

#include <functional>

#include "entwit/qcore.hpp"

namespace entwit {

/// Returns f(x); when `grad` is non-null it also writes the gradient.
using Objective = std::function<double(const RVector& x, RVector* grad)>;

struct BfgsOptions {
  int max_iters = 500;
  double grad_tol = 1e-9;
  double f_tol = 1e-13;  // stop when |f_k - f_{k+1}| <= f_tol * (1 + |f_k|)
};

struct BfgsResult {
  RVector x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// BFGS with Armijo backtracking; restarts from steepest descent when the
/// curvature condition fails.
BfgsResult bfgs_minimize(const Objective& f, RVector x0, const BfgsOptions& opt = {});

}  // namespace entwit
