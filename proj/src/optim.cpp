#include "entwit/optim.hpp"

#include <cmath>

namespace entwit {

BfgsResult bfgs_minimize(const Objective& f, RVector x0, const BfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  BfgsResult res;
  res.x = std::move(x0);
  RVector g(n);
  res.f = f(res.x, &g);
  if (!std::isfinite(res.f)) throw InvalidArgument("objective is not finite at the starting point");

  RMatrix h = RMatrix::Identity(n, n);  // inverse Hessian estimate
  RVector g_new(n), x_new(n);
  for (int it = 0; it < opt.max_iters; ++it) {
    res.iterations = it + 1;
    if (g.norm() <= opt.grad_tol) {
      res.converged = true;
      return res;
    }
    RVector p = -h * g;
    double slope = p.dot(g);
    if (slope >= 0.0) {
      h.setIdentity();
      p = -g;
      slope = -g.squaredNorm();
    }

    double step = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      x_new = res.x + step * p;
      f_new = f(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= res.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = g.norm() <= std::sqrt(opt.grad_tol);
      return res;
    }

    const RVector s = x_new - res.x;
    const RVector yv = g_new - g;
    const double sy = s.dot(yv);
    const double f_old = res.f;
    res.x = x_new;
    res.f = f_new;
    g = g_new;
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      if (it == 0) h *= sy / yv.squaredNorm();
      const double rho = 1.0 / sy;
      const RVector hy = h * yv;
      h += (rho * rho * yv.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    } else {
      h.setIdentity();
    }
    if (std::abs(f_old - f_new) <= opt.f_tol * (1.0 + std::abs(f_old))) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace entwit
