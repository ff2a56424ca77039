#include "entwit/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

namespace entwit {

namespace {

constexpr double kEqualDiagonal = 1e-10;
constexpr double kRootWidth = 1e-12;
constexpr double kIndependent = 1e-10;

// rho in its eigenbasis: V (descending), the support eigenvalues
// renormalized to sum 1, and M rotated into the same basis.
struct Eigenframe {
  CMatrix V;
  RVector lam;
  int rank = 0;
  CMatrix m;
};

Eigenframe eigenframe(const DensityMatrix& rho, const HermitianOp& M) {
  if (rho.dim() != M.dim()) throw DimensionMismatch("state and observable dimensions differ");
  const Spectrum s = eigh(rho.matrix());
  Eigenframe f;
  f.V = s.vectors;
  f.rank = numerical_rank(s.values, kRankThreshold);
  f.lam = s.values.head(f.rank);
  f.lam /= f.lam.sum();
  f.m = f.V.adjoint() * M.matrix() * f.V;
  return f;
}

double bisect(const std::function<double(double)>& fn, double lo, double hi) {
  double flo = fn(lo);
  while (hi - lo > kRootWidth) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SplitPart pure_part(double weight, const CVector& ket) {
  const CVector k = ket / ket.norm();
  return SplitPart{weight, DensityMatrix(k * k.adjoint()), k};
}

CVector rotate(const Eigenframe& f, int a, int b, double theta) {
  return std::cos(theta) * f.V.col(a) + std::sin(theta) * f.V.col(b);
}

// Roots of g(theta) = maa cos^2 + mbb sin^2 + 2 Re(mab) cos sin - target on
// (0, pi/2) and (-pi/2, 0).
std::pair<double, double> roots(const Eigenframe& f, int a, int b, double target) {
  const double maa = f.m(a, a).real();
  const double mbb = f.m(b, b).real();
  const double cross = 2.0 * f.m(a, b).real();
  const auto g = [&](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return maa * c * c + mbb * s * s + cross * c * s - target;
  };
  const double h = std::numbers::pi / 2.0;
  return {bisect(g, 0.0, h), bisect(g, -h, 0.0)};
}

SplitPart remainder_part(const Eigenframe& f, RVector coeffs) {
  coeffs = coeffs.cwiseMax(0.0);
  const double mu = coeffs.sum();
  const Eigen::Index r = coeffs.size();
  const CMatrix rho = f.V.leftCols(r) * (coeffs / mu).cast<cplx>().asDiagonal() * f.V.leftCols(r).adjoint();
  return SplitPart{mu, DensityMatrix(rho), CVector()};
}

}  // namespace

double SplitResult::total_weight() const {
  double w = remainder ? remainder->weight : 0.0;
  for (const auto& p : parts) w += p.weight;
  return w;
}

CMatrix SplitResult::reconstruct() const {
  const Eigen::Index d = parts.front().state.dim();
  CMatrix sum = CMatrix::Zero(d, d);
  for (const auto& p : parts) sum += p.weight * p.state.matrix();
  if (remainder) sum += remainder->weight * remainder->state.matrix();
  return sum;
}

SplitResult split_rank2(const DensityMatrix& rho, const HermitianOp& M) {
  const Eigenframe f = eigenframe(rho, M);
  SplitResult out;
  if (f.rank == 1) {
    out.branch = "rank1";
    out.parts.push_back(pure_part(1.0, f.V.col(0)));
    return out;
  }
  if (f.rank > 2) {
    throw InvalidArgument("split_rank2 needs rank <= 2, got rank " + std::to_string(f.rank) + "; use peel");
  }
  int a = 0, b = 1;
  if (f.m(1, 1).real() > f.m(0, 0).real()) std::swap(a, b);
  out.i = a;
  out.j = b;
  const double la = f.lam(a), lb = f.lam(b);
  if (std::abs(f.m(a, a).real() - f.m(b, b).real()) <= kEqualDiagonal) {
    out.branch = "1";
    out.parts.push_back(pure_part(la, f.V.col(a)));
    out.parts.push_back(pure_part(lb, f.V.col(b)));
    return out;
  }
  out.branch = "2";
  const double target = f.m(a, a).real() * la + f.m(b, b).real() * lb;
  const auto [t1, t2] = roots(f, a, b, target);
  out.theta1 = t1;
  out.theta2 = t2;
  const double s1 = std::sin(2.0 * t1), s2 = std::sin(2.0 * t2);
  out.parts.push_back(pure_part(-s2 / (s1 - s2), rotate(f, a, b, t1)));
  out.parts.push_back(pure_part(s1 / (s1 - s2), rotate(f, a, b, t2)));
  return out;
}

SplitResult peel(const DensityMatrix& rho, const HermitianOp& M) {
  const Eigenframe f = eigenframe(rho, M);
  if (f.rank <= 2) {
    throw InvalidArgument("peel needs rank > 2, got rank " + std::to_string(f.rank) + "; use split_rank2");
  }
  const int r = f.rank;
  int i = 0, j = 0;
  for (int k = 1; k < r; ++k) {
    if (f.m(k, k).real() > f.m(i, i).real()) i = k;
    if (f.m(k, k).real() < f.m(j, j).real()) j = k;
  }
  SplitResult out;
  RVector coeffs = f.lam;
  if (f.m(i, i).real() - f.m(j, j).real() <= kEqualDiagonal) {
    i = 0;
    j = 1;
    out.branch = "1";
    out.i = i;
    out.j = j;
    out.parts.push_back(pure_part(f.lam(i), f.V.col(i)));
    out.parts.push_back(pure_part(f.lam(j), f.V.col(j)));
    coeffs(i) = 0.0;
    coeffs(j) = 0.0;
    out.remainder = remainder_part(f, coeffs);
    return out;
  }
  out.i = i;
  out.j = j;
  double target = 0.0;
  for (int k = 0; k < r; ++k) target += f.lam(k) * f.m(k, k).real();
  const auto [t1, t2] = roots(f, i, j, target);
  out.theta1 = t1;
  out.theta2 = t2;
  const double s1 = std::sin(2.0 * t1), s2 = std::sin(2.0 * t2);
  const double c1 = std::cos(t1) * std::cos(t1), c2 = std::cos(t2) * std::cos(t2);
  const double dc = s1 * c2 - s2 * c1;
  const double ds = s1 * (1.0 - c2) - s2 * (1.0 - c1);
  const double li = f.lam(i), lj = f.lam(j);
  double w0 = 0.0, w1 = 0.0;
  if (dc / li > ds / lj) {
    out.branch = "2.1";
    w0 = li * -s2 / dc;
    w1 = li * s1 / dc;
    coeffs(i) = 0.0;
    coeffs(j) = lj - li * ds / dc;
  } else {
    out.branch = "2.2";
    w0 = lj * -s2 / ds;
    w1 = lj * s1 / ds;
    coeffs(i) = li - lj * dc / ds;
    coeffs(j) = 0.0;
  }
  out.parts.push_back(pure_part(w0, rotate(f, i, j, t1)));
  out.parts.push_back(pure_part(w1, rotate(f, i, j, t2)));
  out.remainder = remainder_part(f, coeffs);
  return out;
}

SplitResult rank1_decompose(const DensityMatrix& rho, const HermitianOp& M) {
  SplitResult out;
  out.branch = "lemma3";
  DensityMatrix current = rho;
  double scale = 1.0;
  for (;;) {
    const Spectrum s = eigh(current.matrix());
    if (numerical_rank(s.values, kRankThreshold) <= 2) {
      for (auto& p : split_rank2(current, M).parts) {
        p.weight *= scale;
        out.parts.push_back(std::move(p));
      }
      return out;
    }
    SplitResult step = peel(current, M);
    for (auto& p : step.parts) {
      p.weight *= scale;
      out.parts.push_back(std::move(p));
    }
    scale *= step.remainder->weight;
    current = step.remainder->state;
  }
}

ReducedEnsemble reduce_ensemble(const QuantumEnsemble& ens, const std::vector<Measurement>& meas,
                                const WitnessSpec& spec) {
  const int n = spec.n();
  if (ens.size() != n) throw DimensionMismatch("ensemble size does not match the witness");
  if (static_cast<int>(meas.size()) != spec.l()) throw DimensionMismatch("measurement count does not match the witness");
  const Eigen::Index d = ens.dim();

  std::vector<CMatrix> ops;
  for (const auto& m : meas) ops.push_back(m.op());
  std::vector<std::vector<CVector>> kets(static_cast<std::size_t>(n));
  std::size_t combos = 1;
  for (int x = 0; x < n; ++x) {
    CMatrix mx = CMatrix::Zero(d, d);
    for (int y = 0; y < spec.l(); ++y) mx += spec(x, y) * ops[static_cast<std::size_t>(y)];
    const SplitResult dec = rank1_decompose(ens[x], HermitianOp(mx));
    for (const auto& p : dec.parts) kets[static_cast<std::size_t>(x)].push_back(p.ket);
    combos *= kets[static_cast<std::size_t>(x)].size();
    if (combos > kMaxCombinations) {
      throw GuardExceeded("reduce_ensemble: more than " + std::to_string(kMaxCombinations) + " combinations",
                          combos);
    }
  }

  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<int> best_idx = idx;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < combos; ++c) {
    CMatrix avg = CMatrix::Zero(d, d);
    for (int x = 0; x < n; ++x) {
      const CVector& k = kets[static_cast<std::size_t>(x)][static_cast<std::size_t>(idx[static_cast<std::size_t>(x)])];
      avg += k * k.adjoint();
    }
    const double s = von_neumann_entropy_unchecked(avg / static_cast<double>(n));
    if (s < best - 1e-12) {
      best = s;
      best_idx = idx;
    }
    for (int x = n - 1; x >= 0; --x) {
      auto& v = idx[static_cast<std::size_t>(x)];
      if (++v < static_cast<int>(kets[static_cast<std::size_t>(x)].size())) break;
      v = 0;
    }
  }

  std::vector<CVector> chosen;
  for (int x = 0; x < n; ++x) {
    chosen.push_back(kets[static_cast<std::size_t>(x)][static_cast<std::size_t>(best_idx[static_cast<std::size_t>(x)])]);
  }
  std::vector<CVector> frame;
  for (const auto& k : chosen) {
    CVector v = k;
    for (const auto& e : frame) v -= e.dot(v) * e;
    if (v.norm() > kIndependent) frame.push_back(v / v.norm());
  }
  CMatrix F(d, static_cast<Eigen::Index>(frame.size()));
  for (std::size_t c = 0; c < frame.size(); ++c) F.col(static_cast<Eigen::Index>(c)) = frame[c];

  const Eigen::Index out_dim = std::min<Eigen::Index>(n, d);
  std::vector<CVector> coords;
  for (const auto& k : chosen) {
    CVector c = CVector::Zero(out_dim);
    c.head(F.cols()) = F.adjoint() * k;
    coords.push_back(c);
  }

  QuantumEnsemble lifted = QuantumEnsemble::from_kets(chosen);
  QuantumEnsemble reduced = QuantumEnsemble::from_kets(coords);
  const double w_before = quantum_value(ens, meas, spec);
  const double w_after = quantum_value(lifted, meas, spec);
  const double s_before = von_neumann_entropy(ens.average());
  const double s_after = von_neumann_entropy(reduced.average());
  return ReducedEnsemble{std::move(reduced), std::move(lifted), std::move(F), std::move(best_idx),
                         w_before, w_after, s_before, s_after};
}

}  // namespace entwit
