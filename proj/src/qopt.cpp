#include "entwit/qopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "entwit/optim.hpp"

namespace entwit {

namespace {

constexpr double kMonotoneSlack = 2e-3;
// Eigenvalues of the average state are floored here before taking logs in
// the gradient; the entropy value itself uses exact clipping.
constexpr double kLogFloor = 1e-12;

int offset(int i) { return i * (i - 1); }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Amplitudes of state i (i >= 1) from its i thetas and i phis. With
// `dtheta` >= 0 the derivative with respect to that theta is returned.
CVector amplitudes(int n, int i, const double* th, const double* ph, int dtheta = -1) {
  CVector v = CVector::Zero(n);
  double s = 1.0;
  for (int k = 0; k < i; ++k) {
    double c = std::cos(th[k]);
    double sn = std::sin(th[k]);
    if (k == dtheta) {
      c = -std::sin(th[k]);
      sn = std::cos(th[k]);
    }
    const cplx phase = k == 0 ? cplx(1.0) : std::polar(1.0, ph[k - 1]);
    v(k) = phase * s * c;
    s *= sn;
  }
  v(i) = std::polar(1.0, ph[i - 1]) * s;
  if (dtheta > 0) v.head(dtheta).setZero();
  return v;
}

std::vector<CVector> kets_from_flat(const RVector& x, int n) {
  std::vector<CVector> kets;
  kets.reserve(static_cast<std::size_t>(n));
  CVector e0 = CVector::Zero(n);
  e0(0) = 1.0;
  kets.push_back(e0);
  for (int i = 1; i < n; ++i) {
    const double* th = x.data() + offset(i);
    kets.push_back(amplitudes(n, i, th, th + i));
  }
  return kets;
}

struct Evaluation {
  double entropy = 0.0;
  double bound = 0.0;
  std::vector<CMatrix> entropy_grad;  // dS/drho_x (Hermitian), per x
  std::vector<CMatrix> bound_grad;    // dB/drho_x, per x
};

Evaluation evaluate(const std::vector<CVector>& kets, const RMatrix& alpha, bool need_entropy, bool need_grad) {
  const int n = static_cast<int>(kets.size());
  const Eigen::Index d = kets.front().size();
  std::vector<CMatrix> rhos;
  rhos.reserve(kets.size());
  for (const auto& k : kets) rhos.push_back(k * k.adjoint());

  Evaluation ev;
  if (need_entropy) {
    CMatrix avg = CMatrix::Zero(d, d);
    for (const auto& r : rhos) avg += r;
    avg /= static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(avg);
    ev.entropy = entropy_bits(es.eigenvalues());
    if (need_grad) {
      RVector lg(d);
      for (Eigen::Index k = 0; k < d; ++k) lg(k) = -std::log2(std::max(es.eigenvalues()(k), kLogFloor));
      const CMatrix g = es.eigenvectors() * lg.asDiagonal() * es.eigenvectors().adjoint() / static_cast<double>(n);
      ev.entropy_grad.assign(static_cast<std::size_t>(n), g);
    }
  }

  if (need_grad) ev.bound_grad.assign(static_cast<std::size_t>(n), CMatrix::Zero(d, d));
  const auto cols = column_operators(rhos, alpha);
  for (Eigen::Index y = 0; y < alpha.cols(); ++y) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(cols[static_cast<std::size_t>(y)]);
    ev.bound += es.eigenvalues().cwiseAbs().sum();
    if (need_grad) {
      RVector sg = es.eigenvalues().unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
      const CMatrix sign_op = es.eigenvectors() * sg.asDiagonal() * es.eigenvectors().adjoint();
      for (int x = 0; x < n; ++x) {
        if (alpha(x, y) != 0.0) ev.bound_grad[static_cast<std::size_t>(x)] += alpha(x, y) * sign_op;
      }
    }
  }
  return ev;
}

// Chain rule from per-state Hermitian gradients G_x to the flat angles:
// d f = sum_x 2 Re <psi_x| G_x |d psi_x>.
RVector pull_back(const RVector& x, int n, const std::vector<CVector>& kets, const std::vector<CMatrix>& g) {
  RVector grad = RVector::Zero(x.size());
  for (int i = 1; i < n; ++i) {
    const double* th = x.data() + offset(i);
    const CVector gpsi = g[static_cast<std::size_t>(i)] * kets[static_cast<std::size_t>(i)];
    for (int t = 0; t < i; ++t) {
      const CVector dv = amplitudes(n, i, th, th + i, t);
      grad(offset(i) + t) = 2.0 * gpsi.dot(dv).real();
    }
    for (int p = 0; p < i; ++p) {
      // d/dphi_p multiplies component p+1 by i.
      const cplx dcomp = cplx(0.0, 1.0) * kets[static_cast<std::size_t>(i)](p + 1);
      grad(offset(i) + i + p) = 2.0 * (std::conj(gpsi(p + 1)) * dcomp).real();
    }
  }
  return grad;
}

RVector random_start(int n, std::uint64_t seed, int start) {
  std::mt19937_64 rng(splitmix(seed ^ splitmix(static_cast<std::uint64_t>(start) + 1)));
  std::uniform_real_distribution<double> theta(0.0, std::numbers::pi / 2.0);
  std::uniform_real_distribution<double> phi(0.0, 2.0 * std::numbers::pi);
  RVector x(angle_count(n));
  for (int i = 1; i < n; ++i) {
    for (int k = 0; k < i; ++k) x(offset(i) + k) = theta(rng);
    for (int k = 0; k < i; ++k) x(offset(i) + i + k) = phi(rng);
  }
  return x;
}

// Newton steps on B(x) = W along grad B; returns the final |B - W|.
double polish(RVector& x, int n, const RMatrix& alpha, double W) {
  auto residual_at = [&](const RVector& v) {
    return evaluate(kets_from_flat(v, n), alpha, false, false).bound - W;
  };
  double r = residual_at(x);
  for (int it = 0; it < 100 && std::abs(r) > 1e-13; ++it) {
    const auto kets = kets_from_flat(x, n);
    const Evaluation ev = evaluate(kets, alpha, false, true);
    const RVector g = pull_back(x, n, kets, ev.bound_grad);
    const double gg = g.squaredNorm();
    if (gg < 1e-24) break;
    double step = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k) {
      const RVector trial = x - step * r / gg * g;
      const double rt = residual_at(trial);
      if (std::abs(rt) < std::abs(r)) {
        x = trial;
        r = rt;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  return std::abs(r);
}

double zero_entropy_floor(const RMatrix& alpha) { return alpha.colwise().sum().cwiseAbs().sum(); }

// All states e_0; M_y = 1 - 2|m_y><m_y| with <e_0|M_y|e_0> = t_y and
// sum_y c_y t_y = W where c_y is the column sum.
QuantumMinimum repeated_state_solution(const WitnessSpec& spec, double W) {
  const int n = spec.n();
  const RVector c = spec.alpha().colwise().sum().transpose();
  const double b0 = c.cwiseAbs().sum();
  CVector e0 = CVector::Zero(n);
  e0(0) = 1.0;
  std::vector<CVector> kets(static_cast<std::size_t>(n), e0);
  std::vector<Measurement> meas;
  for (int y = 0; y < spec.l(); ++y) {
    const double sign = c(y) < 0.0 ? -1.0 : 1.0;
    const double t = b0 > 0.0 ? std::clamp(W / b0, 0.0, 1.0) * sign : 1.0;
    if (n == 1) {
      meas.push_back(Measurement::from_sign_basis(CMatrix::Identity(1, 1), {t < 0.0 ? -1 : 1}));
      continue;
    }
    CVector m = CVector::Zero(n);
    m(0) = std::sqrt(std::max(0.0, (1.0 - t) / 2.0));
    m(1) = std::sqrt(std::max(0.0, (1.0 + t) / 2.0));
    meas.push_back(Measurement::projective(m));
  }
  QuantumEnsemble ens = QuantumEnsemble::from_kets(kets);
  const double value = quantum_value(ens, meas, spec);
  return QuantumMinimum{0.0, std::move(ens), std::move(meas), std::abs(value - W), 1};
}

}  // namespace

StateAngles StateAngles::zeros(int n) {
  StateAngles a;
  for (int i = 1; i < n; ++i) {
    a.theta.emplace_back(static_cast<std::size_t>(i), 0.0);
    a.phi.emplace_back(static_cast<std::size_t>(i), 0.0);
  }
  return a;
}

StateAngles StateAngles::from_flat(const RVector& x, int n) {
  if (x.size() != angle_count(n)) {
    throw DimensionMismatch("expected " + std::to_string(angle_count(n)) + " angles, got " +
                            std::to_string(x.size()));
  }
  StateAngles a = zeros(n);
  for (int i = 1; i < n; ++i) {
    for (int k = 0; k < i; ++k) {
      a.theta[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)] = x(offset(i) + k);
      a.phi[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)] = x(offset(i) + i + k);
    }
  }
  return a;
}

RVector StateAngles::flat() const {
  const int n = static_cast<int>(theta.size()) + 1;
  RVector x(angle_count(n));
  for (int i = 1; i < n; ++i) {
    for (int k = 0; k < i; ++k) {
      x(offset(i) + k) = theta[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)];
      x(offset(i) + i + k) = phi[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)];
    }
  }
  return x;
}

int angle_count(int n) { return n * (n - 1); }

std::vector<PureState> build_states(const StateAngles& angles, int n) {
  if (n < 1) throw InvalidArgument("build_states needs n >= 1");
  if (static_cast<int>(angles.theta.size()) != n - 1 || static_cast<int>(angles.phi.size()) != n - 1) {
    throw DimensionMismatch("angle arrays need n-1 = " + std::to_string(n - 1) + " rows");
  }
  for (int i = 1; i < n; ++i) {
    if (static_cast<int>(angles.theta[static_cast<std::size_t>(i - 1)].size()) != i ||
        static_cast<int>(angles.phi[static_cast<std::size_t>(i - 1)].size()) != i) {
      throw DimensionMismatch("angle row " + std::to_string(i) + " must hold " + std::to_string(i) + " entries");
    }
  }
  std::vector<PureState> out;
  for (const auto& k : kets_from_flat(angles.flat(), n)) out.push_back(PureState::normalized(k));
  return out;
}

void OptimizationConfig::validate() const {
  if (starts < 1) throw InvalidArgument("starts must be >= 1");
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (penalty_schedule.empty()) throw InvalidArgument("penalty schedule is empty");
  for (std::size_t i = 0; i < penalty_schedule.size(); ++i) {
    if (!(penalty_schedule[i] > 0.0)) throw InvalidArgument("penalty weights must be positive");
    if (i > 0 && !(penalty_schedule[i] > penalty_schedule[i - 1])) {
      throw InvalidArgument("penalty schedule must be strictly increasing");
    }
  }
  if (!(objective_tol > 0.0) || !(constraint_tol > 0.0)) throw InvalidArgument("tolerances must be positive");
}

double quantum_max(const WitnessSpec& spec, const OptimizationConfig& cfg) {
  cfg.validate();
  const int n = spec.n();
  const RMatrix& alpha = spec.alpha();
  if (n == 1) return zero_entropy_floor(alpha);
  const Objective f = [&](const RVector& x, RVector* grad) {
    const auto kets = kets_from_flat(x, n);
    const Evaluation ev = evaluate(kets, alpha, false, grad != nullptr);
    if (grad) {
      *grad = -pull_back(x, n, kets, ev.bound_grad);
    }
    return -ev.bound;
  };
  BfgsOptions opt;
  opt.max_iters = cfg.max_iters;
  opt.f_tol = cfg.objective_tol * 1e-4;
  double best = zero_entropy_floor(alpha);
  for (int s = 0; s < cfg.starts; ++s) {
    const BfgsResult r = bfgs_minimize(f, random_start(n, cfg.seed ^ 0x5a5a5a5aULL, s), opt);
    best = std::max(best, -r.f);
  }
  return best;
}

QuantumMinimum min_quantum_entropy(const WitnessSpec& spec, double W, const OptimizationConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(W)) throw InvalidArgument("target witness value must be finite");
  if (W < 0.0) throw InvalidArgument("target witness value must be >= 0, got " + std::to_string(W));
  const int n = spec.n();
  const RMatrix& alpha = spec.alpha();
  const double b0 = zero_entropy_floor(alpha);
  if (W <= b0 + cfg.constraint_tol) return repeated_state_solution(spec, std::min(W, b0));
  if (n == 1) throw Infeasible("a single preparation cannot exceed " + std::to_string(b0));

  BfgsOptions opt;
  opt.max_iters = cfg.max_iters;
  opt.f_tol = cfg.objective_tol;

  double best_s = std::numeric_limits<double>::infinity();
  double best_residual = std::numeric_limits<double>::infinity();
  RVector best_x;
  int converged = 0;
  for (int s = 0; s < cfg.starts; ++s) {
    RVector x = random_start(n, cfg.seed, s);
    for (double mu : cfg.penalty_schedule) {
      const Objective f = [&](const RVector& v, RVector* grad) {
        const auto kets = kets_from_flat(v, n);
        const Evaluation ev = evaluate(kets, alpha, true, grad != nullptr);
        const double r = ev.bound - W;
        if (grad) {
          std::vector<CMatrix> g(ev.entropy_grad);
          for (std::size_t k = 0; k < g.size(); ++k) g[k] += 2.0 * mu * r * ev.bound_grad[k];
          *grad = pull_back(v, n, kets, g);
        }
        return ev.entropy + mu * r * r;
      };
      x = bfgs_minimize(f, x, opt).x;
    }
    const double residual = polish(x, n, alpha, W);
    best_residual = std::min(best_residual, residual);
    if (residual > cfg.constraint_tol) continue;
    ++converged;
    const double sv = evaluate(kets_from_flat(x, n), alpha, true, false).entropy;
    if (sv < best_s) {
      best_s = sv;
      best_x = x;
    }
  }

  if (converged == 0) {
    const double qmax = quantum_max(spec, cfg);
    if (W > qmax + cfg.constraint_tol) {
      throw Infeasible("witness value " + std::to_string(W) + " exceeds the quantum maximum " +
                       std::to_string(qmax));
    }
    throw NonConvergence("no start met the constraint tolerance", best_residual);
  }

  const auto kets = kets_from_flat(best_x, n);
  QuantumEnsemble ens = QuantumEnsemble::from_kets(kets);
  std::vector<Measurement> meas = recover_measurements(ens, spec);
  const double residual = std::abs(eigen_sum_bound(ens, spec) - W);
  const double bits = von_neumann_entropy(ens.average());
  return QuantumMinimum{bits, std::move(ens), std::move(meas), residual, converged};
}

EntropyCurve entropy_curve(const WitnessSpec& spec, CurveKind kind, const std::vector<double>& grid,
                           const OptimizationConfig& cfg) {
  if (grid.empty()) throw InvalidArgument("witness grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("witness grid must be strictly increasing");
  }
  EntropyCurve curve;
  curve.kind = kind;
  for (double W : grid) {
    CurveSample s;
    s.W = W;
    try {
      if (kind == CurveKind::classical) {
        const ClassicalMinimum m = min_classical_entropy(spec, W);
        s.value = m.bits;
        s.residual = std::abs(m.witness - W);
        s.starts_converged = 1;
      } else {
        const QuantumMinimum m = min_quantum_entropy(spec, W, cfg);
        s.value = m.bits;
        s.residual = m.residual;
        s.starts_converged = m.starts_converged;
      }
    } catch (const Error& e) {
      s.value = std::numeric_limits<double>::quiet_NaN();
      s.error = e.what();
    }
    curve.samples.push_back(std::move(s));
  }
  if (kind == CurveKind::quantum) {
    double later = std::numeric_limits<double>::infinity();
    for (auto it = curve.samples.rbegin(); it != curve.samples.rend(); ++it) {
      if (it->error) continue;
      if (it->value > later + kMonotoneSlack) {
        it->value = later;
        it->monotone_fix = true;
      }
      later = std::min(later, it->value);
    }
  }
  return curve;
}

GapReport gap_report(const WitnessSpec& spec, double W, const OptimizationConfig& cfg) {
  const double h = min_classical_entropy(spec, W).bits;
  const double s = min_quantum_entropy(spec, W, cfg).bits;
  return {W, h, s, h - s};
}

}  // namespace entwit
