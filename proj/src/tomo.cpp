#include "entwit/tomo.hpp"

#include <cmath>
#include <limits>

#include "entwit/error.hpp"
#include "entwit/optim.hpp"

namespace entwit {

namespace {

using Rows = std::initializer_list<std::initializer_list<cplx>>;

CMatrix mat(Rows rows, double scale) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  CMatrix m(n, n);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (cplx v : row) m(r, c++) = v * scale;
    ++r;
  }
  return m;
}

TomographySettings make_s3() {
  const cplx i(0.0, 1.0);
  TomographySettings t;
  t.tcase = TomoCase::I3;
  t.s = 3;
  t.settings = {{0, 0, 0, 0},        {45, 0, 0, 0},        {45, 0, 45, 0},
                {45, 0, 22.5, 0},    {45, 0, 22.5, 45},    {22.5, 45, 22.5, 45},
                {22.5, 45, 22.5, 90}, {22.5, 45, 0, 90},   {22.5, 0, 0, 90}};
  t.recon = {
      mat({{2, -1. + i, 0}, {-1. - i, 0, 0}, {0, 0, 0}}, 0.5),
      mat({{0, -1. + i, 1. - i}, {-1. - i, 2, -1. + i}, {1. + i, -1. - i, 0}}, 0.5),
      mat({{0, 0, -2. * i}, {0, 0, -1. + i}, {2. * i, -1. - i, 2}}, 0.5),
      mat({{0, 0, i}, {0, 0, -i}, {-i, i, 0}}, 1),
      mat({{0, 0, -1}, {0, 0, 1}, {-1, 1, 0}}, 1),
      mat({{0, 0, 2}, {0, 0, 0}, {2, 0, 0}}, 1),
      mat({{0, 0, 2. * i}, {0, 0, 0}, {-2. * i, 0, 0}}, 1),
      mat({{0, 1, -1. - i}, {1, 0, 0}, {-1. + i, 0, 0}}, 1),
      mat({{0, -i, 0}, {i, 0, 0}, {0, 0, 0}}, 1),
  };
  return t;
}

TomographySettings make_s4() {
  const cplx i(0.0, 1.0);
  TomographySettings t;
  t.tcase = TomoCase::I4R4;
  t.s = 4;
  t.settings = {{45, 0, 45, 0},      {45, 0, 0, 0},       {0, 0, 0, 0},        {0, 0, 45, 0},
                {22.5, 0, 45, 0},    {22.5, 0, 0, 0},     {22.5, 45, 0, 0},    {22.5, 45, 45, 0},
                {22.5, 45, 22.5, 0}, {22.5, 45, 22.5, 45}, {22.5, 0, 22.5, 45}, {45, 0, 22.5, 45},
                {0, 0, 22.5, 45},    {0, 0, 22.5, 90},    {45, 0, 22.5, 90},   {22.5, 0, 22.5, 90}};
  t.recon = {
      mat({{0, 0, 1, 0}, {0, 0, -1. - i, i}, {1, -1. + i, 2, -1. - i}, {0, -i, -1. + i, 0}}, 0.5),
      mat({{0, -1. + i, 1, 0}, {-1. - i, 2, -1. - i, i}, {1, -1. + i, 0, 0}, {0, -i, 0, 0}}, 0.5),
      mat({{2, -1. + i, 1, -1. - i}, {-1. - i, 0, 0, i}, {1, 0, 0, 0}, {-1. + i, -i, 0, 0}}, 0.5),
      mat({{0, 0, 1, -1. - i}, {0, 0, 0, i}, {1, 0, 0, -1. - i}, {-1. + i, -i, -1. + i, 2}}, 0.5),
      mat({{0, 0, -1. + i, 0}, {0, 0, 0, 1. - i}, {-1. - i, 0, 0, 2. * i}, {0, 1. + i, -2. * i, 0}}, 0.5),
      mat({{0, -2. * i, -1. + i, 0}, {2. * i, 0, 0, 1. - i}, {-1. - i, 0, 0, 0}, {0, 1. + i, 0, 0}}, 0.5),
      mat({{0, 2, -1. + i, 0}, {2, 0, 0, -1. + i}, {-1. - i, 0, 0, 0}, {0, -1. - i, 0, 0}}, 0.5),
      mat({{0, 0, -1. + i, 0}, {0, 0, 0, -1. + i}, {-1. - i, 0, 0, 2}, {0, -1. - i, 2, 0}}, 0.5),
      mat({{0, 0, -i, 0}, {0, 0, 0, -i}, {i, 0, 0, 0}, {0, i, 0, 0}}, 1),
      mat({{0, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, 0}}, 1),
      mat({{0, 0, -i, 0}, {0, 0, 0, i}, {i, 0, 0, 0}, {0, -i, 0, 0}}, 1),
      mat({{0, 0, -1. + i, 0}, {0, 0, 2, -1. - i}, {-1. - i, 2, 0, 0}, {0, -1. + i, 0, 0}}, 0.5),
      mat({{0, 0, -1. + i, 2}, {0, 0, 0, -1. - i}, {-1. - i, 0, 0, 0}, {2, -1. + i, 0, 0}}, 0.5),
      mat({{0, 0, -1. - i, 2. * i}, {0, 0, 0, 1. - i}, {-1. + i, 0, 0, 0}, {-2. * i, 1. + i, 0, 0}}, 0.5),
      mat({{0, 0, -1. - i, 0}, {0, 0, 2. * i, 1. - i}, {-1. + i, -2. * i, 0, 0}, {0, 1. + i, 0, 0}}, 0.5),
      mat({{0, 0, 1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, -1, 0, 0}}, 1),
  };
  return t;
}

void check_counts(const std::vector<double>& counts, const TomographySettings& ts) {
  if (counts.size() != ts.settings.size()) {
    throw DimensionMismatch("expected " + std::to_string(ts.settings.size()) + " tomography counts, got " +
                            std::to_string(counts.size()));
  }
  for (double d : counts) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidArgument("tomography counts must be finite and >= 0");
  }
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Lower-triangular T <-> parameter vector: real parts on and below the
// diagonal, imaginary parts strictly below it.
CMatrix unpack(const RVector& v, int s) {
  CMatrix t = CMatrix::Zero(s, s);
  Eigen::Index k = 0;
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b <= a; ++b) t(a, b) = v(k++);
  }
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < a; ++b) t(a, b) += cplx(0.0, v(k++));
  }
  return t;
}

RVector pack_gradient(const CMatrix& tg, int s) {
  RVector g(s * s);
  Eigen::Index k = 0;
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b <= a; ++b) g(k++) = 2.0 * tg(a, b).real();
  }
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < a; ++b) g(k++) = 2.0 * tg(a, b).imag();
  }
  return g;
}

RVector pack(const CMatrix& t) {
  const int s = static_cast<int>(t.rows());
  RVector v(s * s);
  Eigen::Index k = 0;
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b <= a; ++b) v(k++) = t(a, b).real();
  }
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < a; ++b) v(k++) = t(a, b).imag();
  }
  return v;
}

}  // namespace

std::vector<CVector> TomographySettings::projectors() const {
  std::vector<CVector> out;
  out.reserve(settings.size());
  for (const auto& a : settings) out.push_back(projection_state(a).amplitudes().head(s));
  return out;
}

TomographySettings tomo_settings(TomoCase c) {
  static const TomographySettings s3 = make_s3();
  static const TomographySettings s4 = make_s4();
  return c == TomoCase::I3 ? s3 : s4;
}

std::vector<double> forward_counts(const CMatrix& rho, const TomographySettings& ts, double N) {
  if (rho.rows() != ts.s || rho.cols() != ts.s) throw DimensionMismatch("state dimension does not match settings");
  std::vector<double> d;
  for (const CVector& nu : ts.projectors()) d.push_back(N * nu.dot(rho * nu).real());
  return d;
}

CMatrix linear_reconstruct(const std::vector<double>& counts, const TomographySettings& ts) {
  check_counts(counts, ts);
  CMatrix num = CMatrix::Zero(ts.s, ts.s);
  double den = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    num += ts.recon[j] * counts[j];
    den += ts.recon[j].trace().real() * counts[j];
  }
  if (!(den > 0.0)) throw InvalidArgument("tomography counts carry no population information");
  return hermitian_part(num / den);
}

std::vector<CMatrix> linear_reconstruct(const TomographyDataset& data, const TomographySettings& ts) {
  std::vector<CMatrix> out;
  for (const auto& c : data.counts) out.push_back(linear_reconstruct(c, ts));
  return out;
}

double log_likelihood(const std::vector<double>& counts, const CMatrix& rho, const TomographySettings& ts) {
  check_counts(counts, ts);
  const auto nus = ts.projectors();
  double ll = 0.0, n = 0.0, p_total = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double p = nus[j].dot(rho * nus[j]).real();
    p_total += p;
    n += counts[j];
    if (counts[j] == 0.0) continue;
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    ll += counts[j] * std::log(p);
  }
  if (n > 0.0) ll -= n * std::log(p_total);
  return ll;
}

DensityMatrix psd_projection(const CMatrix& m) {
  const Spectrum sp = eigh(hermitian_part(m));
  RVector vals = sp.values.cwiseMax(0.0);
  const double tr = vals.sum();
  if (!(tr > 0.0)) throw InvalidState("matrix has no positive eigenvalue");
  vals /= tr;
  CMatrix out = sp.vectors * vals.cast<cplx>().asDiagonal() * sp.vectors.adjoint();
  return DensityMatrix(hermitian_part(out));
}

DensityMatrix mle_repair(const std::vector<double>& counts, const TomographySettings& ts, const MleOptions& opt) {
  check_counts(counts, ts);
  if (opt.max_iters < 1 || !(opt.tol > 0.0)) throw InvalidArgument("invalid MLE options");
  const int s = ts.s;
  const auto nus = ts.projectors();
  double n = 0.0;
  for (double d : counts) n += d;
  if (!(n > 0.0)) throw InvalidArgument("tomography counts are all zero");

  // Interior seed: the clipped linear estimate mixed slightly with identity.
  CMatrix seed = psd_projection(linear_reconstruct(counts, ts)).matrix();
  seed = 0.99 * seed + 0.01 * CMatrix::Identity(s, s) / s;
  // seed = T^dagger T with T lower triangular: J seed J = L L^dagger, T = J L^dagger J.
  const CMatrix j = CMatrix::Identity(s, s).rowwise().reverse();
  const Eigen::LLT<CMatrix> llt(j * seed * j);
  if (llt.info() != Eigen::Success) throw NonConvergence("MLE seed is not positive definite", 0.0);
  const CMatrix l = llt.matrixL();
  const CMatrix t0 = j * l.adjoint() * j;

  // Scale-invariant likelihood per count plus a trace anchor.
  const Objective f = [&](const RVector& v, RVector* grad) {
    const CMatrix t = unpack(v, s);
    const CMatrix sigma = t.adjoint() * t;
    std::vector<double> p(nus.size());
    double p_total = 0.0;
    for (std::size_t k = 0; k < nus.size(); ++k) {
      p[k] = nus[k].dot(sigma * nus[k]).real();
      p_total += p[k];
    }
    if (!(p_total > 0.0)) return std::numeric_limits<double>::infinity();
    double ll = -n * std::log(p_total);
    for (std::size_t k = 0; k < nus.size(); ++k) {
      if (counts[k] == 0.0) continue;
      if (!(p[k] > 0.0)) return std::numeric_limits<double>::infinity();
      ll += counts[k] * std::log(p[k]);
    }
    const double tr = sigma.trace().real();
    const double value = -ll / n + (tr - 1.0) * (tr - 1.0);
    if (grad != nullptr) {
      CMatrix dl = CMatrix::Zero(s, s);
      for (std::size_t k = 0; k < nus.size(); ++k) {
        const double w = (counts[k] == 0.0 ? 0.0 : counts[k] / p[k]) - n / p_total;
        dl += w * outer(nus[k]);
      }
      const CMatrix gobj = -dl / n + 2.0 * (tr - 1.0) * CMatrix::Identity(s, s);
      *grad = pack_gradient(t * gobj, s);
    }
    return value;
  };

  BfgsOptions bo;
  bo.max_iters = opt.max_iters;
  bo.grad_tol = 1e-10;
  bo.f_tol = opt.tol;
  const BfgsResult r = bfgs_minimize(f, pack(t0), bo);
  if (!r.converged) {
    throw NonConvergence("MLE repair did not converge in " + std::to_string(opt.max_iters) + " iterations", r.f);
  }
  const CMatrix t = unpack(r.x, s);
  CMatrix sigma = t.adjoint() * t;
  sigma /= sigma.trace().real();
  return DensityMatrix(hermitian_part(sigma));
}

std::vector<DensityMatrix> mle_repair(const TomographyDataset& data, const TomographySettings& ts,
                                      const MleOptions& opt) {
  std::vector<DensityMatrix> out;
  for (const auto& c : data.counts) out.push_back(mle_repair(c, ts, opt));
  return out;
}

DensityMatrix average_state(const std::vector<DensityMatrix>& states) {
  if (states.empty()) throw InvalidArgument("average of an empty ensemble");
  CMatrix sum = CMatrix::Zero(states.front().dim(), states.front().dim());
  for (const auto& r : states) {
    if (r.dim() != sum.rows()) throw DimensionMismatch("states differ in dimension");
    sum += r.matrix();
  }
  return DensityMatrix(sum / static_cast<double>(states.size()));
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("fidelity of states with different dimensions");
  const auto sqrt_psd = [](const CMatrix& m) {
    const Spectrum sp = eigh(hermitian_part(m));
    const RVector r = sp.values.cwiseMax(0.0).cwiseSqrt();
    return CMatrix(sp.vectors * r.cast<cplx>().asDiagonal() * sp.vectors.adjoint());
  };
  const CMatrix sa = sqrt_psd(a.matrix());
  const Spectrum sp = eigh(hermitian_part(sa * b.matrix() * sa));
  const double tr = sp.values.cwiseMax(0.0).cwiseSqrt().sum();
  return tr * tr;
}

}  // namespace entwit
