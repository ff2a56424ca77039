#include "entwit/witness.hpp"

#include <cmath>
#include <string>

namespace entwit {

namespace {

constexpr double kPlusMinusOne = 1e-8;
// |lambda| below this is treated as zero when assigning measurement signs.
constexpr double kZeroEigen = 1e-12;

void check_compatible(const QuantumEnsemble& ens, const WitnessSpec& spec) {
  if (ens.size() != spec.n()) {
    throw DimensionMismatch("ensemble has " + std::to_string(ens.size()) +
                            " states but the witness expects n = " + std::to_string(spec.n()));
  }
}

}  // namespace

WitnessSpec::WitnessSpec(RMatrix alpha, std::string name)
    : alpha_(std::move(alpha)), name_(std::move(name)) {
  if (alpha_.rows() < 1 || alpha_.cols() < 1) {
    throw InvalidArgument("witness coefficient matrix must be at least 1x1");
  }
  if (!alpha_.allFinite()) throw InvalidArgument("witness coefficients must be finite");
}

WitnessSpec canonical_witness(std::string_view name) {
  if (name == "I3") {
    RMatrix a(3, 2);
    a << 1, 1,
         1, -1,
        -1, 0;
    return WitnessSpec(a, "I3");
  }
  if (name == "I4") {
    RMatrix a(4, 3);
    a << 1, 1, 1,
         1, 1, -1,
         1, -1, 0,
        -1, 0, 0;
    return WitnessSpec(a, "I4");
  }
  if (name == "R4") {
    RMatrix a(4, 2);
    a << 1, 1,
         1, -1,
        -1, 1,
        -1, -1;
    return WitnessSpec(a, "R4");
  }
  throw InvalidArgument("unknown witness '" + std::string(name) + "' (expected I3, I4 or R4)");
}

QuantumEnsemble::QuantumEnsemble(std::vector<DensityMatrix> states) : states_(std::move(states)) {
  if (states_.empty()) throw InvalidArgument("ensemble needs at least one state");
  for (const auto& s : states_) {
    if (s.dim() != states_.front().dim()) {
      throw DimensionMismatch("ensemble states have different dimensions");
    }
  }
}

QuantumEnsemble QuantumEnsemble::from_kets(const std::vector<CVector>& kets) {
  std::vector<DensityMatrix> states;
  states.reserve(kets.size());
  for (const auto& k : kets) states.push_back(PureState::normalized(k).density());
  return QuantumEnsemble(std::move(states));
}

DensityMatrix QuantumEnsemble::average() const {
  CMatrix sum = CMatrix::Zero(dim(), dim());
  for (const auto& s : states_) sum += s.matrix();
  return DensityMatrix(sum / static_cast<double>(states_.size()));
}

std::vector<CMatrix> QuantumEnsemble::matrices() const {
  std::vector<CMatrix> out;
  out.reserve(states_.size());
  for (const auto& s : states_) out.push_back(s.matrix());
  return out;
}

Measurement::Measurement(Eigen::Index d, std::vector<SignedProjector> parts)
    : dim_(d), parts_(std::move(parts)) {}

Measurement Measurement::from_sign_basis(const CMatrix& basis, const std::vector<int>& signs) {
  const Eigen::Index d = basis.rows();
  if (basis.cols() != d || static_cast<Eigen::Index>(signs.size()) != d || d == 0) {
    throw DimensionMismatch("from_sign_basis: basis must be square and match the sign count");
  }
  if (!(basis.adjoint() * basis).isApprox(CMatrix::Identity(d, d), 1e-9)) {
    throw InvalidArgument("from_sign_basis: basis is not unitary");
  }
  std::vector<Eigen::Index> plus, minus;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (signs[static_cast<std::size_t>(k)] == 1) {
      plus.push_back(k);
    } else if (signs[static_cast<std::size_t>(k)] == -1) {
      minus.push_back(k);
    } else {
      throw InvalidArgument("from_sign_basis: signs must be +1 or -1");
    }
  }
  std::vector<SignedProjector> parts;
  auto gather = [&](const std::vector<Eigen::Index>& idx, int sign) {
    if (idx.empty()) return;
    CMatrix b(d, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) b.col(static_cast<Eigen::Index>(c)) = basis.col(idx[c]);
    parts.push_back({sign, std::move(b)});
  };
  gather(plus, 1);
  gather(minus, -1);
  return Measurement(d, std::move(parts));
}

Measurement Measurement::projective(const CVector& m) {
  return from_minus_subspace({m});
}

Measurement Measurement::from_minus_subspace(const std::vector<CVector>& vectors) {
  if (vectors.empty()) throw InvalidArgument("from_minus_subspace: no vectors");
  const Eigen::Index d = vectors.front().size();
  const auto r = static_cast<Eigen::Index>(vectors.size());
  if (r > d) throw DimensionMismatch("from_minus_subspace: more vectors than dimensions");
  CMatrix a(d, r);
  for (Eigen::Index c = 0; c < r; ++c) {
    if (vectors[static_cast<std::size_t>(c)].size() != d) {
      throw DimensionMismatch("from_minus_subspace: vectors have different dimensions");
    }
    a.col(c) = vectors[static_cast<std::size_t>(c)];
  }
  // Householder QR: the first r columns of Q span the minus space (Gram-Schmidt
  // order preserved), the rest complete the basis.
  Eigen::HouseholderQR<CMatrix> qr(a);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  const CMatrix rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < r; ++c) {
    if (std::abs(rr(c, c)) < 1e-10) {
      throw InvalidArgument("from_minus_subspace: vectors are linearly dependent");
    }
  }
  std::vector<int> signs(static_cast<std::size_t>(d), 1);
  for (Eigen::Index c = 0; c < r; ++c) signs[static_cast<std::size_t>(c)] = -1;
  return from_sign_basis(q, signs);
}

Measurement Measurement::from_operator(const CMatrix& op) {
  const Spectrum s = eigh(op);
  std::vector<int> signs;
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    const double v = s.values(k);
    if (std::abs(v - 1.0) <= kPlusMinusOne) {
      signs.push_back(1);
    } else if (std::abs(v + 1.0) <= kPlusMinusOne) {
      signs.push_back(-1);
    } else {
      throw InvalidArgument("measurement operator has eigenvalue " + std::to_string(v) +
                            " (must be +1 or -1)");
    }
  }
  return from_sign_basis(s.vectors, signs);
}

Measurement Measurement::identity(Eigen::Index d) {
  return from_sign_basis(CMatrix::Identity(d, d), std::vector<int>(static_cast<std::size_t>(d), 1));
}

int Measurement::minus_rank() const {
  for (const auto& p : parts_) {
    if (p.sign < 0) return static_cast<int>(p.basis.cols());
  }
  return 0;
}

CMatrix Measurement::op() const {
  CMatrix m = CMatrix::Zero(dim_, dim_);
  for (const auto& p : parts_) m += static_cast<double>(p.sign) * (p.basis * p.basis.adjoint());
  return m;
}

double quantum_value(const QuantumEnsemble& ens, const std::vector<Measurement>& meas,
                     const WitnessSpec& spec) {
  check_compatible(ens, spec);
  if (static_cast<int>(meas.size()) != spec.l()) {
    throw DimensionMismatch("got " + std::to_string(meas.size()) +
                            " measurements but the witness expects l = " + std::to_string(spec.l()));
  }
  std::vector<CMatrix> ops;
  for (const auto& m : meas) {
    if (m.dim() != ens.dim()) throw DimensionMismatch("measurement and state dimensions differ");
    ops.push_back(m.op());
  }
  cplx total = 0.0;
  for (int x = 0; x < spec.n(); ++x) {
    for (int y = 0; y < spec.l(); ++y) {
      if (spec(x, y) == 0.0) continue;
      total += spec(x, y) * (ens[x].matrix() * ops[static_cast<std::size_t>(y)]).trace();
    }
  }
  return total.real();
}

std::vector<CMatrix> column_operators(const std::vector<CMatrix>& rhos, const RMatrix& alpha) {
  const Eigen::Index d = rhos.front().rows();
  std::vector<CMatrix> out(static_cast<std::size_t>(alpha.cols()), CMatrix::Zero(d, d));
  for (Eigen::Index y = 0; y < alpha.cols(); ++y) {
    for (Eigen::Index x = 0; x < alpha.rows(); ++x) {
      if (alpha(x, y) != 0.0) out[static_cast<std::size_t>(y)] += alpha(x, y) * rhos[static_cast<std::size_t>(x)];
    }
  }
  return out;
}

double eigen_sum_bound(const std::vector<CMatrix>& rhos, const RMatrix& alpha) {
  double total = 0.0;
  for (const auto& ry : column_operators(rhos, alpha)) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(ry, Eigen::EigenvaluesOnly);
    total += es.eigenvalues().cwiseAbs().sum();
  }
  return total;
}

double eigen_sum_bound(const QuantumEnsemble& ens, const WitnessSpec& spec) {
  check_compatible(ens, spec);
  return eigen_sum_bound(ens.matrices(), spec.alpha());
}

std::vector<Measurement> recover_measurements(const QuantumEnsemble& ens, const WitnessSpec& spec) {
  check_compatible(ens, spec);
  std::vector<Measurement> out;
  for (const auto& ry : column_operators(ens.matrices(), spec.alpha())) {
    const Spectrum s = eigh(ry);
    std::vector<int> signs;
    for (Eigen::Index k = 0; k < s.values.size(); ++k) {
      signs.push_back(s.values(k) < -kZeroEigen ? -1 : 1);
    }
    out.push_back(Measurement::from_sign_basis(s.vectors, signs));
  }
  return out;
}

}  // namespace entwit
