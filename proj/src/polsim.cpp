#include "entwit/polsim.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "entwit/tomo.hpp"

namespace entwit {

namespace {

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (trial seed, event kind, x, setting) so results do
// not depend on evaluation order.
std::mt19937_64 event_rng(std::uint64_t seed, int kind, int x, int setting) {
  std::uint64_t h = mix(seed);
  h = mix(h ^ static_cast<std::uint64_t>(kind));
  h = mix(h ^ static_cast<std::uint64_t>(x + 1));
  h = mix(h ^ static_cast<std::uint64_t>(setting + 1));
  return std::mt19937_64(h);
}

enum EventKind { kWitness = 1, kTomography = 2, kClassical = 3, kPreparation = 4 };

// (A, B) / sqrt(2) for one photon from its half- and quarter-wave plates.
std::array<cplx, 2> analyzer(double h, double q) {
  const double a = rad(h), b = rad(q);
  const double s = 1.0 / std::numbers::sqrt2;
  return {cplx(std::cos(2 * b - 2 * a), std::cos(2 * a)) * s, cplx(std::sin(2 * b - 2 * a), std::sin(2 * a)) * s};
}

std::array<cplx, 2> orthogonal(const std::array<cplx, 2>& v) { return {-std::conj(v[1]), std::conj(v[0])}; }

// Signal (s0, s1) on (V, H) and idler (i0, i1) on (V, H) mapped to
// {VV, HV, HH, VH}.
CVector product(const std::array<cplx, 2>& sig, const std::array<cplx, 2>& idl) {
  CVector v(4);
  v << sig[0] * idl[0], sig[1] * idl[0], sig[1] * idl[1], sig[0] * idl[1];
  return v;
}

double gauss(std::mt19937_64& rng, double sd) {
  if (sd <= 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sd)(rng);
}

PreparationAngles jitter(PreparationAngles a, double sd, bool idler, std::mt19937_64& rng) {
  a.h_s += gauss(rng, sd);
  a.q_s += gauss(rng, sd);
  if (idler) a.h_i += gauss(rng, sd);
  return a;
}

ProjectionAngles jitter(ProjectionAngles a, double sd, std::mt19937_64& rng) {
  a.h_s += gauss(rng, sd);
  a.q_s += gauss(rng, sd);
  a.h_i += gauss(rng, sd);
  a.q_i += gauss(rng, sd);
  return a;
}

CVector ket(std::initializer_list<cplx> v) {
  CVector k(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (cplx c : v) k(i++) = c;
  return k;
}

DeterministicStrategy strategy(std::vector<int> msg, const IMatrix& e) { return DeterministicStrategy(std::move(msg), e); }

CaseTables make_i3() {
  IMatrix e(2, 3);
  e << 1, 1, -1,
       1, -1, 1;
  return CaseTables{
      canonical_witness("I3"),
      {{0, 0, 0}, {18.57, 37.14, 0}, {-24.69, -49.38, 0}},
      {{-31.53, -63.06, 0, 0}, {31.79, 63.57, 0, 0}},
      {ket({1, 0, 0}), ket({0.7972, 0.6037, 0}), ket({0.6511, -0.7590, 0})},
      {ket({0.4531, -0.8914, 0}), ket({0.4451, 0.8955, 0})},
      {{{0, 0, 0}, {45, 90, 0}, {45, 90, 45}}, {{0, 0, 0}, {45, 90, 0}, {0, 0, 0}}},
      {strategy({0, 1, 2}, e), strategy({0, 1, 0}, e)},
      {0.3111, 0.6889},
      3};
}

CaseTables make_i4() {
  IMatrix e(3, 4);
  e << 1, 1, 1, -1,
       1, 1, -1, 1,
       1, -1, 1, 1;
  return CaseTables{
      canonical_witness("I4"),
      {{0, 0, 0}, {16.83, 33.66, 0}, {35.95, 71.89, 0}, {17.27, 34.54, 11.13}},
      {{17.26, 34.53, 39.07, 78.15}, {-42.85, -85.70, 0, 0}, {30.92, 61.84, 0, 0}},
      {ket({1, 0, 0, 0}), ket({0.8323, 0.5543, 0, 0}), ket({0.3108, 0.9505, 0, 0}),
       ket({0.7623, 0.5247, 0.2148, 0.3121})},
      {ket({0.1692, 0.1164, 0.5549, 0.8062}), ket({0.0750, -0.9972, 0, 0}), ket({0.4721, 0.8816, 0, 0})},
      {{{0, 0, 0}, {45, 90, 0}, {45, 90, 45}, {0, 0, 0}}, {{0, 0, 0}, {45, 90, 0}, {0, 0, 0}, {0, 0, 0}}},
      {strategy({0, 1, 2, 0}, e), strategy({0, 1, 0, 0}, e)},
      {0.3802, 0.6198},
      4};
}

CaseTables make_r4() {
  IMatrix e(2, 4);
  e << 1, 1, -1, -1,
       1, -1, 1, -1;
  const cplx i(0.0, 1.0);
  return CaseTables{
      canonical_witness("R4"),
      {{0, 0, 0}, {33.55, 33.55, 0}, {0, 33.55, 0}, {33.55, 67.09, 0}},
      {{50.52, 78.54, 0, 0}, {28.02, 78.54, 0, 0}},
      {ket({1, 0, 0, 0}), ket({0.7588, 0.2363 - 0.6070 * i, 0, 0}), ket({0.7588, 0.2363 + 0.6070 * i, 0, 0}),
       ket({0.3893, 0.9211, 0, 0})},
      {ket({0.1515 - 0.3891 * i, 0.9087, 0, 0}), ket({0.1515 + 0.3891 * i, 0.9087, 0, 0})},
      {{{0, 0, 0}, {45, 90, 0}, {0, 0, 0}, {0, 0, 45}}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 45}}},
      {strategy({0, 1, 0, 3}, e), strategy({0, 0, 0, 3}, e)},
      {0.6056, 0.3944},
      4};
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

ProtocolReport run_quantum(WitnessCase c, const SimConfig& cfg) {
  const CaseTables& t = case_tables(c);
  const WitnessSpec& spec = t.spec;
  const int n = spec.n(), l = spec.l();
  const double sd = cfg.exact ? 0.0 : cfg.angle_jitter_deg;
  const bool idler_prep = t.dim == 4;
  const TomographySettings ts = tomo_settings(t.dim == 3 ? TomoCase::I3 : TomoCase::I4R4);

  ProtocolReport rep;
  rep.wcase = c;
  rep.mode = SimMode::quantum;
  rep.expectations = RMatrix::Zero(n, l);
  std::vector<DensityMatrix> recon;
  for (int x = 0; x < n; ++x) {
    // The preparation plates are set once per state; analyzer plates are
    // re-set for every measurement setting.
    auto prep_rng = event_rng(cfg.seed, kPreparation, x, 0);
    const CVector psi = prepare_state(jitter(t.quantum_prep[static_cast<std::size_t>(x)], sd, idler_prep, prep_rng)).amplitudes();
    if (t.dim == 3 && std::abs(psi(3)) > 1e-6) {
      throw InvalidState("three-dimensional preparation leaked into |3>");
    }
    for (int y = 0; y < l; ++y) {
      auto rng = event_rng(cfg.seed, kWitness, x, y);
      const PortValues p = port_probabilities(psi, jitter(t.quantum_meas[static_cast<std::size_t>(y)], sd, rng));
      CoincidenceRecord rec = simulate_counts(p, cfg, cfg.duration_per_setting, rng,
                                              "x" + std::to_string(x + 1) + "_m" + std::to_string(y + 1));
      rep.expectations(x, y) = quantum_expectation(rec, c);
      rep.events.push_back({x, y, -1, std::move(rec)});
    }

    std::vector<double> counts;
    for (std::size_t j = 0; j < ts.settings.size(); ++j) {
      auto rng = event_rng(cfg.seed, kTomography, x, static_cast<int>(j));
      const PortValues p = port_probabilities(psi, jitter(ts.settings[j], sd, rng));
      CoincidenceRecord rec = simulate_counts(p, cfg, cfg.duration_per_setting, rng,
                                              "x" + std::to_string(x + 1) + "_nu" + std::to_string(j + 1));
      counts.push_back(rec[Port::ab]);
      rep.events.push_back({x, -1, static_cast<int>(j), std::move(rec)});
    }
    DensityMatrix rho = cfg.exact ? psd_projection(linear_reconstruct(counts, ts)) : mle_repair(counts, ts);
    const CVector truth = prepare_state(t.quantum_prep[static_cast<std::size_t>(x)]).amplitudes().head(t.dim);
    rep.fidelities.push_back(fidelity(rho, PureState::normalized(truth).density()));
    rep.states.push_back(rho.matrix());
    recon.push_back(std::move(rho));
  }
  rep.witness = (spec.alpha().array() * rep.expectations.array()).sum();
  rep.entropy = von_neumann_entropy(average_state(recon));
  return rep;
}

ProtocolReport run_classical(WitnessCase c, const SimConfig& cfg) {
  const CaseTables& t = case_tables(c);
  const WitnessSpec& spec = t.spec;
  const int n = spec.n(), l = spec.l();
  const double sd = cfg.exact ? 0.0 : cfg.angle_jitter_deg;
  const ProjectionAngles zero{};

  ProtocolReport rep;
  rep.wcase = c;
  rep.mode = SimMode::classical;
  rep.expectations = RMatrix::Zero(n, l);
  rep.message_distribution.assign(static_cast<std::size_t>(t.dim), 0.0);
  for (int x = 0; x < n; ++x) {
    CoincidenceRecord sum;
    sum.setting = "x" + std::to_string(x + 1);
    for (std::size_t k = 0; k < t.strategies.size(); ++k) {
      auto rng = event_rng(cfg.seed, kClassical, x, static_cast<int>(k));
      const PreparationAngles a = t.classical_prep[k][static_cast<std::size_t>(x)];
      const CVector psi = prepare_state(jitter(a, sd, t.dim == 4, rng)).amplitudes();
      const PortValues p = port_probabilities(psi, jitter(zero, sd, rng));
      CoincidenceRecord rec = simulate_counts(p, cfg, t.weights[k] * cfg.duration_per_setting, rng,
                                              "x" + std::to_string(x + 1) + "_lambda" + std::to_string(k + 1));
      for (std::size_t q = 0; q < 4; ++q) sum.counts[q] += rec.counts[q];
      sum.duration += rec.duration;
      rep.events.push_back({x, -1, static_cast<int>(k), std::move(rec)});
    }
    const IMatrix& e = t.strategies.front().E();
    for (int y = 0; y < l; ++y) {
      std::vector<int> row;
      for (int m = 0; m < t.dim; ++m) row.push_back(e(y, m));
      rep.expectations(x, y) = classical_expectation(sum, c, row);
    }
    double total = 0.0;
    for (int m = 0; m < t.dim; ++m) total += sum[classical_port(m)];
    if (!(total > 0.0)) throw InvalidArgument("no coincidences recorded for preparation " + std::to_string(x + 1));
    for (int m = 0; m < t.dim; ++m) {
      rep.message_distribution[static_cast<std::size_t>(m)] += sum[classical_port(m)] / total / n;
    }
  }
  rep.witness = (spec.alpha().array() * rep.expectations.array()).sum();
  rep.entropy = entropy_bits(rep.message_distribution);
  return rep;
}

}  // namespace

PureState prepare_state(const PreparationAngles& a) {
  const double hs = rad(a.h_s), qs = rad(a.q_s), hi = rad(a.h_i);
  const double s = 1.0 / std::numbers::sqrt2;
  const cplx u = cplx(std::cos(2 * qs - 2 * hs), -std::cos(2 * hs)) * s;
  const cplx v = cplx(std::sin(2 * qs - 2 * hs), -std::sin(2 * hs)) * s;
  CVector psi(4);
  psi << u * std::cos(2 * hi), v * std::cos(2 * hi), v * std::sin(2 * hi), u * std::sin(2 * hi);
  return PureState(psi);
}

PureState projection_state(const ProjectionAngles& a) {
  return PureState(product(analyzer(a.h_s, a.q_s), analyzer(a.h_i, a.q_i)));
}

std::string_view port_name(Port p) {
  switch (p) {
    case Port::ab: return "ab";
    case Port::ad: return "ad";
    case Port::cb: return "cb";
    case Port::cd: return "cd";
  }
  return "?";
}

std::array<CVector, 4> port_basis(const ProjectionAngles& a) {
  const auto sig = analyzer(a.h_s, a.q_s);
  const auto idl = analyzer(a.h_i, a.q_i);
  std::array<CVector, 4> out;
  out[static_cast<std::size_t>(Port::ab)] = product(sig, idl);
  out[static_cast<std::size_t>(Port::ad)] = product(sig, orthogonal(idl));
  out[static_cast<std::size_t>(Port::cb)] = product(orthogonal(sig), idl);
  out[static_cast<std::size_t>(Port::cd)] = product(orthogonal(sig), orthogonal(idl));
  return out;
}

PortValues port_probabilities(const CVector& psi, const ProjectionAngles& a) {
  if (psi.size() != 4) throw DimensionMismatch("port probabilities need a four-amplitude state");
  const auto basis = port_basis(a);
  PortValues p{};
  for (std::size_t k = 0; k < 4; ++k) p[k] = std::norm(basis[k].dot(psi));
  return p;
}

void SimConfig::validate() const {
  if (!(pair_rate >= 0.0) || !std::isfinite(pair_rate)) throw InvalidArgument("pair_rate must be >= 0");
  if (!(dark_rate >= 0.0) || !std::isfinite(dark_rate)) throw InvalidArgument("dark_rate must be >= 0");
  if (!(duration_per_setting > 0.0) || !std::isfinite(duration_per_setting)) {
    throw InvalidArgument("duration_per_setting must be > 0");
  }
  if (!(angle_jitter_deg >= 0.0) || !std::isfinite(angle_jitter_deg)) {
    throw InvalidArgument("angle_jitter_deg must be >= 0");
  }
}

CoincidenceRecord simulate_counts(const PortValues& p, const SimConfig& cfg, double duration, std::mt19937_64& rng,
                                  std::string setting) {
  cfg.validate();
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidDistribution("port probabilities must be finite and >= 0");
    sum += v;
  }
  if (sum > 1.0 + 1e-9) throw InvalidDistribution("port probabilities sum to " + std::to_string(sum));
  CoincidenceRecord rec;
  rec.duration = duration;
  rec.setting = std::move(setting);
  for (std::size_t k = 0; k < 4; ++k) {
    const double mean = p[k] * cfg.pair_rate * duration + cfg.dark_rate * duration;
    if (cfg.exact || mean <= 0.0) {
      rec.counts[k] = cfg.exact ? mean : 0.0;
    } else {
      rec.counts[k] = static_cast<double>(std::poisson_distribution<long long>(mean)(rng));
    }
  }
  return rec;
}

CoincidenceRecord simulate_counts(const PortValues& p, const SimConfig& cfg) {
  std::mt19937_64 rng(mix(cfg.seed));
  return simulate_counts(p, cfg, cfg.duration_per_setting, rng);
}

WitnessCase parse_case(std::string_view name) {
  if (name == "I3") return WitnessCase::I3;
  if (name == "I4") return WitnessCase::I4;
  if (name == "R4") return WitnessCase::R4;
  throw InvalidArgument("unknown case '" + std::string(name) + "' (expected I3, I4 or R4)");
}

std::string_view case_name(WitnessCase c) {
  switch (c) {
    case WitnessCase::I3: return "I3";
    case WitnessCase::I4: return "I4";
    case WitnessCase::R4: return "R4";
  }
  return "?";
}

SimMode parse_mode(std::string_view name) {
  if (name == "quantum") return SimMode::quantum;
  if (name == "classical") return SimMode::classical;
  throw InvalidArgument("unknown mode '" + std::string(name) + "' (expected quantum or classical)");
}

std::string_view mode_name(SimMode m) { return m == SimMode::quantum ? "quantum" : "classical"; }

Port classical_port(int m) {
  static constexpr std::array<Port, 4> ports{Port::ab, Port::cb, Port::cd, Port::ad};
  if (m < 0 || m > 3) throw InvalidArgument("classical message index out of range");
  return ports[static_cast<std::size_t>(m)];
}

double quantum_expectation(const CoincidenceRecord& rec, WitnessCase c) {
  double num = -rec[Port::ab] + rec[Port::cb] + rec[Port::cd];
  double den = rec[Port::ab] + rec[Port::cb] + rec[Port::cd];
  if (c != WitnessCase::I3) {
    num += rec[Port::ad];
    den += rec[Port::ad];
  }
  if (!(den > 0.0)) throw InvalidArgument("expectation denominator is zero");
  return num / den;
}

double classical_expectation(const CoincidenceRecord& rec, WitnessCase c, const std::vector<int>& row) {
  const std::size_t dim = c == WitnessCase::I3 ? 3 : 4;
  if (row.size() != dim) throw DimensionMismatch("outcome row must have one entry per message");
  double num = 0.0, den = 0.0;
  for (std::size_t m = 0; m < dim; ++m) {
    const double d = rec[classical_port(static_cast<int>(m))];
    num += row[m] * d;
    den += d;
  }
  if (!(den > 0.0)) throw InvalidArgument("expectation denominator is zero");
  return num / den;
}

const CaseTables& case_tables(WitnessCase c) {
  static const CaseTables i3 = make_i3();
  static const CaseTables i4 = make_i4();
  static const CaseTables r4 = make_r4();
  switch (c) {
    case WitnessCase::I3: return i3;
    case WitnessCase::I4: return i4;
    case WitnessCase::R4: return r4;
  }
  throw InvalidArgument("unknown case");
}

ProtocolReport run_protocol(WitnessCase c, SimMode mode, const SimConfig& cfg) {
  cfg.validate();
  return mode == SimMode::quantum ? run_quantum(c, cfg) : run_classical(c, cfg);
}

ErrorBudget error_budget(WitnessCase c, SimMode mode, const SimConfig& cfg, int trials) {
  if (trials < 2) throw InvalidArgument("error_budget needs at least 2 trials");
  std::vector<double> w, s, f;
  for (int k = 0; k < trials; ++k) {
    SimConfig run = cfg;
    run.seed = mix(cfg.seed ^ mix(static_cast<std::uint64_t>(k) + 0x1234));
    const ProtocolReport rep = run_protocol(c, mode, run);
    w.push_back(rep.witness);
    s.push_back(rep.entropy);
    if (!rep.fidelities.empty()) f.push_back(mean(rep.fidelities));
  }
  ErrorBudget b;
  b.trials = trials;
  b.mean_witness = mean(w);
  b.std_witness = sample_std(w);
  b.mean_entropy = mean(s);
  b.std_entropy = sample_std(s);
  b.mean_fidelity = f.empty() ? 0.0 : mean(f);
  return b;
}

}  // namespace entwit
