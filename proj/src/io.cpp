#include "entwit/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <locale>
#include <ostream>
#include <set>
#include <sstream>

#include "entwit/error.hpp"

namespace entwit::io {

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw InvalidArgument(what + " must be a JSON object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!keys.count(item.key())) throw InvalidArgument("unknown " + what + " field '" + item.key() + "'");
  }
}

template <class T>
T get(const Json& j, const char* key, const std::string& what) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument(what + " field '" + key + "' is missing or has the wrong type");
  }
}

RMatrix rmatrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InvalidArgument(what + " must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  RMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument(what + " rows must all have the same length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw InvalidArgument(what + " entries must be numbers");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

IMatrix imatrix_from_json(const Json& j, const std::string& what) {
  const RMatrix r = rmatrix_from_json(j, what);
  IMatrix m(r.rows(), r.cols());
  for (Eigen::Index a = 0; a < r.rows(); ++a) {
    for (Eigen::Index b = 0; b < r.cols(); ++b) {
      if (r(a, b) != std::round(r(a, b))) throw InvalidArgument(what + " entries must be integers");
      m(a, b) = static_cast<int>(r(a, b));
    }
  }
  return m;
}

Json imatrix_json(const IMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Json to_json(const WitnessSpec& spec) {
  Json j;
  j["name"] = spec.name();
  j["n"] = spec.n();
  j["l"] = spec.l();
  j["alpha"] = to_json(spec.alpha());
  return j;
}

WitnessSpec witness_from_json(const Json& j) {
  reject_unknown(j, {"n", "l", "alpha", "name"}, "witness");
  const RMatrix alpha = rmatrix_from_json(j.at("alpha"), "alpha");
  if (j.contains("n") && get<int>(j, "n", "witness") != alpha.rows()) {
    throw InvalidArgument("witness n does not match the rows of alpha");
  }
  if (j.contains("l") && get<int>(j, "l", "witness") != alpha.cols()) {
    throw InvalidArgument("witness l does not match the columns of alpha");
  }
  return WitnessSpec(alpha, j.contains("name") ? get<std::string>(j, "name", "witness") : std::string{});
}

WitnessSpec witness_from_value(const Json& j) {
  if (j.is_string()) return canonical_witness(j.get<std::string>());
  return witness_from_json(j);
}

Json to_json(const DeterministicStrategy& s) {
  Json j;
  j["P"] = imatrix_json(s.P());
  j["E"] = imatrix_json(s.E());
  return j;
}

Json to_json(const StrategyMixture& m) {
  Json out = Json::array();
  for (const auto& c : m.components()) {
    Json j = to_json(c.strategy);
    j["q"] = c.weight;
    out.push_back(std::move(j));
  }
  return out;
}

StrategyMixture mixture_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("mixture must be a JSON array");
  std::vector<StrategyMixture::Component> comps;
  for (const Json& c : j) {
    reject_unknown(c, {"P", "E", "q"}, "strategy");
    comps.push_back({DeterministicStrategy::from_matrices(imatrix_from_json(c.at("P"), "P"),
                                                          imatrix_from_json(c.at("E"), "E")),
                     get<double>(c, "q", "strategy")});
  }
  return StrategyMixture(std::move(comps));
}

Json to_json(const RMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const CMatrix& m) {
  Json j;
  j["real"] = to_json(RMatrix(m.real()));
  j["imag"] = to_json(RMatrix(m.imag()));
  return j;
}

CMatrix cmatrix_from_json(const Json& j) {
  reject_unknown(j, {"real", "imag"}, "complex matrix");
  const RMatrix re = rmatrix_from_json(j.at("real"), "real");
  const RMatrix im = j.contains("imag") ? rmatrix_from_json(j.at("imag"), "imag") : RMatrix::Zero(re.rows(), re.cols());
  if (re.rows() != im.rows() || re.cols() != im.cols()) throw DimensionMismatch("real and imag parts differ in shape");
  CMatrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

Json to_json(const OptimizationConfig& c) {
  Json j;
  j["starts"] = c.starts;
  j["max_iters"] = c.max_iters;
  j["penalty_schedule"] = c.penalty_schedule;
  j["objective_tol"] = c.objective_tol;
  j["constraint_tol"] = c.constraint_tol;
  j["seed"] = c.seed;
  return j;
}

OptimizationConfig opt_config_from_json(const Json& j, OptimizationConfig c) {
  const std::string what = "optimizer";
  reject_unknown(j, {"starts", "max_iters", "penalty_schedule", "objective_tol", "constraint_tol", "seed"}, what);
  if (j.contains("starts")) c.starts = get<int>(j, "starts", what);
  if (j.contains("max_iters")) c.max_iters = get<int>(j, "max_iters", what);
  if (j.contains("penalty_schedule")) c.penalty_schedule = get<std::vector<double>>(j, "penalty_schedule", what);
  if (j.contains("objective_tol")) c.objective_tol = get<double>(j, "objective_tol", what);
  if (j.contains("constraint_tol")) c.constraint_tol = get<double>(j, "constraint_tol", what);
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", what);
  c.validate();
  return c;
}

Json to_json(const SimConfig& c) {
  Json j;
  j["pair_rate"] = c.pair_rate;
  j["duration_per_setting"] = c.duration_per_setting;
  j["angle_jitter_deg"] = c.angle_jitter_deg;
  j["dark_rate"] = c.dark_rate;
  j["seed"] = c.seed;
  j["exact"] = c.exact;
  return j;
}

SimConfig sim_config_from_json(const Json& j, SimConfig c) {
  const std::string what = "simulation";
  reject_unknown(j, {"pair_rate", "duration_per_setting", "angle_jitter_deg", "dark_rate", "seed", "exact"}, what);
  if (j.contains("pair_rate")) c.pair_rate = get<double>(j, "pair_rate", what);
  if (j.contains("duration_per_setting")) c.duration_per_setting = get<double>(j, "duration_per_setting", what);
  if (j.contains("angle_jitter_deg")) c.angle_jitter_deg = get<double>(j, "angle_jitter_deg", what);
  if (j.contains("dark_rate")) c.dark_rate = get<double>(j, "dark_rate", what);
  if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", what);
  if (j.contains("exact")) c.exact = get<bool>(j, "exact", what);
  c.validate();
  return c;
}

Json to_json(const EntropyCurve& c) {
  Json j;
  j["kind"] = c.kind == CurveKind::classical ? "classical" : "quantum";
  Json samples = Json::array();
  for (const auto& s : c.samples) {
    Json r;
    r["W"] = s.W;
    r["value"] = s.value;
    r["residual"] = s.residual;
    r["starts_converged"] = s.starts_converged;
    r["monotone_fix"] = s.monotone_fix;
    if (s.error) r["error"] = *s.error;
    samples.push_back(std::move(r));
  }
  j["samples"] = std::move(samples);
  return j;
}

void write_curve_csv(std::ostream& os, const EntropyCurve& c) {
  os << "W,value,residual,starts_converged\n";
  for (const auto& s : c.samples) {
    os << fmt6(s.W) << ',' << (s.error ? "nan" : fmt6(s.value)) << ',' << fmt6(s.residual) << ','
       << s.starts_converged << '\n';
  }
}

Json to_json(const SplitResult& r) {
  Json j;
  j["branch"] = r.branch;
  j["theta1"] = r.theta1;
  j["theta2"] = r.theta2;
  j["i"] = r.i;
  j["j"] = r.j;
  const auto part = [](const SplitPart& p) {
    Json o;
    o["weight"] = p.weight;
    o["state"] = to_json(p.state.matrix());
    if (p.ket.size() > 0) o["ket"] = to_json(CMatrix(p.ket));
    return o;
  };
  Json parts = Json::array();
  for (const auto& p : r.parts) parts.push_back(part(p));
  j["parts"] = std::move(parts);
  j["remainder"] = r.remainder ? part(*r.remainder) : Json(nullptr);
  j["total_weight"] = r.total_weight();
  return j;
}

Json to_json(const GapReport& g) {
  Json j;
  j["W"] = g.W;
  j["H_min"] = g.H_min;
  j["S_min"] = g.S_min;
  j["gap"] = g.gap;
  return j;
}

Json to_json(const ProtocolReport& r) {
  Json j;
  j["case"] = std::string(case_name(r.wcase));
  j["mode"] = std::string(mode_name(r.mode));
  j["witness"] = r.witness;
  j["entropy"] = r.entropy;
  j["expectations"] = to_json(r.expectations);
  if (!r.states.empty()) {
    Json states = Json::array();
    for (const auto& s : r.states) states.push_back(to_json(s));
    j["states"] = std::move(states);
    j["fidelities"] = r.fidelities;
  }
  if (!r.message_distribution.empty()) j["message_distribution"] = r.message_distribution;
  return j;
}

Json to_json(const ErrorBudget& b) {
  Json j;
  j["trials"] = b.trials;
  j["mean_witness"] = b.mean_witness;
  j["std_witness"] = b.std_witness;
  j["mean_entropy"] = b.mean_entropy;
  j["std_entropy"] = b.std_entropy;
  j["mean_fidelity"] = b.mean_fidelity;
  return j;
}

void write_counts_csv(std::ostream& os, const std::vector<EventRecord>& events) {
  os << "setting,D_ab,D_ad,D_cb,D_cd,duration\n";
  for (const auto& e : events) {
    const auto& r = e.record;
    os << r.setting << ',' << fmt6(r[Port::ab]) << ',' << fmt6(r[Port::ad]) << ',' << fmt6(r[Port::cb]) << ','
       << fmt6(r[Port::cd]) << ',' << fmt6(r.duration) << '\n';
  }
}

void write_tomography_csv(std::ostream& os, const TomographyDataset& data) {
  os << "state_index,setting_index,count\n";
  for (std::size_t x = 0; x < data.counts.size(); ++x) {
    for (std::size_t k = 0; k < data.counts[x].size(); ++k) os << x << ',' << k << ',' << fmt6(data.counts[x][k]) << '\n';
  }
}

TomographyDataset read_tomography_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("empty tomography CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "state_index,setting_index,count") throw InvalidArgument("unexpected tomography CSV header: " + line);
  TomographyDataset data;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    long x = -1, k = -1;
    double count = 0.0;
    char c1 = 0, c2 = 0;
    if (!(ss >> x >> c1 >> k >> c2 >> count) || c1 != ',' || c2 != ',' || x < 0 || k < 0) {
      throw InvalidArgument("malformed tomography CSV line " + std::to_string(lineno));
    }
    if (data.counts.size() <= static_cast<std::size_t>(x)) data.counts.resize(static_cast<std::size_t>(x) + 1);
    auto& row = data.counts[static_cast<std::size_t>(x)];
    if (row.size() <= static_cast<std::size_t>(k)) row.resize(static_cast<std::size_t>(k) + 1, -1.0);
    if (row[static_cast<std::size_t>(k)] >= 0.0) {
      throw InvalidArgument("duplicate tomography entry on line " + std::to_string(lineno));
    }
    row[static_cast<std::size_t>(k)] = count;
  }
  for (const auto& row : data.counts) {
    for (double d : row) {
      if (d < 0.0) throw InvalidArgument("tomography CSV has missing entries");
    }
  }
  if (data.counts.empty()) throw InvalidArgument("tomography CSV has no data rows");
  return data;
}

}  // namespace entwit::io
