#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "entwit/certificates.hpp"
#include "entwit/classical.hpp"
#include "entwit/error.hpp"
#include "entwit/io.hpp"
#include "entwit/polsim.hpp"
#include "entwit/qopt.hpp"
#include "entwit/tomo.hpp"

namespace entwit::cli {

namespace {

using io::Json;
namespace fs = std::filesystem;

constexpr std::uint64_t kDefaultSeed = 20240521;

// Reference rows: W, H_min, S_min, gap.
struct TableRow {
  const char* name;
  double W, H, S, gap;
};
constexpr TableRow kTable1[] = {
    {"I3", 3.622, 1.334, 0.897, 0.437},
    {"I4", 5.760, 1.223, 0.829, 0.394},
    {"R4", 5.211, 1.356, 0.888, 0.468},
};

const TableRow& table_row(const std::string& name) {
  for (const auto& r : kTable1) {
    if (name == r.name) return r;
  }
  throw InvalidArgument("unknown witness '" + name + "' (expected I3, I4 or R4)");
}

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Check {
  std::string name;
  double value;
  std::string relation;  // "abs", "<=", ">", ">="
  double expected;
  double tolerance;
  bool pass;
};

Check check_abs(std::string name, double value, double expected, double tol) {
  return {std::move(name), value, "abs", expected, tol, std::abs(value - expected) <= tol};
}
Check check_le(std::string name, double value, double bound) {
  return {std::move(name), value, "<=", bound, 0.0, value <= bound};
}
Check check_gt(std::string name, double value, double bound) {
  return {std::move(name), value, ">", bound, 0.0, value > bound};
}
Check check_ge(std::string name, double value, double bound) {
  return {std::move(name), value, ">=", bound, 0.0, value >= bound};
}

Json to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["value"] = c.value;
  j["relation"] = c.relation;
  j["expected"] = c.expected;
  if (c.relation == "abs") j["tolerance"] = c.tolerance;
  j["pass"] = c.pass;
  return j;
}

// Flag values as parsed; std::nullopt means "not given on the command line".
struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool check = false;

  std::vector<std::string> witnesses;
  std::string witness;
  std::optional<int> d_max;
  std::optional<int> points;
  std::string kind;
  std::string which;
  std::string wcase;
  std::string mode;
  bool exact = false;
  std::optional<int> trials;
  std::string counts;
};

const std::set<std::string> kConfigKeys{"witness", "W", "points", "kind", "d_max", "which", "case", "mode",
                                        "exact", "trials", "counts", "seed", "optimizer", "simulation"};

// Defaults, then the config document, then explicit flags.
struct Resolved {
  Json file;  // raw config document
  std::uint64_t seed = kDefaultSeed;
  OptimizationConfig opt;
  SimConfig sim;

  bool has(const char* key) const { return file.contains(key); }
};

Resolved resolve(const Flags& f) {
  Resolved r;
  r.file = Json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw UsageError("cannot open config file " + f.config_path);
    try {
      r.file = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config is not valid JSON: " + std::string(e.what()));
    }
    if (!r.file.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& item : r.file.items()) {
      if (!kConfigKeys.count(item.key())) throw UsageError("unknown config field '" + item.key() + "'");
    }
  }
  for (const char* block : {"optimizer", "simulation"}) {
    if (r.file.contains(block) && r.file[block].is_object() && r.file[block].contains("seed")) {
      throw UsageError(std::string("set the seed at the top level, not inside '") + block + "'");
    }
  }
  if (r.file.contains("seed")) r.seed = r.file["seed"].get<std::uint64_t>();
  if (f.seed) r.seed = *f.seed;
  if (r.file.contains("optimizer")) r.opt = io::opt_config_from_json(r.file["optimizer"]);
  if (r.file.contains("simulation")) r.sim = io::sim_config_from_json(r.file["simulation"]);
  r.opt.seed = r.seed;
  r.sim.seed = r.seed;
  r.opt.validate();
  r.sim.validate();
  return r;
}

WitnessSpec resolve_witness(const Json& j) {
  if (j.is_string() && j.get<std::string>() == "C3") return c3_witness();
  if (j.is_array()) return io::witness_from_json(Json{{"alpha", j}});
  return io::witness_from_value(j);
}

// Witness for single-witness commands: flag, then config, then `fallback`.
Json witness_value(const Flags& f, const Resolved& r, const char* fallback) {
  if (!f.witness.empty()) {
    // Inline JSON: a bare alpha matrix or a witness object.
    if (f.witness.front() == '[' || f.witness.front() == '{') return Json::parse(f.witness);
    return f.witness;
  }
  if (r.has("witness")) return r.file["witness"];
  return fallback;
}

template <class T>
T pick(const std::optional<T>& flag, const Resolved& r, const char* key, T fallback) {
  if (flag) return *flag;
  if (r.has(key)) {
    try {
      return r.file[key].get<T>();
    } catch (const nlohmann::json::exception&) {
      throw UsageError(std::string("config field '") + key + "' has the wrong type");
    }
  }
  return fallback;
}

std::string pick_str(const std::string& flag, const Resolved& r, const char* key, std::string fallback) {
  if (!flag.empty()) return flag;
  if (r.has(key)) {
    if (!r.file[key].is_string()) throw UsageError(std::string("config field '") + key + "' must be a string");
    return r.file[key].get<std::string>();
  }
  return fallback;
}

struct Output {
  std::string command;
  Json config = Json::object();
  Json results = Json::object();
  std::vector<Check> checks;
  std::vector<std::pair<std::string, std::string>> csv;  // file name, content
};

void emit(const Output& o, const Flags& f, std::uint64_t seed, std::ostream& out) {
  for (const auto& c : o.checks) {
    out << "check " << c.name << ": " << io::fmt6(c.value) << ' ' << c.relation << ' ' << io::fmt6(c.expected);
    if (c.relation == "abs") out << " +- " << io::fmt6(c.tolerance);
    out << " -> " << (c.pass ? "PASS" : "FAIL") << '\n';
  }
  if (f.out_dir.empty()) return;
  fs::create_directories(f.out_dir);
  Json doc;
  doc["tool"] = "entwit";
  doc["version"] = ENTWIT_VERSION;
  doc["command"] = o.command;
  doc["seed"] = seed;
  doc["config"] = o.config;
  doc["results"] = o.results;
  Json checks = Json::array();
  for (const auto& c : o.checks) checks.push_back(to_json(c));
  doc["checks"] = std::move(checks);
  std::ofstream(fs::path(f.out_dir) / (o.command + ".json")) << doc.dump(2) << '\n';
  for (const auto& [name, body] : o.csv) {
    std::ofstream file(fs::path(f.out_dir) / name);
    file << "# entwit " << ENTWIT_VERSION << " " << o.command << " seed=" << seed << '\n' << body;
  }
}

Output cmd_table1(const Flags& f, const Resolved& r, std::ostream& out) {
  std::vector<std::string> names = f.witnesses;
  if (names.empty() && r.has("witness")) {
    const Json& w = r.file["witness"];
    if (w.is_string()) {
      names.push_back(w.get<std::string>());
    } else if (w.is_array()) {
      for (const auto& v : w) names.push_back(v.get<std::string>());
    } else {
      throw UsageError("table1 takes witness names");
    }
  }
  if (names.empty()) names = {"I3", "I4", "R4"};
  for (const auto& n : names) {
    if (n != "I3" && n != "I4" && n != "R4") throw UsageError("unknown witness '" + n + "' (expected I3, I4 or R4)");
  }

  Output o;
  o.command = "table1";
  o.config["witness"] = names;
  o.config["seed"] = r.seed;
  o.config["optimizer"] = io::to_json(r.opt);
  std::ostringstream csv;
  csv << "witness,W,H_min,S_min,gap,residual\n";
  Json rows = Json::array();
  for (const auto& n : names) {
    const TableRow& ref = table_row(n);
    const WitnessSpec spec = canonical_witness(n);
    const ClassicalMinimum cm = min_classical_entropy(spec, ref.W);
    const QuantumMinimum qm = min_quantum_entropy(spec, ref.W, r.opt);
    const double gap = cm.bits - qm.bits;
    csv << n << ',' << io::fmt6(ref.W) << ',' << io::fmt6(cm.bits) << ',' << io::fmt6(qm.bits) << ','
        << io::fmt6(gap) << ',' << io::fmt6(qm.residual) << '\n';
    Json row;
    row["witness"] = n;
    row["W"] = ref.W;
    row["H_min"] = cm.bits;
    row["S_min"] = qm.bits;
    row["gap"] = gap;
    row["residual"] = qm.residual;
    row["starts_converged"] = qm.starts_converged;
    row["classical_mixture"] = io::to_json(cm.mixture);
    rows.push_back(std::move(row));
    o.checks.push_back(check_abs(n + ".H_min", cm.bits, ref.H, 1e-3));
    o.checks.push_back(check_abs(n + ".S_min", qm.bits, ref.S, 5e-3));
    o.checks.push_back(check_abs(n + ".gap", gap, ref.gap, 1e-2));
    o.checks.push_back(check_le(n + ".residual", qm.residual, 1e-5));
  }
  o.results["rows"] = std::move(rows);
  out << csv.str();
  o.csv.emplace_back("table1.csv", csv.str());
  return o;
}

Output cmd_bounds(const Flags& f, const Resolved& r, std::ostream& out) {
  const Json wv = witness_value(f, r, "I3");
  const WitnessSpec spec = resolve_witness(wv);
  const int d_max = pick(f.d_max, r, "d_max", spec.n());
  if (d_max < 1 || d_max > spec.n()) throw UsageError("d_max must lie in [1, n]");

  Output o;
  o.command = "bounds";
  o.config["witness"] = io::to_json(spec);
  o.config["d_max"] = d_max;
  std::vector<double> L;
  std::ostringstream csv;
  csv << "d,L_d,ratio\n";
  Json rows = Json::array();
  for (int d = 1; d <= d_max; ++d) {
    L.push_back(classical_bound(spec, d));
    Json row;
    row["d"] = d;
    row["L"] = L.back();
    csv << d << ',' << io::fmt6(L.back()) << ',';
    // (L_d - L_{d-1}) / (L_{d-1} - L_{d-2})
    if (d >= 3 && L[d - 2] - L[d - 3] > 1e-12) {
      const double ratio = (L[d - 1] - L[d - 2]) / (L[d - 2] - L[d - 3]);
      row["ratio"] = ratio;
      csv << io::fmt6(ratio);
    }
    csv << '\n';
    rows.push_back(std::move(row));
  }
  o.results["bounds"] = std::move(rows);
  for (int d = 1; d < d_max; ++d) {
    o.checks.push_back(check_ge("L" + std::to_string(d + 1) + ">=L" + std::to_string(d), L[d] + 1e-12, L[d - 1]));
  }
  if (spec.name() == "C3") {
    const double ref[] = {1.1144, 3.4854, 4.4764, 4.4860};
    for (int d = 1; d <= std::min(d_max, 4); ++d) {
      o.checks.push_back(check_abs("C3.L" + std::to_string(d), L[d - 1], ref[d - 1], 1e-3));
    }
    if (d_max >= 3) o.checks.push_back(check_abs("C3.ratio", (L[2] - L[1]) / (L[1] - L[0]), 0.4180, 1e-3));
  }
  out << csv.str();
  o.csv.emplace_back("bounds.csv", csv.str());
  return o;
}

std::vector<double> default_grid(const WitnessSpec& spec, int points) {
  const double l1 = classical_bound(spec, 1);
  const double ln = classical_bound(spec, spec.n());
  const double hi = l1 + 0.98 * (ln - l1);
  std::vector<double> grid;
  for (int k = 0; k < points; ++k) grid.push_back(points == 1 ? l1 : l1 + (hi - l1) * k / (points - 1));
  return grid;
}

Output cmd_curve(const Flags& f, const Resolved& r, std::ostream& out) {
  const WitnessSpec spec = resolve_witness(witness_value(f, r, "I3"));
  const std::string kind = pick_str(f.kind, r, "kind", "both");
  if (kind != "both" && kind != "classical" && kind != "quantum") throw UsageError("kind must be classical, quantum or both");
  std::vector<double> grid;
  if (r.has("W") && !f.points) {
    grid = r.file["W"].get<std::vector<double>>();
  } else {
    const int points = pick(f.points, r, "points", 20);
    if (points < 1) throw UsageError("points must be >= 1");
    grid = default_grid(spec, points);
  }

  Output o;
  o.command = "curve";
  o.config["witness"] = io::to_json(spec);
  o.config["kind"] = kind;
  o.config["W"] = grid;
  o.config["seed"] = r.seed;
  o.config["optimizer"] = io::to_json(r.opt);

  std::optional<EntropyCurve> classical, quantum;
  if (kind != "quantum") classical = entropy_curve(spec, CurveKind::classical, grid, r.opt);
  if (kind != "classical") quantum = entropy_curve(spec, CurveKind::quantum, grid, r.opt);

  const auto monotone = [&](const EntropyCurve& c, const std::string& label) {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < c.samples.size(); ++k) {
      worst = std::max(worst, c.samples[k].value - c.samples[k + 1].value);
    }
    o.checks.push_back(check_le(spec.name() + "." + label + ".max_decrease", worst, 2e-3));
  };
  for (const auto* c : {classical ? &*classical : nullptr, quantum ? &*quantum : nullptr}) {
    if (c == nullptr) continue;
    const std::string label = c->kind == CurveKind::classical ? "classical" : "quantum";
    std::ostringstream csv;
    io::write_curve_csv(csv, *c);
    if (kind == "both") out << "# " << label << '\n';
    out << csv.str();
    o.csv.emplace_back("curve_" + label + ".csv", csv.str());
    o.results[label] = io::to_json(*c);
    monotone(*c, label);
    for (const auto& s : c->samples) {
      if (s.error) o.checks.push_back({spec.name() + "." + label + ".W=" + io::fmt6(s.W) + ".error", 1.0, "<=", 0.0, 0.0, false});
    }
  }
  if (classical && quantum) {
    double worst = -1e300;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      worst = std::max(worst, quantum->samples[k].value - classical->samples[k].value);
    }
    o.checks.push_back(check_le(spec.name() + ".max(S-H)", worst, 5e-3));
  }
  return o;
}

Json certificate_json(const Certificate& c) {
  Json j;
  j["name"] = c.name;
  j["witness"] = c.witness();
  j["entropy"] = c.entropy();
  return j;
}

Output cmd_counterexample(const Flags& f, const Resolved& r, std::ostream& out) {
  const std::string which = pick_str(f.which, r, "which", "all");
  const bool all = which == "all";
  if (!all && which != "hyp1-I4" && which != "hyp2-R4" && which != "hyp2-classical") {
    throw UsageError("which must be hyp1-I4, hyp2-R4, hyp2-classical or all");
  }
  Output o;
  o.command = "counterexample";
  o.config["which"] = which;
  o.config["seed"] = r.seed;
  o.config["optimizer"] = io::to_json(r.opt);

  if (all || which == "hyp1-I4") {
    const double qubit = i4_qubit_entropy();
    const Certificate cert = i4_ququart_certificate();
    const QuantumMinimum qm = min_quantum_entropy(canonical_witness("I4"), 6.0, r.opt);
    out << "hyp1-I4: qubit S=" << io::fmt6(qubit) << " ququart certificate I4=" << io::fmt6(cert.witness())
        << " S=" << io::fmt6(cert.entropy()) << " optimizer S=" << io::fmt6(qm.bits) << '\n';
    Json j;
    j["qubit_entropy"] = qubit;
    j["certificate"] = certificate_json(cert);
    j["optimizer_entropy"] = qm.bits;
    j["optimizer_residual"] = qm.residual;
    o.results["hyp1-I4"] = std::move(j);
    o.checks.push_back(check_abs("hyp1.qubit_S", qubit, 0.954, 1e-3));
    o.checks.push_back(check_abs("hyp1.ququart_I4", cert.witness(), 6.000, 2e-3));
    o.checks.push_back(check_abs("hyp1.ququart_S", cert.entropy(), 0.912, 1e-3));
    o.checks.push_back(check_le("hyp1.optimizer_S", qm.bits, 0.9122 + 5e-3));
    o.checks.push_back(check_gt("hyp1.qubit_above_ququart", qubit, cert.entropy()));
  }
  if (all || which == "hyp2-R4") {
    const Certificate c3 = r4_qutrit_certificate();
    const Certificate c4 = r4_ququart_certificate();
    const QuantumMinimum qm = min_quantum_entropy(canonical_witness("R4"), 6.472, r.opt);
    out << "hyp2-R4: qutrit R4=" << io::fmt6(c3.witness()) << " S=" << io::fmt6(c3.entropy())
        << " ququart R4=" << io::fmt6(c4.witness()) << " S=" << io::fmt6(c4.entropy())
        << " optimizer S=" << io::fmt6(qm.bits) << '\n';
    Json j;
    j["qutrit"] = certificate_json(c3);
    j["ququart"] = certificate_json(c4);
    j["optimizer_entropy"] = qm.bits;
    j["optimizer_residual"] = qm.residual;
    o.results["hyp2-R4"] = std::move(j);
    o.checks.push_back(check_abs("hyp2.qutrit_R4", c3.witness(), 6.472, 2e-3));
    o.checks.push_back(check_abs("hyp2.qutrit_S", c3.entropy(), 1.5, 1e-3));
    o.checks.push_back(check_abs("hyp2.ququart_R4", c4.witness(), 6.472, 2e-3));
    o.checks.push_back(check_abs("hyp2.ququart_S", c4.entropy(), 1.418, 1e-3));
    o.checks.push_back(check_le("hyp2.optimizer_S", qm.bits, 1.418 + 5e-3));
  }
  if (all || which == "hyp2-classical") {
    const WitnessSpec spec = c3_witness();
    const ClassicalBoundTable t = classical_bounds(spec);
    const ClassicalMinimum cm = min_classical_entropy(spec, 3.4854);
    out << "hyp2-classical: L=";
    for (const auto& [d, v] : t.L) out << (d > 1 ? "," : "") << io::fmt6(v);
    out << " H(3.4854)=" << io::fmt6(cm.bits) << '\n';
    Json j;
    Json bounds = Json::object();
    for (const auto& [d, v] : t.L) bounds[std::to_string(d)] = v;
    j["bounds"] = std::move(bounds);
    j["H_min"] = cm.bits;
    j["mixture"] = io::to_json(cm.mixture);
    o.results["hyp2-classical"] = std::move(j);
    const double ref[] = {1.1144, 3.4854, 4.4764, 4.4860};
    for (int d = 1; d <= 4; ++d) o.checks.push_back(check_abs("hyp2c.L" + std::to_string(d), t.L.at(d), ref[d - 1], 1e-3));
    o.checks.push_back(check_gt("hyp2c.H_min", cm.bits, 0.811 + 1e-4));
  }
  return o;
}

struct Theory {
  double w, S, H;
};
Theory theory(WitnessCase c) {
  const TableRow& t = table_row(std::string(case_name(c)));
  return {t.W, t.S, t.H};
}

std::pair<WitnessCase, SimMode> case_and_mode(const Flags& f, const Resolved& r) {
  try {
    return {parse_case(pick_str(f.wcase, r, "case", "I3")), parse_mode(pick_str(f.mode, r, "mode", "quantum"))};
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

TomographyDataset tomography_data(const ProtocolReport& rep) {
  TomographyDataset d;
  for (const auto& e : rep.events) {
    if (e.y != -1) continue;
    if (d.counts.size() <= static_cast<std::size_t>(e.x)) d.counts.resize(static_cast<std::size_t>(e.x) + 1);
    d.counts[static_cast<std::size_t>(e.x)].push_back(e.record[Port::ab]);
  }
  return d;
}

Output cmd_simulate(const Flags& f, const Resolved& r, std::ostream& out) {
  auto [wcase, mode] = case_and_mode(f, r);
  SimConfig sim = r.sim;
  if (f.exact) sim.exact = true;
  if (r.has("exact") && !f.exact) sim.exact = r.file["exact"].get<bool>();

  Output o;
  o.command = "simulate";
  o.config["case"] = std::string(case_name(wcase));
  o.config["mode"] = std::string(mode_name(mode));
  o.config["seed"] = r.seed;
  o.config["simulation"] = io::to_json(sim);
  const ProtocolReport rep = run_protocol(wcase, mode, sim);
  o.results = io::to_json(rep);

  const Theory th = theory(wcase);
  const double ent_ref = mode == SimMode::quantum ? th.S : th.H;
  const char* ent_name = mode == SimMode::quantum ? "S" : "H";
  out << case_name(wcase) << ' ' << mode_name(mode) << ": w=" << io::fmt6(rep.witness) << ' ' << ent_name << '='
      << io::fmt6(rep.entropy);
  if (!rep.fidelities.empty()) {
    double fmean = 0.0;
    for (double v : rep.fidelities) fmean += v;
    fmean /= static_cast<double>(rep.fidelities.size());
    out << " mean_fidelity=" << io::fmt6(fmean);
    o.checks.push_back(check_ge("fidelity", fmean, 0.99));
  }
  out << '\n';
  if (sim.exact) {
    o.checks.push_back(check_abs("witness", rep.witness, th.w, 2e-3));
    o.checks.push_back(check_abs(ent_name, rep.entropy, ent_ref, 2e-3));
  }
  const std::string stem = "simulate_" + std::string(case_name(wcase)) + "_" + std::string(mode_name(mode));
  std::ostringstream counts;
  io::write_counts_csv(counts, rep.events);
  o.csv.emplace_back(stem + "_counts.csv", counts.str());
  if (mode == SimMode::quantum) {
    std::ostringstream tomo;
    io::write_tomography_csv(tomo, tomography_data(rep));
    o.csv.emplace_back(stem + "_tomography.csv", tomo.str());
  }
  return o;
}

Output cmd_tomo(const Flags& f, const Resolved& r, std::ostream& out) {
  const std::string path = pick_str(f.counts, r, "counts", "");
  if (path.empty()) throw UsageError("tomo needs --counts PATH");
  const WitnessCase wcase = case_and_mode(f, r).first;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open counts file " + path);
  // Skip leading comment lines written by other commands.
  std::string body, line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    body += line + '\n';
  }
  std::istringstream ss(body);
  const TomographyDataset data = io::read_tomography_csv(ss);
  const TomographySettings ts = tomo_settings(wcase == WitnessCase::I3 ? TomoCase::I3 : TomoCase::I4R4);

  Output o;
  o.command = "tomo";
  o.config["case"] = std::string(case_name(wcase));
  o.config["counts"] = path;
  const auto linear = linear_reconstruct(data, ts);
  const auto mle = mle_repair(data, ts);
  Json states = Json::array();
  const CaseTables& tables = case_tables(wcase);
  for (std::size_t x = 0; x < mle.size(); ++x) {
    Json s;
    s["index"] = x;
    s["linear"] = io::to_json(linear[x]);
    s["mle"] = io::to_json(mle[x].matrix());
    s["log_likelihood"] = log_likelihood(data.counts[x], mle[x].matrix(), ts);
    double fid = std::nan("");
    if (x < tables.target_states.size()) {
      fid = fidelity(mle[x], PureState::normalized(tables.target_states[x]).density());
      s["fidelity_to_target"] = fid;
    }
    out << "state " << x << ": S=" << io::fmt6(von_neumann_entropy(mle[x])) << " fidelity=" << io::fmt6(fid) << '\n';
    states.push_back(std::move(s));
  }
  const double S = von_neumann_entropy(average_state(mle));
  out << "S(average)=" << io::fmt6(S) << '\n';
  o.results["states"] = std::move(states);
  o.results["entropy"] = S;
  return o;
}

Output cmd_errorbudget(const Flags& f, const Resolved& r, std::ostream& out) {
  const WitnessCase wcase = case_and_mode(f, r).first;
  const std::string mode_s = pick_str(f.mode, r, "mode", "both");
  if (mode_s != "both" && mode_s != "quantum" && mode_s != "classical") {
    throw UsageError("mode must be quantum, classical or both");
  }
  const int trials = pick(f.trials, r, "trials", 20);
  if (trials < 2) throw UsageError("trials must be >= 2");

  Output o;
  o.command = "errorbudget";
  o.config["case"] = std::string(case_name(wcase));
  o.config["mode"] = mode_s;
  o.config["trials"] = trials;
  o.config["seed"] = r.seed;
  o.config["simulation"] = io::to_json(r.sim);
  const Theory th = theory(wcase);
  std::ostringstream csv;
  csv << "mode,trials,mean_witness,std_witness,mean_entropy,std_entropy,mean_fidelity\n";
  for (SimMode m : {SimMode::quantum, SimMode::classical}) {
    if (mode_s != "both" && mode_s != mode_name(m)) continue;
    const ErrorBudget b = error_budget(wcase, m, r.sim, trials);
    const std::string label(mode_name(m));
    csv << label << ',' << b.trials << ',' << io::fmt6(b.mean_witness) << ',' << io::fmt6(b.std_witness) << ','
        << io::fmt6(b.mean_entropy) << ',' << io::fmt6(b.std_entropy) << ',' << io::fmt6(b.mean_fidelity) << '\n';
    o.results[label] = io::to_json(b);
    const double ent_ref = m == SimMode::quantum ? th.S : th.H;
    o.checks.push_back(check_le(label + ".witness_sigmas", std::abs(b.mean_witness - th.w) / b.std_witness, 3.0));
    o.checks.push_back(check_le(label + ".entropy_sigmas", std::abs(b.mean_entropy - ent_ref) / b.std_entropy, 3.0));
    if (m == SimMode::quantum) o.checks.push_back(check_ge(label + ".fidelity", b.mean_fidelity, 0.99));
  }
  out << csv.str();
  o.csv.emplace_back("errorbudget.csv", csv.str());
  return o;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropy of dimension witnesses: classical and quantum minima, decompositions, simulated experiment",
               "entwit"};
  app.set_version_flag("--version", ENTWIT_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  std::uint64_t seed = 0;
  app.add_option("--config", f.config_path, "JSON config; flags override its fields")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed for optimizer starts and simulation");
  app.add_option("--out", f.out_dir, "directory for JSON and CSV reports");
  app.add_flag("--check", f.check, "exit 1 when any acceptance tolerance fails");

  const auto names = CLI::IsMember({"I3", "I4", "R4"});
  auto* table1 = app.add_subcommand("table1", "minimal classical and quantum entropies at the reference W values");
  table1->add_option("--witness", f.witnesses, "I3, I4 and/or R4")->check(names)->expected(1, 3);

  auto* bounds = app.add_subcommand("bounds", "classical bounds L_d");
  bounds->add_option("--witness", f.witness, "I3, I4, R4, C3 or an inline JSON alpha matrix");
  bounds->add_option("--d-max", f.d_max, "largest dimension");

  auto* curve = app.add_subcommand("curve", "entropy curves on a W grid");
  curve->add_option("--witness", f.witness, "I3, I4, R4, C3 or an inline JSON alpha matrix");
  curve->add_option("--points", f.points, "grid size (default 20)");
  curve->add_option("--kind", f.kind, "classical, quantum or both")->check(CLI::IsMember({"classical", "quantum", "both"}));

  auto* cex = app.add_subcommand("counterexample", "evaluate the fixed counter-example certificates");
  cex->add_option("--which", f.which, "hyp1-I4, hyp2-R4, hyp2-classical or all")
      ->check(CLI::IsMember({"hyp1-I4", "hyp2-R4", "hyp2-classical", "all"}));

  auto* simulate = app.add_subcommand("simulate", "simulate the optical experiment once");
  simulate->add_option("--case", f.wcase, "I3, I4 or R4")->check(names);
  simulate->add_option("--mode", f.mode, "quantum or classical")->check(CLI::IsMember({"quantum", "classical"}));
  simulate->add_flag("--exact", f.exact, "counts equal their expectations, no angle jitter");

  auto* tomo = app.add_subcommand("tomo", "reconstruct states from a tomography counts CSV");
  tomo->add_option("--counts", f.counts, "CSV with state_index,setting_index,count");
  tomo->add_option("--case", f.wcase, "I3 (qutrit settings) or I4/R4 (ququart settings)")->check(names);

  auto* budget = app.add_subcommand("errorbudget", "repeat the simulation and report spreads");
  budget->add_option("--case", f.wcase, "I3, I4 or R4")->check(names);
  budget->add_option("--mode", f.mode, "quantum, classical or both")
      ->check(CLI::IsMember({"quantum", "classical", "both"}));
  budget->add_option("--trials", f.trials, "number of seeded runs (default 20)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (seed_opt->count() > 0) f.seed = seed;

  try {
    const Resolved r = resolve(f);
    Output o;
    if (table1->parsed()) o = cmd_table1(f, r, out);
    else if (bounds->parsed()) o = cmd_bounds(f, r, out);
    else if (curve->parsed()) o = cmd_curve(f, r, out);
    else if (cex->parsed()) o = cmd_counterexample(f, r, out);
    else if (simulate->parsed()) o = cmd_simulate(f, r, out);
    else if (tomo->parsed()) o = cmd_tomo(f, r, out);
    else o = cmd_errorbudget(f, r, out);
    emit(o, f, r.seed, out);
    if (f.check) {
      for (const auto& c : o.checks) {
        if (!c.pass) return 1;
      }
    }
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    err << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace entwit::cli
