#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = entwit::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("entwit_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"table1", "--witness", "X"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"tomo"}).code == 2);
  const fs::path dir = scratch("badcfg");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << R"({"witnes": "I3"})";
  const Run r = run({"--config", (dir / "c.json").string(), "bounds"});
  CHECK(r.code == 2);
  CHECK(r.err.find("witnes") != std::string::npos);
}

TEST_CASE("table1 check passes for I3") {
  const Run r = run({"table1", "--witness", "I3", "--check"});
  CHECK(r.code == 0);
  CHECK(r.out.find("I3,3.622,1.33392,") != std::string::npos);
}

TEST_CASE("bounds are non-decreasing") {
  const Run r = run({"bounds", "--witness", "I3", "--d-max", "3", "--check"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("d,L_d,ratio\n", 0) == 0);
}

TEST_CASE("bounds accept an inline alpha matrix") {
  const Run r = run({"bounds", "--witness", "[[1,1],[1,-1],[-1,1]]", "--d-max", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\n1,2,") != std::string::npos);
  CHECK(r.out.find("\n3,6,") != std::string::npos);
  CHECK(run({"bounds", "--witness", "[[1,1],[1]]"}).code == 2);
}

TEST_CASE("single-point curve") {
  const Run r = run({"curve", "--witness", "I3", "--points", "1", "--kind", "classical"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "W,value,residual,starts_converged");
  CHECK_FALSE(row.empty());
  std::getline(lines, extra);
  CHECK(extra.rfind("check", 0) == 0);
}

TEST_CASE("exact classical simulation") {
  const Run r = run({"simulate", "--case", "R4", "--mode", "classical", "--exact", "--check"});
  CHECK(r.code == 0);
  CHECK(r.out.find("w=5.2112") != std::string::npos);
}

TEST_CASE("counterexample hyp1") {
  const Run r = run({"counterexample", "--which", "hyp1-I4", "--check"});
  CHECK(r.code == 0);
  CHECK(r.out.find("qubit S=0.954434") != std::string::npos);
}

TEST_CASE("reports embed config and are reproducible") {
  const fs::path a = scratch("a"), b = scratch("b");
  const fs::path cfg = scratch("cfg");
  fs::create_directories(cfg);
  std::ofstream(cfg / "run.json") << R"({"case": "I4", "simulation": {"pair_rate": 500}})";
  for (const auto& dir : {a, b}) {
    CHECK(run({"--config", (cfg / "run.json").string(), "--seed", "9", "--out", dir.string(), "simulate"}).code == 0);
  }
  const std::string ja = slurp(a / "simulate.json");
  CHECK(ja == slurp(b / "simulate.json"));
  CHECK(slurp(a / "simulate_I4_quantum_counts.csv") == slurp(b / "simulate_I4_quantum_counts.csv"));
  const auto doc = nlohmann::json::parse(ja);
  CHECK(doc["seed"] == 9);
  CHECK(doc["config"]["simulation"]["pair_rate"] == 500.0);
  CHECK(doc["config"]["case"] == "I4");
  CHECK(doc.contains("version"));

  // Flags override the config file.
  const fs::path c = scratch("c");
  CHECK(run({"--config", (cfg / "run.json").string(), "--out", c.string(), "simulate", "--case", "I3"}).code == 0);
  CHECK(nlohmann::json::parse(slurp(c / "simulate.json"))["config"]["case"] == "I3");

  // The tomography CSV written by simulate feeds the tomo command.
  const Run t = run({"tomo", "--case", "I4", "--counts", (a / "simulate_I4_quantum_tomography.csv").string()});
  CHECK(t.code == 0);
  CHECK(t.out.find("S(average)=") != std::string::npos);
}

}
