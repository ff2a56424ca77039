#include <doctest.h>

#include <sstream>

#include "entwit/error.hpp"
#include "entwit/io.hpp"

using namespace entwit;

TEST_SUITE("io") {

TEST_CASE("six significant digits") {
  CHECK(io::fmt6(3.14159265) == "3.14159");
  CHECK(io::fmt6(1234567.0) == "1.23457e+06");
  CHECK(io::fmt6(0.5) == "0.5");
}

TEST_CASE("witness JSON") {
  const WitnessSpec w = canonical_witness("I4");
  const io::Json j = io::to_json(w);
  CHECK(j["n"] == 4);
  CHECK(j["l"] == 3);
  const WitnessSpec back = io::witness_from_json(j);
  CHECK(back.alpha() == w.alpha());
  CHECK(back.name() == "I4");
  CHECK(io::witness_from_value(io::Json("R4")).n() == 4);
  CHECK_THROWS_AS(io::witness_from_json(io::Json::parse(R"({"alpha": [[1, 2]], "beta": 1})")), InvalidArgument);
  CHECK_THROWS_AS(io::witness_from_json(io::Json::parse(R"({"n": 2, "alpha": [[1, 2]]})")), InvalidArgument);
  CHECK_THROWS_AS(io::witness_from_json(io::Json::parse(R"({"alpha": [[1, 2], [3]]})")), InvalidArgument);
}

TEST_CASE("mixture JSON") {
  IMatrix E(2, 3);
  E << 1, 1, -1,
       1, -1, 1;
  const StrategyMixture m({{DeterministicStrategy({0, 1, 2}, E), 0.25}, {DeterministicStrategy({0, 1, 0}, E), 0.75}});
  const io::Json j = io::to_json(m);
  REQUIRE(j.size() == 2);
  CHECK(j[1]["q"] == 0.75);
  CHECK(j[1]["P"][0] == io::Json::parse("[1, 0, 1]"));
  const StrategyMixture back = io::mixture_from_json(j);
  CHECK(back.components()[1].strategy == m.components()[1].strategy);
  CHECK_THROWS_AS(io::mixture_from_json(io::Json::parse(R"([{"P": [[1]], "E": [[1]], "q": 1, "x": 0}])")), InvalidArgument);
}

TEST_CASE("config blocks reject unknown fields") {
  const OptimizationConfig c = io::opt_config_from_json(io::Json::parse(R"({"starts": 4})"));
  CHECK(c.starts == 4);
  CHECK(c.max_iters == OptimizationConfig{}.max_iters);
  CHECK_THROWS_AS(io::opt_config_from_json(io::Json::parse(R"({"start": 4})")), InvalidArgument);
  CHECK_THROWS_AS(io::opt_config_from_json(io::Json::parse(R"({"starts": 0})")), InvalidArgument);
  const SimConfig s = io::sim_config_from_json(io::Json::parse(R"({"exact": true})"));
  CHECK(s.exact);
  CHECK_THROWS_AS(io::sim_config_from_json(io::Json::parse(R"({"rate": 1})")), InvalidArgument);
}

TEST_CASE("complex matrices") {
  CMatrix m(2, 2);
  m << cplx(1, 0), cplx(0, -1), cplx(0, 1), cplx(2, 0);
  CHECK(io::cmatrix_from_json(io::to_json(m)) == m);
}

TEST_CASE("curve and counts CSV") {
  EntropyCurve c;
  c.kind = CurveKind::classical;
  c.samples.push_back({1.0, 0.5, 0.0, 1, false, std::nullopt});
  std::ostringstream os;
  io::write_curve_csv(os, c);
  CHECK(os.str() == "W,value,residual,starts_converged\n1,0.5,0,1\n");
  CoincidenceRecord r;
  r.counts = {1, 2, 3, 4};
  r.duration = 30;
  r.setting = "x1_m1";
  std::ostringstream cs;
  io::write_counts_csv(cs, {{0, 0, -1, r}});
  CHECK(cs.str() == "setting,D_ab,D_ad,D_cb,D_cd,duration\nx1_m1,1,2,3,4,30\n");
}

}
