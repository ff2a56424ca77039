#include <doctest.h>

#include <algorithm>
#include <limits>
#include <set>

#include "entwit/certificates.hpp"
#include "entwit/classical.hpp"
#include "entwit/error.hpp"
#include "support.hpp"

using namespace entwit;

namespace {

// Every map x -> m in [0, n) and every +-1 table E (l x n), evaluated
// directly as sum alpha_xy E(y, m(x)).
struct Brute {
  std::vector<std::vector<int>> maps;
  std::vector<std::vector<double>> dists;  // message distribution per strategy
  std::vector<double> w;
  std::vector<int> dim;
};

Brute brute_force(const WitnessSpec& spec) {
  const int n = spec.n(), l = spec.l();
  Brute b;
  std::vector<int> msg(n, 0);
  int total_maps = 1;
  for (int k = 0; k < n; ++k) total_maps *= n;
  for (int code = 0; code < total_maps; ++code) {
    int c = code;
    for (int x = 0; x < n; ++x) {
      msg[x] = c % n;
      c /= n;
    }
    std::vector<double> p(n, 0.0);
    for (int x = 0; x < n; ++x) p[msg[x]] += 1.0 / n;
    const int used = static_cast<int>(std::count_if(p.begin(), p.end(), [](double v) { return v > 0; }));
    for (int e = 0; e < (1 << (l * n)); ++e) {
      double w = 0.0;
      for (int x = 0; x < n; ++x) {
        for (int y = 0; y < l; ++y) {
          const int bit = (e >> (y * n + msg[x])) & 1;
          w += spec(x, y) * (bit ? -1.0 : 1.0);
        }
      }
      b.maps.push_back(msg);
      b.dists.push_back(p);
      b.w.push_back(w);
      b.dim.push_back(used);
    }
  }
  return b;
}

double brute_bound(const Brute& b, int d) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < b.w.size(); ++k) {
    if (b.dim[k] <= d) best = std::max(best, b.w[k]);
  }
  return best;
}

// Min entropy over single strategies and pairs hitting W exactly.
double brute_min_entropy(const Brute& full, double W) {
  // Strategies with the same witness value and message distribution are
  // interchangeable here.
  Brute b;
  std::set<std::pair<double, std::vector<double>>> seen;
  for (std::size_t k = 0; k < full.w.size(); ++k) {
    if (seen.insert({full.w[k], full.dists[k]}).second) {
      b.w.push_back(full.w[k]);
      b.dists.push_back(full.dists[k]);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  const std::size_t N = b.w.size();
  for (std::size_t i = 0; i < N; ++i) {
    if (std::abs(b.w[i] - W) < 1e-12) best = std::min(best, testsupport::shannon_oracle(b.dists[i]));
    for (std::size_t j = i + 1; j < N; ++j) {
      const double lo = std::min(b.w[i], b.w[j]), hi = std::max(b.w[i], b.w[j]);
      if (W < lo || W > hi || hi - lo < 1e-12) continue;
      const double q = (W - b.w[j]) / (b.w[i] - b.w[j]);
      std::vector<double> p(b.dists[i].size());
      for (std::size_t m = 0; m < p.size(); ++m) p[m] = q * b.dists[i][m] + (1 - q) * b.dists[j][m];
      best = std::min(best, testsupport::shannon_oracle(p));
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("classical") {

TEST_CASE("bounds agree with brute force on I3") {
  const WitnessSpec spec = canonical_witness("I3");
  const Brute b = brute_force(spec);
  for (int d = 1; d <= 3; ++d) CHECK(classical_bound(spec, d) == doctest::Approx(brute_bound(b, d)).epsilon(1e-12));
  CHECK(classical_bound(spec, 1) <= classical_bound(spec, 2));
  CHECK(classical_bound(spec, 2) <= classical_bound(spec, 3));
}

TEST_CASE("minimal entropy agrees with brute-force pair scan on I3") {
  const WitnessSpec spec = canonical_witness("I3");
  const Brute b = brute_force(spec);
  const double l3 = classical_bound(spec, 3);
  for (double W : {1.0, 1.5, 2.2, 3.0, 3.622, 4.2, l3}) {
    const ClassicalMinimum cm = min_classical_entropy(spec, W);
    CHECK(cm.bits == doctest::Approx(brute_min_entropy(b, W)).epsilon(1e-9));
    CHECK(cm.witness == doctest::Approx(W).epsilon(1e-9));
    CHECK(mixture_witness(cm.mixture, spec) == doctest::Approx(W).epsilon(1e-9));
    CHECK(cm.mixture.size() <= 2);
    CHECK(testsupport::shannon_oracle(message_distribution(cm.mixture, 3).values()) == doctest::Approx(cm.bits).epsilon(1e-9));
  }
  CHECK_THROWS_AS(min_classical_entropy(spec, l3 + 1e-3), Infeasible);
}

TEST_CASE("strategy counting") {
  // Labeled maps with at most d distinct messages times the outcome tables on used messages.
  const auto brute_count = [](int n, int l, int d) {
    std::size_t total = 0;
    int maps = 1;
    for (int k = 0; k < n; ++k) maps *= n;
    for (int code = 0; code < maps; ++code) {
      std::vector<bool> used(n, false);
      int c = code;
      for (int x = 0; x < n; ++x) {
        used[c % n] = true;
        c /= n;
      }
      const int k = static_cast<int>(std::count(used.begin(), used.end(), true));
      if (k <= d) total += std::size_t{1} << (l * k);
    }
    return total;
  };
  for (int d = 1; d <= 3; ++d) {
    CHECK(count_strategies(3, 2, d, false) == brute_count(3, 2, d));
    CHECK(enumerate_strategies(3, 2, d, false).size() == brute_count(3, 2, d));
  }
  CHECK(enumerate_strategies(3, 2, 3, true).size() == count_strategies(3, 2, 3, true));
  CHECK_THROWS_AS(enumerate_strategies(5, 4, 2, false), GuardExceeded);
  CHECK_THROWS_AS(enumerate_strategies(3, 2, 4, false), GuardExceeded);
}

TEST_CASE("strategy construction and witness") {
  IMatrix E(2, 3);
  E << 1, 1, -1,
       1, -1, 1;
  const DeterministicStrategy s({0, 1, 2}, E);
  CHECK(s.dimension() == 3);
  CHECK(DeterministicStrategy::from_matrices(s.P(), E) == s);
  const WitnessSpec spec = canonical_witness("I3");
  double w = 0.0;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 2; ++y) w += spec(x, y) * E(y, s.message(x));
  }
  CHECK(strategy_witness(s, spec) == doctest::Approx(w));
  IMatrix bad = E;
  bad(0, 0) = 0;
  CHECK_THROWS_AS(DeterministicStrategy({0, 1, 2}, bad), InvalidArgument);
  CHECK_THROWS_AS(DeterministicStrategy({0, 3, 2}, E), InvalidArgument);
  CHECK_THROWS_AS(StrategyMixture({{s, 0.5}}), InvalidDistribution);
}

TEST_CASE("four-preparation witness with two outcomes") {
  const WitnessSpec spec = c3_witness();
  const Brute b = brute_force(spec);
  const ClassicalBoundTable t = classical_bounds(spec);
  for (int d = 1; d <= 4; ++d) CHECK(t.L.at(d) == doctest::Approx(brute_bound(b, d)).epsilon(1e-12));
  CHECK(min_classical_entropy(spec, 3.4854).bits == doctest::Approx(brute_min_entropy(b, 3.4854)).epsilon(1e-9));
}

}
