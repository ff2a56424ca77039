#include "entwit/classical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <string>

namespace entwit {

namespace {

constexpr double kWeightSum = 1e-9;
constexpr double kFeasibleSlack = 1e-9;

void check_shapes(const DeterministicStrategy& s, const WitnessSpec& spec) {
  if (s.n() != spec.n() || s.l() != spec.l()) {
    throw DimensionMismatch("strategy shape (n=" + std::to_string(s.n()) + ", l=" +
                            std::to_string(s.l()) + ") does not match witness (n=" +
                            std::to_string(spec.n()) + ", l=" + std::to_string(spec.l()) + ")");
  }
}

void check_guard(int n, int l, int d) {
  if (n < 1 || l < 1 || d < 1) throw InvalidArgument("enumeration needs n, l, d >= 1");
  if (n * l > 16) {
    throw GuardExceeded("enumeration guard: n*l = " + std::to_string(n * l) + " exceeds 16",
                        count_strategies(n, l, std::min(d, n), false));
  }
  if (d > n) throw GuardExceeded("enumeration guard: d = " + std::to_string(d) + " exceeds n", 0);
}

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// Visits every message map x -> m in [0, n) with at most d distinct values.
// Labeled maps run in lexicographic order (x = 0 most significant); with
// `canonical` only restricted-growth maps (first use order) are visited.
void for_each_message_map(int n, int d, bool canonical,
                          const std::function<void(const std::vector<int>&, int used)>& fn) {
  std::vector<int> msg(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int x, int used_max) {
    if (x == n) {
      std::vector<bool> seen(static_cast<std::size_t>(n), false);
      int used = 0;
      for (int m : msg) {
        if (!seen[static_cast<std::size_t>(m)]) {
          seen[static_cast<std::size_t>(m)] = true;
          ++used;
        }
      }
      if (used <= d) fn(msg, used);
      return;
    }
    const int limit = canonical ? std::min(used_max + 1, d - 1) : n - 1;
    for (int m = 0; m <= limit; ++m) {
      msg[static_cast<std::size_t>(x)] = m;
      rec(x + 1, std::max(used_max, m));
    }
  };
  rec(0, -1);
}

std::vector<int> used_messages(const std::vector<int>& msg) {
  std::set<int> s(msg.begin(), msg.end());
  return {s.begin(), s.end()};
}

// Column sums sum_{x: m(x) = m} alpha_xy, laid out as (m, y).
RMatrix block_sums(const std::vector<int>& msg, const RMatrix& alpha, int m_max) {
  RMatrix sums = RMatrix::Zero(m_max, alpha.cols());
  for (std::size_t x = 0; x < msg.size(); ++x) sums.row(msg[x]) += alpha.row(static_cast<Eigen::Index>(x));
  return sums;
}

// Outcome table maximizing (sign = +1) or minimizing (sign = -1) the witness
// for a fixed message map.
IMatrix extremal_outcomes(const RMatrix& sums, int sign) {
  IMatrix e = IMatrix::Ones(sums.cols(), sums.rows());
  for (Eigen::Index m = 0; m < sums.rows(); ++m) {
    for (Eigen::Index y = 0; y < sums.cols(); ++y) {
      const int s = sums(m, y) >= 0.0 ? 1 : -1;
      e(y, m) = sign * s;
    }
  }
  return e;
}

}  // namespace

DeterministicStrategy::DeterministicStrategy(std::vector<int> message, IMatrix outcomes)
    : message_(std::move(message)), outcomes_(std::move(outcomes)) {
  if (message_.empty() || outcomes_.rows() < 1 || outcomes_.cols() < 1) {
    throw InvalidArgument("strategy needs n, l, m_max >= 1");
  }
  for (int m : message_) {
    if (m < 0 || m >= outcomes_.cols()) {
      throw InvalidArgument("strategy message index " + std::to_string(m) + " out of range");
    }
  }
  for (Eigen::Index i = 0; i < outcomes_.size(); ++i) {
    const int v = outcomes_.data()[i];
    if (v != 1 && v != -1) throw InvalidArgument("strategy outcomes must be +1 or -1");
  }
}

DeterministicStrategy DeterministicStrategy::from_matrices(const IMatrix& P, const IMatrix& E) {
  if (P.rows() != E.cols()) {
    throw DimensionMismatch("P has " + std::to_string(P.rows()) + " message rows but E has " +
                            std::to_string(E.cols()) + " message columns");
  }
  std::vector<int> msg;
  for (Eigen::Index x = 0; x < P.cols(); ++x) {
    int hit = -1;
    for (Eigen::Index m = 0; m < P.rows(); ++m) {
      const int v = P(m, x);
      if (v != 0 && v != 1) throw InvalidArgument("P entries must be 0 or 1");
      if (v == 1) {
        if (hit >= 0) throw InvalidArgument("P column " + std::to_string(x) + " is not one-hot");
        hit = static_cast<int>(m);
      }
    }
    if (hit < 0) throw InvalidArgument("P column " + std::to_string(x) + " is empty");
    msg.push_back(hit);
  }
  return DeterministicStrategy(std::move(msg), E);
}

IMatrix DeterministicStrategy::P() const {
  IMatrix p = IMatrix::Zero(m_max(), n());
  for (int x = 0; x < n(); ++x) p(message(x), x) = 1;
  return p;
}

int DeterministicStrategy::dimension() const {
  return static_cast<int>(used_messages(message_).size());
}

StrategyMixture::StrategyMixture(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw InvalidArgument("mixture has no components");
  double sum = 0.0;
  const auto& first = components_.front().strategy;
  for (const auto& c : components_) {
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
      throw InvalidDistribution("mixture weight must be finite and non-negative");
    }
    if (c.strategy.n() != first.n() || c.strategy.l() != first.l() || c.strategy.m_max() != first.m_max()) {
      throw DimensionMismatch("mixture components have different shapes");
    }
    sum += c.weight;
  }
  if (std::abs(sum - 1.0) > kWeightSum) {
    throw InvalidDistribution("mixture weights sum to " + std::to_string(sum));
  }
}

double strategy_witness(const DeterministicStrategy& s, const WitnessSpec& spec) {
  check_shapes(s, spec);
  double w = 0.0;
  for (int x = 0; x < spec.n(); ++x) {
    for (int y = 0; y < spec.l(); ++y) w += spec(x, y) * s.E()(y, s.message(x));
  }
  return w;
}

double mixture_witness(const StrategyMixture& mix, const WitnessSpec& spec) {
  double w = 0.0;
  for (const auto& c : mix.components()) w += c.weight * strategy_witness(c.strategy, spec);
  return w;
}

ProbVector message_distribution(const StrategyMixture& mix, int n) {
  const auto& first = mix.components().front().strategy;
  if (first.n() != n) {
    throw DimensionMismatch("mixture strategies have n = " + std::to_string(first.n()) +
                            ", requested n = " + std::to_string(n));
  }
  std::vector<double> p(static_cast<std::size_t>(first.m_max()), 0.0);
  for (const auto& c : mix.components()) {
    for (int x = 0; x < n; ++x) p[static_cast<std::size_t>(c.strategy.message(x))] += c.weight / n;
  }
  // Weights sum to 1 within 1e-9; renormalize so the vector invariants are tight.
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) v /= sum;
  return ProbVector(std::move(p));
}

std::size_t count_strategies(int n, int l, int d, bool dedupe) {
  if (n < 1 || l < 1 || d < 1) return 0;
  d = std::min(d, n);
  // Stirling numbers S(n, k) (set partitions into k blocks) and falling
  // factorials n!/(n-k)! for the number of labelings.
  std::vector<std::vector<std::size_t>> stirling(static_cast<std::size_t>(n) + 1,
                                                 std::vector<std::size_t>(static_cast<std::size_t>(n) + 1, 0));
  stirling[0][0] = 1;
  for (int i = 1; i <= n; ++i) {
    for (int k = 1; k <= i; ++k) {
      stirling[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
          static_cast<std::size_t>(k) * stirling[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)] +
          stirling[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)];
    }
  }
  std::size_t total = 0;
  for (int k = 1; k <= d; ++k) {
    std::size_t maps = stirling[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
    if (!dedupe) {
      for (int i = 0; i < k; ++i) maps *= static_cast<std::size_t>(n - i);
    }
    total += maps * ipow(2, l * k);
  }
  return total;
}

std::vector<DeterministicStrategy> enumerate_strategies(int n, int l, int d, bool dedupe) {
  check_guard(n, l, d);
  const std::size_t count = count_strategies(n, l, d, dedupe);
  if (count > kMaxStrategies) {
    throw GuardExceeded("enumeration guard: " + std::to_string(count) + " strategies exceed the limit of " +
                            std::to_string(kMaxStrategies),
                        count);
  }
  std::vector<DeterministicStrategy> out;
  out.reserve(count);
  for_each_message_map(n, d, dedupe, [&](const std::vector<int>& msg, int) {
    const std::vector<int> used = used_messages(msg);
    const int free_bits = l * static_cast<int>(used.size());
    for (std::size_t pattern = 0; pattern < ipow(2, free_bits); ++pattern) {
      IMatrix e = IMatrix::Ones(l, n);
      int bit = 0;
      for (int m : used) {
        for (int y = 0; y < l; ++y, ++bit) {
          if ((pattern >> bit) & 1U) e(y, m) = -1;
        }
      }
      out.emplace_back(msg, std::move(e));
    }
  });
  return out;
}

double classical_bound(const WitnessSpec& spec, int d) {
  check_guard(spec.n(), spec.l(), d);
  // For a fixed message map the best outcome table picks E(y,m) = sign of the
  // block sum, giving sum_m sum_y |block sum|; relabeling messages does not
  // change the value, so canonical maps suffice.
  double best = -std::numeric_limits<double>::infinity();
  for_each_message_map(spec.n(), d, true, [&](const std::vector<int>& msg, int) {
    best = std::max(best, block_sums(msg, spec.alpha(), spec.n()).cwiseAbs().sum());
  });
  return best;
}

ClassicalBoundTable classical_bounds(const WitnessSpec& spec) {
  ClassicalBoundTable table;
  for (int d = 1; d <= spec.n(); ++d) table.L[d] = classical_bound(spec, d);
  return table;
}

ClassicalMinimum min_classical_entropy(const WitnessSpec& spec, double W) {
  const int n = spec.n();
  check_guard(n, spec.l(), n);
  if (!std::isfinite(W)) throw InvalidArgument("target witness value must be finite");

  // One candidate point per (labeled message distribution, extremal witness).
  // H of a two-point mixture is concave in the mixing weight, so the optimum
  // sits at an endpoint of the feasible weight interval; those endpoints are
  // realized by the extremal witness values of each distribution.
  struct Extreme {
    double w;
    std::vector<int> msg;
  };
  struct Group {
    Extreme lo{std::numeric_limits<double>::infinity(), {}};
    Extreme hi{-std::numeric_limits<double>::infinity(), {}};
  };
  std::map<std::vector<int>, Group> groups;  // message counts -> extremes
  for_each_message_map(n, n, false, [&](const std::vector<int>& msg, int) {
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    for (int m : msg) ++counts[static_cast<std::size_t>(m)];
    const double w = block_sums(msg, spec.alpha(), n).cwiseAbs().sum();
    Group& g = groups[counts];
    if (w > g.hi.w) g.hi = {w, msg};
    if (-w < g.lo.w) g.lo = {-w, msg};
  });

  struct Candidate {
    std::vector<double> p;
    double w;
    std::vector<int> msg;
    int sign;
  };
  std::vector<Candidate> cands;
  double w_max = -std::numeric_limits<double>::infinity();
  for (const auto& [counts, g] : groups) {
    std::vector<double> p;
    for (int c : counts) p.push_back(static_cast<double>(c) / n);
    cands.push_back({p, g.lo.w, g.lo.msg, -1});
    cands.push_back({p, g.hi.w, g.hi.msg, +1});
    w_max = std::max(w_max, g.hi.w);
  }
  if (std::abs(W) > w_max + kFeasibleSlack) {
    throw Infeasible("witness value " + std::to_string(W) + " exceeds the classical maximum L_n = " +
                     std::to_string(w_max));
  }

  double best_h = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0, best_j = 0;
  double best_q = 1.0;
  std::vector<double> mixed(static_cast<std::size_t>(n));
  auto consider = [&](std::size_t i, std::size_t j, double q) {
    for (std::size_t m = 0; m < mixed.size(); ++m) mixed[m] = q * cands[i].p[m] + (1.0 - q) * cands[j].p[m];
    const double h = entropy_bits(mixed);
    if (h < best_h - 1e-12) {
      best_h = h;
      best_i = i;
      best_j = j;
      best_q = q;
    }
  };
  for (std::size_t i = 0; i < cands.size(); ++i) {
    for (std::size_t j = i; j < cands.size(); ++j) {
      const double wi = cands[i].w, wj = cands[j].w;
      if (std::abs(wi - wj) < 1e-12) {
        if (std::abs(wi - W) <= kFeasibleSlack) consider(i, i, 1.0);
        continue;
      }
      double q = (W - wj) / (wi - wj);
      if (q < -1e-12 || q > 1.0 + 1e-12) continue;
      q = std::clamp(q, 0.0, 1.0);
      consider(i, j, q);
    }
  }
  if (!std::isfinite(best_h)) {
    throw Infeasible("no classical mixture reaches witness value " + std::to_string(W));
  }

  auto make_strategy = [&](const Candidate& c) {
    return DeterministicStrategy(c.msg, extremal_outcomes(block_sums(c.msg, spec.alpha(), n), c.sign));
  };
  std::vector<StrategyMixture::Component> comps;
  if (best_i == best_j || best_q >= 1.0) {
    comps.push_back({make_strategy(cands[best_i]), 1.0});
  } else if (best_q <= 0.0) {
    comps.push_back({make_strategy(cands[best_j]), 1.0});
  } else {
    comps.push_back({make_strategy(cands[best_i]), best_q});
    comps.push_back({make_strategy(cands[best_j]), 1.0 - best_q});
  }
  StrategyMixture mix(std::move(comps));
  const double bits = shannon_entropy(message_distribution(mix, n));
  const double witness = mixture_witness(mix, spec);
  return {bits, std::move(mix), witness};
}

}  // namespace entwit
