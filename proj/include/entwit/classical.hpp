#pragma once

// Classical (deterministic-strategy) model of the prepare-and-measure
// scenario: strategy enumeration, classical witness values, the dimensional
// bounds L_d, and the exact minimal Shannon entropy at a fixed witness value.

#include <cstddef>
#include <map>
#include <vector>

#include "entwit/qcore.hpp"
#include "entwit/witness.hpp"

namespace entwit {

using IMatrix = Eigen::MatrixXi;

/// Deterministic strategy lambda: preparation x emits message m(x); the
/// measurement y answers E(y, m) in {-1, +1}.
class DeterministicStrategy {
 public:
  /// `message[x]` in [0, E.cols()); E is l x m_max with +-1 entries.
  DeterministicStrategy(std::vector<int> message, IMatrix outcomes);
  /// P is m_max x n with one-hot columns, E is l x m_max.
  static DeterministicStrategy from_matrices(const IMatrix& P, const IMatrix& E);

  int n() const noexcept { return static_cast<int>(message_.size()); }
  int l() const noexcept { return static_cast<int>(outcomes_.rows()); }
  int m_max() const noexcept { return static_cast<int>(outcomes_.cols()); }
  int message(int x) const { return message_.at(static_cast<std::size_t>(x)); }
  const std::vector<int>& messages() const noexcept { return message_; }
  const IMatrix& E() const noexcept { return outcomes_; }
  IMatrix P() const;
  /// Number of distinct messages actually used.
  int dimension() const;

  friend bool operator==(const DeterministicStrategy& a, const DeterministicStrategy& b) {
    return a.message_ == b.message_ && a.outcomes_.rows() == b.outcomes_.rows() &&
           a.outcomes_.cols() == b.outcomes_.cols() && a.outcomes_ == b.outcomes_;
  }

 private:
  std::vector<int> message_;
  IMatrix outcomes_;
};

class StrategyMixture {
 public:
  struct Component {
    DeterministicStrategy strategy;
    double weight;
  };

  /// Weights must be >= 0 and sum to 1 within 1e-9; all strategies share
  /// (n, l, m_max).
  explicit StrategyMixture(std::vector<Component> components);

  const std::vector<Component>& components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }

 private:
  std::vector<Component> components_;
};

struct ClassicalBoundTable {
  std::map<int, double> L;  // dimension d -> max classical witness
};

double strategy_witness(const DeterministicStrategy& s, const WitnessSpec& spec);
double mixture_witness(const StrategyMixture& mix, const WitnessSpec& spec);
/// p_m = sum_x sum_lambda P(m|x,lambda) q_lambda / n.
ProbVector message_distribution(const StrategyMixture& mix, int n);

/// Upper limit on the number of strategies a single enumeration may produce.
inline constexpr std::size_t kMaxStrategies = std::size_t{1} << 22;

/// Size of enumerate_strategies(n, l, d, dedupe) without materializing it.
std::size_t count_strategies(int n, int l, int d, bool dedupe);

/// All strategies with m_max = n and dimension <= d. Outcomes on unused
/// messages are fixed to +1. With `dedupe`, message labels are canonical
/// (first use order), so one representative per message partition and
/// outcome table survives. Throws GuardExceeded when n*l > 16, d > n or the
/// count exceeds kMaxStrategies.
std::vector<DeterministicStrategy> enumerate_strategies(int n, int l, int d, bool dedupe);

/// L_d = max strategy_witness over strategies of dimension <= d.
double classical_bound(const WitnessSpec& spec, int d);
ClassicalBoundTable classical_bounds(const WitnessSpec& spec);

struct ClassicalMinimum {
  double bits;
  StrategyMixture mixture;  // at most two components
  double witness;           // mixture_witness(mixture), equals the target
};

/// Exact min H(message_distribution) over mixtures with witness exactly W.
/// Throws Infeasible when |W| > L_n.
ClassicalMinimum min_classical_entropy(const WitnessSpec& spec, double W);

}  // namespace entwit
