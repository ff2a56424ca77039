#pragma once

// Polarization-encoded prepare-and-measure experiment: wave-plate state
// preparation and projection, Poisson coincidence counting, and the
// expectation estimators that turn port counts into E_xy.

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "entwit/classical.hpp"
#include "entwit/qcore.hpp"
#include "entwit/witness.hpp"

namespace entwit {

/// Preparator plate angles in degrees.
struct PreparationAngles {
  double h_s = 0.0;
  double q_s = 0.0;
  double h_i = 0.0;
};

/// Measurement plate angles in degrees.
struct ProjectionAngles {
  double h_s = 0.0;
  double q_s = 0.0;
  double h_i = 0.0;
  double q_i = 0.0;
};

/// Basis {|0>,|1>,|2>,|3>} = {VV, HV, HH, VH} (signal, idler).
PureState prepare_state(const PreparationAngles& a);
/// State projected onto by the (a, b) port pair.
PureState projection_state(const ProjectionAngles& a);

enum class Port { ab = 0, ad = 1, cb = 2, cd = 3 };
inline constexpr std::array<Port, 4> kPorts{Port::ab, Port::ad, Port::cb, Port::cd};
std::string_view port_name(Port p);

/// Orthonormal states reaching each port pair, indexed by Port. ab is the
/// projection state; the others use the orthogonal signal and/or idler
/// polarization behind the beam splitters.
std::array<CVector, 4> port_basis(const ProjectionAngles& a);

using PortValues = std::array<double, 4>;  // indexed by Port

/// Born probabilities |<port|psi>|^2.
PortValues port_probabilities(const CVector& psi, const ProjectionAngles& a);

struct SimConfig {
  double pair_rate = 900.0;            // 1/s
  double duration_per_setting = 30.0;  // s
  double angle_jitter_deg = 0.5;
  double dark_rate = 0.0;              // 1/s per port pair
  std::uint64_t seed = 1;
  bool exact = false;  // counts equal their expectations

  void validate() const;
};

struct CoincidenceRecord {
  PortValues counts{};  // integer-valued unless SimConfig::exact
  double duration = 0.0;
  std::string setting;

  double operator[](Port p) const { return counts[static_cast<std::size_t>(p)]; }
  double total() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
};

/// Poisson counts with mean p * pair_rate * duration + dark_rate * duration.
CoincidenceRecord simulate_counts(const PortValues& p, const SimConfig& cfg, double duration,
                                  std::mt19937_64& rng, std::string setting = {});
CoincidenceRecord simulate_counts(const PortValues& p, const SimConfig& cfg);

enum class WitnessCase { I3, I4, R4 };
enum class SimMode { quantum, classical };

WitnessCase parse_case(std::string_view name);
std::string_view case_name(WitnessCase c);
SimMode parse_mode(std::string_view name);
std::string_view mode_name(SimMode m);

/// -D_ab + D_cb + D_cd (+ D_ad for four-dimensional cases) over the total of
/// the same ports.
double quantum_expectation(const CoincidenceRecord& rec, WitnessCase c);
/// sum_m E(y, m) D_port(m) over the same ports, with |0>,|1>,|2>,|3> on
/// ab, cb, cd, ad; `row` holds E(y, .) for one measurement.
double classical_expectation(const CoincidenceRecord& rec, WitnessCase c, const std::vector<int>& row);

/// Port on which a classical basis state |m> is detected with all plates at 0.
Port classical_port(int m);

struct CaseTables {
  WitnessSpec spec;
  std::vector<PreparationAngles> quantum_prep;   // one per x
  std::vector<ProjectionAngles> quantum_meas;    // one per y
  std::vector<CVector> target_states;            // ideal target kets
  std::vector<CVector> target_projections;
  // Classical strategies with their preparation tables and weights.
  std::vector<std::vector<PreparationAngles>> classical_prep;
  std::vector<DeterministicStrategy> strategies;
  std::vector<double> weights;
  int dim = 0;  // 3 for I3, 4 otherwise
};

const CaseTables& case_tables(WitnessCase c);

struct EventRecord {
  int x = 0;
  int y = -1;        // -1 for tomography or message-count events
  int setting = -1;  // tomography setting or strategy index
  CoincidenceRecord record;
};

struct ProtocolReport {
  WitnessCase wcase = WitnessCase::I3;
  SimMode mode = SimMode::quantum;
  double witness = 0.0;
  double entropy = 0.0;                 // S(rho) or H(M) in bits
  RMatrix expectations;                 // E_xy
  std::vector<CMatrix> states;          // reconstructed rho_x (quantum)
  std::vector<double> fidelities;       // with the prepared states (quantum)
  std::vector<double> message_distribution;  // p_m (classical)
  std::vector<EventRecord> events;
};

ProtocolReport run_protocol(WitnessCase c, SimMode mode, const SimConfig& cfg);

struct ErrorBudget {
  int trials = 0;
  double mean_witness = 0.0;
  double std_witness = 0.0;
  double mean_entropy = 0.0;
  double std_entropy = 0.0;
  double mean_fidelity = 0.0;  // quantum mode only
};

/// Repeats run_protocol with seeds derived from cfg.seed; trials >= 2.
ErrorBudget error_budget(WitnessCase c, SimMode mode, const SimConfig& cfg, int trials);

}  // namespace entwit
