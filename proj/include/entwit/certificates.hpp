#pragma once

// Fixed ensembles and observables that certify specific witness/entropy
// pairs, and the four-preparation witness used to test the classical
// entropy formula.

#include <string>
#include <vector>

#include "entwit/polsim.hpp"
#include "entwit/witness.hpp"

namespace entwit {

struct Certificate {
  std::string name;
  WitnessSpec spec;
  QuantumEnsemble ensemble;
  std::vector<Measurement> measurements;

  double witness() const { return quantum_value(ensemble, measurements, spec); }
  double entropy() const { return von_neumann_entropy(ensemble.average()); }
};

/// Target states and M_y = 1 - 2|m_y><m_y| of the optical experiment.
Certificate experiment_certificate(WitnessCase c);
/// Four ququart states reaching I4 = 6 below the qubit entropy.
Certificate i4_ququart_certificate();
/// Four qutrit states reaching R4 = 6.472.
Certificate r4_qutrit_certificate();
/// Four ququart states reaching R4 = 6.472 with rank-2 minus eigenspaces.
Certificate r4_ququart_certificate();

/// Qubit minimum at I4 = 6: the average state has spectrum (5/8, 3/8).
double i4_qubit_entropy();

/// 4 x 2 witness whose two-dimensional classical optimum is 3.4854.
WitnessSpec c3_witness();

}  // namespace entwit
