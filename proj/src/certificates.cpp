#include "entwit/certificates.hpp"

#include <cmath>

namespace entwit {

namespace {

CVector ket(std::initializer_list<cplx> v) {
  CVector k(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (cplx c : v) k(i++) = c;
  return k;
}

std::vector<Measurement> projective(const std::vector<CVector>& ms) {
  std::vector<Measurement> out;
  for (const auto& m : ms) out.push_back(Measurement::projective(m));
  return out;
}

}  // namespace

Certificate experiment_certificate(WitnessCase c) {
  const CaseTables& t = case_tables(c);
  return Certificate{std::string("experiment-") + std::string(case_name(c)), t.spec,
                     QuantumEnsemble::from_kets(t.target_states), projective(t.target_projections)};
}

Certificate i4_ququart_certificate() {
  return Certificate{
      "I4-ququart", canonical_witness("I4"),
      QuantumEnsemble::from_kets({ket({1, 0, 0, 0}), ket({0.8290, 0.5592, 0, 0}), ket({0.7660, -0.6428, 0, 0}),
                                  ket({0.8844, -0.0191, -0.1204, 0.4506})}),
      projective({ket({0.2229, -0.0058, -0.2516, 0.9418}), ket({0.4838, -0.8752, 0, 0}), ket({0.4695, 0.8829, 0, 0})})};
}

Certificate r4_qutrit_certificate() {
  const double r = 1.0 / std::sqrt(2.0);
  const double a = std::sqrt(10.0 + 2.0 * std::sqrt(5.0));
  const double u = (std::sqrt(5.0) + 1.0) / a, v = 2.0 / a;
  return Certificate{"R4-qutrit", canonical_witness("R4"),
                     QuantumEnsemble::from_kets({ket({0, 0, 1}), ket({r, -r, 0}), ket({r, r, 0}), ket({1, 0, 0})}),
                     projective({ket({u, v, 0}), ket({u, -v, 0})})};
}

Certificate r4_ququart_certificate() {
  return Certificate{
      "R4-ququart", canonical_witness("R4"),
      QuantumEnsemble::from_kets({ket({1, 0, 0, 0}), ket({0.5892, 0.5736, 0.5690, 0}),
                                  ket({-0.6257, 0.5584, 0.0293, 0.5439}), ket({0.0175, 0.9998, 0, 0})}),
      {Measurement::from_minus_subspace({ket({-0.2925, 0.8860, -0.0987, 0.3460}), ket({-0.1432, -0.3525, 0.3117, 0.8707})}),
       Measurement::from_minus_subspace({ket({0.2906, 0.8847, 0.3496, -0.1030}), ket({0.1143, -0.3604, 0.8911, 0.2511})})}};
}

double i4_qubit_entropy() {
  const double p[] = {5.0 / 8.0, 3.0 / 8.0};
  return entropy_bits(p);
}

WitnessSpec c3_witness() {
  RMatrix a(4, 2);
  a << 0.4955, 0.7775,
       -0.6092, -0.6572,
       0.0048, -0.5283,
       -0.5877, 0.8258;
  return WitnessSpec(a, "C3");
}

}  // namespace entwit
