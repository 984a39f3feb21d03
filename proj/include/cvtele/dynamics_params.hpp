#pragma once

namespace cvtele {

// Parameters of the linearized three-mode system (two optical sidebands and
// one microwave mode). Every rate is expressed in units of the microwave
// frequency omega_m.
struct DynamicsParams {
  double G2 = 0.0;        // beam-splitter coupling a2 <-> b
  double G3 = 0.0;        // two-mode-squeezing coupling a3 <-> b
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double gamma_m = 0.0;
  double n_m = 0.0;       // mean thermal occupation of the microwave bath

  // Throws DomainError naming the offending field.
  void validate() const;

  // Operating point used for the entanglement and fidelity sweeps:
  // G3 = 0.2, gamma2 = gamma3 = 0.001, gamma_m = 0.02, n_m = 10.
  static DynamicsParams reference(double G2 = 0.18);
};

}  // namespace cvtele
