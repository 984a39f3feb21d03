#pragma once

// Stationary covariance matrix of the filtered output fields.
//
// Fourier convention: x(omega) = int x(t) e^{i omega t} dt. With it the
// frequency-domain response of the cavity is M(omega) = (-i omega - A)^{-1}
// and the outputs are
//   R_out(omega) = Phi(omega) [K M(omega) D - E] R_in(omega) = T(omega) R_in(omega)
// where K = diag(sqrt(2 gamma)) on the optical rows (1 on the microwave
// rows), E selects the optical rows (a_out = sqrt(2 gamma) a - a_in) and Phi
// holds the filter responses F_j(omega), F_j^*(-omega). The microwave rows
// stay intracavity and unfiltered.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cvtele/gaussian_metrics.hpp"
#include "cvtele/langevin.hpp"
#include "cvtele/quadrature.hpp"

namespace cvtele {

// Causal Lorentzian filter F(t) = sqrt(2/tau) e^{-(1/tau + i Omega) t} Theta(t).
struct FilterSpec {
  double Omega = 0.0;
  double tau = 0.0;
  bool zero_bandwidth = true;

  void validate() const;

  static FilterSpec zero_bandwidth_at(double Omega) { return {Omega, 0.0, true}; }
  static FilterSpec lorentzian(double Omega, double tau) { return {Omega, tau, false}; }
};

struct FilterPair {
  FilterSpec a2;
  FilterSpec a3;
};

// F(omega) = sqrt(2/tau) / (1/tau - i (omega - Omega)). nullopt for a
// zero-bandwidth filter, whose response is a delta handled by the fast path.
std::optional<std::complex<double>> filter_response(const FilterSpec& f, double omega);

struct TransferMatrix {
  double omega = 0.0;
  Matrix6cd T;
};

// Cavity-to-output map S(omega) = K M(omega) D - E without the filters.
Matrix6cd output_response(const LinearSystem& sys, double omega);

TransferMatrix transfer_matrix(const LinearSystem& sys, const FilterPair& filters, double omega);

struct SpectralCM {
  Matrix6d V = Matrix6d::Zero();
  double error_estimate = 0.0;
  double max_asymmetry = 0.0;  // before the final symmetrization
  int evaluations = 0;
};

// Filtered-output CM over (X2, Y2, X3, Y3, Xb, Yb), b intracavity. Both
// filters zero-bandwidth dispatches to filtered_cm_zero_bandwidth.
SpectralCM filtered_output_cm(const LinearSystem& sys, const FilterPair& filters,
                              const QuadratureControls& quad = {});

// Limit 1/tau -> 0 of filtered_output_cm. Optical entries pair the filter
// centres (Omega2, -Omega2, Omega3, -Omega3): an entry survives only when
// its two centres sum to zero, and is then the output spectral density at
// that centre. The microwave block is the intracavity one.
Matrix6d filtered_cm_zero_bandwidth(const LinearSystem& sys, double Omega2, double Omega3);

// Intracavity CM by frequency integration of M D N D^T M(-omega)^T.
SpectralCM intracavity_cm_spectral(const LinearSystem& sys, const QuadratureControls& quad = {});

// (Va2, Va3, Va23) of the optical 4x4 part of a 4x4 or 6x6 CM.
template <typename Derived>
TwoModeCM extract_optical_blocks(const Eigen::MatrixBase<Derived>& V) {
  if (!((V.rows() == 4 || V.rows() == 6) && V.rows() == V.cols())) {
    throw DomainError("extract_optical_blocks: CM must be 4x4 or 6x6");
  }
  TwoModeCM cm;
  cm.Va2 = V.template block<2, 2>(0, 0);
  cm.Va3 = V.template block<2, 2>(2, 2);
  cm.Va23 = V.template block<2, 2>(0, 2);
  return cm;
}

// Breakpoints at the filter centres and the drift resonances +- 50 linewidths.
std::vector<double> spectral_breakpoints(const LinearSystem& sys, const FilterPair* filters);

}  // namespace cvtele
