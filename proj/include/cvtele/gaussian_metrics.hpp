#pragma once

// Entanglement and teleportation figures of merit for two-mode Gaussian
// states. Quadrature convention X = (a + a^dag)/sqrt(2): vacuum CM = I/2.

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "cvtele/constants.hpp"
#include "cvtele/errors.hpp"

namespace cvtele {

using Matrix2d = Eigen::Matrix2d;
using Matrix4d = Eigen::Matrix4d;

// Two-mode CM in block form [[Va2, Va23], [Va23^T, Va3]].
struct TwoModeCM {
  Matrix2d Va2 = 0.5 * Matrix2d::Identity();
  Matrix2d Va3 = 0.5 * Matrix2d::Identity();
  Matrix2d Va23 = Matrix2d::Zero();

  Matrix4d assemble() const {
    Matrix4d V;
    V << Va2, Va23, Va23.transpose(), Va3;
    return V;
  }

  static TwoModeCM from_matrix(const Matrix4d& V) {
    return {V.topLeftCorner<2, 2>(), V.bottomRightCorner<2, 2>(), V.topRightCorner<2, 2>()};
  }

  static TwoModeCM vacuum() { return {}; }

  // Two-mode squeezed vacuum with squeezing s: the (X2 - X3, Y2 + Y3) pair
  // is squeezed.
  static TwoModeCM two_mode_squeezed(double s) {
    const double c = 0.5 * std::cosh(2.0 * s);
    const double sh = 0.5 * std::sinh(2.0 * s);
    return {c * Matrix2d::Identity(), c * Matrix2d::Identity(),
            Eigen::Vector2d(sh, -sh).asDiagonal()};
  }
};

// Symplectic form J = diag(j, ..., j), j = [[0, 1], [-1, 0]].
template <int Dim>
Eigen::Matrix<double, Dim, Dim> symplectic_form() {
  static_assert(Dim % 2 == 0, "even dimension required");
  Eigen::Matrix<double, Dim, Dim> J = Eigen::Matrix<double, Dim, Dim>::Zero();
  for (int k = 0; k < Dim / 2; ++k) {
    J(2 * k, 2 * k + 1) = 1.0;
    J(2 * k + 1, 2 * k) = -1.0;
  }
  return J;
}

// Smallest eigenvalue of the Hermitian matrix V + (i/2) J. A CM is physical
// when this is >= 0 (up to roundoff).
template <typename Derived>
double uncertainty_margin(const Eigen::MatrixBase<Derived>& V) {
  constexpr int n = Derived::RowsAtCompileTime;
  using ComplexMatrix = Eigen::Matrix<std::complex<double>, n, n>;
  const ComplexMatrix H =
      V.template cast<std::complex<double>>() +
      std::complex<double>(0.0, 0.5) * symplectic_form<n>().template cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(H, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

template <typename Derived>
bool is_physical(const Eigen::MatrixBase<Derived>& V, double tol = 1e-9) {
  if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, V.cwiseAbs().maxCoeff())) {
    return false;
  }
  return uncertainty_margin(V) >= -tol;
}

// Mean thermal occupation 1 / (exp(hbar omega / k_B T) - 1).
inline double thermal_occupation(double omega, double T) {
  if (!(omega > 0.0) || !(T >= 0.0)) throw DomainError("thermal_occupation: need omega > 0, T >= 0");
  if (T == 0.0) return 0.0;
  const double x = Constants::hbar * omega / (Constants::k_B * T);
  if (x > 700.0) return 0.0;
  return 1.0 / std::expm1(x);
}

struct LogNegativity {
  double E_N;
  double eta_minus;
};

// E_N = max(0, -ln 2 eta^-), eta^- from the Sigma / det closed form.
LogNegativity log_negativity(const TwoModeCM& cm);

// Symplectic eigenvalues (ascending) of a 4x4 CM, optionally after flipping
// the sign of the second mode's momentum.
std::array<double, 2> symplectic_eigenvalues(const Matrix4d& V, bool partial_transpose);

// Sign of Bob's feed-forward displacement. kDirect is the standard
// unit-gain protocol, tuned to channels whose EPR pair is (X2 - X3, Y2 + Y3).
// kInverted reverses Bob's displacement, equivalent to a pi phase on his
// mode (Va23 -> -Va23), for channels correlated as (X2 + X3, Y2 - Y3).
enum class FeedForward { kDirect, kInverted };

TwoModeCM apply_feed_forward(const TwoModeCM& cm, FeedForward sign);

// Gamma = 2 V_in + Z Va2 Z + Va3 - Z Va23 - Va23^T Z with V_in = I/2.
Matrix2d teleportation_gamma(const TwoModeCM& cm);

// F = 1 / sqrt(det Gamma) for a coherent input and ideal displacement.
double teleportation_fidelity(const TwoModeCM& cm);

struct FidelityGrid {
  int nodes = 160;     // Gauss-Legendre nodes per axis on the mapped square
  double scale = 1.0;  // phase-space length scale of the map x = scale t / (1 - t^2)
};

// F = (1/pi) int |chi_in(a)|^2 conj(chi_ch(-a^*, a)) d^2 a evaluated as a
// two-dimensional quadrature, with chi(lambda) = exp(-lambda_v^T V lambda_v)
// and lambda_v = (Re lambda, Im lambda).
double fidelity_quadrature(const TwoModeCM& cm, const FidelityGrid& grid = {});

// 1 / (1 + e^{-E_N}).
inline double fidelity_upper_bound(double E_N) {
  if (!(E_N >= 0.0)) throw DomainError("fidelity_upper_bound: E_N must be >= 0");
  return 1.0 / (1.0 + std::exp(-E_N));
}

struct MetricsResult {
  double E_N = 0.0;
  double eta_minus = 0.0;
  double F = 0.0;
  double F_opt = 0.0;
  bool stable = true;
};

MetricsResult compute_metrics(const TwoModeCM& cm, FeedForward sign = FeedForward::kDirect,
                              bool stable = true);

}  // namespace cvtele
