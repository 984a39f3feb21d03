#pragma once

// Linearized Heisenberg-Langevin system of the two optical sidebands a2, a3
// and the microwave mode b. Operator ordering throughout is
//   R = (a2, a2^dag, a3, a3^dag, b, b^dag),
// and quadrature vectors are u = (X2, Y2, X3, Y3, Xb, Yb) with
// X = (a + a^dag)/sqrt(2), Y = (a - a^dag)/(i sqrt(2)); vacuum variance 1/2.

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "cvtele/dynamics_params.hpp"

namespace cvtele {

using Matrix6cd = Eigen::Matrix<std::complex<double>, 6, 6>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;
using Vector6cd = Eigen::Matrix<std::complex<double>, 6, 1>;

struct LinearSystem {
  DynamicsParams params;
  Matrix6cd A;    // drift
  Matrix6d Din;   // diagonal input coupling sqrt(2 gamma)
  Matrix6d N;     // one-sided noise correlations <R_in,i(t) R_in,j(t')> = N_ij delta(t - t')
};

struct StabilityReport {
  bool stable = false;
  double margin = 0.0;  // max Re(eig A)
  std::array<std::complex<double>, 6> eigenvalues{};
};

struct Bogolyubov {
  double G;  // sqrt(G2^2 - G3^2)
  double r;  // squeezing parameter, atanh(G3 / G2)
};

// Steady-state computations require margin below this.
inline constexpr double kStabilityTolerance = 1e-9;

Matrix6cd drift_matrix(const DynamicsParams& p);
Matrix6d input_matrix(const DynamicsParams& p);
Matrix6d diffusion_matrix(const DynamicsParams& p);
LinearSystem make_linear_system(const DynamicsParams& p);

StabilityReport stability(const Matrix6cd& A);

// Throws UnstableSystemError unless margin < -kStabilityTolerance.
void require_stable(const Matrix6cd& A, const char* context);

Bogolyubov bogolyubov(double G2, double G3);

// Symmetrized input-noise correlations (N + N^T) / 2.
Matrix6d symmetrized_noise(const Matrix6d& N);

// Symmetrized intracavity second moments <(R_i R_j + R_j R_i)/2> from the
// Lyapunov equation A M + M A^T + Din N_sym Din^T = 0.
Matrix6cd lyapunov_steady_state(const LinearSystem& sys);

// Block-diagonal map from (a, a^dag) pairs to (X, Y) quadratures.
template <int Modes>
Eigen::Matrix<std::complex<double>, 2 * Modes, 2 * Modes> quadrature_map() {
  using Complex = std::complex<double>;
  Eigen::Matrix<Complex, 2 * Modes, 2 * Modes> Q =
      Eigen::Matrix<Complex, 2 * Modes, 2 * Modes>::Zero();
  const double s = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < Modes; ++k) {
    Q(2 * k, 2 * k) = s;
    Q(2 * k, 2 * k + 1) = s;
    Q(2 * k + 1, 2 * k) = Complex(0, -s);
    Q(2 * k + 1, 2 * k + 1) = Complex(0, s);
  }
  return Q;
}

// Real symmetric quadrature CM from operator-ordered second moments:
// V = Re(Q M Q^T), symmetrized.
template <typename Derived>
Eigen::Matrix<double, Derived::RowsAtCompileTime, Derived::ColsAtCompileTime> to_quadrature(
    const Eigen::MatrixBase<Derived>& M) {
  constexpr int n = Derived::RowsAtCompileTime;
  static_assert(n != Eigen::Dynamic && n % 2 == 0, "fixed even dimension required");
  const auto Q = quadrature_map<n / 2>();
  const Eigen::Matrix<double, n, n> V = (Q * M * Q.transpose()).real();
  return 0.5 * (V + V.transpose());
}

// Intracavity quadrature CM (6x6) from the Lyapunov route.
Matrix6d intracavity_cm_lyapunov(const LinearSystem& sys);

}  // namespace cvtele
