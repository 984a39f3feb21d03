#include "cvtele/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvtele/errors.hpp"
#include "cvtele/lyapunov.hpp"

namespace cvtele {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

Matrix6cd drift_matrix(const DynamicsParams& p) {
  p.validate();
  Matrix6cd A = Matrix6cd::Zero();
  // d a2/dt = -gamma2 a2 - i G2 b
  A(0, 0) = -p.gamma2;
  A(0, 4) = -kI * p.G2;
  A(1, 1) = -p.gamma2;
  A(1, 5) = kI * p.G2;
  // d a3/dt = -gamma3 a3 - i G3 b^dag
  A(2, 2) = -p.gamma3;
  A(2, 5) = -kI * p.G3;
  A(3, 3) = -p.gamma3;
  A(3, 4) = kI * p.G3;
  // d b/dt = -gamma_m b - i G2 a2 - i G3 a3^dag
  A(4, 4) = -p.gamma_m;
  A(4, 0) = -kI * p.G2;
  A(4, 3) = -kI * p.G3;
  A(5, 5) = -p.gamma_m;
  A(5, 1) = kI * p.G2;
  A(5, 2) = kI * p.G3;
  return A;
}

Matrix6d input_matrix(const DynamicsParams& p) {
  p.validate();
  Matrix6d D = Matrix6d::Zero();
  const double rates[3] = {p.gamma2, p.gamma3, p.gamma_m};
  for (int k = 0; k < 3; ++k) {
    D(2 * k, 2 * k) = D(2 * k + 1, 2 * k + 1) = std::sqrt(2.0 * rates[k]);
  }
  return D;
}

Matrix6d diffusion_matrix(const DynamicsParams& p) {
  p.validate();
  Matrix6d N = Matrix6d::Zero();
  // <a_in a_in^dag> = 1 for the optical vacua
  N(0, 1) = 1.0;
  N(2, 3) = 1.0;
  N(4, 5) = p.n_m + 1.0;
  N(5, 4) = p.n_m;
  return N;
}

LinearSystem make_linear_system(const DynamicsParams& p) {
  return {p, drift_matrix(p), input_matrix(p), diffusion_matrix(p)};
}

StabilityReport stability(const Matrix6cd& A) {
  Eigen::ComplexEigenSolver<Matrix6cd> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw EigenSolveError("stability: eigenvalue solve failed");
  StabilityReport report;
  report.margin = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i) {
    report.eigenvalues[i] = solver.eigenvalues()(i);
    if (!std::isfinite(report.eigenvalues[i].real())) {
      throw EigenSolveError("stability: non-finite eigenvalue");
    }
    report.margin = std::max(report.margin, report.eigenvalues[i].real());
  }
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](const auto& a, const auto& b) {
              return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
  report.stable = report.margin < 0.0;
  return report;
}

void require_stable(const Matrix6cd& A, const char* context) {
  const auto report = stability(A);
  if (!(report.margin < -kStabilityTolerance)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << context << ": drift matrix not stable (max Re eig = " << report.margin << ")";
    throw UnstableSystemError(msg.str());
  }
}

Bogolyubov bogolyubov(double G2, double G3) {
  if (!(G3 >= 0.0) || !(G2 > G3)) {
    throw DomainError("bogolyubov: requires G2 > G3 >= 0");
  }
  return {std::sqrt((G2 - G3) * (G2 + G3)), std::atanh(G3 / G2)};
}

Matrix6d symmetrized_noise(const Matrix6d& N) { return 0.5 * (N + N.transpose()); }

Matrix6cd lyapunov_steady_state(const LinearSystem& sys) {
  require_stable(sys.A, "lyapunov_steady_state");
  const Matrix6d Qn = sys.Din * symmetrized_noise(sys.N) * sys.Din.transpose();
  const Matrix6cd M = solve_continuous_lyapunov(sys.A, Qn.cast<std::complex<double>>());
  const double residual =
      (sys.A * M + M * sys.A.transpose() + Qn.cast<std::complex<double>>()).cwiseAbs().maxCoeff();
  if (!(residual < 1e-10 * std::max(1.0, M.cwiseAbs().maxCoeff()))) {
    throw SolveError("lyapunov_steady_state: residual too large");
  }
  return M;
}

Matrix6d intracavity_cm_lyapunov(const LinearSystem& sys) {
  return to_quadrature(lyapunov_steady_state(sys));
}

}  // namespace cvtele
