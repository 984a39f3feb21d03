#include "cvtele/output_spectra.hpp"

#include <algorithm>
#include <cmath>

#include "cvtele/errors.hpp"

namespace cvtele {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};
constexpr double kTwoPi = 2.0 * Constants::pi;

Matrix6cd cavity_response(const Matrix6cd& A, double omega) {
  const Matrix6cd lhs = -kI * omega * Matrix6cd::Identity() - A;
  Eigen::PartialPivLU<Matrix6cd> lu(lhs);
  const Matrix6cd M = lu.inverse();
  if (!M.allFinite()) throw SingularMatrixError("cavity_response: (-i omega - A) is singular");
  return M;
}

Matrix6d output_gain(const DynamicsParams& p) {
  Matrix6d K = Matrix6d::Identity();
  K(0, 0) = K(1, 1) = std::sqrt(2.0 * p.gamma2);
  K(2, 2) = K(3, 3) = std::sqrt(2.0 * p.gamma3);
  return K;
}

std::complex<double> require_response(const FilterSpec& f, double omega) {
  const auto r = filter_response(f, omega);
  if (!r) throw DomainError("transfer_matrix: zero-bandwidth filter has no pointwise response");
  return *r;
}

}  // namespace

void FilterSpec::validate() const {
  if (!std::isfinite(Omega)) throw DomainError("filter: Omega must be finite");
  if (!zero_bandwidth && !(tau > 0.0 && std::isfinite(tau))) {
    throw DomainError("filter: tau must be finite and > 0 for a finite-bandwidth filter");
  }
}

std::optional<std::complex<double>> filter_response(const FilterSpec& f, double omega) {
  f.validate();
  if (f.zero_bandwidth) return std::nullopt;
  return std::sqrt(2.0 / f.tau) / (1.0 / f.tau - kI * (omega - f.Omega));
}

Matrix6cd output_response(const LinearSystem& sys, double omega) {
  Matrix6cd S = output_gain(sys.params).cast<std::complex<double>>() * cavity_response(sys.A, omega) *
                sys.Din.cast<std::complex<double>>();
  for (int k = 0; k < 4; ++k) S(k, k) -= 1.0;
  return S;
}

TransferMatrix transfer_matrix(const LinearSystem& sys, const FilterPair& filters, double omega) {
  Vector6cd phi;
  phi << require_response(filters.a2, omega), std::conj(require_response(filters.a2, -omega)),
      require_response(filters.a3, omega), std::conj(require_response(filters.a3, -omega)), 1.0, 1.0;
  return {omega, phi.asDiagonal() * output_response(sys, omega)};
}

std::vector<double> spectral_breakpoints(const LinearSystem& sys, const FilterPair* filters) {
  const auto report = stability(sys.A);
  std::vector<double> centres;
  double width = 0.0;
  for (const auto& lambda : report.eigenvalues) {
    centres.push_back(lambda.imag());
    centres.push_back(-lambda.imag());
    width = std::max(width, std::abs(lambda.real()));
  }
  if (filters) {
    for (const FilterSpec* f : {&filters->a2, &filters->a3}) {
      centres.push_back(f->Omega);
      centres.push_back(-f->Omega);
      if (!f->zero_bandwidth) width = std::max(width, 1.0 / f->tau);
    }
  }
  const auto [lo, hi] = std::minmax_element(centres.begin(), centres.end());
  std::vector<double> points = centres;
  points.push_back(*lo - 50.0 * width);
  points.push_back(*hi + 50.0 * width);
  std::sort(points.begin(), points.end());
  const double merge = 1e-12 * std::max(1.0, points.back() - points.front());
  points.erase(std::unique(points.begin(), points.end(),
                           [&](double a, double b) { return b - a <= merge; }),
               points.end());
  return points;
}

SpectralCM filtered_output_cm(const LinearSystem& sys, const FilterPair& filters,
                              const QuadratureControls& quad) {
  filters.a2.validate();
  filters.a3.validate();
  if (filters.a2.zero_bandwidth && filters.a3.zero_bandwidth) {
    return {filtered_cm_zero_bandwidth(sys, filters.a2.Omega, filters.a3.Omega), 0.0, 0.0, 0};
  }
  if (filters.a2.zero_bandwidth || filters.a3.zero_bandwidth) {
    throw DomainError("filtered_output_cm: both filters must share the zero-bandwidth setting");
  }
  require_stable(sys.A, "filtered_output_cm");

  const auto Q = quadrature_map<3>();
  const Matrix6cd N = sys.N.cast<std::complex<double>>();
  auto integrand = [&](double omega) -> Matrix6d {
    const Matrix6cd Tp = transfer_matrix(sys, filters, omega).T;
    const Matrix6cd Tm = transfer_matrix(sys, filters, -omega).T;
    const Matrix6d W = (Q * Tp * N * Tm.transpose() * Q.transpose()).real();
    return (0.5 / kTwoPi) * (W + W.transpose());
  };
  const auto points = spectral_breakpoints(sys, &filters);
  const auto [lo, hi] = std::minmax_element(points.begin(), points.end());
  const auto result = integrate_real_line<Matrix6d>(integrand, points, 0.5 * (*hi - *lo), quad,
                                                    Matrix6d::Zero());
  SpectralCM out;
  out.max_asymmetry = (result.value - result.value.transpose()).cwiseAbs().maxCoeff();
  out.V = 0.5 * (result.value + result.value.transpose());
  out.error_estimate = result.error_estimate;
  out.evaluations = result.evaluations;
  return out;
}

Matrix6d filtered_cm_zero_bandwidth(const LinearSystem& sys, double Omega2, double Omega3) {
  require_stable(sys.A, "filtered_cm_zero_bandwidth");
  const std::array<double, 4> centre = {Omega2, -Omega2, Omega3, -Omega3};
  const Matrix6cd N = sys.N.cast<std::complex<double>>();

  Eigen::Matrix<std::complex<double>, 4, 4> G = Eigen::Matrix<std::complex<double>, 4, 4>::Zero();
  for (int i = 0; i < 4; ++i) {
    const Matrix6cd Sp = output_response(sys, centre[i]);
    const Matrix6cd Sm = output_response(sys, -centre[i]);
    const Matrix6cd spectrum = Sp * N * Sm.transpose();
    for (int j = 0; j < 4; ++j) {
      const double mismatch = std::abs(centre[i] + centre[j]);
      if (mismatch <= 1e-12 * (1.0 + std::abs(centre[i]))) G(i, j) = spectrum(i, j);
    }
  }
  Matrix6d V = Matrix6d::Zero();
  V.topLeftCorner<4, 4>() = to_quadrature(G);
  V.bottomRightCorner<2, 2>() = intracavity_cm_lyapunov(sys).bottomRightCorner<2, 2>();
  return V;
}

SpectralCM intracavity_cm_spectral(const LinearSystem& sys, const QuadratureControls& quad) {
  require_stable(sys.A, "intracavity_cm_spectral");
  const auto Q = quadrature_map<3>();
  const Matrix6cd DND = (sys.Din * sys.N * sys.Din.transpose()).cast<std::complex<double>>();
  auto integrand = [&](double omega) -> Matrix6d {
    const Matrix6cd Mp = cavity_response(sys.A, omega);
    const Matrix6cd Mm = cavity_response(sys.A, -omega);
    const Matrix6d W = (Q * Mp * DND * Mm.transpose() * Q.transpose()).real();
    return (0.5 / kTwoPi) * (W + W.transpose());
  };
  const auto points = spectral_breakpoints(sys, nullptr);
  const auto [lo, hi] = std::minmax_element(points.begin(), points.end());
  const auto result = integrate_real_line<Matrix6d>(integrand, points, 0.5 * (*hi - *lo), quad,
                                                    Matrix6d::Zero());
  SpectralCM out;
  out.max_asymmetry = (result.value - result.value.transpose()).cwiseAbs().maxCoeff();
  out.V = 0.5 * (result.value + result.value.transpose());
  out.error_estimate = result.error_estimate;
  out.evaluations = result.evaluations;
  return out;
}

}  // namespace cvtele
