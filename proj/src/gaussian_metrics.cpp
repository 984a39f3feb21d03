#include "cvtele/gaussian_metrics.hpp"

#include <algorithm>
#include <complex>
#include <vector>

namespace cvtele {

namespace {

double stable_determinant(const Matrix4d& V) {
  Eigen::LLT<Matrix4d> llt(V);
  if (llt.info() == Eigen::Success) {
    const double d = llt.matrixL().toDenseMatrix().diagonal().prod();
    return d * d;
  }
  return Eigen::PartialPivLU<Matrix4d>(V).determinant();
}

// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(J);
  nodes.resize(n);
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    nodes[k] = solver.eigenvalues()(k);
    const double v = solver.eigenvectors()(0, k);
    weights[k] = 2.0 * v * v;
  }
}

}  // namespace

LogNegativity log_negativity(const TwoModeCM& cm) {
  const Matrix4d V = cm.assemble();
  const double sigma = cm.Va2.determinant() + cm.Va3.determinant() - 2.0 * cm.Va23.determinant();
  const double det = stable_determinant(V);
  double disc = sigma * sigma - 4.0 * det;
  const double scale = sigma * sigma;
  if (disc < -1e-9 * scale || !(sigma > 0.0) || !(det > 0.0)) {
    throw NonPhysicalCMError("log_negativity: partially transposed CM has no real symplectic spectrum");
  }
  disc = std::max(disc, 0.0);
  // eta^2 = (Sigma - sqrt(disc)) / 2, rewritten to avoid cancellation.
  const double eta_sq = 2.0 * det / (sigma + std::sqrt(disc));
  if (!(eta_sq > 0.0)) throw NonPhysicalCMError("log_negativity: eta^- not positive");
  const double eta = std::sqrt(eta_sq);
  return {std::max(0.0, -std::log(2.0 * eta)), eta};
}

std::array<double, 2> symplectic_eigenvalues(const Matrix4d& V, bool partial_transpose) {
  Matrix4d W = V;
  if (partial_transpose) {
    W.row(3) *= -1.0;
    W.col(3) *= -1.0;
  }
  using Matrix4cd = Eigen::Matrix<std::complex<double>, 4, 4>;
  const Matrix4d J = symplectic_form<4>();
  std::array<double, 4> values{};
  Eigen::LLT<Matrix4d> llt(W);
  if (llt.info() == Eigen::Success) {
    // i L^T J L is Hermitian with spectrum +-nu_k, the same as i J W.
    const Matrix4d L = llt.matrixL();
    const Matrix4cd H = std::complex<double>(0.0, 1.0) * (L.transpose() * J * L).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Matrix4cd> solver(H, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw EigenSolveError("symplectic_eigenvalues: solve failed");
    for (int k = 0; k < 4; ++k) values[k] = std::abs(solver.eigenvalues()(k));
  } else {
    const Matrix4cd M = std::complex<double>(0.0, 1.0) * (J * W).cast<std::complex<double>>();
    Eigen::ComplexEigenSolver<Matrix4cd> solver(M, false);
    if (solver.info() != Eigen::Success) throw EigenSolveError("symplectic_eigenvalues: solve failed");
    for (int k = 0; k < 4; ++k) values[k] = std::abs(solver.eigenvalues()(k));
  }
  std::sort(values.begin(), values.end());
  // Eigenvalues come in +- pairs: average each pair of moduli.
  return {0.5 * (values[0] + values[1]), 0.5 * (values[2] + values[3])};
}

TwoModeCM apply_feed_forward(const TwoModeCM& cm, FeedForward sign) {
  if (sign == FeedForward::kDirect) return cm;
  TwoModeCM out = cm;
  out.Va23 = -cm.Va23;
  return out;
}

Matrix2d teleportation_gamma(const TwoModeCM& cm) {
  const Matrix2d Z = Eigen::Vector2d(1.0, -1.0).asDiagonal();
  const Matrix2d V_in = 0.5 * Matrix2d::Identity();
  return 2.0 * V_in + Z * cm.Va2 * Z + cm.Va3 - Z * cm.Va23 - cm.Va23.transpose() * Z;
}

double teleportation_fidelity(const TwoModeCM& cm) {
  const double det = teleportation_gamma(cm).determinant();
  if (!(det > 0.0)) throw NonPositiveGammaError("teleportation_fidelity: det Gamma <= 0");
  return 1.0 / std::sqrt(det);
}

double fidelity_quadrature(const TwoModeCM& cm, const FidelityGrid& grid) {
  if (grid.nodes < 8 || !(grid.scale > 0.0)) throw QuadratureError("fidelity_quadrature: bad grid");
  const Matrix4d V = cm.assemble();
  const Matrix2d V_in = 0.5 * Matrix2d::Identity();
  auto vec = [](std::complex<double> a) { return Eigen::Vector2d(a.real(), a.imag()); };
  auto chi_in = [&](std::complex<double> a) {
    const Eigen::Vector2d v = vec(a);
    return std::exp(-v.dot(V_in * v));
  };
  auto chi_ch = [&](std::complex<double> a2, std::complex<double> a3) {
    Eigen::Vector4d w;
    w << vec(a2), vec(a3);
    return std::exp(-w.dot(V * w));
  };

  std::vector<double> t, wt;
  gauss_legendre(grid.nodes, t, wt);
  std::vector<double> x(grid.nodes), jac(grid.nodes);
  for (int k = 0; k < grid.nodes; ++k) {
    const double s = 1.0 - t[k] * t[k];
    x[k] = grid.scale * t[k] / s;
    jac[k] = wt[k] * grid.scale * (1.0 + t[k] * t[k]) / (s * s);
  }
  double total = 0.0;
  for (int i = 0; i < grid.nodes; ++i) {
    double row = 0.0;
    for (int j = 0; j < grid.nodes; ++j) {
      const std::complex<double> a(x[i], x[j]);
      const double cin = chi_in(a);
      row += jac[j] * cin * cin * chi_ch(-std::conj(a), a);
    }
    total += jac[i] * row;
  }
  return total / Constants::pi;
}

MetricsResult compute_metrics(const TwoModeCM& cm, FeedForward sign, bool stable) {
  MetricsResult r;
  const auto ln = log_negativity(cm);
  r.E_N = ln.E_N;
  r.eta_minus = ln.eta_minus;
  r.F = teleportation_fidelity(apply_feed_forward(cm, sign));
  r.F_opt = fidelity_upper_bound(r.E_N);
  r.stable = stable;
  return r;
}

}  // namespace cvtele
