#include "cvtele/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "cvtele/errors.hpp"
#include "cvtele/lyapunov.hpp"

namespace cvtele {

namespace {

using Matrix10cd = Eigen::Matrix<std::complex<double>, 10, 10>;
using Vector10d = Eigen::Matrix<double, 10, 1>;

template <typename T>
T pairwise_sum(const std::vector<T>& items, std::size_t begin, std::size_t end) {
  if (end - begin == 1) return items[begin];
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum(items, begin, mid) + pairwise_sum(items, mid, end);
}

}  // namespace

int default_worker_count() {
  if (const char* env = std::getenv("CVTELEPORT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

AugmentedSystem augmented_filter_system(const LinearSystem& sys, const FilterPair& filters) {
  using Complex = std::complex<double>;
  filters.a2.validate();
  filters.a3.validate();
  if (filters.a2.zero_bandwidth || filters.a3.zero_bandwidth) {
    throw DomainError("augmented_filter_system: filters need a finite bandwidth");
  }
  const auto& p = sys.params;

  // Operator basis (a2, a2+, a3, a3+, b, b+, f2, f2+, f3, f3+).
  Matrix10cd B = Matrix10cd::Zero();
  Eigen::Matrix<Complex, 10, 6> C = Eigen::Matrix<Complex, 10, 6>::Zero();
  B.topLeftCorner<6, 6>() = sys.A;
  C.topRows<6>() = sys.Din.cast<Complex>();
  const FilterSpec* f[2] = {&filters.a2, &filters.a3};
  const double rate[2] = {p.gamma2, p.gamma3};
  for (int m = 0; m < 2; ++m) {
    const double s = std::sqrt(2.0 / f[m]->tau);
    const double kappa = 1.0 / f[m]->tau;
    const int fa = 6 + 2 * m, fd = fa + 1, a = 2 * m, ad = a + 1;
    // d f/dt = -(kappa + i Omega) f + s (sqrt(2 gamma) a - a_in)
    B(fa, fa) = Complex(-kappa, -f[m]->Omega);
    B(fd, fd) = Complex(-kappa, f[m]->Omega);
    B(fa, a) = s * std::sqrt(2.0 * rate[m]);
    B(fd, ad) = s * std::sqrt(2.0 * rate[m]);
    C(fa, a) = -s;
    C(fd, ad) = -s;
  }

  const auto Q10 = quadrature_map<5>();
  const auto Q6 = quadrature_map<3>();
  const Matrix10cd Bq = Q10 * B * Q10.inverse();
  const Eigen::Matrix<Complex, 10, 6> Cq = Q10 * C * Q6.inverse();
  const Matrix6cd Sq = Q6 * symmetrized_noise(sys.N).cast<Complex>() * Q6.transpose();
  const double imag = std::max({Bq.imag().cwiseAbs().maxCoeff(), Cq.imag().cwiseAbs().maxCoeff(),
                                Sq.imag().cwiseAbs().maxCoeff()});
  if (imag > 1e-12) throw SolveError("augmented_filter_system: quadrature form is not real");

  AugmentedSystem aug;
  aug.B = Bq.real();
  aug.C = Cq.real();
  aug.Sigma = Sq.real();
  return aug;
}

Matrix10d augmented_stationary_cm(const AugmentedSystem& aug) {
  Eigen::EigenSolver<Matrix10d> eig(aug.B, false);
  if (eig.eigenvalues().real().maxCoeff() >= -kStabilityTolerance) {
    throw UnstableSystemError("augmented_stationary_cm: augmented drift not stable");
  }
  const Matrix10d Z = solve_continuous_lyapunov(aug.B, aug.C * aug.Sigma * aug.C.transpose());
  return 0.5 * (Z + Z.transpose());
}

Matrix6d filtered_block(const Matrix10d& Z) {
  Matrix6d V;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) V(i, j) = Z(kFilteredIndex[i], kFilteredIndex[j]);
  return V;
}

MonteCarloCM monte_carlo_filtered_cm(const DynamicsParams& p, const FilterPair& filters,
                                     const MonteCarloOptions& opt) {
  const LinearSystem sys = make_linear_system(p);
  require_stable(sys.A, "monte_carlo_filtered_cm");
  if (opt.n_traj < 2) throw DomainError("monte_carlo_filtered_cm: n_traj must be >= 2");
  if (!(opt.dt > 0.0) || !(opt.t_end > 0.0)) {
    throw StepSizeError("monte_carlo_filtered_cm: dt and t_end must be > 0");
  }
  const AugmentedSystem aug = augmented_filter_system(sys, filters);

  Eigen::EigenSolver<Matrix10d> eig(aug.B, false);
  const double fastest = eig.eigenvalues().cwiseAbs().maxCoeff();
  if (!(opt.dt * fastest < 0.05)) {
    throw StepSizeError("monte_carlo_filtered_cm: dt * max|eig| must be < 0.05");
  }

  // Van Loan: exp([[-B, G], [0, B^T]] dt) = [[., E12], [0, E22]] with
  // Phi = E22^T and the one-step noise covariance Phi E12.
  const Matrix10d G = aug.C * aug.Sigma * aug.C.transpose();
  Eigen::Matrix<double, 20, 20> H = Eigen::Matrix<double, 20, 20>::Zero();
  H.topLeftCorner<10, 10>() = -aug.B * opt.dt;
  H.topRightCorner<10, 10>() = G * opt.dt;
  H.bottomRightCorner<10, 10>() = aug.B.transpose() * opt.dt;
  const Eigen::Matrix<double, 20, 20> E = H.exp();
  const Matrix10d Phi = E.bottomRightCorner<10, 10>().transpose();
  Matrix10d Qd = Phi * E.topRightCorner<10, 10>();
  Qd = 0.5 * (Qd + Qd.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix10d> qd_eig(Qd);
  const Matrix10d root = qd_eig.eigenvectors() *
                         qd_eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  const int steps = static_cast<int>(std::ceil(opt.t_end / opt.dt));
  std::vector<Matrix10d> samples(opt.n_traj);
  auto run = [&](int k) {
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(k), 0x9e3779b9u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    Vector10d z = Vector10d::Zero();
    Vector10d w;
    for (int n = 0; n < steps; ++n) {
      for (int i = 0; i < 10; ++i) w(i) = normal(rng);
      z = Phi * z + root * w;
    }
    samples[k] = z * z.transpose();
  };

  const int workers = std::max(1, std::min(opt.threads > 0 ? opt.threads : default_worker_count(),
                                           opt.n_traj));
  if (workers == 1) {
    for (int k = 0; k < opt.n_traj; ++k) run(k);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (int k = t; k < opt.n_traj; k += workers) run(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  const double n = opt.n_traj;
  const Matrix10d mean = pairwise_sum(samples, 0, samples.size()) / n;
  std::vector<Matrix10d> dev(opt.n_traj);
  for (int k = 0; k < opt.n_traj; ++k) dev[k] = (samples[k] - mean).cwiseAbs2();
  const Matrix10d var = pairwise_sum(dev, 0, dev.size()) / (n - 1.0);
  const Matrix10d se = (var / n).cwiseSqrt();

  MonteCarloCM out;
  out.n_traj = opt.n_traj;
  out.steps = steps;
  out.filtered = filtered_block(mean);
  out.filtered_se = filtered_block(se);
  out.intracavity = mean.topLeftCorner<6, 6>();
  out.intracavity_se = se.topLeftCorner<6, 6>();
  return out;
}

}  // namespace cvtele
