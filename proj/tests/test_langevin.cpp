#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "cvtele/gaussian_metrics.hpp"
#include "cvtele/langevin.hpp"
#include "cvtele/lyapunov.hpp"
#include "cvtele/validation.hpp"

using namespace cvtele;
using cd = std::complex<double>;

namespace {

// Characteristic polynomial by Faddeev-LeVerrier, coefficients c[0..n] of
// lambda^n + c[1] lambda^{n-1} + ... + c[n].
std::vector<cd> characteristic_polynomial(const Eigen::Matrix3cd& A) {
  const int n = 3;
  std::vector<cd> c(n + 1);
  c[0] = 1.0;
  Eigen::Matrix3cd M = Eigen::Matrix3cd::Zero();
  for (int k = 1; k <= n; ++k) {
    M = A * M + c[k - 1] * Eigen::Matrix3cd::Identity();
    c[k] = -(A * M).trace() / double(k);
  }
  return c;
}

// Durand-Kerner iteration on a monic polynomial.
std::vector<cd> polynomial_roots(const std::vector<cd>& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<cd> z(n);
  for (int k = 0; k < n; ++k) z[k] = std::pow(cd(0.4, 0.9), k);
  auto p = [&](cd x) {
    cd v = c[0];
    for (int k = 1; k <= n; ++k) v = v * x + c[k];
    return v;
  };
  for (int it = 0; it < 5000; ++it) {
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      cd den = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) den *= z[i] - z[j];
      const cd step = p(z[i]) / den;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-17) break;
  }
  return z;
}

// The (a2, a3^dag, b) rows close on themselves; the other three rows are
// their conjugates, so the spectrum is the cubic's roots and their conjugates.
std::vector<cd> spectrum_from_polynomial(const Matrix6cd& A) {
  const int idx[3] = {0, 3, 4};
  Eigen::Matrix3cd B;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) B(i, j) = A(idx[i], idx[j]);
  auto roots = polynomial_roots(characteristic_polynomial(B));
  for (int k = 0; k < 3; ++k) roots.push_back(std::conj(roots[k]));
  return roots;
}

// Largest distance in a greedy nearest-neighbour pairing of two root sets.
double max_root_mismatch(const std::vector<cd>& a, std::vector<cd> b) {
  double worst = 0.0;
  for (const cd& x : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](cd u, cd v) { return std::abs(u - x) < std::abs(v - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

DynamicsParams decoupled() {
  DynamicsParams p = DynamicsParams::reference();
  p.G2 = p.G3 = 0.0;
  return p;
}

}  // namespace

TEST_CASE("dynamics parameter validation") {
  DynamicsParams p = DynamicsParams::reference();
  CHECK_NOTHROW(p.validate());
  p.gamma_m = -0.1;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = DynamicsParams::reference();
  p.n_m = std::nan("");
  CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("drift matrix") {
  SUBCASE("decoupled damping") {
    const DynamicsParams p = decoupled();
    Eigen::Matrix<double, 6, 1> d;
    d << -0.001, -0.001, -0.001, -0.001, -0.02, -0.02;
    CHECK(drift_matrix(p) == Matrix6cd(d.cast<cd>().asDiagonal()));
  }
  SUBCASE("trace and conjugation structure") {
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
      DynamicsParams p{u(rng), u(rng), u(rng) * 0.1, u(rng) * 0.1, u(rng) * 0.1, 10 * u(rng)};
      const Matrix6cd A = drift_matrix(p);
      CHECK(std::abs(A.trace() + 2.0 * (p.gamma2 + p.gamma3 + p.gamma_m)) < 1e-15);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          CHECK(A(2 * i + 1, 2 * j + 1) == std::conj(A(2 * i, 2 * j)));
          CHECK(A(2 * i + 1, 2 * j) == std::conj(A(2 * i, 2 * j + 1)));
        }
      }
    }
  }
  SUBCASE("eigenvalues against the characteristic polynomial") {
    Rng rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
      DynamicsParams p{0.5 * u(rng), 0.5 * u(rng), 0.1 * u(rng), 0.1 * u(rng), 0.1 * u(rng), 1.0};
      const Matrix6cd A = drift_matrix(p);
      const auto report = stability(A);
      const std::vector<cd> eig(report.eigenvalues.begin(), report.eigenvalues.end());
      CHECK(max_root_mismatch(spectrum_from_polynomial(A), eig) < 1e-10);
    }
  }
  SUBCASE("reference point eigenvalues (40-digit reference)") {
    const auto report = stability(drift_matrix(DynamicsParams::reference()));
    const std::vector<cd> eig(report.eigenvalues.begin(), report.eigenvalues.end());
    const std::vector<cd> expected = {-0.098194070495102461061, -0.098194070495102461061, -0.001, -0.001,
                                      0.077194070495102461061, 0.077194070495102461061};
    CHECK(max_root_mismatch(eig, expected) < 1e-10);
  }
}

TEST_CASE("input and noise matrices") {
  const DynamicsParams p = DynamicsParams::reference();
  const Matrix6d D = input_matrix(p);
  const double expected[6] = {std::sqrt(0.002), std::sqrt(0.002), std::sqrt(0.002),
                              std::sqrt(0.002), std::sqrt(0.04), std::sqrt(0.04)};
  for (int k = 0; k < 6; ++k) CHECK(D(k, k) == doctest::Approx(expected[k]).epsilon(1e-15));
  CHECK((D.array() >= 0.0).all());
  CHECK(Matrix6d(D.diagonal().asDiagonal()) == D);

  DynamicsParams quiet = p;
  quiet.gamma2 = 0.0;
  CHECK(input_matrix(quiet)(0, 0) == 0.0);
  CHECK(input_matrix(quiet)(1, 1) == 0.0);

  const Matrix6d N = diffusion_matrix(p);
  CHECK(N(0, 1) == 1.0);
  CHECK(N(2, 3) == 1.0);
  CHECK(N(4, 5) == 11.0);
  CHECK(N(5, 4) == 10.0);
  CHECK(N.sum() == 23.0);
  CHECK((N.array() >= 0.0).all());

  DynamicsParams cold = p;
  cold.n_m = 0.0;
  const Matrix6d Nc = diffusion_matrix(cold);
  CHECK(Nc.block<2, 2>(4, 4) == Nc.block<2, 2>(0, 0));
}

TEST_CASE("stability") {
  SUBCASE("decoupled system") {
    const auto r = stability(drift_matrix(decoupled()));
    CHECK(r.stable);
    CHECK(r.margin == doctest::Approx(-0.001).epsilon(1e-12));
  }
  SUBCASE("beam-splitter coupling alone cannot destabilize") {
    DynamicsParams p = DynamicsParams::reference();
    p.G3 = 0.0;
    for (int k = 0; k <= 100; ++k) {
      p.G2 = 0.01 * k;
      CHECK(stability(drift_matrix(p)).margin < 0.0);
    }
  }
  SUBCASE("reference point G2 = 0.18 is unstable") {
    const auto r = stability(drift_matrix(DynamicsParams::reference()));
    CHECK_FALSE(r.stable);
    CHECK(r.margin == doctest::Approx(0.077194070495102461061).epsilon(1e-10));
    CHECK_THROWS_AS(require_stable(drift_matrix(DynamicsParams::reference()), "test"),
                    UnstableSystemError);
    CHECK_THROWS_AS(lyapunov_steady_state(make_linear_system(DynamicsParams::reference())),
                    UnstableSystemError);
  }
  SUBCASE("stable side of G2 = G3") {
    CHECK(stability(drift_matrix(DynamicsParams::reference(0.2))).stable);
    CHECK_FALSE(stability(drift_matrix(DynamicsParams::reference(0.1999))).stable);
  }
}

TEST_CASE("Bogolyubov parameters") {
  const auto b0 = bogolyubov(0.3, 0.0);
  CHECK(b0.r == 0.0);
  CHECK(b0.G == doctest::Approx(0.3).epsilon(1e-15));
  const auto b = bogolyubov(0.2, 0.18);
  CHECK(b.r == doctest::Approx(std::atanh(0.9)).epsilon(1e-14));
  CHECK(b.G * std::cosh(b.r) == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(b.G * std::sinh(b.r) == doctest::Approx(0.18).epsilon(1e-13));
  CHECK_THROWS_AS(bogolyubov(0.2, 0.2), DomainError);
  CHECK_THROWS_AS(bogolyubov(0.18, 0.2), DomainError);
}

TEST_CASE("Lyapunov solver") {
  Rng rng(17);
  std::normal_distribution<double> n;
  for (int k = 0; k < 20; ++k) {
    Eigen::MatrixXcd A(7, 7), Q(7, 7);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) {
        A(i, j) = cd(n(rng), n(rng));
        Q(i, j) = cd(n(rng), n(rng));
      }
    A.diagonal().array() -= 8.0;
    const Eigen::MatrixXcd X = solve_continuous_lyapunov(A, Q);
    CHECK((A * X + X * A.transpose() + Q).cwiseAbs().maxCoeff() < 1e-12);
  }
  Eigen::Matrix3d Ar;
  Ar << -1, 2, 0, -2, -1, 0.5, 0, 0, -3;
  const Eigen::Matrix3d Qr = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d Xr = solve_continuous_lyapunov(Ar, Qr);
  CHECK((Ar * Xr + Xr * Ar.transpose() + Qr).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((Xr - Xr.transpose()).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::Matrix2d sing;
  sing << 1, 0, 0, -1;
  CHECK_THROWS_AS(solve_continuous_lyapunov(sing, Eigen::Matrix2d::Identity()), SolveError);
}

TEST_CASE("intracavity steady state") {
  SUBCASE("decoupled factorization") {
    const Matrix6d V = intracavity_cm_lyapunov(make_linear_system(decoupled()));
    Matrix6d expected = Matrix6d::Zero();
    expected.diagonal() << 0.5, 0.5, 0.5, 0.5, 10.5, 10.5;
    CHECK((V - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("physical at random stable draws") {
    Rng rng(23);
    for (int k = 0; k < 200; ++k) {
      const DynamicsParams p = random_stable_params(rng, -1e-3, 1e-3, 0.05);
      const Matrix6d V = intracavity_cm_lyapunov(make_linear_system(p));
      CHECK(is_physical(V));
    }
  }
  SUBCASE("second moments satisfy the Lyapunov equation") {
    const LinearSystem sys = make_linear_system(DynamicsParams::reference(0.25));
    const Matrix6cd M = lyapunov_steady_state(sys);
    const Matrix6cd Q = (sys.Din * symmetrized_noise(sys.N) * sys.Din.transpose()).cast<cd>();
    CHECK((sys.A * M + M * sys.A.transpose() + Q).cwiseAbs().maxCoeff() < 1e-10 * M.cwiseAbs().maxCoeff());
  }
}
