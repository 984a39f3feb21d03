#pragma once

// Time-domain route to the filtered-output CM. The cavity and both causal
// filters form one linear SDE over the quadratures
//   z = (X2, Y2, X3, Y3, Xb, Yb, XF2, YF2, XF3, YF3),
//   dz = B z dt + C dW,  E[dW dW^T] = Sigma dt,
// with Sigma the symmetrized (Wigner) input-noise covariance. Symmetrized
// moments of this classical process equal the quantum ones.

#include <cstdint>

#include <Eigen/Dense>

#include "cvtele/langevin.hpp"
#include "cvtele/output_spectra.hpp"

namespace cvtele {

using Matrix10d = Eigen::Matrix<double, 10, 10>;
using Matrix10x6d = Eigen::Matrix<double, 10, 6>;

struct AugmentedSystem {
  Matrix10d B;
  Matrix10x6d C;
  Matrix6d Sigma;
};

AugmentedSystem augmented_filter_system(const LinearSystem& sys, const FilterPair& filters);

// Rows/cols of z that make up the filtered-output CM (F2, F3, b).
inline constexpr int kFilteredIndex[6] = {6, 7, 8, 9, 4, 5};

// Stationary CM of the augmented process from its Lyapunov equation; the
// filtered 6x6 block is an exact finite-bandwidth reference.
Matrix10d augmented_stationary_cm(const AugmentedSystem& aug);
Matrix6d filtered_block(const Matrix10d& Z);

struct MonteCarloOptions {
  std::uint64_t seed = 1;
  int n_traj = 2000;
  double t_end = 2000.0;  // units of 1/omega_m
  double dt = 0.1;
  int threads = 0;        // 0: CVTELEPORT_THREADS or hardware concurrency
};

struct MonteCarloCM {
  Matrix6d filtered = Matrix6d::Zero();
  Matrix6d filtered_se = Matrix6d::Zero();
  Matrix6d intracavity = Matrix6d::Zero();
  Matrix6d intracavity_se = Matrix6d::Zero();
  int n_traj = 0;
  int steps = 0;
};

// Each trajectory starts at z = 0 and is advanced with the exact discrete
// propagator exp(B dt) plus Gaussian increments of the exact one-step
// covariance (Van Loan). The sample at t_end contributes one draw per
// trajectory; trajectory k uses its own stream seeded with (seed, k).
MonteCarloCM monte_carlo_filtered_cm(const DynamicsParams& p, const FilterPair& filters,
                                     const MonteCarloOptions& opt);

// Worker count from CVTELEPORT_THREADS, else hardware concurrency (>= 1).
int default_worker_count();

}  // namespace cvtele
