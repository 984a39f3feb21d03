#pragma once

// Randomized generators and the end-to-end cross-checks shared by the
// `validate` subcommand and the acceptance binary.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cvtele/dynamics_params.hpp"
#include "cvtele/gaussian_metrics.hpp"
#include "cvtele/graphene_em.hpp"

namespace cvtele {

using Rng = std::mt19937_64;

// Couplings, rates and occupation drawn uniformly, kept only when the drift
// margin is at most max_margin (< 0).
DynamicsParams random_stable_params(Rng& rng, double max_margin = -0.005, double gamma_lo = 0.01,
                                    double gamma_hi = 0.05);

// Random symplectic transform of a thermal product state: S diag(nu1, nu1,
// nu2, nu2) S^T with nu in [1/2, nu_max] and squeezing up to r_max.
Matrix4d random_physical_cm(Rng& rng, double nu_max = 3.0, double r_max = 1.0);

// Material parameters spanning the confined plasmon regime.
GrapheneConfig random_graphene_config(Rng& rng);

struct CheckResult {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;  // 0: no limit
};

// One entry per acceptance criterion that runs in-process.
CheckResult check_vacuum_normalization();
CheckResult check_triple_oracle(std::uint64_t seed, int draws = 10, int n_traj = 2000);
CheckResult check_metric_oracles(std::uint64_t seed);
CheckResult check_bound_adherence();
CheckResult check_entanglement_peak();
CheckResult check_thermal_robustness();
CheckResult check_tmsv_exactness();
CheckResult check_graphene_consistency(std::uint64_t seed);

// Everything above, in order, with the Monte-Carlo ensemble size given.
std::vector<CheckResult> run_all_checks(std::uint64_t seed, int n_traj = 2000);

std::string format_check(const CheckResult& r);

}  // namespace cvtele
