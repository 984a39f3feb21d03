#include "cvtele/graphene_em.hpp"

#include "cvtele/gaussian_metrics.hpp"

namespace cvtele {

namespace {

struct ModeChain {
  OpticalModeReport report;
  ModeProfile<double> profile;
};

ModeChain evaluate_mode(const GrapheneConfig& cfg, double omega) {
  ModeChain out;
  const auto sigma = conductivity_perturbation(omega, cfg);
  const auto disp = spp_dispersion(omega, sigma.zeta_p, cfg.eps_r);
  const auto eps = effective_permittivity(omega, disp.beta, sigma.zeta_p, sigma.zeta_pp);
  out.report = {omega, sigma.zeta_p, sigma.zeta_pp, disp.beta, disp.alpha, eps.eps_p, eps.eps_pp};
  out.profile = mode_profile(omega, disp.beta, disp.alpha, cfg.eps_r);
  return out;
}

}  // namespace

CouplingReport derive_couplings(const GrapheneConfig& cfg, double omega_1, double omega_m) {
  cfg.validate();
  if (!(omega_m > 0.0) || !(omega_1 > omega_m)) {
    throw DomainError("derive_couplings: need omega_1 > omega_m > 0");
  }
  const auto mu = chemical_potential(cfg);
  const ModeChain pump = evaluate_mode(cfg, omega_1);
  const ModeChain upper = evaluate_mode(cfg, omega_1 + omega_m);
  const ModeChain lower = evaluate_mode(cfg, omega_1 - omega_m);
  const ModeTriple<double> modes{pump.profile, upper.profile, lower.profile};

  CouplingReport r;
  r.mu_p = mu.mu_p;
  r.mu_pp = mu.mu_pp;
  r.omega_m = omega_m;
  r.pump = pump.report;
  r.upper = upper.report;
  r.lower = lower.report;
  r.overlap_12 = mode_overlap(pump.profile, upper.profile);
  r.overlap_13 = mode_overlap(pump.profile, lower.profile);
  r.g2 = coupling_rate(2, modes, cfg, upper.report.eps_pp, omega_m);
  r.g3 = coupling_rate(3, modes, cfg, lower.report.eps_pp, omega_m);
  return r;
}

DynamicsParams build_dynamics_params(double pump_amp, std::complex<double> g2,
                                     std::complex<double> g3, double gamma2, double gamma3,
                                     double gamma_m, double omega_m, double T) {
  if (!(pump_amp >= 0.0) || !std::isfinite(pump_amp)) {
    throw DomainError("build_dynamics_params: pump amplitude must be finite and >= 0");
  }
  if (!(omega_m > 0.0)) throw DomainError("build_dynamics_params: omega_m must be > 0");
  DynamicsParams p;
  p.G2 = pump_amp * std::abs(g2) / omega_m;
  p.G3 = pump_amp * std::abs(g3) / omega_m;
  p.gamma2 = gamma2 / omega_m;
  p.gamma3 = gamma3 / omega_m;
  p.gamma_m = gamma_m / omega_m;
  p.n_m = thermal_occupation(omega_m, T);
  p.validate();
  return p;
}

}  // namespace cvtele
