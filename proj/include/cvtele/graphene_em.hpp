#pragma once

// Graphene conductivity, its microwave-induced modulation, surface plasmon
// polariton dispersion and mode profiles, and the optical/microwave coupling
// rates g_j derived from them. All functions are pure; they are templated on
// the real type so the same formulas run in double or long double.

#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "cvtele/constants.hpp"
#include "cvtele/dynamics_params.hpp"
#include "cvtele/errors.hpp"

namespace cvtele {

// Which expression is used for the thermal (intraband) part of the
// conductivity modulation coefficient.
enum class ThermalTermForm {
  // d/d(mu) of the thermal term of the conductivity as implemented in
  // conductivity(), so zeta_pp is its first-order bias derivative.
  kExactDerivative,
  // The tanh(mu / 2 k_B T) form (dimension restored with 1 / (pi hbar^2)).
  // This is the derivative of a Drude term that conductivity() does not
  // contain; kept for comparison.
  kPrintedTanh,
};

template <typename Real>
struct BasicGrapheneConfig {
  Real n0 = Real(1e16);        // electron density, 1/m^2
  Real tau_s = Real(0.5e-12);  // scattering time, s
  Real V_f = Real(1e6);        // Fermi velocity, m/s
  Real T = Real(0.015);        // temperature, K
  Real eps_r = Real(3.9);      // capacitor dielectric
  Real d = Real(100e-9);       // plate separation, m
  Real A_r = Real(100e-12);    // plate area, m^2
  Real L = Real(10e-6);        // interaction length, m
  bool exact_mu_derivative = false;
  ThermalTermForm thermal_term = ThermalTermForm::kExactDerivative;

  // Capacitance per unit plate area, eps_r eps0 / d (F/m^2).
  Real capacitance() const { return eps_r * PhysicalConstants<Real>::eps0 / d; }

  void validate() const {
    auto positive = [](Real v, const char* name) {
      if (!(v > Real(0)) || !std::isfinite(static_cast<double>(v))) {
        throw DomainError(std::string("graphene config: ") + name +
                          " must be finite and > 0");
      }
    };
    positive(n0, "n0");
    positive(tau_s, "tau_s");
    positive(V_f, "V_f");
    positive(T, "T");
    positive(eps_r, "eps_r");
    positive(d, "d");
    positive(A_r, "A_r");
    positive(L, "L");
  }
};

using GrapheneConfig = BasicGrapheneConfig<double>;

template <typename Real>
struct ChemicalPotential {
  Real mu_p;   // static part, J
  Real mu_pp;  // first-order bias coefficient, J/V
};

template <typename Real>
struct PerturbedConductivity {
  std::complex<Real> zeta_p;   // S
  std::complex<Real> zeta_pp;  // S/V
};

template <typename Real>
struct Dispersion {
  std::complex<Real> beta;   // propagation constant, 1/m
  std::complex<Real> alpha;  // transverse decay constant, 1/m
};

template <typename Real>
struct EffectivePermittivity {
  std::complex<Real> eps_p;
  std::complex<Real> eps_pp;  // 1/V
};

// Transverse field distribution of one SPP mode. D_i(x) = i K_i / (omega eps
// eps0) exp(-alpha |x|), the graphene sheet sitting at x = 0.
template <typename Real>
struct ModeProfile {
  using Complex = std::complex<Real>;

  Real omega{};
  Complex beta;
  Complex alpha;
  Complex K_x;
  Complex K_y;
  Complex K_z;
  Real eps_r{};

  Complex prefactor(const Complex& K) const {
    return Complex(0, 1) * K / (omega * eps_r * PhysicalConstants<Real>::eps0);
  }
  Complex envelope(Real x) const {
    return x < Real(0) ? std::exp(alpha * x) : std::exp(-alpha * x);
  }
  Complex D_x(Real x) const { return prefactor(K_x) * envelope(x); }
  Complex D_y(Real x) const { return prefactor(K_y) * envelope(x); }
  Complex D_z(Real x) const { return prefactor(K_z) * envelope(x); }

  // Closed forms of int |D_i|^2 dx over the whole line.
  Real intensity_x() const { return std::norm(prefactor(K_x)) / alpha.real(); }
  Real intensity_y() const { return std::norm(prefactor(K_y)) / alpha.real(); }
  Real intensity_z() const { return std::norm(prefactor(K_z)) / alpha.real(); }
  Real intensity_xz() const { return intensity_x() + intensity_z(); }

  // (c beta / omega)^2
  Complex eps_eff() const {
    const Complex n = PhysicalConstants<Real>::c * beta / omega;
    return n * n;
  }
};

// ---------------------------------------------------------------------------
// Chemical potential

// mu_c(v) without the small-bias expansion.
template <typename Real>
Real chemical_potential_at_bias(const BasicGrapheneConfig<Real>& cfg, Real v) {
  using K = PhysicalConstants<Real>;
  const Real pi_n0 = K::pi * cfg.n0;
  return K::hbar * cfg.V_f * std::sqrt(pi_n0) *
         std::sqrt(Real(1) + Real(2) * cfg.capacitance() * v / (K::q * pi_n0));
}

template <typename Real>
ChemicalPotential<Real> chemical_potential(const BasicGrapheneConfig<Real>& cfg) {
  using K = PhysicalConstants<Real>;
  cfg.validate();
  const Real sqrt_pi_n0 = std::sqrt(K::pi * cfg.n0);
  const Real mu_p = K::hbar * cfg.V_f * sqrt_pi_n0;
  Real mu_pp;
  if (cfg.exact_mu_derivative) {
    // d/dv of chemical_potential_at_bias at v = 0.
    mu_pp = mu_p * cfg.capacitance() / (K::q * K::pi * cfg.n0);
  } else {
    mu_pp = K::hbar * cfg.V_f * cfg.capacitance() / (K::q * sqrt_pi_n0);
  }
  return {mu_p, mu_pp};
}

// ---------------------------------------------------------------------------
// Conductivity

// W = omega / 2 pi + i / tau. tau = +inf is accepted and gives a real W.
template <typename Real>
std::complex<Real> scattering_frequency(Real omega, Real tau_s) {
  return {omega / (Real(2) * PhysicalConstants<Real>::pi), Real(1) / tau_s};
}

// ln(1 + exp(-x)); zero once exp(-x) underflows relative to 1.
template <typename Real>
Real log1p_exp_neg(Real x) {
  return x > Real(700) ? Real(0) : std::log1p(std::exp(-x));
}

template <typename Real>
std::complex<Real> conductivity(Real omega, Real mu_c, Real tau_s, Real T) {
  using K = PhysicalConstants<Real>;
  using Complex = std::complex<Real>;
  if (!(omega > 0) || !(tau_s > 0) || !(T > 0) || !(mu_c > 0)) {
    throw DomainError("conductivity: omega, tau_s, T and mu_c must be > 0");
  }
  const Complex W = scattering_frequency(omega, tau_s);
  const Complex hW = K::hbar * W;
  const Complex num = Real(2) * mu_c - hW;
  const Complex den = Real(2) * mu_c + hW;
  if (std::abs(num) <= Real(4) * std::numeric_limits<Real>::epsilon() * Real(2) * mu_c) {
    throw BranchPointError("conductivity: 2 mu_c coincides with hbar W");
  }
  const Complex i(0, 1);
  const Complex interband = i * K::q * K::q / (Real(4) * K::pi * K::hbar) * std::log(num / den);
  const Real x = mu_c / (K::k_B * T);
  const Complex thermal = i * K::q * K::q * K::k_B * T / (K::pi * K::hbar * K::hbar * W) *
                          Real(2) * log1p_exp_neg(x);
  return interband + thermal;
}

template <typename Real>
PerturbedConductivity<Real> conductivity_perturbation(Real omega,
                                                      const BasicGrapheneConfig<Real>& cfg) {
  using K = PhysicalConstants<Real>;
  using Complex = std::complex<Real>;
  const auto mu = chemical_potential(cfg);
  const Complex zeta_p = conductivity(omega, mu.mu_p, cfg.tau_s, cfg.T);

  const Complex i(0, 1);
  const Complex W = scattering_frequency(omega, cfg.tau_s);
  const Complex hW = K::hbar * W;
  const Real two_mu = Real(2) * mu.mu_p;
  const Complex interband =
      i * K::q * K::q * W * mu.mu_pp / (K::pi * (two_mu * two_mu - hW * hW));

  const Real x = mu.mu_p / (K::k_B * cfg.T);
  const Complex drude_scale = i * K::q * K::q * mu.mu_pp / (K::pi * K::hbar * K::hbar * W);
  Complex thermal;
  switch (cfg.thermal_term) {
    case ThermalTermForm::kExactDerivative:
      // -2 / (e^x + 1), written to stay finite for large x.
      thermal = x > Real(700) ? Complex(0)
                              : drude_scale * (Real(-2) * std::exp(-x) / (Real(1) + std::exp(-x)));
      break;
    case ThermalTermForm::kPrintedTanh:
      thermal = drude_scale * std::tanh(x / Real(2));
      break;
  }
  return {zeta_p, interband + thermal};
}

// ---------------------------------------------------------------------------
// Dispersion and permittivity

// Principal square root folded onto Re >= 0.
template <typename Real>
std::complex<Real> sqrt_right_half(const std::complex<Real>& z) {
  std::complex<Real> r = std::sqrt(z);
  return r.real() < Real(0) ? -r : r;
}

template <typename Real>
Dispersion<Real> spp_dispersion(Real omega, const std::complex<Real>& zeta_p, Real eps_r) {
  using K = PhysicalConstants<Real>;
  if (zeta_p == std::complex<Real>(0)) throw DomainError("spp_dispersion: zero conductivity");
  const Real k0 = omega / K::c;
  const auto beta = k0 * sqrt_right_half(Real(1) - Real(2) / (K::Z0 * zeta_p));
  const auto alpha = sqrt_right_half(beta * beta - eps_r * k0 * k0);
  if (!(alpha.real() > Real(0))) {
    throw UnconfinedModeError("spp_dispersion: Re(alpha) <= 0, mode is not bound to the sheet");
  }
  return {beta, alpha};
}

template <typename Real>
EffectivePermittivity<Real> effective_permittivity(Real omega, const std::complex<Real>& beta_p,
                                                   const std::complex<Real>& zeta_p,
                                                   const std::complex<Real>& zeta_pp) {
  using K = PhysicalConstants<Real>;
  using Complex = std::complex<Real>;
  if (zeta_p == Complex(0)) throw DomainError("effective_permittivity: zero conductivity");
  const Complex half_z = K::Z0 * zeta_p / Real(2);
  const Complex denom = Real(1) - half_z * half_z;
  if (std::abs(denom) < Real(64) * std::numeric_limits<Real>::epsilon()) {
    throw SingularModulationError("effective_permittivity: Z0 zeta' = +-2");
  }
  const Complex beta_pp = beta_p * zeta_pp / denom / zeta_p;
  const Complex n = K::c * beta_p / omega;
  return {n * n, Real(2) * K::c * K::c * beta_p * beta_pp / (omega * omega)};
}

template <typename Real>
ModeProfile<Real> mode_profile(Real omega, const std::complex<Real>& beta,
                               const std::complex<Real>& alpha, Real eps_r) {
  using Complex = std::complex<Real>;
  ModeProfile<Real> p;
  p.omega = omega;
  p.beta = beta;
  p.alpha = alpha;
  p.K_x = beta;
  p.K_y = Complex(0, -omega * eps_r * PhysicalConstants<Real>::eps0);
  p.K_z = alpha;
  p.eps_r = eps_r;
  return p;
}

// Normalized overlap of the (D_x, D_z) components of two modes.
template <typename Real>
std::complex<Real> mode_overlap(const ModeProfile<Real>& pm, const ModeProfile<Real>& pn) {
  using Complex = std::complex<Real>;
  // int conj(e^{-alpha_m |x|}) e^{-alpha_n |x|} dx = 2 / (conj(alpha_m) + alpha_n)
  const Complex cross = std::conj(pm.prefactor(pm.K_x)) * pn.prefactor(pn.K_x) +
                        std::conj(pm.prefactor(pm.K_z)) * pn.prefactor(pn.K_z);
  const Complex numerator = cross * Real(2) / (std::conj(pm.alpha) + pn.alpha);
  return numerator / std::sqrt(pm.intensity_xz() * pn.intensity_xz());
}

// sin(z)/z with a Taylor branch near the origin.
template <typename Real>
std::complex<Real> sinc(const std::complex<Real>& z) {
  if (std::abs(z) < Real(1e-4)) {
    const auto z2 = z * z;
    return Real(1) - z2 / Real(6) + z2 * z2 / Real(120);
  }
  return std::sin(z) / z;
}

// Phase-mismatch factor sinc(theta) e^{i theta}.
template <typename Real>
std::complex<Real> phase_mismatch_factor(const std::complex<Real>& theta) {
  return sinc(theta) * std::exp(std::complex<Real>(0, 1) * theta);
}

// Theta_j = (-1)^j (beta_1 - (-1)^j beta_j) L / 2 for j in {2, 3}.
template <typename Real>
std::complex<Real> mismatch_angle(int j, const std::complex<Real>& beta1,
                                  const std::complex<Real>& beta_j, Real L) {
  const Real sign = (j % 2 == 0) ? Real(1) : Real(-1);
  return sign * (beta1 - sign * beta_j) * L / Real(2);
}

template <typename Real>
struct ModeTriple {
  ModeProfile<Real> pump;   // omega_1
  ModeProfile<Real> upper;  // omega_2 = omega_1 + omega_m
  ModeProfile<Real> lower;  // omega_3 = omega_1 - omega_m

  const ModeProfile<Real>& operator[](int j) const {
    return j == 1 ? pump : (j == 2 ? upper : lower);
  }
};

// Energy-density weight xi_j of mode j.
template <typename Real>
std::complex<Real> energy_weight(const ModeProfile<Real>& p, const BasicGrapheneConfig<Real>& cfg) {
  using K = PhysicalConstants<Real>;
  const Real V_L = cfg.A_r * p.intensity_xz();
  return Real(0.5) + cfg.A_r * K::mu0 * p.intensity_y() / (Real(2) * V_L * K::eps0 * p.eps_eff());
}

// g_j in rad/s per photon, j in {2, 3}.
template <typename Real>
std::complex<Real> coupling_rate(int j, const ModeTriple<Real>& modes,
                                 const BasicGrapheneConfig<Real>& cfg,
                                 const std::complex<Real>& eps_pp_j, Real omega_m) {
  using K = PhysicalConstants<Real>;
  using Complex = std::complex<Real>;
  if (j != 2 && j != 3) throw DomainError("coupling_rate: j must be 2 or 3");
  const auto& p1 = modes.pump;
  const auto& pj = modes[j];
  const Complex xi1 = energy_weight(p1, cfg);
  const Complex xij = energy_weight(pj, cfg);
  const Complex l1j = mode_overlap(p1, pj);
  const Complex scale = std::sqrt(Real(2) * p1.omega * pj.omega * K::hbar * omega_m /
                                  (cfg.capacitance() * cfg.A_r * p1.eps_eff() * pj.eps_eff()));
  const Complex theta = mismatch_angle(j, p1.beta, pj.beta, cfg.L);
  return eps_pp_j * l1j / (Real(2) * std::sqrt(xi1 * xij)) * scale * phase_mismatch_factor(theta);
}

// Everything the electromagnetic model derives for one optical mode.
struct OpticalModeReport {
  double omega = 0.0;
  std::complex<double> zeta_p;
  std::complex<double> zeta_pp;
  std::complex<double> beta;
  std::complex<double> alpha;
  std::complex<double> eps_p;
  std::complex<double> eps_pp;
};

struct CouplingReport {
  double mu_p = 0.0;
  double mu_pp = 0.0;
  double omega_m = 0.0;
  OpticalModeReport pump, upper, lower;
  std::complex<double> overlap_12, overlap_13;
  std::complex<double> g2, g3;
};

// Runs the full material -> mode -> coupling chain for the pump at omega_1
// and sidebands at omega_1 +- omega_m.
CouplingReport derive_couplings(const GrapheneConfig& cfg, double omega_1, double omega_m);

// Converts coupling rates into dimensionless Langevin parameters. All rates
// in rad/s; the result is in units of omega_m.
DynamicsParams build_dynamics_params(double pump_amp, std::complex<double> g2,
                                     std::complex<double> g3, double gamma2, double gamma3,
                                     double gamma_m, double omega_m, double T);

}  // namespace cvtele
