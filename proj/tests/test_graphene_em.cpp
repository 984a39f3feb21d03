#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cvtele/gaussian_metrics.hpp"
#include "cvtele/graphene_em.hpp"
#include "cvtele/quadrature.hpp"

using namespace cvtele;
using cd = std::complex<double>;

namespace {

constexpr double kPi = Constants::pi;
const double kOmega1 = 2.0 * kPi * 193e12;
const double kOmegaM = 2.0 * kPi * 10e9;

// Material point of the frozen references: mu' = 0.2 eV, tau 0.5 ps, 300 K.
GrapheneConfig golden_config() {
  GrapheneConfig cfg;
  cfg.n0 = 2.938857879457651e+16;
  cfg.T = 300.0;
  return cfg;
}

double rel(cd a, cd b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("physical constants satisfy the vacuum relations") {
  using K = Constants;
  CHECK(std::abs(K::Z0 - std::sqrt(K::mu0 / K::eps0)) / K::Z0 < 1e-12);
  CHECK(std::abs(K::c - 1.0 / std::sqrt(K::mu0 * K::eps0)) / K::c < 1e-12);
}

TEST_CASE("graphene config validation") {
  GrapheneConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.capacitance() > 0.0);
  cfg.d = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = GrapheneConfig{};
  cfg.tau_s = -1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("chemical potential") {
  GrapheneConfig cfg;
  const auto base = chemical_potential(cfg);
  // hbar * 1e6 * sqrt(pi * 1e16), 40-digit reference
  CHECK(base.mu_p == doctest::Approx(1.8691798780980771322e-20).epsilon(1e-14));

  GrapheneConfig dense = cfg;
  dense.n0 = 4.0 * cfg.n0;
  const auto quad = chemical_potential(dense);
  CHECK(quad.mu_p == doctest::Approx(2.0 * base.mu_p).epsilon(1e-14));
  CHECK(quad.mu_pp == doctest::Approx(0.5 * base.mu_pp).epsilon(1e-14));

  SUBCASE("printed coefficient equals the exact derivative") {
    GrapheneConfig exact = cfg;
    exact.exact_mu_derivative = true;
    CHECK(chemical_potential(exact).mu_pp == doctest::Approx(base.mu_pp).epsilon(1e-14));
  }

  SUBCASE("expansion error is second order in the bias") {
    auto residual = [&](double v) {
      return chemical_potential_at_bias(cfg, v) - (base.mu_p + v * base.mu_pp);
    };
    CHECK(chemical_potential_at_bias(cfg, 0.0) == doctest::Approx(base.mu_p).epsilon(1e-15));
    const double r1 = residual(0.1), r2 = residual(0.05);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(1e-2));
  }
}

TEST_CASE("conductivity") {
  const double mu = 0.2 * Constants::q;
  SUBCASE("golden value") {
    const cd z = conductivity(kOmega1, mu, 0.5e-12, 300.0);
    CHECK(rel(z, cd(1.4194110417070012873e-7, -0.000012730186112614025318)) < 1e-12);
  }
  SUBCASE("thermal term vanishes deep in the degenerate regime") {
    const double T = mu / (Constants::k_B * 800.0);
    const cd z = conductivity(kOmega1, mu, 0.5e-12, T);
    const cd W = scattering_frequency(kOmega1, 0.5e-12);
    const cd hW = Constants::hbar * W;
    const cd inter = cd(0, 1) * Constants::q * Constants::q / (4.0 * kPi * Constants::hbar) *
                     std::log((2.0 * mu - hW) / (2.0 * mu + hW));
    CHECK(rel(z, inter) < 1e-15);
  }
  SUBCASE("infinite scattering time uses W = omega / 2 pi") {
    const double tau = std::numeric_limits<double>::infinity();
    CHECK(scattering_frequency(kOmega1, tau) == cd(kOmega1 / (2.0 * kPi), 0.0));
    const cd z = conductivity(kOmega1, mu, tau, 300.0);
    const double W = kOmega1 / (2.0 * kPi);
    const double hW = Constants::hbar * W;
    const double kT = Constants::k_B * 300.0;
    const cd expected =
        cd(0, 1) * Constants::q * Constants::q / (4.0 * kPi * Constants::hbar) *
            std::log(cd((2.0 * mu - hW) / (2.0 * mu + hW))) +
        cd(0, 1) * Constants::q * Constants::q * kT / (kPi * Constants::hbar * Constants::hbar * W) *
            2.0 * std::log1p(std::exp(-mu / kT));
    CHECK(rel(z, expected) < 1e-14);
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(conductivity(-1.0, mu, 1e-12, 300.0), DomainError);
    CHECK_THROWS_AS(conductivity(kOmega1, 0.0, 1e-12, 300.0), DomainError);
  }
}

TEST_CASE("conductivity modulation") {
  const GrapheneConfig cfg = golden_config();
  const auto pc = conductivity_perturbation(kOmega1, cfg);

  SUBCASE("golden values") {
    CHECK(rel(pc.zeta_p, cd(1.4194110417070012475e-7, -0.000012730186112614025009)) < 1e-12);
    CHECK(rel(pc.zeta_pp, cd(-4.0784730775472057168e-9, 3.169312934051467517e-7)) < 1e-9);
  }

  SUBCASE("zeta' is the unbiased conductivity") {
    const auto mu = chemical_potential(cfg);
    CHECK(pc.zeta_p == conductivity(kOmega1, mu.mu_p, cfg.tau_s, cfg.T));
  }

  SUBCASE("vanishing capacitance switches the modulation off") {
    GrapheneConfig far = cfg;
    far.d = 1e200;
    CHECK(std::abs(conductivity_perturbation(kOmega1, far).zeta_pp) < 1e-190);
  }

  SUBCASE("first-order consistency at 1 uV") {
    const auto mu = chemical_potential(cfg);
    const double dv = 1e-6;
    const cd step = conductivity(kOmega1, mu.mu_p + dv * mu.mu_pp, cfg.tau_s, cfg.T) - pc.zeta_p;
    CHECK(std::abs(step - dv * pc.zeta_pp) / std::abs(dv * pc.zeta_pp) < 1e-6);
  }

  SUBCASE("Richardson slope of the exact bias dependence") {
    auto zeta_at = [&](double v) {
      return conductivity(kOmega1, chemical_potential_at_bias(cfg, v), cfg.tau_s, cfg.T);
    };
    auto slope = [&](double h) { return (zeta_at(h) - zeta_at(-h)) / (2.0 * h); };
    const cd fd = (4.0 * slope(0.025) - slope(0.05)) / 3.0;
    CHECK(rel(pc.zeta_pp, fd) < 1e-3);

    GrapheneConfig printed = cfg;
    printed.thermal_term = ThermalTermForm::kPrintedTanh;
    const double off = rel(conductivity_perturbation(kOmega1, printed).zeta_pp, fd);
    MESSAGE("printed tanh thermal term differs from the bias derivative by " << off << " (relative)");
    CHECK(off > 1e-3);
  }

  SUBCASE("both thermal forms agree when the thermal term is negligible") {
    // At 15 mK the exact thermal derivative underflows; the tanh form does not.
    GrapheneConfig cold = cfg;
    cold.T = 0.015;
    const auto exact = conductivity_perturbation(kOmega1, cold);
    cold.thermal_term = ThermalTermForm::kPrintedTanh;
    const auto printed = conductivity_perturbation(kOmega1, cold);
    CHECK(exact.zeta_p == printed.zeta_p);
    CHECK(std::abs(printed.zeta_pp - exact.zeta_pp) > 0.0);
  }
}

TEST_CASE("SPP dispersion") {
  const GrapheneConfig cfg = golden_config();
  const auto pc = conductivity_perturbation(kOmega1, cfg);
  const auto d = spp_dispersion(kOmega1, pc.zeta_p, cfg.eps_r);
  const double k0 = kOmega1 / Constants::c;

  SUBCASE("golden values") {
    CHECK(rel(d.beta, cd(58150898.259331742042, -58662046.81477738117)) < 1e-10);
    CHECK(rel(d.alpha, cd(57879613.988893886345, -58936998.381931783095)) < 1e-10);
  }
  SUBCASE("weak sheet limit") {
    const auto weak = spp_dispersion(kOmega1, cd(1e12, 1e12), 1.0);
    CHECK(rel(weak.beta, cd(k0, 0.0)) < 1e-9);
  }
  SUBCASE("real beta above the light line gives a real decay constant") {
    const auto r = spp_dispersion(kOmega1, cd(-1e-3, 0.0), 1.0);
    CHECK(r.beta.imag() == 0.0);
    CHECK(r.beta.real() > k0);
    CHECK(r.alpha.real() > 0.0);
    CHECK(r.alpha.imag() == 0.0);
  }
  SUBCASE("branch discipline over random conductivities") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-12.0, -2.0);
    std::uniform_real_distribution<double> sgn(-1.0, 1.0);
    int confined = 0;
    for (int k = 0; k < 1000; ++k) {
      const cd zeta(std::pow(10.0, u(rng)), std::copysign(std::pow(10.0, u(rng)), sgn(rng)));
      const double omega = 2.0 * kPi * std::pow(10.0, 12.0 + 2.5 * (sgn(rng) + 1.0) / 2.0);
      try {
        const auto r = spp_dispersion(omega, zeta, 1.0 + 5.0 * (sgn(rng) + 1.0));
        ++confined;
        CHECK(r.beta.real() >= 0.0);
        CHECK(r.alpha.real() > 0.0);
      } catch (const UnconfinedModeError&) {
      }
    }
    CHECK(confined > 500);
  }
}

TEST_CASE("effective permittivity") {
  const GrapheneConfig cfg = golden_config();
  const auto pc = conductivity_perturbation(kOmega1, cfg);
  const auto d = spp_dispersion(kOmega1, pc.zeta_p, cfg.eps_r);
  const auto e = effective_permittivity(kOmega1, d.beta, pc.zeta_p, pc.zeta_pp);
  CHECK(rel(e.eps_p, cd(-3.6492629877090361434, -416.97564257951782698)) < 1e-10);
  CHECK(rel(e.eps_pp, cd(0.14603095760507341908, 20.762679865910880729)) < 1e-9);

  const cd n = Constants::c * d.beta / kOmega1;
  CHECK(e.eps_p == n * n);
  const auto unmodulated = effective_permittivity(kOmega1, d.beta, pc.zeta_p, cd(0.0));
  CHECK(unmodulated.eps_pp == cd(0.0));
  CHECK(unmodulated.eps_p == e.eps_p);

  const double Z0 = Constants::Z0;
  CHECK_THROWS_AS(effective_permittivity(kOmega1, d.beta, cd(2.0 / Z0, 0.0), pc.zeta_pp),
                  SingularModulationError);
}

TEST_CASE("mode profiles and overlaps") {
  const GrapheneConfig cfg = golden_config();
  auto profile_at = [&](double omega) {
    const auto pc = conductivity_perturbation(omega, cfg);
    const auto d = spp_dispersion(omega, pc.zeta_p, cfg.eps_r);
    return mode_profile(omega, d.beta, d.alpha, cfg.eps_r);
  };
  const auto p1 = profile_at(kOmega1);
  const auto p2 = profile_at(kOmega1 + kOmegaM);

  SUBCASE("continuity at the sheet") {
    CHECK(p1.D_x(-0.0) == p1.D_x(0.0));
    CHECK(std::abs(p1.D_z(-1e-300) - p1.D_z(1e-300)) < 1e-12 * std::abs(p1.D_z(0.0)));
    CHECK(std::abs(p1.D_y(-1e-300) - p1.D_y(1e-300)) < 1e-12 * std::abs(p1.D_y(0.0)));
  }

  SUBCASE("closed-form transverse integrals") {
    using Value = Eigen::Matrix<double, 1, 1>;
    auto f = [&](double x) { return Value(std::norm(p1.D_x(x))); };
    const double scale = 1.0 / p1.alpha.real();
    const auto r = integrate_real_line<Value>(f, {0.0}, scale, {1e-20, 1e-13, 200000}, Value::Zero());
    CHECK(r.value(0) == doctest::Approx(p1.intensity_x()).epsilon(1e-10));
    CHECK(p1.intensity_x() == doctest::Approx(0.067225433619351122204).epsilon(1e-10));

    auto doubled = p1;
    doubled.alpha *= 2.0;
    CHECK(doubled.intensity_x() == doctest::Approx(0.5 * p1.intensity_x()).epsilon(1e-14));
    CHECK(doubled.intensity_z() == doctest::Approx(0.5 * p1.intensity_z()).epsilon(1e-14));
  }

  SUBCASE("overlap normalization and symmetry") {
    CHECK(std::abs(mode_overlap(p1, p1) - 1.0) < 1e-14);
    CHECK(std::abs(mode_overlap(p1, p2) - std::conj(mode_overlap(p2, p1))) < 1e-14);
    CHECK(rel(mode_overlap(p1, p2), cd(0.99999999977781404642, 0.000012346767798415135163)) < 1e-12);
  }

  SUBCASE("overlap bounded by one") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int k = 0; k < 1000; ++k) {
      auto a = mode_profile(kOmega1, cd(u(rng), u(rng) - 5.0) * 1e7, cd(u(rng), u(rng) - 5.0) * 1e7, u(rng));
      auto b = mode_profile(kOmega1 * u(rng), cd(u(rng), u(rng) - 5.0) * 1e7, cd(u(rng), u(rng) - 5.0) * 1e7,
                            a.eps_r);
      CHECK(std::abs(mode_overlap(a, b)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("phase mismatch") {
  CHECK(phase_mismatch_factor(cd(0.0)) == cd(1.0));
  CHECK(std::abs(sinc(cd(1e-4 * (1 - 1e-12))) - sinc(cd(1e-4 * (1 + 1e-12)))) < 1e-15);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int k = 0; k < 1000; ++k) {
    const double theta = u(rng);
    CHECK(std::abs(phase_mismatch_factor(cd(theta))) < 1.0);
  }
  CHECK(mismatch_angle(2, cd(3.0), cd(3.0), 1.0) == cd(0.0));
  CHECK(mismatch_angle(3, cd(3.0), cd(-3.0), 1.0) == cd(0.0));
}

TEST_CASE("coupling rates") {
  const GrapheneConfig cfg = golden_config();
  const auto report = derive_couplings(cfg, kOmega1, kOmegaM);
  CHECK(rel(report.g2, cd(1174699909.1302081519, -6283953.2324460856652)) < 1e-8);
  CHECK(rel(report.g3, cd(509359.14006212177237, -503245.21909654166097)) < 1e-7);
  CHECK(std::abs(report.g2) == doctest::Approx(1174716716.7358889931).epsilon(1e-8));

  SUBCASE("sqrt(omega_m) scaling with the profiles held fixed") {
    auto profile_at = [&](double omega) {
      const auto pc = conductivity_perturbation(omega, cfg);
      const auto d = spp_dispersion(omega, pc.zeta_p, cfg.eps_r);
      return mode_profile(omega, d.beta, d.alpha, cfg.eps_r);
    };
    const ModeTriple<double> modes{profile_at(kOmega1), profile_at(kOmega1 + kOmegaM),
                                   profile_at(kOmega1 - kOmegaM)};
    const cd g = coupling_rate(2, modes, cfg, report.upper.eps_pp, kOmegaM);
    const cd g4 = coupling_rate(2, modes, cfg, report.upper.eps_pp, 4.0 * kOmegaM);
    CHECK(std::abs(g4 - 2.0 * g) < 1e-14 * std::abs(g));
    CHECK(std::abs(g - report.g2) < 1e-14 * std::abs(g));
    CHECK_THROWS_AS(coupling_rate(1, modes, cfg, report.upper.eps_pp, kOmegaM), DomainError);
  }
}

TEST_CASE("dynamics parameters from couplings") {
  const cd g2(1e6, 2e5), g3(8e5, -1e5);
  const double wm = kOmegaM;
  const auto off = build_dynamics_params(0.0, g2, g3, 1e6, 1e6, 1e7, wm, 0.015);
  CHECK(off.G2 == 0.0);
  CHECK(off.G3 == 0.0);
  const auto one = build_dynamics_params(1e3, g2, g3, 1e6, 1e6, 1e7, wm, 0.015);
  const auto two = build_dynamics_params(2e3, g2, g3, 1e6, 1e6, 1e7, wm, 0.015);
  CHECK(two.G2 == doctest::Approx(2.0 * one.G2).epsilon(1e-15));
  CHECK(two.G3 / two.G2 == doctest::Approx(one.G3 / one.G2).epsilon(1e-15));
  CHECK(one.gamma_m == doctest::Approx(1e7 / wm).epsilon(1e-15));
  CHECK(one.n_m == doctest::Approx(1.2728232937738824631e-14).epsilon(1e-10));
  CHECK_THROWS_AS(build_dynamics_params(-1.0, g2, g3, 1e6, 1e6, 1e7, wm, 0.015), DomainError);

  const auto ref = DynamicsParams::reference();
  CHECK(ref.G2 == 0.18);
  CHECK(ref.G3 == 0.2);
  CHECK(ref.gamma2 == 0.001);
  CHECK(ref.gamma3 == 0.001);
  CHECK(ref.gamma_m == 0.02);
  CHECK(ref.n_m == 10.0);
}

TEST_CASE("thermal occupation") {
  const double T = 1.0;
  const double omega = Constants::k_B * T * std::log(2.0) / Constants::hbar;
  CHECK(thermal_occupation(omega, T) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(thermal_occupation(omega, 0.0) == 0.0);
  CHECK(thermal_occupation(2.0 * kPi * 10e9, 0.015) ==
        doctest::Approx(1.2728232937738824631e-14).epsilon(1e-10));
  CHECK(thermal_occupation(1e20, 1e-3) == 0.0);
  CHECK_THROWS_AS(thermal_occupation(-1.0, 1.0), DomainError);
}
