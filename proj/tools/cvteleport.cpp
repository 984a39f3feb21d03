// cvteleport: command-line front end for points, sweeps, the graphene
// coupling report and the built-in cross-checks.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cvtele/sweep.hpp"
#include "cvtele/validation.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kAllUnstable = 4 };

void print_complex(const char* name, std::complex<double> z) {
  std::printf("  %-12s % .9e %+.9e i\n", name, z.real(), z.imag());
}

void print_mode(const char* label, const cvtele::OpticalModeReport& m) {
  std::printf("%s mode, omega = %.9e rad/s\n", label, m.omega);
  print_complex("zeta'", m.zeta_p);
  print_complex("zeta''", m.zeta_pp);
  print_complex("beta", m.beta);
  print_complex("alpha", m.alpha);
  print_complex("eps'", m.eps_p);
  print_complex("eps''", m.eps_pp);
}

cvtele::PointOptions point_options(const cvtele::SweepConfig& cfg) {
  cvtele::PointOptions opt;
  opt.quadrature = cfg.quadrature;
  opt.feed_forward = cfg.feed_forward;
  opt.outputs = cfg.outputs;
  opt.oracles = cfg.oracles;
  return opt;
}

int report_row_errors(const std::vector<cvtele::SweepRow>& rows) {
  int failed = 0;
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      std::cerr << "error at " << row.parameter << " = " << row.value << ": " << row.error << '\n';
      ++failed;
    }
    if (!row.oracle_mismatch.empty()) {
      std::cerr << "oracle mismatch at " << row.parameter << " = " << row.value << ": "
                << row.oracle_mismatch << '\n';
      ++failed;
    }
  }
  return failed;
}

int run_point_cmd(const std::string& config_path, const std::string& json_path) {
  const auto cfg = cvtele::parse_config(config_path);
  const auto p = cfg.resolved_base();
  auto row = cvtele::run_point(p, cfg.filters, point_options(cfg));
  row.parameter = "point";
  const std::vector<cvtele::SweepRow> rows{row};
  cvtele::write_csv(rows, std::cout);
  if (!json_path.empty()) cvtele::emit_json(rows, json_path);
  if (report_row_errors(rows)) return kNumericalFailure;
  if (!row.stable) {
    std::cerr << "point is unstable (margin " << (row.margin ? *row.margin : 0.0) << ")\n";
    return kAllUnstable;
  }
  return kOk;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out, const std::string& json_path,
                  bool assert_shapes) {
  const auto cfg = cvtele::parse_config(config_path);
  if (!cfg.sweep) throw cvtele::ValidationError("sweep", "sweep: the config has no sweep section");
  const auto rows = cvtele::run_sweep(cfg);
  if (out.empty() || out == "-") {
    cvtele::write_csv(rows, std::cout);
  } else {
    cvtele::emit_csv(rows, out);
  }
  if (!json_path.empty()) cvtele::emit_json(rows, json_path);

  int code = report_row_errors(rows) ? kNumericalFailure : kOk;
  bool any_stable = false;
  for (const auto& row : rows) any_stable = any_stable || row.stable;
  if (!any_stable) {
    std::cerr << "all sweep points are unstable\n";
    return kAllUnstable;
  }
  if (assert_shapes) {
    std::string problem;
    const auto& name = cfg.sweep->parameter;
    if (name == "G2") {
      problem = cvtele::check_entanglement_peak(rows, cfg.resolved_base().G3);
    } else if (name == "n_m") {
      problem = cvtele::check_monotone_decreasing(rows, &cvtele::SweepRow::F);
      if (problem.empty()) problem = cvtele::check_monotone_decreasing(rows, &cvtele::SweepRow::E_N);
    } else {
      std::cerr << "no shape assertions defined for a " << name << " sweep\n";
    }
    if (!problem.empty()) {
      std::cerr << "shape assertion failed: " << problem << '\n';
      code = kNumericalFailure;
    }
  }
  return code;
}

int run_graphene_cmd(const std::string& config_path) {
  cvtele::GrapheneDerivation g;
  bool derived = false;
  if (!config_path.empty()) {
    const auto cfg = cvtele::parse_config(config_path);
    if (cfg.graphene) {
      g = *cfg.graphene;
      derived = true;
    }
  }
  const auto r = cvtele::derive_couplings(g.material, g.omega_1, g.omega_m);
  std::printf("mu'  = %.9e J\nmu'' = %.9e J/V\n", r.mu_p, r.mu_pp);
  print_mode("pump", r.pump);
  print_mode("upper", r.upper);
  print_mode("lower", r.lower);
  print_complex("l_12", r.overlap_12);
  print_complex("l_13", r.overlap_13);
  print_complex("g2 (rad/s)", r.g2);
  print_complex("g3 (rad/s)", r.g3);
  if (derived) {
    const auto p = cvtele::build_dynamics_params(g.pump_amp, r.g2, r.g3, g.gamma2, g.gamma3,
                                                 g.gamma_m, g.omega_m, g.material.T);
    std::printf("dynamics (units of omega_m): G2 = %.9e, G3 = %.9e, gamma2 = %.9e, gamma3 = %.9e, "
                "gamma_m = %.9e, n_m = %.9e\n",
                p.G2, p.G3, p.gamma2, p.gamma3, p.gamma_m, p.n_m);
  }
  return kOk;
}

int run_validate_cmd(std::uint64_t seed, int n_traj) {
  bool all = true;
  for (const auto& r : cvtele::run_all_checks(seed, n_traj)) {
    std::cout << cvtele::format_check(r) << std::endl;
    all = all && r.pass;
  }
  return all ? kOk : kNumericalFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microwave-mediated optical entanglement and teleportation fidelity"};
  app.require_subcommand(1);

  std::string config, out, json;
  bool assert_shapes = false;
  std::uint64_t seed = 1;
  int n_traj = 2000;

  auto* point = app.add_subcommand("point", "evaluate the base parameters of a config");
  point->add_option("--config", config, "JSON config file")->required();
  point->add_option("--json", json, "also write the row as JSON");

  auto* sweep = app.add_subcommand("sweep", "run the parameter sweep of a config");
  sweep->add_option("--config", config, "JSON config file")->required();
  sweep->add_option("--out", out, "CSV output path (default stdout)");
  sweep->add_option("--json", json, "also write the rows as JSON");
  sweep->add_flag("--assert-shapes", assert_shapes, "check the qualitative curve shape");

  auto* graphene = app.add_subcommand("graphene", "material to coupling-rate report");
  graphene->add_option("--config", config, "JSON config file with a graphene section");

  auto* validate = app.add_subcommand("validate", "run the built-in oracle cross-checks");
  validate->add_option("--seed", seed, "random seed");
  validate->add_option("--n-traj", n_traj, "Monte-Carlo trajectories per draw")->check(CLI::Range(2, 1000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*point) return run_point_cmd(config, json);
    if (*sweep) return run_sweep_cmd(config, out, json, assert_shapes);
    if (*graphene) return run_graphene_cmd(config);
    if (*validate) return run_validate_cmd(seed, n_traj);
  } catch (const cvtele::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const cvtele::ValidationError& e) {
    std::cerr << "invalid config field \"" << e.field() << "\": " << e.what() << '\n';
    return kConfigError;
  } catch (const cvtele::IoError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const cvtele::Error& e) {
    std::cerr << e.what() << '\n';
    return kNumericalFailure;
  }
  return kOk;
}
