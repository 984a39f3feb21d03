#pragma once

// Batch front end: JSON configuration, single points, parameter sweeps and
// CSV / JSON export.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvtele/dynamics_params.hpp"
#include "cvtele/gaussian_metrics.hpp"
#include "cvtele/graphene_em.hpp"
#include "cvtele/output_spectra.hpp"
#include "cvtele/quadrature.hpp"

namespace cvtele {

struct SweepSpec {
  std::string parameter;  // G2, G3, n_m, gamma_m or Omega
  double from = 0.0;
  double to = 0.0;
  int steps = 0;

  // steps values; the grid is mirror-symmetric so swapping from/to
  // reverses it bit-exactly.
  std::vector<double> grid() const;
};

// Couplings derived from the material model instead of given directly.
struct GrapheneDerivation {
  GrapheneConfig material;
  double omega_1 = 2.0 * Constants::pi * 193e12;  // pump, rad/s
  double omega_m = 2.0 * Constants::pi * 10e9;    // microwave, rad/s
  double pump_amp = 0.0;                          // classical pump amplitude
  double gamma2 = 0.0;                            // rad/s
  double gamma3 = 0.0;
  double gamma_m = 0.0;
};

inline const std::vector<std::string>& all_outputs() {
  static const std::vector<std::string> names = {"E_N", "F", "F_opt", "eta_minus",
                                                 "stability_margin"};
  return names;
}

struct SweepConfig {
  DynamicsParams base = DynamicsParams::reference();
  std::optional<GrapheneDerivation> graphene;
  std::optional<SweepSpec> sweep;
  FilterPair filters{FilterSpec::zero_bandwidth_at(0.0), FilterSpec::zero_bandwidth_at(0.0)};
  std::vector<std::string> outputs = all_outputs();
  bool oracles = false;
  std::uint64_t seed = 0;
  QuadratureControls quadrature;
  FeedForward feed_forward = FeedForward::kInverted;

  // Base parameters with the graphene derivation applied, if any.
  DynamicsParams resolved_base() const;
};

SweepConfig parse_config_text(const std::string& text);
SweepConfig parse_config(const std::string& path);

struct PointOptions {
  QuadratureControls quadrature;
  FeedForward feed_forward = FeedForward::kInverted;
  std::vector<std::string> outputs = all_outputs();
  bool oracles = false;
};

struct SweepRow {
  std::string parameter;
  double value = 0.0;
  bool stable = false;
  std::optional<double> E_N, eta_minus, F, F_opt, margin, err_est;
  std::string error;            // non-empty when the point failed
  std::string oracle_mismatch;  // non-empty when a cross-check disagreed
};

SweepRow run_point(const DynamicsParams& p, const FilterPair& filters, const PointOptions& opt = {});

// Evaluated by a bounded worker pool; rows come back in grid order.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg, int workers = 0);

inline constexpr const char* kCsvHeader =
    "sweep_param,value,stable,E_N,eta_minus,F,F_opt,margin,err_est";

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> parse_csv(std::istream& in);
void emit_json(const std::vector<SweepRow>& rows, const std::string& path);

// Shape checks on finished sweeps. Each returns an empty string on success,
// otherwise a description of the violation.
std::string check_entanglement_peak(const std::vector<SweepRow>& rows, double G3);
std::string check_monotone_decreasing(const std::vector<SweepRow>& rows,
                                      std::optional<double> SweepRow::*field);

}  // namespace cvtele
