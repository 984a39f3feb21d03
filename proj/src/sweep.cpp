#include "cvtele/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cvtele/langevin.hpp"
#include "cvtele/monte_carlo.hpp"

namespace cvtele {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Grid

std::vector<double> SweepSpec::grid() const {
  std::vector<double> values(steps);
  const int last = steps - 1;
  const double span = to - from;
  for (int i = 0; i < steps; ++i) {
    if (2 * i < last) {
      values[i] = from + span * (static_cast<double>(i) / last);
    } else if (2 * i > last) {
      values[i] = to - span * (static_cast<double>(last - i) / last);
    } else {
      values[i] = 0.5 * (from + to);
    }
  }
  return values;
}

DynamicsParams SweepConfig::resolved_base() const {
  if (!graphene) return base;
  const auto& g = *graphene;
  const auto report = derive_couplings(g.material, g.omega_1, g.omega_m);
  return build_dynamics_params(g.pump_amp, report.g2, report.g3, g.gamma2, g.gamma3, g.gamma_m,
                               g.omega_m, g.material.T);
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string join_path(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ValidationError(path, path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ValidationError(path, path + ": must be finite");
  return v;
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ValidationError(path, path + ": expected true or false");
  return j.get<bool>();
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, path + ": expected an object");
}

[[noreturn]] void unknown_key(const std::string& path) {
  throw ValidationError(path, "unknown key \"" + path + "\"");
}

DynamicsParams parse_base(const json& j, DynamicsParams p, const std::string& prefix) {
  require_object(j, prefix);
  for (const auto& [key, value] : j.items()) {
    const std::string path = join_path(prefix, key);
    const double v = get_number(value, path);
    if (key == "G2") p.G2 = v;
    else if (key == "G3") p.G3 = v;
    else if (key == "gamma2") p.gamma2 = v;
    else if (key == "gamma3") p.gamma3 = v;
    else if (key == "gamma_m") p.gamma_m = v;
    else if (key == "n_m") p.n_m = v;
    else unknown_key(path);
    if (v < 0.0) throw ValidationError(path, path + ": must be >= 0");
  }
  return p;
}

FilterSpec parse_filter(const json& j, const std::string& prefix) {
  require_object(j, prefix);
  FilterSpec f = FilterSpec::zero_bandwidth_at(0.0);
  bool has_tau = false;
  bool has_zero = false;
  for (const auto& [key, value] : j.items()) {
    const std::string path = join_path(prefix, key);
    if (key == "Omega") f.Omega = get_number(value, path);
    else if (key == "tau") { f.tau = get_number(value, path); has_tau = true; }
    else if (key == "zero_bandwidth") { f.zero_bandwidth = get_bool(value, path); has_zero = true; }
    else unknown_key(path);
  }
  if (has_tau && !has_zero) f.zero_bandwidth = false;
  if (!f.zero_bandwidth && !(f.tau > 0.0)) {
    throw ValidationError(join_path(prefix, "tau"), prefix + ".tau must be > 0 for a finite bandwidth");
  }
  return f;
}

GrapheneDerivation parse_graphene(const json& j, const std::string& prefix) {
  require_object(j, prefix);
  GrapheneDerivation g;
  const DynamicsParams ref = DynamicsParams::reference();
  bool has_pump = false;
  bool has_g2 = false, has_g3 = false, has_gm = false;
  for (const auto& [key, value] : j.items()) {
    const std::string path = join_path(prefix, key);
    auto& m = g.material;
    if (key == "exact_mu_derivative") { m.exact_mu_derivative = get_bool(value, path); continue; }
    if (key == "thermal_term") {
      if (!value.is_string()) throw ValidationError(path, path + ": expected \"exact\" or \"printed\"");
      const auto s = value.get<std::string>();
      if (s == "exact") m.thermal_term = ThermalTermForm::kExactDerivative;
      else if (s == "printed") m.thermal_term = ThermalTermForm::kPrintedTanh;
      else throw ValidationError(path, path + ": expected \"exact\" or \"printed\"");
      continue;
    }
    const double v = get_number(value, path);
    if (key == "n0") m.n0 = v;
    else if (key == "tau_s") m.tau_s = v;
    else if (key == "V_f") m.V_f = v;
    else if (key == "T") m.T = v;
    else if (key == "eps_r") m.eps_r = v;
    else if (key == "d") m.d = v;
    else if (key == "A_r") m.A_r = v;
    else if (key == "L") m.L = v;
    else if (key == "omega_1") g.omega_1 = v;
    else if (key == "omega_m") g.omega_m = v;
    else if (key == "pump_amp") { g.pump_amp = v; has_pump = true; }
    else if (key == "gamma2") { g.gamma2 = v; has_g2 = true; }
    else if (key == "gamma3") { g.gamma3 = v; has_g3 = true; }
    else if (key == "gamma_m") { g.gamma_m = v; has_gm = true; }
    else unknown_key(path);
  }
  if (!has_pump) throw ValidationError(join_path(prefix, "pump_amp"), prefix + ".pump_amp is required");
  if (!has_g2) g.gamma2 = ref.gamma2 * g.omega_m;
  if (!has_g3) g.gamma3 = ref.gamma3 * g.omega_m;
  if (!has_gm) g.gamma_m = ref.gamma_m * g.omega_m;
  try {
    g.material.validate();
  } catch (const DomainError& e) {
    throw ValidationError(prefix, e.what());
  }
  return g;
}

std::size_t line_of(const std::string& text, std::size_t byte, std::size_t& column) {
  std::size_t line = 1;
  column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return line;
}

}  // namespace

SweepConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t column = 0;
    const std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1, column);
    throw ParseError("config parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + e.what(),
                     line, column);
  }
  if (!j.is_object()) throw ValidationError("", "config: top level must be a JSON object");

  SweepConfig cfg;
  SweepSpec sweep;
  bool has_sweep = false, has_from = false, has_to = false, has_steps = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "base") cfg.base = parse_base(value, cfg.base, "base");
    else if (key == "graphene") cfg.graphene = parse_graphene(value, "graphene");
    else if (key == "sweep") {
      if (!value.is_string()) throw ValidationError("sweep", "sweep: expected a parameter name");
      sweep.parameter = value.get<std::string>();
      has_sweep = true;
    } else if (key == "from") { sweep.from = get_number(value, key); has_from = true; }
    else if (key == "to") { sweep.to = get_number(value, key); has_to = true; }
    else if (key == "steps") {
      if (!value.is_number_integer()) throw ValidationError("steps", "steps: expected an integer");
      const auto n = value.get<long long>();
      if (n < 2 || n > 10'000'000) throw ValidationError("steps", "steps: must be >= 2");
      sweep.steps = static_cast<int>(n);
      has_steps = true;
    } else if (key == "filters") {
      require_object(value, "filters");
      for (const auto& [fk, fv] : value.items()) {
        const std::string path = join_path("filters", fk);
        if (fk == "a2") cfg.filters.a2 = parse_filter(fv, path);
        else if (fk == "a3") cfg.filters.a3 = parse_filter(fv, path);
        else unknown_key(path);
      }
    } else if (key == "outputs") {
      if (!value.is_array()) throw ValidationError("outputs", "outputs: expected an array");
      cfg.outputs.clear();
      for (const auto& item : value) {
        if (!item.is_string()) throw ValidationError("outputs", "outputs: entries must be strings");
        const auto name = item.get<std::string>();
        const auto& all = all_outputs();
        if (std::find(all.begin(), all.end(), name) == all.end()) {
          throw ValidationError("outputs", "outputs: unknown output \"" + name + "\"");
        }
        cfg.outputs.push_back(name);
      }
    } else if (key == "oracles") cfg.oracles = get_bool(value, key);
    else if (key == "seed") {
      if (!value.is_number_unsigned()) throw ValidationError("seed", "seed: expected a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "quadrature") {
      require_object(value, "quadrature");
      for (const auto& [qk, qv] : value.items()) {
        const std::string path = join_path("quadrature", qk);
        const double v = get_number(qv, path);
        if (!(v > 0.0)) throw ValidationError(path, path + ": must be > 0");
        if (qk == "abs_tol") cfg.quadrature.abs_tol = v;
        else if (qk == "rel_tol") cfg.quadrature.rel_tol = v;
        else if (qk == "max_evaluations") cfg.quadrature.max_evaluations = static_cast<int>(v);
        else unknown_key(path);
      }
    } else if (key == "feed_forward") {
      const auto s = value.is_string() ? value.get<std::string>() : std::string();
      if (s == "inverted") cfg.feed_forward = FeedForward::kInverted;
      else if (s == "direct") cfg.feed_forward = FeedForward::kDirect;
      else throw ValidationError(key, "feed_forward: expected \"inverted\" or \"direct\"");
    } else {
      unknown_key(key);
    }
  }

  if (has_sweep || has_from || has_to || has_steps) {
    if (!has_sweep) throw ValidationError("sweep", "sweep: parameter name missing");
    if (!has_from) throw ValidationError("from", "from: missing");
    if (!has_to) throw ValidationError("to", "to: missing");
    if (!has_steps) throw ValidationError("steps", "steps: missing");
    static const std::vector<std::string> names = {"G2", "G3", "n_m", "gamma_m", "Omega"};
    if (std::find(names.begin(), names.end(), sweep.parameter) == names.end()) {
      throw ValidationError("sweep", "sweep: unknown parameter \"" + sweep.parameter + "\"");
    }
    if (sweep.from == sweep.to) throw ValidationError("to", "to: must differ from from");
    if (sweep.parameter != "Omega" && (sweep.from < 0.0 || sweep.to < 0.0)) {
      throw ValidationError("from", "from/to: " + sweep.parameter + " must be >= 0");
    }
    cfg.sweep = sweep;
  }
  if (cfg.graphene && cfg.sweep && (cfg.sweep->parameter == "G2" || cfg.sweep->parameter == "G3")) {
    throw ValidationError("sweep", "sweep: couplings derived from graphene cannot also be swept");
  }
  return cfg;
}

SweepConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// ---------------------------------------------------------------------------
// Points and sweeps

namespace {

bool wants(const PointOptions& opt, const char* name) {
  return std::find(opt.outputs.begin(), opt.outputs.end(), name) != opt.outputs.end();
}

std::string describe(const DynamicsParams& p) {
  std::ostringstream s;
  s.precision(9);
  s << "(G2=" << p.G2 << ", G3=" << p.G3 << ", gamma2=" << p.gamma2 << ", gamma3=" << p.gamma3
    << ", gamma_m=" << p.gamma_m << ", n_m=" << p.n_m << ")";
  return s.str();
}

}  // namespace

SweepRow run_point(const DynamicsParams& p, const FilterPair& filters, const PointOptions& opt) {
  SweepRow row;
  try {
    const LinearSystem sys = make_linear_system(p);
    const auto report = stability(sys.A);
    if (wants(opt, "stability_margin")) row.margin = report.margin;
    row.stable = report.margin < -kStabilityTolerance;
    if (!row.stable) return row;

    const SpectralCM cm = filtered_output_cm(sys, filters, opt.quadrature);
    const TwoModeCM optical = extract_optical_blocks(cm.V);
    const MetricsResult m = compute_metrics(optical, opt.feed_forward, true);
    if (wants(opt, "E_N")) row.E_N = m.E_N;
    if (wants(opt, "eta_minus")) row.eta_minus = m.eta_minus;
    if (wants(opt, "F")) row.F = m.F;
    if (wants(opt, "F_opt")) row.F_opt = m.F_opt;
    row.err_est = cm.error_estimate;

    if (opt.oracles) {
      std::ostringstream bad;
      const auto nu = symplectic_eigenvalues(optical.assemble(), true);
      if (std::abs(nu[0] - m.eta_minus) > 1e-8 * std::max(1.0, m.eta_minus)) {
        bad << "eta closed form " << m.eta_minus << " vs symplectic " << nu[0] << "; ";
      }
      const double Fq = fidelity_quadrature(apply_feed_forward(optical, opt.feed_forward));
      if (std::abs(Fq - m.F) > 1e-4) bad << "F closed form " << m.F << " vs quadrature " << Fq << "; ";
      if (m.F > m.F_opt + 1e-9) bad << "F exceeds F_opt; ";
      row.oracle_mismatch = bad.str();
    }
  } catch (const Error& e) {
    row.E_N.reset();
    row.eta_minus.reset();
    row.F.reset();
    row.F_opt.reset();
    row.err_est.reset();
    row.error = std::string(e.what()) + " at " + describe(p);
  }
  return row;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg, int workers) {
  if (!cfg.sweep) throw ValidationError("sweep", "run_sweep: configuration has no sweep section");
  const auto values = cfg.sweep->grid();
  const DynamicsParams base = cfg.resolved_base();
  PointOptions opt;
  opt.quadrature = cfg.quadrature;
  opt.feed_forward = cfg.feed_forward;
  opt.outputs = cfg.outputs;
  opt.oracles = cfg.oracles;

  std::vector<SweepRow> rows(values.size());
  auto evaluate = [&](std::size_t i) {
    DynamicsParams p = base;
    FilterPair filters = cfg.filters;
    const double v = values[i];
    const auto& name = cfg.sweep->parameter;
    if (name == "G2") p.G2 = v;
    else if (name == "G3") p.G3 = v;
    else if (name == "n_m") p.n_m = v;
    else if (name == "gamma_m") p.gamma_m = v;
    else if (name == "Omega") {
      // Energy-conserving pair: the a3 filter sits at the mirrored frequency.
      filters.a2.Omega = v;
      filters.a3.Omega = -v;
    }
    SweepRow row = run_point(p, filters, opt);
    row.parameter = name;
    row.value = v;
    rows[i] = std::move(row);
  };

  if (workers <= 0) workers = default_worker_count();
  workers = std::max(1, std::min<int>(workers, static_cast<int>(values.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < values.size(); ++i) evaluate(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < values.size(); i += workers) evaluate(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Export

namespace {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

std::string format_cell(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

std::optional<double> parse_cell(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("csv: bad number \"" + s + "\"", 0, 0);
  }
  return v;
}

}  // namespace

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.parameter << ',' << format_double(r.value) << ',' << (r.stable ? "true" : "false") << ','
        << format_cell(r.E_N) << ',' << format_cell(r.eta_minus) << ',' << format_cell(r.F) << ','
        << format_cell(r.F_opt) << ',' << format_cell(r.margin) << ',' << format_cell(r.err_est)
        << '\n';
  }
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  if (rows.empty()) throw IoError("emit_csv: no rows to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_csv(rows, out);
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

std::vector<SweepRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("csv: unexpected header", 1, 1);
  std::vector<SweepRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 9) throw ParseError("csv: expected 9 fields", lineno, 1);
    SweepRow r;
    r.parameter = cells[0];
    r.value = parse_cell(cells[1]).value_or(0.0);
    r.stable = cells[2] == "true";
    r.E_N = parse_cell(cells[3]);
    r.eta_minus = parse_cell(cells[4]);
    r.F = parse_cell(cells[5]);
    r.F_opt = parse_cell(cells[6]);
    r.margin = parse_cell(cells[7]);
    r.err_est = parse_cell(cells[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_json(const std::vector<SweepRow>& rows, const std::string& path) {
  json out = json::array();
  auto cell = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  for (const auto& r : rows) {
    json row = {{"sweep_param", r.parameter}, {"value", r.value},         {"stable", r.stable},
                {"E_N", cell(r.E_N)},         {"eta_minus", cell(r.eta_minus)}, {"F", cell(r.F)},
                {"F_opt", cell(r.F_opt)},     {"margin", cell(r.margin)},  {"err_est", cell(r.err_est)}};
    if (!r.error.empty()) row["error"] = r.error;
    out.push_back(std::move(row));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << out.dump(2) << '\n';
  if (!f) throw IoError("write to " + path + " failed");
}

// ---------------------------------------------------------------------------
// Shape checks

std::string check_entanglement_peak(const std::vector<SweepRow>& rows, double G3) {
  // Boundaries between neighbouring grid points of different stability; the
  // stable side of the one closest to G2 = G3 anchors the peak.
  std::optional<std::size_t> anchor;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (rows[i].stable == rows[i + 1].stable) continue;
    const std::size_t stable_side = rows[i].stable ? i : i + 1;
    const double distance = std::abs(0.5 * (rows[i].value + rows[i + 1].value) - G3);
    if (distance < best) {
      best = distance;
      anchor = stable_side;
    }
  }
  std::optional<std::size_t> argmax;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].stable || !rows[i].E_N) continue;
    if (!argmax || *rows[i].E_N > *rows[*argmax].E_N) argmax = i;
  }
  if (!argmax) return "no stable point with E_N";
  std::ostringstream msg;
  if (anchor) {
    const auto gap = argmax > anchor ? *argmax - *anchor : *anchor - *argmax;
    if (gap > 1) {
      msg << "E_N peaks at grid index " << *argmax << " (value " << rows[*argmax].value
          << "), more than one step from the stability boundary at index " << *anchor;
      return msg.str();
    }
  }
  // Away from the peak E_N must not increase.
  for (std::size_t i = *argmax + 1; i < rows.size(); ++i) {
    if (rows[i].stable && rows[i - 1].stable && rows[i].E_N && rows[i - 1].E_N &&
        *rows[i].E_N > *rows[i - 1].E_N + 1e-9) {
      msg << "E_N increases between " << rows[i - 1].value << " and " << rows[i].value;
      return msg.str();
    }
  }
  for (std::size_t i = *argmax; i-- > 0;) {
    if (rows[i].stable && rows[i + 1].stable && rows[i].E_N && rows[i + 1].E_N &&
        *rows[i].E_N > *rows[i + 1].E_N + 1e-9) {
      msg << "E_N decreases towards the peak between " << rows[i].value << " and " << rows[i + 1].value;
      return msg.str();
    }
  }
  return {};
}

std::string check_monotone_decreasing(const std::vector<SweepRow>& rows,
                                      std::optional<double> SweepRow::*field) {
  const SweepRow* prev = nullptr;
  for (const auto& r : rows) {
    if (!r.stable || !(r.*field)) continue;
    if (prev && *(r.*field) >= *(prev->*field)) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "not strictly decreasing between " << prev->value << " (" << *(prev->*field) << ") and "
          << r.value << " (" << *(r.*field) << ")";
      return msg.str();
    }
    prev = &r;
  }
  return prev ? std::string() : std::string("no stable points");
}

}  // namespace cvtele
