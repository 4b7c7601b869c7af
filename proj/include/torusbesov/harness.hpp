#pragma once

// The experiment subcommands: lemma quantities, inflation runs, property
// suites and flow-map checks, each writing CSV files into one directory.

#include "torusbesov/evolution.hpp"
#include "torusbesov/flow.hpp"
#include "torusbesov/initial_data.hpp"
#include "torusbesov/littlewood_paley.hpp"
#include "torusbesov/offgrid.hpp"
#include "torusbesov/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusbesov {

/// Invalid user input; maps to exit status 2 like ResolutionError.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ExitCode : int { pass = 0, check_failure = 1, config_error = 2 };

enum class FlowField { datum, zero, constant };

inline const char* field_name(FlowField f) {
  switch (f) {
  case FlowField::datum:
    return "datum";
  case FlowField::zero:
    return "zero";
  case FlowField::constant:
    return "constant";
  }
  return "?";
}

struct ExperimentConfig {
  std::string subcommand;
  std::vector<int> n_list;
  Equation equation = Equation::ch;
  /// 0 means 1/log n.
  double T = 0.0;
  /// 0 means the CFL-derived step.
  double dt = 0.0;
  std::filesystem::path out = "out";
  int record_stride = 0;
  std::uint64_t seed = 1;
  FlowField field = FlowField::datum;
  double constant = 0.5;
  /// Bytes the lemma rows may use; 0 reads MemAvailable.
  std::uint64_t memory_budget = 0;

  double horizon(int n) const { return T > 0.0 ? T : default_horizon(n); }

  void validate() const {
    static const char* const known[] = {"lemmas", "inflate", "properties", "flowcheck"};
    if (std::find(std::begin(known), std::end(known), subcommand) == std::end(known))
      throw ConfigError("unknown subcommand '" + subcommand + "'");
    if (subcommand != "properties" && n_list.empty())
      throw ConfigError("--n needs at least one value");
    for (int n : n_list)
      if (n < 8 || n % 8 != 0)
        throw ConfigError("--n values must be multiples of 8 that are at least 8, got " +
                          std::to_string(n));
    if (T < 0.0 || !std::isfinite(T))
      throw ConfigError("--T must be positive");
    if (dt < 0.0 || !std::isfinite(dt))
      throw ConfigError("--dt must be positive");
    if (record_stride < 0)
      throw ConfigError("--record-stride must be non-negative");
    if (!std::isfinite(constant))
      throw ConfigError("--constant must be finite");
  }
};

// ---- output helpers ---------------------------------------------------------

/// Shortest round-trip text of a double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_row(std::initializer_list<double> values) {
  std::string s;
  for (double v : values) {
    if (!s.empty())
      s += ',';
    s += fmt(v);
  }
  return s;
}

class CsvFile {
public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), os_(path) {
    if (!os_)
      throw ConfigError("cannot write " + path.string());
    os_ << header << '\n';
  }
  void row(const std::string& line) { os_ << line << '\n'; }
  void comment(const std::string& text) { os_ << "# " << text << '\n'; }
  const std::filesystem::path& path() const noexcept { return path_; }

private:
  std::filesystem::path path_;
  std::ofstream os_;
};

inline void prepare_output(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ConfigError("cannot create output directory " + dir.string());
  const auto probe = dir / ".torusbesov_probe";
  {
    std::ofstream f(probe);
    if (!f)
      throw ConfigError("output directory " + dir.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
}

/// A named pass/fail line for the run summary.
struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

inline bool report_checks(const std::vector<Check>& checks, std::ostream& log) {
  bool all = true;
  for (const auto& c : checks) {
    log << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": ") << c.detail
        << '\n';
    all = all && c.passed;
  }
  return all;
}

inline double spread(const std::vector<double>& v) {
  if (v.empty())
    return 1.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

inline TorusGrid datum_grid(int n) { return TorusGrid::with_exponent(n + 3); }

// ---- lemmas -----------------------------------------------------------------

inline const char* const kLemmaHeader =
    "n,j_lo,j_hi,block_norm_h_min,block_norm_h_max,u0_sup,u0_dx_sup,u0_b1_norm,lemma_e1_ratio,"
    "lemma_e2_value,lemma_e2_ratio,e0_band_value,e0_band_ratio";

struct LemmaRow {
  int n = 0;
  int j_lo = 0, j_hi = 0;
  double block_norm_h_min = 0.0, block_norm_h_max = 0.0;
  double u0_sup = 0.0, u0_dx_sup = 0.0, u0_b1_norm = 0.0;
  double lemma_e1_ratio = 0.0;
  double lemma_e2_value = 0.0, lemma_e2_ratio = 0.0;
  double e0_band_value = 0.0, e0_band_ratio = 0.0;

  std::string csv() const {
    return csv_row({double(n), double(j_lo), double(j_hi), block_norm_h_min, block_norm_h_max, u0_sup,
                    u0_dx_sup, u0_b1_norm, lemma_e1_ratio, lemma_e2_value, lemma_e2_ratio,
                    e0_band_value, e0_band_ratio});
  }
};

/// n^{-2/5} log n for CH, n^{-1/4} log n for Novikov.
inline double b1_scale(int n, Equation e) {
  const double dn = n;
  return std::pow(dn, e == Equation::ch ? -0.4 : -0.25) * std::log(dn);
}

inline double log_squared(int n) { return std::pow(std::log(static_cast<double>(n)), 2); }

/// Peak memory of one lemma row: the datum spectrum plus two work arrays,
/// with headroom for the compact block grids and the FFT plans (measured
/// peak at n = 24 is 3.5 arrays).
inline std::uint64_t lemma_row_bytes(int n) {
  const std::uint64_t array = (std::uint64_t{1} << (n + 3)) * sizeof(double) + 64;
  return array * 4;
}

inline std::uint64_t available_memory() {
  std::ifstream f("/proc/meminfo");
  std::string key;
  std::uint64_t kib = 0;
  std::string unit;
  while (f >> key >> kib >> unit)
    if (key == "MemAvailable:")
      return kib * 1024;
  return std::numeric_limits<std::uint64_t>::max();
}

/// All lemma quantities of one n. The norms of u0 go through the same calls
/// as the trajectory diagnostics, so the t = 0 inflation row matches exactly.
inline LemmaRow lemma_row(int n, Equation eq) {
  const FrequencyBand band(n);
  const TorusGrid grid = datum_grid(n);
  LemmaRow r;
  r.n = n;
  r.j_lo = band.j_lo();
  r.j_hi = band.j_hi();
  r.block_norm_h_min = std::numeric_limits<double>::infinity();
  for (int j = band.j_lo(); j <= band.j_hi(); ++j) {
    const double b = square_wave_block_norm(j);
    r.block_norm_h_min = std::min(r.block_norm_h_min, b);
    r.block_norm_h_max = std::max(r.block_norm_h_max, b);
  }

  const DatumShape shape = datum_shape(n, eq);
  Spectrum s = assemble_datum(grid, shape, fn_coefficients(n));
  band.require_resolved(grid);
  r.u0_sup = sup_norm(inverse(s));
  r.u0_b1_norm = besov_norm(s, BesovSpec(1.0, std::numeric_limits<double>::infinity(), 1.0));
  r.lemma_e1_ratio = r.u0_b1_norm / b1_scale(n, eq);

  Spectrum q(grid);
  {
    GridFunction ux = inverse(derivative(s));
    r.u0_dx_sup = sup_norm(ux);
    if (eq == Equation::ch) {
      q = squared_slope_spectrum(std::move(ux));
    } else {
      const GridFunction v = inverse(std::move(s));
      q = weighted_squared_slope_spectrum(v, std::move(ux));
    }
  }
  r.lemma_e2_value = restricted_norm(q, 0, band);
  r.lemma_e2_ratio = r.lemma_e2_value / log_squared(n);
  r.e0_band_value = restricted_norm(forcing_from_product(std::move(q), eq), 1, band);
  r.e0_band_ratio = r.e0_band_value / log_squared(n);
  return r;
}

struct LemmaReport {
  std::vector<LemmaRow> rows;
  std::vector<std::string> skipped;
  std::vector<Check> checks;
};

inline LemmaReport lemma_report(const ExperimentConfig& cfg, std::ostream& log) {
  LemmaReport rep;
  const std::uint64_t budget = cfg.memory_budget > 0 ? cfg.memory_budget : available_memory();
  for (int n : cfg.n_list) {
    const std::uint64_t need = lemma_row_bytes(n);
    if (need > budget) {
      rep.skipped.push_back("skipped n=" + std::to_string(n) + ": needs about " +
                            std::to_string(need >> 20) + " MiB, " + std::to_string(budget >> 20) +
                            " MiB available");
      log << rep.skipped.back() << '\n';
      continue;
    }
    rep.rows.push_back(lemma_row(n, cfg.equation));
    log << "lemmas n=" << n << " done\n";
  }

  auto finite_positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  std::vector<double> e1, e2, e0;
  for (const auto& r : rep.rows) {
    const std::string tag = "n=" + std::to_string(r.n);
    rep.checks.push_back({"block norms of h within 4x over the band, " + tag,
                          r.block_norm_h_max <= 4.0 * r.block_norm_h_min && r.block_norm_h_min > 0.0,
                          "max/min=" + fmt(r.block_norm_h_max / r.block_norm_h_min)});
    rep.checks.push_back({"B1 norm ratio in [0.05, 20], " + tag,
                          r.lemma_e1_ratio >= 0.05 && r.lemma_e1_ratio <= 20.0,
                          "ratio=" + fmt(r.lemma_e1_ratio)});
    const bool finite = finite_positive(r.u0_sup) && finite_positive(r.u0_dx_sup) &&
                        finite_positive(r.lemma_e2_value) && finite_positive(r.e0_band_value);
    rep.checks.push_back({"band quantities finite and positive, " + tag, finite, ""});
    e1.push_back(r.lemma_e1_ratio);
    e2.push_back(r.lemma_e2_ratio);
    e0.push_back(r.e0_band_ratio);
  }
  if (rep.rows.size() > 1) {
    rep.checks.push_back({"B1 norm ratio stable within 4x across n", spread(e1) <= 4.0,
                          "spread=" + fmt(spread(e1))});
    rep.checks.push_back({"slope band quantity / (log n)^2 stable within 4x", spread(e2) <= 4.0,
                          "spread=" + fmt(spread(e2))});
    rep.checks.push_back({"forcing band quantity / (log n)^2 stable within 4x", spread(e0) <= 4.0,
                          "spread=" + fmt(spread(e0))});
  }
  return rep;
}

inline std::filesystem::path lemmas_path(const ExperimentConfig& cfg) {
  return cfg.out / ("lemmas_" + std::string(equation_name(cfg.equation)) + ".csv");
}

inline ExitCode cmd_lemmas(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  prepare_output(cfg.out);
  const LemmaReport rep = lemma_report(cfg, log);
  CsvFile csv(lemmas_path(cfg), kLemmaHeader);
  for (const auto& r : rep.rows)
    csv.row(r.csv());
  for (const auto& s : rep.skipped)
    csv.comment(s);
  log << "wrote " << csv.path().string() << '\n';
  return report_checks(rep.checks, log) ? ExitCode::pass : ExitCode::check_failure;
}

// ---- inflation ----------------------------------------------------------------

inline const char* const kInflateHeader =
    "t,b1_norm,b1_band_norm,sup_norm,dx_sup_norm,h1_energy,e_drift_band,e0_band_times_t";

struct InflationRow {
  double t = 0.0;
  Diagnostics d;
  /// sum over the band of 2^j sup_x |Delta_j E(t)(phi(x)) - Delta_j E_0(x)|.
  double e_drift_band = 0.0;
  /// t sum over the band of 2^j ||Delta_j E_0||.
  double e0_band_times_t = 0.0;

  std::string csv() const {
    return csv_row({t, d.b1_norm, d.b1_band_norm, d.sup_norm, d.dx_sup_norm, d.h1_energy, e_drift_band,
                    e0_band_times_t});
  }
};

struct InflationSeries {
  int n = 0;
  Equation equation = Equation::ch;
  std::vector<InflationRow> rows;
  RunStatus status = RunStatus::completed;
  std::string message;
  double e0_band = 0.0;
  double h1_drift = 0.0;
  double max_b1 = 0.0;
};

inline SolverConfig solver_config(const ExperimentConfig& cfg, int n) {
  SolverConfig s;
  s.equation = cfg.equation;
  s.T = cfg.horizon(n);
  s.dt = cfg.dt;
  s.record_stride = cfg.record_stride;
  return s;
}

/// Band blocks of the forcing on the smallest grid that carries them.
inline std::vector<Spectrum> band_forcing_blocks(const Spectrum& u, Equation eq, const FrequencyBand& band) {
  const Spectrum e = forcing_spectrum(u, eq);
  std::vector<Spectrum> out;
  for (int j = band.j_lo(); j <= band.j_hi(); ++j)
    out.push_back(compact_block_spectrum(e, j));
  return out;
}

inline InflationSeries inflation_series(const ExperimentConfig& cfg, int n, std::ostream& log) {
  const TorusGrid grid = datum_grid(n);
  const InflationDatum datum = make_datum(n, cfg.equation, grid);
  const FrequencyBand& band = datum.band;
  band.require_resolved(grid);

  InflationSeries out;
  out.n = n;
  out.equation = cfg.equation;
  const TrajectoryRecord rec = evolve(datum, solver_config(cfg, n));
  log << "inflate n=" << n << ": " << rec.steps << " steps, dt=" << fmt(rec.dt) << ", "
      << rec.times.size() << " records, " << status_name(rec.status) << '\n';
  out.status = rec.status;
  out.message = rec.message;

  // Delta_j E_0 on the grid points, then Delta_j E(t) at the particle positions.
  const auto e0_blocks = band_forcing_blocks(rec.states.front(), cfg.equation, band);
  std::vector<std::vector<double>> e0_values;
  for (const auto& b : e0_blocks) {
    std::vector<double> x(grid.size());
    for (std::size_t m = 0; m < x.size(); ++m)
      x[m] = grid.point(m);
    e0_values.push_back(evaluate_at(b, x));
  }
  for (std::size_t i = 0; i < e0_blocks.size(); ++i)
    out.e0_band += std::exp2(band.j_lo() + static_cast<int>(i)) * peak_norm(e0_blocks[i]);

  FlowIntegrator flow(rec);
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    if (k > 0)
      flow.advance();
    InflationRow row;
    row.t = rec.times[k];
    row.d = rec.diagnostics[k];
    row.e0_band_times_t = row.t * out.e0_band;
    if (k > 0) {
      const auto blocks = band_forcing_blocks(rec.states[k], cfg.equation, band);
      const auto& pos = flow.current().positions;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto moved = evaluate_at(blocks[i], pos);
        double worst = 0.0;
        for (std::size_t m = 0; m < moved.size(); ++m)
          worst = std::max(worst, std::abs(moved[m] - e0_values[i][m]));
        row.e_drift_band += std::exp2(band.j_lo() + static_cast<int>(i)) * worst;
      }
    }
    out.rows.push_back(row);
  }

  const double h0 = out.rows.front().d.h1_energy;
  for (const auto& r : out.rows) {
    out.h1_drift = std::max(out.h1_drift, std::abs(r.d.h1_energy - h0) / h0);
    out.max_b1 = std::max(out.max_b1, r.d.b1_norm);
  }
  return out;
}

inline std::filesystem::path inflate_path(const ExperimentConfig& cfg, int n) {
  return cfg.out / ("inflate_" + std::string(equation_name(cfg.equation)) + "_n" + std::to_string(n) + ".csv");
}

inline ExitCode cmd_inflate(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  prepare_output(cfg.out);
  std::vector<Check> checks;
  for (int n : cfg.n_list) {
    const InflationSeries s = inflation_series(cfg, n, log);
    CsvFile csv(inflate_path(cfg, n), kInflateHeader);
    for (const auto& r : s.rows)
      csv.row(r.csv());
    if (s.status != RunStatus::completed)
      csv.comment(std::string("abort: ") + status_name(s.status) + " " + s.message);
    log << "wrote " << csv.path().string() << '\n';

    const std::string tag = "n=" + std::to_string(n);
    const double b1_0 = s.rows.front().d.b1_norm;
    log << "max over t of the B1 norm " << fmt(s.max_b1) << ", ratio to t=0 " << fmt(s.max_b1 / b1_0)
        << '\n';
    checks.push_back({"run completed, " + tag, s.status == RunStatus::completed, s.message});
    checks.push_back({"H1 energy drift <= 1e-8, " + tag, s.h1_drift <= 1e-8, "drift=" + fmt(s.h1_drift)});
  }
  return report_checks(checks, log) ? ExitCode::pass : ExitCode::check_failure;
}

// ---- properties -----------------------------------------------------------------

inline std::filesystem::path properties_path(const ExperimentConfig& cfg) {
  return cfg.out / "properties.csv";
}

inline ExitCode cmd_properties(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  prepare_output(cfg.out);
  const auto results = run_property_suites(cfg.seed);
  CsvFile csv(properties_path(cfg), "name,draws,statistic,threshold,passed,detail");
  std::vector<Check> checks;
  for (const auto& r : results) {
    csv.row(r.name + "," + std::to_string(r.draws) + "," + fmt(r.statistic) + "," + fmt(r.threshold) + "," +
            (r.passed ? "1" : "0") + ",\"" + r.detail + "\"");
    std::string detail = fmt(r.statistic) + " vs " + fmt(r.threshold);
    if (!r.passed)
      detail += " (seed=" + std::to_string(cfg.seed) + " " + r.detail + ")";
    checks.push_back({r.name, r.passed, detail});
  }
  log << "wrote " << csv.path().string() << '\n';
  return report_checks(checks, log) ? ExitCode::pass : ExitCode::check_failure;
}

// ---- flow checks -------------------------------------------------------------

inline const char* const kFlowHeader = "t,monotone,sup_invariance_rel_error,max_displacement,affine_error";

struct FlowRow {
  double t = 0.0;
  bool monotone = true;
  double sup_invariance_rel_error = 0.0;
  double max_displacement = 0.0;
  /// max |phi(x) - x - c t| with c the speed of the initial mean.
  double affine_error = 0.0;
};

struct FlowReport {
  std::vector<FlowRow> rows;
  TransportCheck transport;
  RunStatus status = RunStatus::completed;
  std::string message;
};

inline Spectrum flow_field(const ExperimentConfig& cfg, int n, const TorusGrid& grid) {
  switch (cfg.field) {
  case FlowField::datum:
    return make_datum(n, cfg.equation, grid).spectrum;
  case FlowField::zero:
    return Spectrum(grid);
  case FlowField::constant: {
    Spectrum s(grid);
    s.set(0, kTwoPi * cfg.constant);
    return s;
  }
  }
  return Spectrum(grid);
}

/// Block sup invariance |sup_x |Delta_j u(phi(x))| - sup |Delta_j u|| / sup |Delta_j u|,
/// worst over the blocks carrying content.
inline double sup_invariance_error(const Spectrum& u, const FlowMap& phi) {
  const double floor = 1e-10 * std::max(sup_norm(inverse(u)), 1e-300);
  double worst = 0.0;
  for (int j = -1; j <= top_block(u.grid()); ++j) {
    if (detail::block_is_zero(u, j))
      continue;
    const Spectrum b = block_spectrum(u, j);
    const double direct = peak_norm(b);
    if (direct < floor)
      continue;
    worst = std::max(worst, std::abs(peak_norm_along(b, phi.positions) - direct) / direct);
  }
  return worst;
}

/// A fixed smooth profile transported by the frozen speed.
inline Spectrum transport_probe(const TorusGrid& grid) {
  return transform(GridFunction::sample(
      grid, [](double x) { return std::sin(2.0 * x) + 0.5 * std::cos(5.0 * x) + 0.1 * std::sin(9.0 * x); }));
}

inline FlowReport flow_report(const ExperimentConfig& cfg, int n, std::ostream& log) {
  const TorusGrid grid = datum_grid(n);
  const Spectrum u0 = flow_field(cfg, n, grid);
  SolverConfig sc = solver_config(cfg, n);
  const TrajectoryRecord rec = evolve(u0, sc, std::nullopt, false);
  log << "flowcheck n=" << n << " field=" << field_name(cfg.field) << ": " << rec.times.size() << " records, "
      << status_name(rec.status) << '\n';

  FlowReport out;
  out.status = rec.status;
  out.message = rec.message;
  const double c = mean_value(rec.states.front());
  const double drift = cfg.equation == Equation::ch ? c : c * c;
  FlowIntegrator flow(rec);
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    if (k > 0)
      flow.advance();
    const FlowMap& phi = flow.current();
    FlowRow row;
    row.t = rec.times[k];
    row.monotone = phi.monotone();
    row.sup_invariance_rel_error = sup_invariance_error(rec.states[k], phi);
    for (std::size_t m = 0; m < grid.size(); ++m) {
      const double x = grid.point(m);
      row.max_displacement = std::max(row.max_displacement, std::abs(phi.positions[m] - x));
      row.affine_error = std::max(row.affine_error, std::abs(phi.positions[m] - x - drift * row.t));
    }
    out.rows.push_back(row);
  }

  out.transport = frozen_transport_check(transport_speed(u0, cfg.equation), transport_probe(grid),
                                         sc.T, 200, {0, 1, 2, 3});
  return out;
}

inline std::filesystem::path flowcheck_path(const ExperimentConfig& cfg, int n, const char* suffix = "") {
  return cfg.out / ("flowcheck_" + std::string(equation_name(cfg.equation)) + "_" + field_name(cfg.field) + "_n" +
                    std::to_string(n) + suffix + ".csv");
}

inline ExitCode cmd_flowcheck(const ExperimentConfig& cfg, std::ostream& log = std::cout) {
  prepare_output(cfg.out);
  std::vector<Check> checks;
  for (int n : cfg.n_list) {
    const FlowReport rep = flow_report(cfg, n, log);
    CsvFile csv(flowcheck_path(cfg, n), kFlowHeader);
    bool monotone = true;
    double inv = 0.0, disp = 0.0, affine = 0.0;
    for (const auto& r : rep.rows) {
      csv.row(fmt(r.t) + "," + (r.monotone ? "1" : "0") + "," +
              csv_row({r.sup_invariance_rel_error, r.max_displacement, r.affine_error}));
      monotone = monotone && r.monotone;
      inv = std::max(inv, r.sup_invariance_rel_error);
      disp = std::max(disp, r.max_displacement);
      affine = std::max(affine, r.affine_error);
    }
    if (rep.status != RunStatus::completed)
      csv.comment(std::string("abort: ") + status_name(rep.status) + " " + rep.message);
    CsvFile tcsv(flowcheck_path(cfg, n, "_transport"), "t,identity_error,advection_error,monotone");
    tcsv.row(csv_row({rep.transport.t, rep.transport.identity_error, rep.transport.advection_error}) + "," +
             (rep.transport.phi.monotone() ? "1" : "0"));
    log << "wrote " << csv.path().string() << " and " << tcsv.path().string() << '\n';

    const std::string tag = "n=" + std::to_string(n);
    checks.push_back({"run completed, " + tag, rep.status == RunStatus::completed, rep.message});
    checks.push_back({"flow monotone at every record, " + tag, monotone, ""});
    checks.push_back({"block sup invariance <= 1e-6, " + tag, inv <= 1e-6, fmt(inv)});
    if (cfg.field == FlowField::zero)
      checks.push_back({"zero field leaves every error column <= 1e-14, " + tag,
                        inv <= 1e-14 && disp <= 1e-14 && affine <= 1e-14, fmt(std::max({inv, disp, affine}))});
    if (cfg.field == FlowField::constant)
      checks.push_back({"constant field gives x + ct to 1e-10, " + tag, affine <= 1e-10, fmt(affine)});
    checks.push_back({"transport identity <= 1e-6, " + tag, rep.transport.identity_error <= 1e-6,
                      fmt(rep.transport.identity_error)});
    // v o phi = v0 holds only up to the truncation of the advected products,
    // which is exact for a spatially constant speed.
    if (cfg.field != FlowField::datum)
      checks.push_back({"pure advection v(t) o phi = v0 to 1e-6, " + tag, rep.transport.advection_error <= 1e-6,
                        fmt(rep.transport.advection_error)});
  }
  return report_checks(checks, log) ? ExitCode::pass : ExitCode::check_failure;
}

// ---- dispatch ---------------------------------------------------------------------

/// Runs one subcommand, mapping configuration and resolution errors to exit status 2.
inline int run_experiment(const ExperimentConfig& cfg, std::ostream& log = std::cout,
                          std::ostream& err = std::cerr) {
  try {
    cfg.validate();
    ExitCode code = ExitCode::pass;
    if (cfg.subcommand == "lemmas")
      code = cmd_lemmas(cfg, log);
    else if (cfg.subcommand == "inflate")
      code = cmd_inflate(cfg, log);
    else if (cfg.subcommand == "properties")
      code = cmd_properties(cfg, log);
    else
      code = cmd_flowcheck(cfg, log);
    return static_cast<int>(code);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
  } catch (const ResolutionError& e) {
    err << "resolution error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
  }
  return static_cast<int>(ExitCode::config_error);
}

} // namespace torusbesov
