// Acceptance gate: one PASS/FAIL line per criterion; the exit status is 0
// only if every requested criterion passes. Arguments select criteria 1..10
// (default: all).

#include "oracles.hpp"

#include <torusbesov/harness.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace torusbesov;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok)
      passed = false;
    if (!detail.empty())
      detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

const std::vector<int> kNs{8, 16, 24};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome fourier_convention() {
  Outcome o;
  const TorusGrid g(1024);
  double worst = 0.0;
  for (int lambda : {1, 32, 256}) {
    const Spectrum s = transform(GridFunction::sample(g, [&](double x) { return std::cos(lambda * x); }));
    for (std::int64_t xi = -g.nyquist() + 1; xi < g.nyquist(); ++xi) {
      const cplx want = std::abs(xi) == lambda ? cplx(kPi, 0.0) : cplx(0.0, 0.0);
      worst = std::max(worst, std::abs(s.at(xi) - want));
    }
  }
  o.require(worst <= 1e-12, "max error " + fmt(worst));
  return o;
}

Outcome partition_of_unity() {
  Outcome o;
  const auto r = partition_of_unity_property(20);
  o.require(r.passed, "max |sum - 1| = " + fmt(r.statistic) + " over |xi| <= 2^20");
  return o;
}

Outcome square_wave() {
  Outcome o;
  const std::int64_t cutoff = 1 << 12;
  const SquareWave h(cutoff);
  const Spectrum on_grid = h.on(TorusGrid(std::size_t{1} << 14));
  double closed = 0.0, quad = 0.0;
  for (std::int64_t xi = -cutoff; xi <= cutoff; ++xi) {
    const cplx want = xi % 2 != 0 ? cplx(0.0, -2.0 / static_cast<double>(xi)) : cplx(0.0, 0.0);
    closed = std::max({closed, std::abs(h(xi) - want), std::abs(on_grid.at(xi) - want)});
    if (std::abs(xi) <= 64)
      quad = std::max(quad, std::abs(h(xi) - oracle::square_wave_coefficient(xi)));
  }
  o.require(closed <= 1e-10, "closed form error " + fmt(closed));
  o.require(quad <= 1e-10, "quadrature error " + fmt(quad));
  return o;
}

// Lemma rows are shared by criteria 4 to 6 and computed once per (n, equation).
class LemmaCache {
public:
  const LemmaRow& get(int n, Equation e) {
    const auto key = std::make_pair(n, e == Equation::ch);
    auto it = rows_.find(key);
    if (it == rows_.end())
      it = rows_.emplace(key, lemma_row(n, e)).first;
    return it->second;
  }

private:
  std::map<std::pair<int, bool>, LemmaRow> rows_;
};

Outcome block_norms_of_h(LemmaCache&) {
  Outcome o;
  for (int n : kNs) {
    const FrequencyBand band(n);
    double lo = 1e300, hi = 0.0, path = 0.0;
    for (int j = band.j_lo(); j <= band.j_hi(); ++j) {
      const double b = square_wave_block_norm(j);
      lo = std::min(lo, b);
      hi = std::max(hi, b);
      const TorusGrid g = square_wave_block_grid(j);
      const GridFunction a = square_wave_block(j, g), d = square_wave_block_direct(j, g);
      for (std::size_t m = 0; m < g.size(); ++m)
        path = std::max(path, std::abs(a[m] - d[m]));
    }
    o.require(hi <= 4.0 * lo, "n=" + std::to_string(n) + " max/min " + fmt(hi / lo));
    o.require(path <= 1e-12, "n=" + std::to_string(n) + " direct vs multiplier " + fmt(path));
  }
  return o;
}

/// Largest block sup outside {n-1, n, n+1} relative to the datum sup; the
/// Novikov mean is taken out first since it sits in the low block by design.
double stray_blocks(int n, Equation e) {
  Spectrum s = make_datum(n, e, datum_grid(n)).spectrum;
  s.set(0, 0.0);
  const double scale = sup_norm(inverse(s));
  double worst = 0.0;
  for (int j = -1; j <= top_block(s.grid()); ++j)
    if (j < n - 1 || j > n + 1)
      worst = std::max(worst, block_peak(s, j));
  return worst / scale;
}

Outcome b1_scaling(LemmaCache& cache) {
  Outcome o;
  for (Equation e : {Equation::ch, Equation::novikov}) {
    std::vector<double> ratios;
    for (int n : kNs) {
      const double r = cache.get(n, e).lemma_e1_ratio;
      ratios.push_back(r);
      o.require(r >= 0.05 && r <= 20.0, std::string(equation_name(e)) + " n=" + std::to_string(n) + " ratio " + fmt(r));
    }
    o.require(spread(ratios) <= 4.0, std::string(equation_name(e)) + " spread " + fmt(spread(ratios)));
    double stray = 0.0;
    for (int n : kNs)
      stray = std::max(stray, stray_blocks(n, e));
    o.require(stray <= 1e-12, std::string(equation_name(e)) + " blocks outside n-1..n+1 " + fmt(stray));
  }
  return o;
}

Outcome band_quantities(LemmaCache& cache) {
  Outcome o;
  for (Equation e : {Equation::ch, Equation::novikov}) {
    std::vector<double> e2, e0;
    for (int n : kNs) {
      const auto& r = cache.get(n, e);
      o.require(r.lemma_e2_ratio > 0.0 && r.e0_band_ratio > 0.0,
                std::string(equation_name(e)) + " n=" + std::to_string(n) + " positive");
      e2.push_back(r.lemma_e2_ratio);
      e0.push_back(r.e0_band_ratio);
    }
    o.require(spread(e2) <= 4.0, std::string(equation_name(e)) + " slope quantity spread " + fmt(spread(e2)));
    o.require(spread(e0) <= 4.0, std::string(equation_name(e)) + " forcing quantity spread " + fmt(spread(e0)));
  }
  double mixed = 0.0;
  for (int n : kNs) {
    const double scale = cache.get(n, Equation::ch).lemma_e2_value;
    mixed = std::max(mixed, restricted_norm(mixed_term_spectrum(n, datum_grid(n)), 0, FrequencyBand(n)) / scale);
  }
  o.require(mixed <= 1e-12, "mixed term over the band " + fmt(mixed));
  return o;
}

Outcome solver() {
  Outcome o;
  const int n = 8;
  for (Equation e : {Equation::ch, Equation::novikov}) {
    const InflationDatum d = make_datum(n, e, datum_grid(n));
    SolverConfig cfg;
    cfg.T = default_horizon(n);
    const auto fwd = evolve(d, cfg);
    double drift = 0.0;
    const double h0 = fwd.diagnostics.front().h1_energy;
    for (const auto& dg : fwd.diagnostics)
      drift = std::max(drift, std::abs(dg.h1_energy - h0) / h0);
    o.require(fwd.ok() && drift <= 1e-8, std::string(equation_name(e)) + " H1 drift " + fmt(drift));

    SolverConfig back = cfg;
    back.equation = e;
    const auto bwd = evolve(time_reversed(fwd.final_state(), e), back, std::nullopt, false);
    const Spectrum rec = time_reversed(bwd.final_state(), e);
    const double rev = std::sqrt(l2_energy(rec - d.spectrum) / l2_energy(d.spectrum));
    o.require(bwd.ok() && rev <= 1e-6, std::string(equation_name(e)) + " time reversal " + fmt(rev));
  }

  const TorusGrid g(64);
  const GridFunction u = GridFunction::sample(g, [](double x) { return 0.5 * std::cos(x) + 0.3 * std::sin(2.0 * x) + 0.2; });
  for (Equation e : {Equation::ch, Equation::novikov}) {
    std::vector<Spectrum> finals;
    for (double dt : {0.04, 0.02, 0.01}) {
      SolverConfig cfg;
      cfg.equation = e;
      cfg.T = 1.0;
      cfg.dt = dt;
      cfg.cfl_safety = 1.0;
      finals.push_back(evolve(u, cfg, std::nullopt, false).final_state());
    }
    const double order = std::log2(std::sqrt(l2_energy(finals[0] - finals[1]) / l2_energy(finals[1] - finals[2])));
    o.require(order >= 3.8, std::string(equation_name(e)) + " RK4 order " + fmt(order));

    double steady = 0.0;
    for (double c : {-0.7, 0.3, 1.0}) {
      Spectrum s(g);
      s.set(0, kTwoPi * c);
      SolverConfig cfg;
      cfg.equation = e;
      cfg.T = 0.5;
      const GridFunction out = inverse(evolve(s, cfg, std::nullopt, false).final_state());
      for (double v : out.samples())
        steady = std::max(steady, std::abs(v - c));
    }
    o.require(steady <= 1e-12, std::string(equation_name(e)) + " constants " + fmt(steady));
  }
  return o;
}

Outcome inflation() {
  Outcome o;
  ExperimentConfig cfg;
  cfg.equation = Equation::ch;
  const int n = 16;
  std::ostringstream log;
  const InflationSeries s = inflation_series(cfg, n, log);
  o.require(s.status == RunStatus::completed, std::string("run ") + status_name(s.status));
  const auto& rows = s.rows;
  if (rows.size() < 3) {
    o.require(false, "too few records");
    return o;
  }
  // The band blocks of the datum vanish, so growth is measured from the first record after t = 0.
  const double initial = rows[1].d.b1_band_norm, final = rows.back().d.b1_band_norm;
  o.require(final >= 5.0 * initial, "final/initial " + fmt(final / initial));
  bool increasing = true;
  double lo = 1e300, hi = 0.0, correction = 0.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (k > 1 && rows[k].d.b1_band_norm <= rows[k - 1].d.b1_band_norm)
      increasing = false;
    const double main = rows[k].e0_band_times_t;
    const double track = rows[k].d.b1_band_norm / main;
    lo = std::min(lo, track);
    hi = std::max(hi, track);
    correction = std::max(correction, rows[k].e_drift_band / main);
  }
  o.require(increasing, "band norm increasing in t");
  o.require(lo >= 0.25 && hi <= 4.0, "band norm / (t x forcing) in [" + fmt(lo) + ", " + fmt(hi) + "]");
  o.require(correction < 0.5, "correction / main term max " + fmt(correction));
  o.require(s.h1_drift <= 1e-8, "H1 drift " + fmt(s.h1_drift));
  return o;
}

Outcome flow() {
  Outcome o;
  std::ostringstream log;
  for (Equation e : {Equation::ch, Equation::novikov}) {
    ExperimentConfig cfg;
    cfg.equation = e;
    const FlowReport rep = flow_report(cfg, 8, log);
    bool monotone = rep.status == RunStatus::completed;
    double inv = 0.0;
    for (const auto& r : rep.rows) {
      monotone = monotone && r.monotone;
      inv = std::max(inv, r.sup_invariance_rel_error);
    }
    o.require(monotone, std::string(equation_name(e)) + " monotone at every record");
    o.require(inv <= 1e-6, std::string(equation_name(e)) + " sup invariance " + fmt(inv));

    cfg.field = FlowField::constant;
    cfg.constant = 0.7;
    const FlowReport c = flow_report(cfg, 8, log);
    double affine = 0.0;
    for (const auto& r : c.rows)
      affine = std::max(affine, r.affine_error);
    o.require(affine <= 1e-10, std::string(equation_name(e)) + " constant field " + fmt(affine));
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "torusbesov_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::string> runs{"lemmas --n 8,16 --equation ch", "lemmas --n 8,16 --equation novikov",
                                      "inflate --n 8 --equation ch", "inflate --n 8 --equation novikov",
                                      "properties --seed 2024", "flowcheck --n 8 --equation ch"};
  for (const char* tag : {"a", "b"})
    for (const auto& r : runs) {
      const std::string cmd =
          std::string(TORUSBESOV_CLI) + " " + r + " --out " + (root / tag).string() + " >/dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0)
        o.require(false, "run failed: " + r);
    }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const fs::path other = root / "b" / entry.path().filename();
    ++files;
    o.require(fs::exists(other) && slurp(entry.path()) == slurp(other), entry.path().filename().string());
  }
  o.require(files >= 7, std::to_string(files) + " CSV files compared");
  fs::remove_all(root);
  return o;
}

} // namespace

int main(int argc, char** argv) {
  LemmaCache cache;
  const std::map<int, std::function<Outcome()>> criteria{
      {1, fourier_convention},
      {2, partition_of_unity},
      {3, square_wave},
      {4, [&] { return block_norms_of_h(cache); }},
      {5, [&] { return b1_scaling(cache); }},
      {6, [&] { return band_quantities(cache); }},
      {7, solver},
      {8, inflation},
      {9, flow},
      {10, determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i)
    selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (const auto& [k, _] : criteria)
      selected.push_back(k);

  bool all = true;
  for (int k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::cout << "criterion " << k << ": FAIL unknown criterion\n";
      all = false;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = it->second();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1fs", elapsed(t0));
    std::cout << "criterion " << k << ": " << (out.passed ? "PASS" : "FAIL") << " (" << secs << ") " << out.detail
              << std::endl;
    all = all && out.passed;
  }
  return all ? 0 : 1;
}
