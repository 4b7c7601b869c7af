// Builds the CH inflation datum for a small n, evolves it to 1/log n and
// prints how the band norm grows next to the linear-in-t forcing prediction.

#include <torusbesov/harness.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>

using namespace torusbesov;

int main(int argc, char** argv) {
  const int n = argc > 1 ? std::atoi(argv[1]) : 8;
  ExperimentConfig cfg;
  cfg.equation = Equation::ch;
  const InflationSeries s = inflation_series(cfg, n, std::cerr);

  std::printf("%10s %14s %14s %14s\n", "t", "band norm", "t * forcing", "correction");
  const std::size_t step = std::max<std::size_t>(1, s.rows.size() / 10);
  for (std::size_t k = 0; k < s.rows.size(); k += step) {
    const auto& r = s.rows[k];
    std::printf("%10.5f %14.6e %14.6e %14.6e\n", r.t, r.d.b1_band_norm, r.e0_band_times_t, r.e_drift_band);
  }
  std::printf("B1 norm: %.6f at t = 0, max %.6f over the run\n", s.rows.front().d.b1_norm, s.max_b1);
  return s.status == RunStatus::completed ? 0 : 1;
}
