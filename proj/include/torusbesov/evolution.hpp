#pragma once

// Dealiased pseudospectral integration of
//   CH:      u_t = -u u_x - d_x L (u^2 + u_x^2 / 2)
//   Novikov: u_t = -u^2 u_x - L(u_x^3) / 2 - d_x L (3/2 u u_x^2 + u^3)
// with L = (1 - d_xx)^{-1}, plus the fields E, F and E_0 driving the
// band-norm growth.

#include "torusbesov/initial_data.hpp"
#include "torusbesov/littlewood_paley.hpp"
#include "torusbesov/spectral.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace torusbesov {

inline DealiasRule dealias_rule(Equation e) {
  return e == Equation::ch ? DealiasRule::quadratic : DealiasRule::cubic;
}

/// Below unit speed the CFL rule pins dt to the grid spacing, and RK4 then
/// loses H^1 energy through the phase error of the fast modes. The Novikov
/// data carry an O(1) mean, which makes this far worse than for CH.
inline double default_cfl_safety(Equation e) { return e == Equation::ch ? 0.5 : 1.0 / 32.0; }

struct SolverConfig {
  Equation equation = Equation::ch;
  double T = 1.0;
  /// Fixed step; 0 picks the CFL limit of the initial state, rounded so T/dt is an integer.
  double dt = 0.0;
  /// 0 picks default_cfl_safety(equation).
  double cfl_safety = 0.0;
  /// Steps between records; 0 aims at about 100 records.
  int record_stride = 0;
  double dt_floor = 1e-12;
  /// Abort once sup |u| exceeds this multiple of max(sup |u0|, the H^1 bound on sup |u0|).
  double blowup_factor = 1e3;

  DealiasRule rule() const { return dealias_rule(equation); }
  double safety() const { return cfl_safety > 0.0 ? cfl_safety : default_cfl_safety(equation); }

  void validate() const {
    if (!(T > 0.0) || !std::isfinite(T))
      throw std::invalid_argument("SolverConfig: T must be positive");
    if (dt < 0.0 || !std::isfinite(dt))
      throw std::invalid_argument("SolverConfig: dt must be positive (or 0 for automatic)");
    if (!(cfl_safety >= 0.0) || cfl_safety > 1.0)
      throw std::invalid_argument("SolverConfig: cfl_safety must lie in (0, 1] (or 0 for the default)");
    if (record_stride < 0)
      throw std::invalid_argument("SolverConfig: record_stride must be >= 0");
  }
};

/// Largest step the CFL rule admits for a state with the given sup norm.
inline double cfl_limit(const TorusGrid& grid, Equation e, double sup, double safety) {
  const double speed = e == Equation::ch ? sup : sup * sup;
  return safety * grid.spacing() / std::max(1.0, speed);
}

/// Evaluates the right-hand side on the Fourier side with preallocated buffers.
class RhsWorkspace {
public:
  RhsWorkspace(TorusGrid grid, Equation e)
      : grid_(grid), eq_(e), u_(grid.size()), ux_(grid.size()), a_(grid.size()), b_(grid.size()),
        c_(e == Equation::novikov ? grid.size() : 0),
        kmax_(static_cast<std::size_t>(retained_max(grid, dealias_rule(e)))) {}

  const TorusGrid& grid() const noexcept { return grid_; }
  Equation equation() const noexcept { return eq_; }

  /// out = rhs(u); both are spectra on the workspace grid.
  void operator()(const Spectrum& u, Spectrum& out) {
    require_same_grid(grid_, u.grid(), "rhs");
    load(u);
    if (eq_ == Equation::ch)
      ch(out);
    else
      novikov(out);
    last_mean_ = std::abs(out.half()[0]);
  }

  /// Sup of the state and whether every sample was finite, from the last call.
  double last_sup() const noexcept { return last_sup_; }
  bool last_finite() const noexcept { return last_finite_; }
  /// |rhs coefficient at xi = 0| from the last call.
  double last_mean_rhs() const noexcept { return last_mean_; }

private:
  void load(const Spectrum& s) {
    const auto src = s.half();
    auto u = u_.complex();
    auto ux = ux_.complex();
    const std::size_t nyq = grid_.size() / 2;
    for (std::size_t k = 0; k < nyq; ++k) {
      u[k] = src[k];
      ux[k] = cplx(-static_cast<double>(k) * src[k].imag(), static_cast<double>(k) * src[k].real());
    }
    u[nyq] = src[nyq];
    ux[nyq] = 0.0;
    fft::backward_in_place(u_);
    fft::backward_in_place(ux_);
    const double norm = 1.0 / kTwoPi;
    double sup = 0.0;
    bool finite = true;
    auto ur = u_.real();
    auto uxr = ux_.real();
    for (std::size_t m = 0; m < ur.size(); ++m) {
      ur[m] *= norm;
      uxr[m] *= norm;
      finite = finite && std::isfinite(ur[m]);
      sup = std::max(sup, std::abs(ur[m]));
    }
    last_sup_ = sup;
    last_finite_ = finite;
  }

  void forward(AlignedBuffer& buf) {
    fft::forward_in_place(buf);
    const double scale = kTwoPi / static_cast<double>(grid_.size());
    for (std::size_t k = 0; k <= kmax_; ++k)
      buf.complex()[k] *= scale;
  }

  void ch(Spectrum& out) {
    auto u = u_.real();
    auto ux = ux_.real();
    auto a = a_.real();
    auto b = b_.real();
    for (std::size_t m = 0; m < u.size(); ++m) {
      a[m] = u[m] * ux[m];
      b[m] = u[m] * u[m] + 0.5 * ux[m] * ux[m];
    }
    forward(a_);
    forward(b_);
    const auto ah = a_.complex();
    const auto bh = b_.complex();
    auto o = out.half();
    for (std::size_t k = 0; k <= kmax_; ++k) {
      const double xi = static_cast<double>(k);
      const double w = xi / (1.0 + xi * xi);
      // -a - i xi/(1+xi^2) b
      o[k] = cplx(-ah[k].real() + w * bh[k].imag(), -ah[k].imag() - w * bh[k].real());
    }
    for (std::size_t k = kmax_ + 1; k < o.size(); ++k)
      o[k] = 0.0;
  }

  void novikov(Spectrum& out) {
    auto u = u_.real();
    auto ux = ux_.real();
    auto a = a_.real();
    auto b = b_.real();
    auto c = c_.real();
    for (std::size_t m = 0; m < u.size(); ++m) {
      const double v = u[m], vx = ux[m];
      a[m] = v * v * vx;
      b[m] = 1.5 * v * vx * vx + v * v * v;
      c[m] = vx * vx * vx;
    }
    forward(a_);
    forward(b_);
    forward(c_);
    const auto ah = a_.complex();
    const auto bh = b_.complex();
    const auto ch = c_.complex();
    auto o = out.half();
    for (std::size_t k = 0; k <= kmax_; ++k) {
      const double xi = static_cast<double>(k);
      const double l = 1.0 / (1.0 + xi * xi);
      const double w = xi * l;
      o[k] = cplx(-ah[k].real() - 0.5 * l * ch[k].real() + w * bh[k].imag(),
                  -ah[k].imag() - 0.5 * l * ch[k].imag() - w * bh[k].real());
    }
    for (std::size_t k = kmax_ + 1; k < o.size(); ++k)
      o[k] = 0.0;
  }

  TorusGrid grid_;
  Equation eq_;
  AlignedBuffer u_, ux_, a_, b_, c_;
  std::size_t kmax_;
  double last_sup_ = 0.0;
  bool last_finite_ = true;
  double last_mean_ = 0.0;
};

inline Spectrum rhs_spectrum(const Spectrum& u, Equation e) {
  RhsWorkspace ws(u.grid(), e);
  Spectrum out(u.grid());
  ws(u, out);
  return out;
}

inline GridFunction rhs_ch(const GridFunction& u) {
  return inverse(rhs_spectrum(transform(u), Equation::ch));
}

inline GridFunction rhs_novikov(const GridFunction& u) {
  return inverse(rhs_spectrum(transform(u), Equation::novikov));
}

// ---- diagnostic fields -------------------------------------------------------

/// c d_x L q, turning the truncated product q into a forcing field: c = -1/2
/// with q = (d_x u)^2 for CH, c = -3/2 with q = u (d_x u)^2 for Novikov.
inline Spectrum forcing_from_product(Spectrum q, Equation e) {
  const double c = e == Equation::ch ? -0.5 : -1.5;
  q.apply([c](std::int64_t k) {
    const double xi = static_cast<double>(k);
    return cplx(0.0, c * xi / (1.0 + xi * xi));
  });
  return q;
}

/// -1/2 d_x L (d_x u)^2, the CH forcing whose band blocks drive the growth.
inline Spectrum e_field_spectrum(const Spectrum& u) {
  return forcing_from_product(squared_slope_spectrum(inverse(derivative(u))), Equation::ch);
}

/// -3/2 d_x L (u (d_x u)^2), the corresponding Novikov forcing.
inline Spectrum novikov_e_field_spectrum(const Spectrum& u) {
  return forcing_from_product(weighted_squared_slope_spectrum(inverse(u), inverse(derivative(u))),
                              Equation::novikov);
}

inline Spectrum forcing_spectrum(const Spectrum& u, Equation e) {
  return e == Equation::ch ? e_field_spectrum(u) : novikov_e_field_spectrum(u);
}

inline GridFunction e_field(const GridFunction& u) { return inverse(e_field_spectrum(transform(u))); }

inline GridFunction e0_field(const GridFunction& u0) { return e_field(u0); }

/// -d_x L u^2.
inline GridFunction f_field(const GridFunction& u) {
  Spectrum q = dealiased_product_spectrum({&u, &u}, DealiasRule::quadratic);
  q.apply([](std::int64_t k) {
    const double xi = static_cast<double>(k);
    return cplx(0.0, -xi / (1.0 + xi * xi));
  });
  return inverse(std::move(q));
}

// ---- trajectory ------------------------------------------------------------

struct Diagnostics {
  double b1_norm = 0.0;
  double b1_band_norm = 0.0;
  double sup_norm = 0.0;
  double dx_sup_norm = 0.0;
  double h1_energy = 0.0;
};

/// Norms of one state: B^1_{inf,1}, the band norm with weight 2^j, sup of u
/// and u_x from grid samples, and the H^1 energy from Parseval.
inline Diagnostics state_diagnostics(const Spectrum& u, const std::optional<FrequencyBand>& band) {
  Diagnostics d;
  d.b1_norm = besov_norm(u, BesovSpec(1.0, std::numeric_limits<double>::infinity(), 1.0));
  d.b1_band_norm = band ? restricted_norm(u, 1, *band) : 0.0;
  d.sup_norm = sup_norm(inverse(u));
  d.dx_sup_norm = sup_norm(inverse(derivative(u)));
  d.h1_energy = h1_energy(u);
  return d;
}

enum class RunStatus { completed, blow_up, dt_floor };

inline const char* status_name(RunStatus s) {
  switch (s) {
  case RunStatus::completed:
    return "completed";
  case RunStatus::blow_up:
    return "blow_up";
  case RunStatus::dt_floor:
    return "dt_floor";
  }
  return "?";
}

struct TrajectoryRecord {
  Equation equation = Equation::ch;
  std::optional<FrequencyBand> band;
  std::vector<double> times;
  std::vector<Spectrum> states;
  std::vector<Diagnostics> diagnostics;
  RunStatus status = RunStatus::completed;
  std::string message;
  std::size_t steps = 0;
  double dt = 0.0;
  /// Largest |rhs(xi = 0)| seen over all stages.
  double max_mean_rhs = 0.0;

  bool ok() const noexcept { return status == RunStatus::completed; }
  const Spectrum& final_state() const { return states.back(); }
};

namespace detail {

// y = x + c k
inline void axpy(Spectrum& y, const Spectrum& x, double c, const Spectrum& k) {
  auto yh = y.half();
  const auto xh = x.half();
  const auto kh = k.half();
  for (std::size_t i = 0; i < yh.size(); ++i)
    yh[i] = xh[i] + c * kh[i];
}

} // namespace detail

/// Classical RK4 on the truncated spectral state.
inline TrajectoryRecord evolve(const Spectrum& u0, const SolverConfig& cfg,
                               const std::optional<FrequencyBand>& band = std::nullopt,
                               bool with_diagnostics = true) {
  cfg.validate();
  const TorusGrid grid = u0.grid();
  RhsWorkspace rhs(grid, cfg.equation);

  Spectrum y = u0;
  truncate(y, cfg.rule());
  Spectrum k1(grid), k2(grid), k3(grid), k4(grid), stage(grid);

  TrajectoryRecord rec;
  rec.equation = cfg.equation;
  rec.band = band;

  const double sup0 = sup_norm(inverse(y));
  const double limit0 = cfl_limit(grid, cfg.equation, sup0, cfg.safety());
  double dt = cfg.dt > 0.0 ? cfg.dt : limit0;
  auto steps_for = [&](double remaining, double step) {
    return static_cast<std::size_t>(std::ceil(remaining / step - 1e-9));
  };
  std::size_t planned = std::max<std::size_t>(1, steps_for(cfg.T, dt));
  dt = cfg.T / static_cast<double>(planned);
  rec.dt = dt;
  const std::size_t stride = cfg.record_stride > 0
                                 ? static_cast<std::size_t>(cfg.record_stride)
                                 : std::max<std::size_t>(1, (planned + 99) / 100);

  auto record = [&](double t) {
    rec.times.push_back(t);
    rec.states.push_back(y);
    if (with_diagnostics)
      rec.diagnostics.push_back(state_diagnostics(y, band));
  };
  record(0.0);

  double t = 0.0;
  std::size_t n = 0;
  // Conserved H^1 energy bounds sup |u| by sqrt(E coth(pi) / 2) for a smooth
  // solution, so tiny data may grow far beyond sup |u0| without any breakdown.
  const double energy_bound = std::sqrt(h1_energy(y) / (2.0 * std::tanh(kPi)));
  const double guard = cfg.blowup_factor * std::max(sup0, energy_bound);
  while (t < cfg.T) {
    rhs(y, k1);
    rec.max_mean_rhs = std::max(rec.max_mean_rhs, rhs.last_mean_rhs());
    if (!rhs.last_finite() || (sup0 > 0.0 && rhs.last_sup() > guard)) {
      rec.status = RunStatus::blow_up;
      rec.message = "blow-up guard at t=" + std::to_string(t);
      break;
    }
    const double limit = cfl_limit(grid, cfg.equation, rhs.last_sup(), cfg.safety());
    if (dt > limit * (1.0 + 1e-12)) {
      const double remaining = cfg.T - t;
      dt = remaining / static_cast<double>(steps_for(remaining, limit));
      if (dt < cfg.dt_floor) {
        rec.status = RunStatus::dt_floor;
        rec.message = "CFL step fell below the floor at t=" + std::to_string(t);
        break;
      }
    }
    const double h = std::min(dt, cfg.T - t);
    detail::axpy(stage, y, 0.5 * h, k1);
    rhs(stage, k2);
    rec.max_mean_rhs = std::max(rec.max_mean_rhs, rhs.last_mean_rhs());
    detail::axpy(stage, y, 0.5 * h, k2);
    rhs(stage, k3);
    rec.max_mean_rhs = std::max(rec.max_mean_rhs, rhs.last_mean_rhs());
    detail::axpy(stage, y, h, k3);
    rhs(stage, k4);
    rec.max_mean_rhs = std::max(rec.max_mean_rhs, rhs.last_mean_rhs());
    {
      auto yh = y.half();
      const auto a = k1.half(), b = k2.half(), c = k3.half(), d = k4.half();
      const double w = h / 6.0;
      for (std::size_t i = 0; i < yh.size(); ++i)
        yh[i] += w * (a[i] + 2.0 * (b[i] + c[i]) + d[i]);
    }
    ++n;
    // Snap to T when within rounding of it so the last record sits at T.
    t = (cfg.T - (t + h) <= 1e-12 * cfg.T) ? cfg.T : t + h;
    if (n % stride == 0 || t >= cfg.T)
      record(t);
  }
  rec.steps = n;
  return rec;
}

inline TrajectoryRecord evolve(const GridFunction& u0, const SolverConfig& cfg,
                               const std::optional<FrequencyBand>& band = std::nullopt,
                               bool with_diagnostics = true) {
  return evolve(transform(u0), cfg, band, with_diagnostics);
}

inline TrajectoryRecord evolve(const InflationDatum& datum, SolverConfig cfg,
                               bool with_diagnostics = true) {
  cfg.equation = datum.equation;
  return evolve(datum.spectrum, cfg, datum.band, with_diagnostics);
}

/// Maps a state to the initial value of the backward-in-time problem:
/// u -> -u for CH, u -> u(-x) for Novikov (whose right side is odd in u).
inline Spectrum time_reversed(Spectrum s, Equation e) {
  if (e == Equation::ch) {
    s *= -1.0;
  } else {
    for (auto& c : s.half())
      c = std::conj(c);
  }
  return s;
}

/// Default observation time 1/log n.
inline double default_horizon(int n) { return 1.0 / std::log(static_cast<double>(n)); }

} // namespace torusbesov
