#pragma once

// Particle trajectories d/dt phi = a(t, phi), phi(0, x) = x, where the
// transport speed a is u for CH and u^2 for Novikov. Velocities between
// records come from cubic Lagrange interpolation of the recorded spectra;
// off-grid values are exact for the band-limited fields involved.

#include "torusbesov/evolution.hpp"
#include "torusbesov/littlewood_paley.hpp"
#include "torusbesov/offgrid.hpp"
#include "torusbesov/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace torusbesov {

struct FlowMap {
  double t = 0.0;
  /// phi(t, x_m) for every grid point, as unwrapped reals.
  std::vector<double> positions;

  static FlowMap identity(const TorusGrid& grid) {
    FlowMap f;
    f.positions.resize(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m)
      f.positions[m] = grid.point(m);
    return f;
  }

  /// Strictly increasing with positions[N-1] < positions[0] + 2pi.
  bool monotone() const {
    for (std::size_t m = 1; m < positions.size(); ++m)
      if (!(positions[m] > positions[m - 1]))
        return false;
    return positions.empty() || positions.back() < positions.front() + kTwoPi;
  }
};

/// Spectrum of the transport speed for a state.
inline Spectrum transport_speed(const Spectrum& u, Equation e) {
  if (e == Equation::ch)
    return u;
  // u is cut at N/4 by the cubic rule, so u^2 is exact on the grid.
  const GridFunction v = inverse(u);
  return transform(dealiased_product(v, v, DealiasRule::cubic));
}

/// f(phi(t, x_m)) for every grid point.
inline GridFunction compose_along_flow(const Spectrum& f, const FlowMap& phi) {
  return sample_displaced(f, phi.positions);
}

inline GridFunction compose_along_flow(const GridFunction& f, const FlowMap& phi) {
  return compose_along_flow(transform(f), phi);
}

/// Steps particle positions through a recorded trajectory.
class FlowIntegrator {
public:
  FlowIntegrator(const TrajectoryRecord& traj, int substeps = 1)
      : traj_(traj), substeps_(std::max(1, substeps)), phi_(FlowMap::identity(traj.states.front().grid())) {
    if (traj.times.empty())
      throw std::invalid_argument("FlowIntegrator: empty trajectory");
  }
  FlowIntegrator(TrajectoryRecord&&, int = 1) = delete;

  const FlowMap& current() const noexcept { return phi_; }
  std::size_t record() const noexcept { return index_; }
  bool done() const noexcept { return index_ + 1 >= traj_.times.size(); }

  /// Advances from record k to record k + 1.
  const FlowMap& advance() {
    if (done())
      throw std::out_of_range("FlowIntegrator: already at the last record");
    const double t0 = traj_.times[index_], t1 = traj_.times[index_ + 1];
    const double h = (t1 - t0) / substeps_;
    for (int s = 0; s < substeps_; ++s) {
      const double t = t0 + s * h;
      rk4_step(t, h);
    }
    ++index_;
    phi_.t = t1;
    return phi_;
  }

  /// Transport speed at time t by cubic Lagrange interpolation over the four
  /// nearest records (fewer near the ends of short trajectories).
  Spectrum speed_at(double t) const {
    const auto& ts = traj_.times;
    const std::size_t count = ts.size();
    const std::size_t width = std::min<std::size_t>(4, count);
    std::size_t hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    hi = std::clamp<std::size_t>(hi, 1, count - 1);
    std::size_t first = hi >= 2 ? hi - 2 : 0;
    first = std::min(first, count - width);
    Spectrum u(traj_.states.front().grid());
    for (std::size_t i = first; i < first + width; ++i) {
      double w = 1.0;
      for (std::size_t k = first; k < first + width; ++k)
        if (k != i)
          w *= (t - ts[k]) / (ts[i] - ts[k]);
      if (w != 0.0)
        u.add_scaled(w, traj_.states[i]);
    }
    return transport_speed(u, traj_.equation);
  }

private:
  std::vector<double> velocity(double t, const std::vector<double>& pos) const {
    const GridFunction v = sample_displaced(speed_at(t), pos);
    return {v.samples().begin(), v.samples().end()};
  }

  void rk4_step(double t, double h) {
    auto& y = phi_.positions;
    const std::size_t n = y.size();
    std::vector<double> stage(n);
    const auto k1 = velocity(t, y);
    for (std::size_t m = 0; m < n; ++m)
      stage[m] = y[m] + 0.5 * h * k1[m];
    const auto k2 = velocity(t + 0.5 * h, stage);
    for (std::size_t m = 0; m < n; ++m)
      stage[m] = y[m] + 0.5 * h * k2[m];
    const auto k3 = velocity(t + 0.5 * h, stage);
    for (std::size_t m = 0; m < n; ++m)
      stage[m] = y[m] + h * k3[m];
    const auto k4 = velocity(t + h, stage);
    for (std::size_t m = 0; m < n; ++m)
      y[m] += h / 6.0 * (k1[m] + 2.0 * (k2[m] + k3[m]) + k4[m]);
  }

  const TrajectoryRecord& traj_;
  int substeps_;
  FlowMap phi_;
  std::size_t index_ = 0;
};

/// phi at every recorded time.
inline std::vector<FlowMap> flow_map(const TrajectoryRecord& traj, int substeps = 1) {
  FlowIntegrator it(traj, substeps);
  std::vector<FlowMap> out{it.current()};
  while (!it.done())
    out.push_back(it.advance());
  return out;
}

/// Result of integrating dv/dt = -P(a v_x) with a frozen speed a, together
/// with the flow of a and the accumulated commutator integrals, so that for
/// every tracked block
///   Delta_j v(t) o phi = Delta_j v0 + int_0^t R_j o phi,  R_j = a Delta_j v_x - Delta_j P(a v_x).
struct TransportCheck {
  double t = 0.0;
  /// max over tracked j and grid points of the identity residual.
  double identity_error = 0.0;
  /// max |v(t) o phi - v0|, zero for exact advection of the whole function.
  double advection_error = 0.0;
  FlowMap phi;
};

inline TransportCheck frozen_transport_check(const Spectrum& speed, const Spectrum& v0, double T,
                                             std::size_t steps, const std::vector<int>& js) {
  require_same_grid(speed.grid(), v0.grid(), "frozen_transport_check");
  const TorusGrid grid = speed.grid();
  const std::size_t n = grid.size();
  const GridFunction a = inverse(speed);

  struct State {
    Spectrum v;
    std::vector<double> pos;
    std::vector<std::vector<double>> integral;
  };
  auto derivative_of = [&](const State& s) {
    const GridFunction vx = inverse(derivative(s.v));
    const Spectrum adv = dealiased_product_spectrum({&a, &vx}, DealiasRule::quadratic);
    State d{-1.0 * adv, {}, {}};
    const GridFunction at = sample_displaced(speed, s.pos);
    d.pos.assign(at.samples().begin(), at.samples().end());
    const Spectrum dvx = derivative(s.v);
    for (int j : js) {
      const GridFunction left = sample_displaced(block_spectrum(dvx, j), s.pos);
      const GridFunction right = sample_displaced(block_spectrum(adv, j), s.pos);
      std::vector<double> r(n);
      for (std::size_t m = 0; m < n; ++m)
        r[m] = at[m] * left[m] - right[m];
      d.integral.push_back(std::move(r));
    }
    return d;
  };
  auto combine = [&](const State& base, double c, const State& d) {
    State out{base.v, base.pos, base.integral};
    out.v.add_scaled(c, d.v);
    for (std::size_t m = 0; m < n; ++m)
      out.pos[m] += c * d.pos[m];
    for (std::size_t i = 0; i < js.size(); ++i)
      for (std::size_t m = 0; m < n; ++m)
        out.integral[i][m] += c * d.integral[i][m];
    return out;
  };

  State y{v0, FlowMap::identity(grid).positions,
          std::vector<std::vector<double>>(js.size(), std::vector<double>(n, 0.0))};
  truncate(y.v, DealiasRule::quadratic);
  const double h = T / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const State d1 = derivative_of(y);
    const State d2 = derivative_of(combine(y, 0.5 * h, d1));
    const State d3 = derivative_of(combine(y, 0.5 * h, d2));
    const State d4 = derivative_of(combine(y, h, d3));
    y = combine(y, h / 6.0, d1);
    y = combine(y, h / 3.0, d2);
    y = combine(y, h / 3.0, d3);
    y = combine(y, h / 6.0, d4);
  }

  TransportCheck out;
  out.t = T;
  out.phi.t = T;
  out.phi.positions = y.pos;
  const Spectrum v0t = [&] {
    Spectrum s = v0;
    truncate(s, DealiasRule::quadratic);
    return s;
  }();
  for (std::size_t i = 0; i < js.size(); ++i) {
    const GridFunction lhs = sample_displaced(block_spectrum(y.v, js[i]), y.pos);
    const GridFunction start = block(v0t, js[i]);
    for (std::size_t m = 0; m < n; ++m)
      out.identity_error =
          std::max(out.identity_error, std::abs(lhs[m] - start[m] - y.integral[i][m]));
  }
  const GridFunction whole = sample_displaced(y.v, y.pos);
  const GridFunction start = inverse(v0t);
  for (std::size_t m = 0; m < n; ++m)
    out.advection_error = std::max(out.advection_error, std::abs(whole[m] - start[m]));
  return out;
}

} // namespace torusbesov
