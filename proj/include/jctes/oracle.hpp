#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "jctes/jc_model.hpp"

namespace jctes {

/// Uniform grid t_start + k h, k = 0..n_steps.
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t n_steps = 1;

  void validate() const {
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start))
      throw InvalidArgument("TimeGrid: t_end must exceed t_start");
    if (n_steps < 1) throw InvalidArgument("TimeGrid: n_steps must be >= 1");
  }
  double step() const { return (t_end - t_start) / static_cast<double>(n_steps); }
  double time(std::size_t k) const {
    return k == n_steps ? t_end : t_start + static_cast<double>(k) * step();
  }
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> tail_weights;

  std::size_t size() const { return times.size(); }
  const State& final_state() const { return states.back(); }
};

enum class Picture { schrodinger, rotational };

struct IntegratorOptions {
  Picture picture = Picture::schrodinger;
  /// Record every k-th step; the final step is always recorded.
  std::size_t record_every = 1;
  double tail_limit = 1e-6;
  /// Largest allowed h * rate_bound().
  double stability_limit = 0.1;
  /// When false, recorded states are handed to the observer only.
  bool keep_states = true;
};

template <class State>
using Observer = std::function<void(double t, const State&)>;

/// Classic fourth-order Runge-Kutta step for any vector-space state type.
template <class State, class Rhs>
State rk4_step(const State& y, double t, double h, Rhs&& f) {
  const State k1 = f(y, t);
  const State k2 = f(y + (0.5 * h) * k1, t + 0.5 * h);
  const State k3 = f(y + (0.5 * h) * k2, t + 0.5 * h);
  const State k4 = f(y + h * k3, t + h);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline void check_step_bound(const ModelParams& p, double h, double limit = 0.1) {
  const double x = h * p.rate_bound();
  if (x > limit * (1.0 + 1e-12))
    throw StepTooLarge("step " + std::to_string(h) + " gives h*max(omega,lambda,gamma,gamma*N) = " +
                       std::to_string(x) + " > " + std::to_string(limit));
}

namespace detail {

template <class State, class Rhs>
Trajectory<State> integrate_fixed(const State& y0, const ModelParams& p, const TimeGrid& grid,
                                  const IntegratorOptions& opts, Rhs&& rhs,
                                  const Observer<State>& observe = {}) {
  p.validate();
  grid.validate();
  if (opts.record_every < 1) throw InvalidArgument("record_every must be >= 1");
  const double h = grid.step();
  check_step_bound(p, h, opts.stability_limit);

  Trajectory<State> traj;
  auto record = [&](double t, const State& y) {
    const double tail = tail_weight(y);
    if (tail > opts.tail_limit)
      throw TailOverflow("tail weight " + std::to_string(tail) + " at t=" + std::to_string(t) +
                         " exceeds " + std::to_string(opts.tail_limit));
    traj.times.push_back(t);
    if (opts.keep_states) traj.states.push_back(y);
    traj.tail_weights.push_back(tail);
    if (observe) observe(t, y);
  };

  State y = y0;
  record(grid.t_start, y);
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    y = rk4_step(y, grid.time(k), h, rhs);
    if ((k + 1) % opts.record_every == 0 || k + 1 == grid.n_steps) {
      record(grid.time(k + 1), y);
    } else if (tail_weight(y) > opts.tail_limit) {
      throw TailOverflow("tail weight exceeds limit at t=" + std::to_string(grid.time(k + 1)));
    }
  }
  return traj;
}

}  // namespace detail

/// Brute-force RK4 integration of the full joint master equation, in the
/// Schrodinger or the rotational picture.
inline Trajectory<JointDensity> integrate_joint(const JointDensity& rho0, const ModelParams& p,
                                                const TimeGrid& grid, const IntegratorOptions& opts = {},
                                                const Observer<JointDensity>& observe = {}) {
  detail::require_match(rho0, p);
  if (opts.picture == Picture::schrodinger) {
    return detail::integrate_fixed(rho0, p, grid, opts,
                                   [&](const JointDensity& r, double) { return lindblad_rhs(r, p); }, observe);
  }
  return detail::integrate_fixed(
      rho0, p, grid, opts, [&](const JointDensity& r, double t) { return lindblad_rhs_rotational(r, t, p); }, observe);
}

enum class ComponentKind { plus, minus, c };

inline const char* to_string(ComponentKind k) {
  switch (k) {
    case ComponentKind::plus: return "plus";
    case ComponentKind::minus: return "minus";
    case ComponentKind::c: return "c";
  }
  return "?";
}

/// RK4 integration of one decoupled component equation (rotational picture).
inline Trajectory<FockOperator> integrate_component(ComponentKind kind, const FockOperator& op0,
                                                    const ModelParams& p, const TimeGrid& grid,
                                                    const IntegratorOptions& opts = {},
                                                    const Observer<FockOperator>& observe = {}) {
  if (op0.rows() != p.n_trunc || op0.cols() != p.n_trunc)
    throw InvalidArgument("integrate_component: operator dimension does not match n_trunc");
  switch (kind) {
    case ComponentKind::plus:
      return detail::integrate_fixed(op0, p, grid, opts,
                                     [&](const FockOperator& m, double t) { return pm_rhs(m, t, p, +1); }, observe);
    case ComponentKind::minus:
      return detail::integrate_fixed(op0, p, grid, opts,
                                     [&](const FockOperator& m, double t) { return pm_rhs(m, t, p, -1); }, observe);
    case ComponentKind::c:
      break;
  }
  return detail::integrate_fixed(op0, p, grid, opts,
                                 [&](const FockOperator& m, double t) { return c_rhs(m, t, p); }, observe);
}

}  // namespace jctes
