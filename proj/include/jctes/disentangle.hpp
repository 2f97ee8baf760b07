#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "jctes/expm.hpp"
#include "jctes/oracle.hpp"
#include "jctes/quadrature.hpp"

namespace jctes {

using OperatorFamily = std::function<Eigen::MatrixXcd(double)>;
using ScalarKernel = std::function<cplx(double, double)>;

/// Time-ordered exponential of A(t) + B(t) where each family commutes with
/// itself at all times and [A(t), B(t')] = f(t, t') Z with Z central (by
/// default the identity).
struct FactorizationProblem {
  OperatorFamily A;
  OperatorFamily B;
  ScalarKernel f;
  /// Z; empty means the identity.
  Eigen::MatrixXcd center;
  /// Sample points for the commutator preconditions.
  TimeGrid grid;
  /// Basis indices the preconditions are checked on; empty means all. Used
  /// to restrict truncated bosonic operators to their interior.
  std::vector<Index> check_indices;
  double check_tolerance = 1e-9;
  double quadrature_tolerance = 1e-10;
};

namespace detail {

inline double restricted_max_abs(const Eigen::MatrixXcd& m, const std::vector<Index>& idx) {
  if (idx.empty()) return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
  double best = 0.0;
  for (Index c : idx)
    for (Index r : idx) best = std::max(best, std::abs(m(r, c)));
  return best;
}

}  // namespace detail

/// Throws PreconditionViolated if a same-family commutator or the scalar
/// cross-commutator check fails on any pair of grid times.
inline void check_factorization_preconditions(const FactorizationProblem& p) {
  p.grid.validate();
  std::vector<double> ts;
  for (std::size_t k = 0; k <= p.grid.n_steps; ++k) ts.push_back(p.grid.time(k));
  std::vector<Eigen::MatrixXcd> as, bs;
  for (double t : ts) {
    as.push_back(p.A(t));
    bs.push_back(p.B(t));
  }
  const Index n = as.front().rows();
  const Eigen::MatrixXcd id = p.center.size() ? p.center : Eigen::MatrixXcd::Identity(n, n);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (j > i) {
        const double aa = detail::restricted_max_abs(as[i] * as[j] - as[j] * as[i], p.check_indices);
        const double bb = detail::restricted_max_abs(bs[i] * bs[j] - bs[j] * bs[i], p.check_indices);
        if (aa > p.check_tolerance || bb > p.check_tolerance)
          throw PreconditionViolated("same-family commutator " + std::to_string(std::max(aa, bb)) + " at t=" +
                                     std::to_string(ts[i]) + ", t'=" + std::to_string(ts[j]));
      }
      const Eigen::MatrixXcd cross = as[i] * bs[j] - bs[j] * as[i] - p.f(ts[i], ts[j]) * id;
      const double ab = detail::restricted_max_abs(cross, p.check_indices);
      if (ab > p.check_tolerance)
        throw PreconditionViolated("cross commutator differs from f(t,t') by " + std::to_string(ab) + " at t=" +
                                   std::to_string(ts[i]) + ", t'=" + std::to_string(ts[j]));
    }
  }
}

/// exp(int_0^t B) exp(int_0^t A) exp(Z int_0^t ds int_0^s f(s, s') ds').
inline Eigen::MatrixXcd factorized_propagator(const FactorizationProblem& p, double t, bool check = true) {
  if (check) check_factorization_preconditions(p);
  const Eigen::MatrixXcd probe = p.A(0.0);
  const Index n = probe.rows();
  if (t == 0.0) return Eigen::MatrixXcd::Identity(n, n);
  const double tol = p.quadrature_tolerance;
  const Eigen::MatrixXcd int_a = quad::adaptive_simpson(p.A, 0.0, t, tol);
  const Eigen::MatrixXcd int_b = quad::adaptive_simpson(p.B, 0.0, t, tol);
  auto inner = [&](double s) {
    return quad::adaptive_simpson([&](double sp) { return p.f(s, sp); }, 0.0, s, 0.1 * tol / t);
  };
  const cplx scalar = quad::adaptive_simpson(inner, 0.0, t, 0.5 * tol);
  const Eigen::MatrixXcd ba = matrix_exponential(int_b) * matrix_exponential(int_a);
  if (p.center.size() == 0) return std::exp(scalar) * ba;
  return ba * matrix_exponential(p.center, scalar);
}

namespace detail {

inline void check_product_step(const Eigen::MatrixXcd& g, double h) {
  const double x = h * one_norm(g);
  if (x > 1.0) throw StepTooLarge("time-ordered step: h * ||G||_1 = " + std::to_string(x) + " > 1");
}

}  // namespace detail

/// Reference propagator of dV/dt = G(t) V, V(t_start) = 1, as the product of
/// midpoint exponentials exp(h G(t_k + h/2)).
inline Eigen::MatrixXcd time_ordered_propagator(const OperatorFamily& g, const TimeGrid& grid) {
  grid.validate();
  const double h = grid.step();
  Eigen::MatrixXcd v;
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    const Eigen::MatrixXcd gm = g(grid.time(k) + 0.5 * h);
    detail::check_product_step(gm, h);
    const Eigen::MatrixXcd step = matrix_exponential(gm, h);
    v = (k == 0) ? step : Eigen::MatrixXcd(step * v);
  }
  return v;
}

/// time_ordered_propagator(g, grid) * v without forming the propagator.
inline Eigen::VectorXcd time_ordered_apply(const OperatorFamily& g, const TimeGrid& grid, const Eigen::VectorXcd& v) {
  grid.validate();
  const double h = grid.step();
  Eigen::VectorXcd out = v;
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    const Eigen::MatrixXcd gm = g(grid.time(k) + 0.5 * h);
    detail::check_product_step(gm, h);
    out = expm_action(gm, out, h);
  }
  return out;
}

}  // namespace jctes
