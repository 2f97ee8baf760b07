#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <type_traits>

#include "jctes/errors.hpp"

namespace jctes::quad {

inline double error_norm(double x) { return std::abs(x); }
inline double error_norm(std::complex<double> x) { return std::abs(x); }
template <class Derived>
double error_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

namespace detail {

template <class F, class T>
T simpson_step(F& f, double a, double b, const T& fa, const T& fm, const T& fb, T whole, double tol,
               int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const T flm = f(lm);
  const T frm = f(rm);
  const T left = ((m - a) / 6.0) * (fa + 4.0 * flm + fm);
  const T right = ((b - m) / 6.0) * (fm + 4.0 * frm + fb);
  const T delta = left + right - whole;
  // The second test stops refinement once the correction is at round-off level.
  if (depth <= 0 || error_norm(delta) <= 15.0 * tol || error_norm(delta) <= 1e-15 * error_norm(T(left + right)))
    return T(left + right + delta / 15.0);
  return T(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1));
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction. `f` may return a scalar or an
/// Eigen matrix; the error is measured in max-abs norm against `tol`.
template <class F>
auto adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 40) {
  using T = std::decay_t<decltype(f(a))>;
  if (!(tol > 0.0)) throw InvalidArgument("adaptive_simpson: tolerance must be positive");
  const T fa = f(a);
  if (a == b) return T(0.0 * fa);
  const T fb = f(b);
  const T fm = f(0.5 * (a + b));
  const T whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Composite Simpson rule on `panels` equal panels (each panel uses its midpoint).
template <class F>
auto composite_simpson(F&& f, double a, double b, int panels) {
  using T = std::decay_t<decltype(f(a))>;
  if (panels < 1) throw InvalidArgument("composite_simpson: panels must be >= 1");
  const double h = (b - a) / panels;
  T sum = f(a) + f(b);
  for (int k = 1; k < panels; ++k) sum += 2.0 * f(a + k * h);
  for (int k = 0; k < panels; ++k) sum += 4.0 * f(a + (k + 0.5) * h);
  return T((h / 6.0) * sum);
}

}  // namespace jctes::quad
