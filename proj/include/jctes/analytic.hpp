#pragma once

#include <cmath>
#include <complex>

#include "jctes/fock.hpp"
#include "jctes/jc_model.hpp"
#include "jctes/oracle.hpp"
#include "jctes/quadrature.hpp"

namespace jctes {

namespace detail {

/// e^z - 1 without cancellation for small |z|.
inline cplx expm1(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

/// int_0^t e^{z s} ds = (e^{zt} - 1)/z, with a series when |z t| < 1e-8.
inline cplx exp_integral(cplx z, double t) {
  const cplx x = z * t;
  if (std::abs(x) < 1e-8) return t * (1.0 + x / 2.0 + x * x / 6.0);
  return expm1(x) / z;
}

inline void require_time(double t) {
  if (!std::isfinite(t) || t < 0.0) throw InvalidArgument("time must be finite and >= 0");
}

}  // namespace detail

/// lambda_+-(t) = -+ i lambda int_0^t e^{(i omega + gamma/2) s} ds; sign = +1 or -1.
inline cplx lambda_pm(double t, const ModelParams& p, int sign) {
  detail::require_time(t);
  return -static_cast<double>(sign) * kI * p.lambda_c * detail::exp_integral(cplx(0.5 * p.gamma, p.omega), t);
}

/// Weight of the lossy-channel Kraus series, T = 1 - e^{-gamma t}.
inline double kraus_weight_T(double t, double gamma) {
  detail::require_time(t);
  if (gamma < 0.0) throw InvalidArgument("gamma must be >= 0");
  return -std::expm1(-gamma * t);
}

struct PmSolutionParams {
  cplx lambda_pm;
  double T;
  double t;
};

inline PmSolutionParams pm_solution_params(double t, const ModelParams& p, int sign) {
  return {lambda_pm(t, p, sign), kraus_weight_T(t, p.gamma), t};
}

struct KrausOptions {
  /// Stop once a term's entrywise 1-norm falls below this (bounds its trace contribution).
  double cutoff = 1e-14;
  /// 0 means 4 N.
  int max_terms = 0;
};

/// Schrodinger-picture solution of the loss-only equation started from `y`
/// in the rotational picture, followed by the free rotation:
/// sum_n T^n/n! e^{-(i omega + gamma/2) t n} a^n y a^+^n e^{(i omega - gamma/2) t n}.
/// Linear in `y`, which need not be Hermitian.
inline FockOperator lossy_channel(const FockOperator& y, double t, const ModelParams& p,
                                  const KrausOptions& opts = {}) {
  detail::require_time(t);
  const Index n = y.rows();
  const double T = kraus_weight_T(t, p.gamma);
  const int max_terms = opts.max_terms > 0 ? opts.max_terms : static_cast<int>(4 * n);

  FockOperator sum = FockOperator::Zero(n, n);
  FockOperator term = y;  // a^k y a^+^k
  double coeff = 1.0;     // T^k / k!
  bool converged = false;
  for (int k = 0; k < max_terms; ++k) {
    sum += coeff * term;
    term = ladder::a_left(ladder::adag_right(term));
    coeff *= T / static_cast<double>(k + 1);
    if (coeff * term.cwiseAbs().sum() < opts.cutoff) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonConvergedKrausSum("Kraus sum did not reach cutoff within " + std::to_string(max_terms) + " terms");

  const cplx left_rate = -cplx(0.5 * p.gamma, p.omega) * t;
  const cplx right_rate = cplx(-0.5 * p.gamma, p.omega) * t;
  for (Index c = 0; c < n; ++c)
    for (Index r = 0; r < n; ++r)
      sum(r, c) *= std::exp(left_rate * static_cast<double>(r) + right_rate * static_cast<double>(c));
  return sum;
}

/// rho_+-(t) in the Schrodinger picture from rho_+-(0): displace by lambda_+-(t),
/// then apply the lossy channel and the free rotation.
inline FockOperator rho_pm_analytic(const FockOperator& rho0, double t, const ModelParams& p, int sign,
                                    const KrausOptions& opts = {}) {
  p.validate();
  if (rho0.rows() != p.n_trunc || rho0.cols() != p.n_trunc)
    throw InvalidArgument("rho_pm_analytic: operator dimension does not match n_trunc");
  const FockOperator d = displacement(lambda_pm(t, p, sign), p.n_trunc);
  return lossy_channel(d * rho0 * d.adjoint(), t, p, opts);
}

/// Coherent amplitude of rho_+-(t) for a coherent start alpha0.
inline cplx alpha_of_t(double t, const ModelParams& p, int sign, cplx alpha0) {
  detail::require_time(t);
  const cplx rate(0.5 * p.gamma, p.omega);
  const cplx decay = std::exp(-rate * t);
  const cplx denom(p.gamma, 2.0 * p.omega);  // 2 i omega + gamma
  if (std::abs(denom) < 1e-8) return decay * (alpha0 + lambda_pm(t, p, sign));
  const cplx center = -static_cast<double>(sign) * 2.0 * kI * p.lambda_c / denom;
  return center + decay * (alpha0 - center);
}

/// Long-time centre -+ 2 i lambda / (2 i omega + gamma) of rho_+-.
inline cplx alpha_steady(const ModelParams& p, int sign) {
  const cplx denom(p.gamma, 2.0 * p.omega);
  if (std::abs(denom) == 0.0) throw InvalidArgument("alpha_steady: undefined for gamma = omega = 0");
  return -static_cast<double>(sign) * 2.0 * kI * p.lambda_c / denom;
}

struct MuIntegrals {
  cplx mu1;  // -i lambda int_0^t cosh(gamma s/2) e^{i omega s} ds
  cplx mu2;  // -i lambda int_0^t sinh(gamma s/2) e^{i omega s} ds
};

inline MuIntegrals mu_integrals(double t, const ModelParams& p) {
  detail::require_time(t);
  const cplx grow = detail::exp_integral(cplx(0.5 * p.gamma, p.omega), t);
  const cplx shrink = detail::exp_integral(cplx(-0.5 * p.gamma, p.omega), t);
  const cplx pre = -0.5 * kI * p.lambda_c;
  return {pre * (grow + shrink), pre * (grow - shrink)};
}

/// Scalar cross-commutator of the rho_c disentangling split,
/// -8 lambda^2 cosh(gamma s/2) sinh(gamma s'/2) cos(omega (s - s')).
inline double f_kernel(double s, double s_prime, const ModelParams& p) {
  return -8.0 * p.lambda_c * p.lambda_c * std::cosh(0.5 * p.gamma * s) * std::sinh(0.5 * p.gamma * s_prime) *
         std::cos(p.omega * (s - s_prime));
}

/// int_0^t ds int_0^s ds' f(s, s') by nested adaptive Simpson. `tol` is
/// absolute while |F| stays below one and relative to the bound
/// t^2/2 max|f| beyond that, since f grows like e^{gamma t}.
inline double big_F(double t, const ModelParams& p, double tol = 1e-10) {
  detail::require_time(t);
  if (t == 0.0 || p.lambda_c == 0.0 || p.gamma == 0.0) return 0.0;
  const double bound = 4.0 * p.lambda_c * p.lambda_c * std::cosh(0.5 * p.gamma * t) *
                       std::abs(std::sinh(0.5 * p.gamma * t)) * t * t;
  tol *= std::max(1.0, bound);
  const double inner_tol = 0.1 * tol / t;
  auto inner = [&](double s) {
    return quad::adaptive_simpson([&](double sp) { return f_kernel(s, sp, p); }, 0.0, s, inner_tol);
  };
  return quad::adaptive_simpson(inner, 0.0, t, 0.5 * tol);
}

/// Same double integral with nested composite Simpson on `panels` panels per axis.
inline double big_F_composite(double t, const ModelParams& p, int panels) {
  detail::require_time(t);
  auto inner = [&](double s) {
    return quad::composite_simpson([&](double sp) { return f_kernel(s, sp, p); }, 0.0, s, panels);
  };
  return quad::composite_simpson(inner, 0.0, t, panels);
}

struct CSolutionParams {
  cplx mu1;
  cplx mu2;
  cplx bigF;
  double t;
};

inline CSolutionParams c_solution_params(double t, const ModelParams& p) {
  const MuIntegrals mu = mu_integrals(t, p);
  return {mu.mu1, mu.mu2, big_F(t, p), t};
}

/// Which scalar prefactor to use in the rho_c closed form. `printed` keeps the
/// extra e^{mu1 mu2^* + mu1^* mu2}; `corrected` drops it, since the two
/// displacement-product phases it stands for cancel.
enum class RhoCForm { printed, corrected };

inline const char* to_string(RhoCForm f) { return f == RhoCForm::printed ? "printed" : "corrected"; }

inline cplx rho_c_prefactor(const CSolutionParams& c, RhoCForm form) {
  cplx exponent = c.bigF - 4.0 * std::norm(c.mu2);
  if (form == RhoCForm::printed) exponent += c.mu1 * std::conj(c.mu2) + std::conj(c.mu1) * c.mu2;
  return std::exp(exponent);
}

/// Closed-form rho_c(t) in the Schrodinger picture:
/// prefactor * channel( e^{4 mu2^* a} D(mu1+mu2) rho0 D^+(-mu1-mu2) e^{-4 mu2 a^+} ).
inline FockOperator rho_c_analytic(const FockOperator& rho0, double t, const ModelParams& p,
                                   RhoCForm form = RhoCForm::printed, const KrausOptions& opts = {}) {
  p.validate();
  if (rho0.rows() != p.n_trunc || rho0.cols() != p.n_trunc)
    throw InvalidArgument("rho_c_analytic: operator dimension does not match n_trunc");
  const CSolutionParams c = c_solution_params(t, p);
  const FockOperator a = annihilation(p.n_trunc);
  const FockOperator left = matrix_exponential(a, 4.0 * std::conj(c.mu2));
  const FockOperator right = matrix_exponential(a.adjoint(), -4.0 * c.mu2);
  const FockOperator d = displacement(c.mu1 + c.mu2, p.n_trunc);
  const FockOperator d_right = displacement(-(c.mu1 + c.mu2), p.n_trunc).adjoint();
  return rho_c_prefactor(c, form) * lossy_channel(left * d * rho0 * d_right * right, t, p, opts);
}

/// rho_c closed forms next to the RK4 oracle at the same time.
struct RhoCAudit {
  FockOperator printed;
  FockOperator corrected;
  FockOperator oracle;
  double printed_deviation = 0.0;    // interior max |printed - oracle|
  double corrected_deviation = 0.0;  // interior max |corrected - oracle|
  double oracle_tail_weight = 0.0;
};

/// Evaluates rho_c_analytic (both forms) at t and integrates the rho_c
/// equation with `n_steps` RK4 steps for comparison.
inline RhoCAudit rho_c_with_audit(const FockOperator& rho0, double t, const ModelParams& p, std::size_t n_steps) {
  RhoCAudit out;
  const CSolutionParams c = c_solution_params(t, p);
  out.printed = rho_c_analytic(rho0, t, p, RhoCForm::printed);
  out.corrected = out.printed * (rho_c_prefactor(c, RhoCForm::corrected) / rho_c_prefactor(c, RhoCForm::printed));
  if (t == 0.0) {
    out.oracle = rho0;
  } else {
    IntegratorOptions opts;
    opts.picture = Picture::rotational;
    opts.record_every = n_steps;
    const auto traj = integrate_component(ComponentKind::c, rho0, p, TimeGrid{0.0, t, n_steps}, opts);
    out.oracle = rotate_out_of(traj.final_state(), p.omega * t);
    out.oracle_tail_weight = traj.tail_weights.back();
  }
  out.printed_deviation = interior_max_abs(FockOperator(out.printed - out.oracle));
  out.corrected_deviation = interior_max_abs(FockOperator(out.corrected - out.oracle));
  return out;
}

}  // namespace jctes
