#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>

#include "jctes/analytic.hpp"
#include "jctes/fock.hpp"

namespace jctes {

namespace detail {

/// Columns needed before <m|D(alpha)|k>, m < rows, is negligible for all larger k.
inline Index displacement_columns(cplx alpha, Index rows) {
  const double reach = std::sqrt(static_cast<double>(rows)) + std::abs(alpha) + 7.0;
  return std::max<Index>(rows, static_cast<Index>(std::ceil(reach * reach)));
}

}  // namespace detail

/// Wigner operator 2 D(alpha) P D^+(alpha), P the photon-number parity, as
/// the n_trunc x n_trunc block of the untruncated operator. The intermediate
/// sum over levels runs past n_trunc until the displaced columns vanish, so
/// the result carries no truncation artefact.
///
/// Normalization: int W d^2 alpha / pi = Tr rho.
inline FockOperator wigner_operator(cplx alpha, Index n_trunc) {
  require_dim(n_trunc);
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    throw InvalidArgument("wigner_operator: non-finite alpha");
  const Eigen::MatrixXcd d = displacement_block(alpha, n_trunc, detail::displacement_columns(alpha, n_trunc));
  Eigen::MatrixXcd signed_cols = d;
  for (Index k = 1; k < d.cols(); k += 2) signed_cols.col(k) *= -1.0;
  return 2.0 * signed_cols * d.adjoint();
}

/// Tr(U0(alpha) op) for any square operator.
inline cplx wigner_value(const FockOperator& op, cplx alpha) {
  const FockOperator u = wigner_operator(alpha, op.rows());
  return u.cwiseProduct(op.transpose()).sum();
}

/// W(alpha) = Tr(U0(alpha) rho) for Hermitian rho.
inline double wigner_at(const FockOperator& rho, cplx alpha) {
  if (rho.rows() != rho.cols()) throw InvalidArgument("wigner_at: operator must be square");
  const double defect = hermiticity_defect(rho);
  if (defect > 1e-8) throw InvalidArgument("wigner_at: operator is not Hermitian (defect " + std::to_string(defect) + ")");
  return wigner_value(rho, alpha).real();
}

/// Gaussian Wigner function 2 exp(-2 |alpha - alpha0(t)|^2) of rho_+-(t)
/// for a coherent start alpha0.
inline double wigner_closed_pm(cplx alpha, double t, const ModelParams& p, int sign, cplx alpha0) {
  return 2.0 * std::exp(-2.0 * std::norm(alpha - alpha_of_t(t, p, sign, alpha0)));
}

/// Rectangular sampling of the phase plane; both ends are included.
struct PhaseGridSpec {
  double re_min = -1.0, re_max = 1.0;
  double im_min = -1.0, im_max = 1.0;
  Index n_re = 2, n_im = 2;

  void validate() const {
    if (n_re < 1 || n_im < 1) throw InvalidArgument("phase grid is empty");
    if (!(re_max >= re_min) || !(im_max >= im_min)) throw InvalidArgument("phase grid ranges are inverted");
  }
  double d_re() const { return n_re > 1 ? (re_max - re_min) / static_cast<double>(n_re - 1) : 0.0; }
  double d_im() const { return n_im > 1 ? (im_max - im_min) / static_cast<double>(n_im - 1) : 0.0; }
  cplx point(Index i, Index j) const {
    return {re_min + static_cast<double>(i) * d_re(), im_min + static_cast<double>(j) * d_im()};
  }
};

struct PhaseGrid {
  PhaseGridSpec spec;
  /// values(i, j) = W at spec.point(i, j).
  Eigen::MatrixXd values;

  /// sum W * d_re * d_im / pi, which approximates Tr rho.
  double normalization() const { return values.sum() * spec.d_re() * spec.d_im() / M_PI; }

  std::pair<Index, Index> argmax() const {
    Index i = 0, j = 0;
    values.maxCoeff(&i, &j);
    return {i, j};
  }
};

template <class F>
PhaseGrid sample_phase_grid(const PhaseGridSpec& spec, F&& w) {
  spec.validate();
  PhaseGrid g{spec, Eigen::MatrixXd(spec.n_re, spec.n_im)};
  for (Index i = 0; i < spec.n_re; ++i)
    for (Index j = 0; j < spec.n_im; ++j) g.values(i, j) = w(spec.point(i, j));
  return g;
}

inline PhaseGrid wigner_grid(const FockOperator& rho, const PhaseGridSpec& spec) {
  if (hermiticity_defect(rho) > 1e-8) throw InvalidArgument("wigner_grid: operator is not Hermitian");
  return sample_phase_grid(spec, [&](cplx alpha) { return wigner_value(rho, alpha).real(); });
}

/// Real and imaginary parts of Tr(U0 op) for a non-Hermitian op such as rho_c.
inline std::pair<PhaseGrid, PhaseGrid> wigner_grid_complex(const FockOperator& op, const PhaseGridSpec& spec) {
  spec.validate();
  PhaseGrid re{spec, Eigen::MatrixXd(spec.n_re, spec.n_im)};
  PhaseGrid im = re;
  for (Index i = 0; i < spec.n_re; ++i)
    for (Index j = 0; j < spec.n_im; ++j) {
      const cplx w = wigner_value(op, spec.point(i, j));
      re.values(i, j) = w.real();
      im.values(i, j) = w.imag();
    }
  return {re, im};
}

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// CSV with header "re,im,w", rows in (re outer, im inner) order.
inline void write_csv(std::ostream& os, const PhaseGrid& g) {
  os << "re,im,w\n";
  for (Index i = 0; i < g.spec.n_re; ++i)
    for (Index j = 0; j < g.spec.n_im; ++j) {
      const cplx z = g.spec.point(i, j);
      os << format_double(z.real()) << ',' << format_double(z.imag()) << ',' << format_double(g.values(i, j))
         << '\n';
    }
}

}  // namespace jctes
