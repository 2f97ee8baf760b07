#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "jctes/errors.hpp"
#include "jctes/expm.hpp"

namespace jctes {

/// Single-mode operator in the truncated number basis: entry (r, c) = <r|O|c>.
using FockOperator = Eigen::MatrixXcd;
/// Single-mode state amplitudes <n|psi>.
using FockVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Top Fock levels excluded from every tolerance claim; their population is
/// reported as the tail weight.
inline constexpr Index kBoundaryLevels = 4;

/// Field frequency, coupling, cavity decay rate and Fock truncation.
struct ModelParams {
  double omega = 1.0;
  double lambda_c = 0.0;
  double gamma = 0.0;
  Index n_trunc = 2;

  void validate() const {
    if (!std::isfinite(omega)) throw InvalidArgument("omega must be finite");
    if (!std::isfinite(lambda_c)) throw InvalidArgument("lambda must be finite");
    if (!std::isfinite(gamma) || gamma < 0.0) throw InvalidArgument("gamma must be finite and >= 0");
    if (n_trunc < 2) throw InvalidArgument("n_trunc must be >= 2");
  }

  /// Spectral-radius estimate used by the fixed-step integrators.
  double rate_bound() const {
    return std::max({std::abs(omega), std::abs(lambda_c), gamma, gamma * static_cast<double>(n_trunc)});
  }
};

inline void require_dim(Index n_trunc) {
  if (n_trunc < 2) throw InvalidArgument("Fock truncation must be >= 2, got " + std::to_string(n_trunc));
}

inline FockOperator annihilation(Index n_trunc) {
  require_dim(n_trunc);
  FockOperator a = FockOperator::Zero(n_trunc, n_trunc);
  for (Index n = 1; n < n_trunc; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline FockOperator creation(Index n_trunc) { return annihilation(n_trunc).adjoint(); }

inline FockOperator number_operator(Index n_trunc) {
  require_dim(n_trunc);
  FockOperator n = FockOperator::Zero(n_trunc, n_trunc);
  for (Index k = 0; k < n_trunc; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

/// Photon-number parity diag((-1)^n).
inline FockOperator parity(Index n_trunc) {
  FockOperator p = FockOperator::Zero(n_trunc, n_trunc);
  for (Index k = 0; k < n_trunc; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return p;
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double hermiticity_defect(const Eigen::MatrixXcd& m) { return max_abs(m - m.adjoint()); }

/// Max |entry| over levels 0..N-5 in both indices.
inline double interior_max_abs(const FockOperator& m) {
  const Index k = std::max<Index>(1, m.rows() - kBoundaryLevels);
  return max_abs(m.topLeftCorner(k, k));
}

/// Sum of |diagonal| over the top kBoundaryLevels levels.
inline double tail_weight(const FockOperator& rho) {
  const Index n = rho.rows();
  double w = 0.0;
  for (Index k = std::max<Index>(0, n - kBoundaryLevels); k < n; ++k) w += std::abs(rho(k, k));
  return w;
}

/// O(N^2) products with the ladder operators; row r / column c conventions as
/// in annihilation().
namespace ladder {

inline FockOperator a_left(const FockOperator& m) {
  const Index n = m.rows();
  FockOperator out = FockOperator::Zero(n, m.cols());
  for (Index r = 0; r + 1 < n; ++r) out.row(r) = std::sqrt(static_cast<double>(r + 1)) * m.row(r + 1);
  return out;
}

inline FockOperator adag_left(const FockOperator& m) {
  const Index n = m.rows();
  FockOperator out = FockOperator::Zero(n, m.cols());
  for (Index r = 1; r < n; ++r) out.row(r) = std::sqrt(static_cast<double>(r)) * m.row(r - 1);
  return out;
}

inline FockOperator a_right(const FockOperator& m) {
  const Index n = m.cols();
  FockOperator out = FockOperator::Zero(m.rows(), n);
  for (Index c = 1; c < n; ++c) out.col(c) = std::sqrt(static_cast<double>(c)) * m.col(c - 1);
  return out;
}

inline FockOperator adag_right(const FockOperator& m) {
  const Index n = m.cols();
  FockOperator out = FockOperator::Zero(m.rows(), n);
  for (Index c = 0; c + 1 < n; ++c) out.col(c) = std::sqrt(static_cast<double>(c + 1)) * m.col(c + 1);
  return out;
}

inline FockOperator n_left(const FockOperator& m) {
  FockOperator out = m;
  for (Index r = 0; r < m.rows(); ++r) out.row(r) *= static_cast<double>(r);
  return out;
}

inline FockOperator n_right(const FockOperator& m) {
  FockOperator out = m;
  for (Index c = 0; c < m.cols(); ++c) out.col(c) *= static_cast<double>(c);
  return out;
}

}  // namespace ladder

/// (gamma/2)(2 a rho a^+ - a^+a rho - rho a^+a); the single cavity-loss
/// dissipator used throughout.
inline FockOperator dissipator(const FockOperator& rho, double gamma) {
  if (gamma == 0.0) return FockOperator::Zero(rho.rows(), rho.cols());
  return (0.5 * gamma) *
         (2.0 * ladder::a_left(ladder::adag_right(rho)) - ladder::n_left(rho) - ladder::n_right(rho));
}

/// D(alpha) = exp(alpha a^+ - alpha^* a) on the truncated space.
inline FockOperator displacement(cplx alpha, Index n_trunc) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    throw InvalidArgument("displacement: non-finite alpha");
  const FockOperator a = annihilation(n_trunc);
  return matrix_exponential(alpha * a.adjoint() - std::conj(alpha) * a);
}

/// Matrix elements <m|D(alpha)|k> of the untruncated displacement operator for
/// m < rows, k < cols. Built column by column from D|k> = (a^+ - alpha^*) D|k-1> / sqrt(k),
/// which only ever reads lower rows, so every entry is exact.
inline Eigen::MatrixXcd displacement_block(cplx alpha, Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw InvalidArgument("displacement_block: empty block");
  Eigen::MatrixXcd d(rows, cols);
  d(0, 0) = std::exp(-0.5 * std::norm(alpha));
  for (Index m = 1; m < rows; ++m) d(m, 0) = d(m - 1, 0) * alpha / std::sqrt(static_cast<double>(m));
  const cplx shift = std::conj(alpha);
  for (Index k = 1; k < cols; ++k) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(k));
    d(0, k) = -shift * d(0, k - 1) * inv;
    for (Index m = 1; m < rows; ++m)
      d(m, k) = (std::sqrt(static_cast<double>(m)) * d(m - 1, k - 1) - shift * d(m, k - 1)) * inv;
  }
  return d;
}

struct CoherentState {
  FockVector amplitudes;
  /// Weight 1 - sum |c_n|^2 lost to truncation before renormalization.
  double truncated_weight = 0.0;
  bool tail_warning() const { return truncated_weight > 1e-10; }
};

/// |alpha> truncated to n_trunc levels and renormalized.
inline CoherentState coherent_state(cplx alpha, Index n_trunc) {
  require_dim(n_trunc);
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    throw InvalidArgument("coherent_state: non-finite alpha");
  CoherentState out;
  out.amplitudes.resize(n_trunc);
  out.amplitudes(0) = std::exp(-0.5 * std::norm(alpha));
  for (Index n = 1; n < n_trunc; ++n)
    out.amplitudes(n) = out.amplitudes(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  const double norm2 = out.amplitudes.squaredNorm();
  out.truncated_weight = std::max(0.0, 1.0 - norm2);
  out.amplitudes /= std::sqrt(norm2);
  return out;
}

inline FockOperator projector(const FockVector& psi) { return psi * psi.adjoint(); }

/// |<phi|psi>|^2 for pure states; Tr(rho sigma) for a pure sigma.
inline double fidelity_with_pure(const FockOperator& rho, const FockVector& psi) {
  return (psi.adjoint() * rho * psi)(0, 0).real();
}

}  // namespace jctes
