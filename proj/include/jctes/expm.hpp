#pragma once

#include <Eigen/Dense>
#include <Eigen/LU>
#include <Eigen/SparseCore>

#include <array>
#include <cmath>
#include <complex>

#include "jctes/errors.hpp"

namespace jctes {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using SparseOperator = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Induced 1-norm (maximum absolute column sum).
inline double one_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

inline double one_norm(const SparseOperator& m) {
  Eigen::VectorXd col = Eigen::VectorXd::Zero(m.cols());
  for (Index r = 0; r < m.outerSize(); ++r)
    for (SparseOperator::InnerIterator it(m, r); it; ++it) col(it.col()) += std::abs(it.value());
  return m.cols() == 0 ? 0.0 : col.maxCoeff();
}

namespace detail {

// Padé coefficients and thresholds from Higham, "The scaling and squaring
// method for the matrix exponential revisited" (2005), double precision.
inline constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
inline constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
inline constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                                 25200.0,    1512.0,    56.0,      1.0};
inline constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                                  302702400.0,   30270240.0,   2162160.0,
                                                  110880.0,      3960.0,       90.0,
                                                  1.0};
inline constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};
inline constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                                 9.504178996162932e-1, 2.097847961257068e0};
inline constexpr double kTheta13 = 5.371920351148152e0;

template <std::size_t K>
Eigen::MatrixXcd pade_low(const Eigen::MatrixXcd& a, const std::array<double, K>& b) {
  const Index n = a.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd a2 = a * a;
  Eigen::MatrixXcd power = id;
  Eigen::MatrixXcd odd = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd even = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t k = 0; k + 1 < K; k += 2) {
    even += b[k] * power;
    odd += b[k + 1] * power;
    power = power * a2;
  }
  const Eigen::MatrixXcd u = a * odd;
  return (even - u).partialPivLu().solve(even + u);
}

inline Eigen::MatrixXcd pade13(const Eigen::MatrixXcd& a) {
  const auto& b = kPade13;
  const Index n = a.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd a2 = a * a;
  const Eigen::MatrixXcd a4 = a2 * a2;
  const Eigen::MatrixXcd a6 = a4 * a2;
  const Eigen::MatrixXcd u =
      a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
           b[1] * id);
  const Eigen::MatrixXcd v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// exp(scale * op) by scaling and squaring with a Padé approximant whose
/// degree and squaring count are chosen from the 1-norm.
inline Eigen::MatrixXcd matrix_exponential(const Eigen::MatrixXcd& op, cplx scale = 1.0) {
  if (op.rows() != op.cols()) throw InvalidArgument("matrix_exponential: matrix must be square");
  if (!std::isfinite(scale.real()) || !std::isfinite(scale.imag()) || !op.allFinite())
    throw InvalidArgument("matrix_exponential: non-finite entries");
  const Index n = op.rows();
  if (n == 0) return op;
  const Eigen::MatrixXcd a = scale * op;
  const double norm = one_norm(a);
  if (norm == 0.0) return Eigen::MatrixXcd::Identity(n, n);
  if (norm <= detail::kTheta[0]) return detail::pade_low(a, detail::kPade3);
  if (norm <= detail::kTheta[1]) return detail::pade_low(a, detail::kPade5);
  if (norm <= detail::kTheta[2]) return detail::pade_low(a, detail::kPade7);
  if (norm <= detail::kTheta[3]) return detail::pade_low(a, detail::kPade9);

  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / detail::kTheta13))));
  Eigen::MatrixXcd result = detail::pade13(a / std::ldexp(1.0, squarings));
  for (int k = 0; k < squarings; ++k) result = result * result;
  return result;
}

/// exp(scale * g) * v by a truncated Taylor series on sub-steps of unit norm.
/// Works for dense and sparse `g` and for a vector or a block of columns `v`;
/// never forms the exponential.
template <class Matrix, class Block = Eigen::VectorXcd>
Block expm_action(const Matrix& g, const Block& v, cplx scale = 1.0) {
  const double norm = std::abs(scale) * one_norm(g);
  if (!std::isfinite(norm)) throw InvalidArgument("expm_action: non-finite generator");
  const int substeps = std::max(1, static_cast<int>(std::ceil(norm)));
  const cplx h = scale / static_cast<double>(substeps);

  Block out = v;
  for (int s = 0; s < substeps; ++s) {
    Block term = out;
    double previous = term.template lpNorm<Eigen::Infinity>();
    for (int k = 1; k <= 80; ++k) {
      term = (h / static_cast<double>(k)) * (g * term);
      out += term;
      const double current = term.template lpNorm<Eigen::Infinity>();
      if (current + previous <= 1e-17 * out.template lpNorm<Eigen::Infinity>()) break;
      previous = current;
    }
  }
  return out;
}

}  // namespace jctes
