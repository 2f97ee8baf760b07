#pragma once

// Independent oracles shared by the unit tests and the acceptance binary.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "jctes/jctes.hpp"

namespace jctes::testing {

inline Eigen::MatrixXcd random_complex(Index rows, Index cols, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = scale * cplx(g(rng), g(rng));
  return m;
}

inline FockOperator random_density(Index n, unsigned seed) {
  const Eigen::MatrixXcd m = random_complex(n, n, seed);
  FockOperator rho = m * m.adjoint();
  return rho / rho.trace();
}

struct HeisenbergTriple {
  Eigen::MatrixXcd a, b, z;
};

/// Nilpotent Heisenberg triple on 6x6: two copies of A = E_01, B = E_12 with
/// Z = [A, B] = E_02 commuting with both.
inline HeisenbergTriple heisenberg_6x6() {
  HeisenbergTriple h;
  h.a = Eigen::MatrixXcd::Zero(6, 6);
  h.b = Eigen::MatrixXcd::Zero(6, 6);
  for (int off : {0, 3}) {
    h.a(off + 0, off + 1) = 1.0;
    h.b(off + 1, off + 2) = 1.0;
  }
  h.z = h.a * h.b - h.b * h.a;
  return h;
}

/// Normally ordered series for <m|U0(alpha)|n>, U0 = 2 D P D^+:
///   2 (-1)^{m+n} e^{i theta (m-n)} sum_l sqrt(m! n!)/l! R(m-l, n-l),
///   R(i, j) = sum_{k >= max(i,j)} (-2)^k/k! C(k,i) C(k,j) |alpha|^{2k-i-j}.
/// The alternating sums cancel by many orders of magnitude, so `Real` must
/// carry enough digits (about 150 for N = 50, |alpha| = 2).
template <class Real>
Eigen::MatrixXcd wigner_operator_series(cplx alpha, Index n_trunc) {
  const int n = static_cast<int>(n_trunc);
  const Real r2 = Real(std::norm(alpha));
  const Real r = sqrt(r2);
  const double theta = std::arg(alpha);
  std::vector<Real> fact(2 * n + 2);
  fact[0] = 1;
  for (std::size_t k = 1; k < fact.size(); ++k) fact[k] = fact[k - 1] * Real(static_cast<long>(k));
  const Real tiny = pow(Real(10), -120);

  std::vector<Real> big_r(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int k0 = std::max(i, j);
      // term(k0) = (-2)^k0 / k0! C(k0, i) C(k0, j) r^{2 k0 - i - j}
      Real term = pow(Real(2), k0) / fact[k0] * (fact[k0] / (fact[i] * fact[k0 - i])) *
                  (fact[k0] / (fact[j] * fact[k0 - j])) * pow(r, 2 * k0 - i - j);
      if (k0 % 2 == 1) term = -term;
      Real sum = term;
      Real peak = abs(term);
      for (int k = k0; k < k0 + 100000; ++k) {
        const Real ratio = Real(-2) * r2 * Real(k + 1) / (Real(k + 1 - i) * Real(k + 1 - j));
        term *= ratio;
        sum += term;
        if (abs(term) > peak) peak = abs(term);
        if (abs(ratio) < Real(0.5) && abs(term) <= tiny * peak) break;
      }
      big_r[static_cast<std::size_t>(i * n + j)] = sum;
    }

  Eigen::MatrixXcd out(n_trunc, n_trunc);
  for (int m = 0; m < n; ++m)
    for (int k = 0; k < n; ++k) {
      Real s = 0;
      const Real root = sqrt(fact[m] * fact[k]);
      for (int l = 0; l <= std::min(m, k); ++l)
        s += root / fact[l] * big_r[static_cast<std::size_t>((m - l) * n + (k - l))];
      const double sign = ((m + k) % 2 == 0) ? 2.0 : -2.0;
      out(m, k) = sign * static_cast<double>(s) * std::polar(1.0, theta * static_cast<double>(m - k));
    }
  return out;
}

}  // namespace jctes::testing
