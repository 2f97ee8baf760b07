#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <functional>
#include <utility>
#include <vector>

#include "jctes/fock.hpp"
#include "jctes/oracle.hpp"

namespace jctes {

/// |rho> = rho |eta = 0> in the doubled space; entry (m, n) is the amplitude of
/// |m> (x) |n~>, stored at m * dim + n.
struct DoubledVector {
  Index dim = 0;
  Eigen::VectorXcd entries;

  cplx operator()(Index m, Index n) const { return entries(m * dim + n); }
};

/// Dense N^2 x N^2 operator on DoubledVector.
struct DoubledOperator {
  Index dim = 0;
  Eigen::MatrixXcd matrix;
};

inline Index pair_index(Index m, Index n, Index dim) { return m * dim + n; }

/// Unnormalized sum_n |n, n~>.
inline DoubledVector eta_zero(Index n_trunc) {
  require_dim(n_trunc);
  DoubledVector v{n_trunc, Eigen::VectorXcd::Zero(n_trunc * n_trunc)};
  for (Index n = 0; n < n_trunc; ++n) v.entries(pair_index(n, n, n_trunc)) = 1.0;
  return v;
}

inline DoubledVector vectorize(const FockOperator& op) {
  if (op.rows() != op.cols()) throw InvalidArgument("vectorize: operator must be square");
  const Index n = op.rows();
  DoubledVector v{n, Eigen::VectorXcd(n * n)};
  for (Index m = 0; m < n; ++m)
    for (Index k = 0; k < n; ++k) v.entries(pair_index(m, k, n)) = op(m, k);
  return v;
}

inline FockOperator devectorize(const DoubledVector& v) {
  if (v.entries.size() != v.dim * v.dim) throw InvalidArgument("devectorize: size is not dim^2");
  FockOperator op(v.dim, v.dim);
  for (Index m = 0; m < v.dim; ++m)
    for (Index k = 0; k < v.dim; ++k) op(m, k) = v.entries(pair_index(m, k, v.dim));
  return op;
}

/// Physical mode (a) acts on the first index, fictitious mode (b) on the
/// second. With this layout b = 1 (x) a, and right-multiplying rho by X maps to
/// 1 (x) X^T, so rho a <-> b^+ and rho a^+ <-> b exactly, even when truncated.
struct TesAlgebra {
  Index dim = 0;
  SparseOperator identity;
  SparseOperator a, a_dag, b, b_dag;
  SparseOperator eta, eta_dag;  // a - b^+, a^+ - b
  SparseOperator xi, xi_dag;    // a + b^+, a^+ + b
  SparseOperator m_op, n_op;    // 3a - b^+, 3b - a^+
  SparseOperator loss;          // 2ab - a^+a - b^+b

  static TesAlgebra build(Index n_trunc) {
    require_dim(n_trunc);
    TesAlgebra t;
    t.dim = n_trunc;
    const SparseOperator one = FockOperator::Identity(n_trunc, n_trunc).sparseView();
    const SparseOperator lower = annihilation(n_trunc).sparseView();
    const SparseOperator raise = creation(n_trunc).sparseView();
    t.identity = kron(one, one);
    t.a = kron(lower, one);
    t.a_dag = kron(raise, one);
    t.b = kron(one, lower);
    t.b_dag = kron(one, raise);
    t.eta = t.a - t.b_dag;
    t.eta_dag = t.a_dag - t.b;
    t.xi = t.a + t.b_dag;
    t.xi_dag = t.a_dag + t.b;
    t.m_op = 3.0 * t.a - t.b_dag;
    t.n_op = 3.0 * t.b - t.a_dag;
    t.loss = 2.0 * SparseOperator(t.a * t.b) - SparseOperator(t.a_dag * t.a) - SparseOperator(t.b_dag * t.b);
    return t;
  }

  DoubledOperator dense(const SparseOperator& op) const { return {dim, Eigen::MatrixXcd(op)}; }

  static SparseOperator kron(const SparseOperator& x, const SparseOperator& y) {
    std::vector<Eigen::Triplet<cplx>> trips;
    for (Index r = 0; r < x.outerSize(); ++r)
      for (SparseOperator::InnerIterator i(x, r); i; ++i)
        for (Index s = 0; s < y.outerSize(); ++s)
          for (SparseOperator::InnerIterator j(y, s); j; ++j)
            trips.emplace_back(i.row() * y.rows() + j.row(), i.col() * y.cols() + j.col(), i.value() * j.value());
    SparseOperator out(x.rows() * y.rows(), x.cols() * y.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
  }
};

/// Time-dependent generator sum_k c_k(t) O_k with constant sparse terms.
class LinearGenerator {
 public:
  LinearGenerator() = default;
  explicit LinearGenerator(Index dim, double rate_bound = 0.0) : dim_(dim), rate_bound_(rate_bound) {}

  void add(SparseOperator op, std::function<cplx(double)> coeff) {
    terms_.emplace_back(std::move(op), std::move(coeff));
  }

  SparseOperator at(double t) const {
    SparseOperator g(dim_ * dim_, dim_ * dim_);
    for (const auto& [op, coeff] : terms_) {
      const cplx c = coeff(t);
      if (c != cplx(0.0)) g += c * op;
    }
    return g;
  }

  DoubledOperator dense_at(double t) const { return {dim_, Eigen::MatrixXcd(at(t))}; }

  Index dim() const { return dim_; }
  /// Rate used for the step-size bound; 0 disables the check.
  double rate_bound() const { return rate_bound_; }

 private:
  Index dim_ = 0;
  double rate_bound_ = 0.0;
  std::vector<std::pair<SparseOperator, std::function<cplx(double)>>> terms_;
};

/// g_+-(t) + (gamma/2) L with g_+- = -+ i lambda (eta e^{-i omega t} + eta^+ e^{i omega t}).
inline LinearGenerator generator_pm_family(int sign, const ModelParams& p, const TesAlgebra& alg) {
  p.validate();
  if (alg.dim != p.n_trunc) throw InvalidArgument("generator_pm: algebra dimension mismatch");
  const cplx c = -static_cast<double>(sign) * kI * p.lambda_c;
  const double w = p.omega;
  LinearGenerator g(p.n_trunc, p.rate_bound());
  g.add(alg.eta, [c, w](double t) { return c * std::polar(1.0, -w * t); });
  g.add(alg.eta_dag, [c, w](double t) { return c * std::polar(1.0, w * t); });
  const double half_gamma = 0.5 * p.gamma;
  g.add(alg.loss, [half_gamma](double) { return cplx(half_gamma); });
  return g;
}

/// g_c(t) + (gamma/2) L with g_c = -i lambda (xi e^{-i omega t} + xi^+ e^{i omega t}).
inline LinearGenerator generator_c_family(const ModelParams& p, const TesAlgebra& alg) {
  p.validate();
  if (alg.dim != p.n_trunc) throw InvalidArgument("generator_c: algebra dimension mismatch");
  const cplx c = -kI * p.lambda_c;
  const double w = p.omega;
  LinearGenerator g(p.n_trunc, p.rate_bound());
  g.add(alg.xi, [c, w](double t) { return c * std::polar(1.0, -w * t); });
  g.add(alg.xi_dag, [c, w](double t) { return c * std::polar(1.0, w * t); });
  const double half_gamma = 0.5 * p.gamma;
  g.add(alg.loss, [half_gamma](double) { return cplx(half_gamma); });
  return g;
}

inline DoubledOperator generator_pm(int sign, double t, const ModelParams& p) {
  return generator_pm_family(sign, p, TesAlgebra::build(p.n_trunc)).dense_at(t);
}

inline DoubledOperator generator_c(double t, const ModelParams& p) {
  return generator_c_family(p, TesAlgebra::build(p.n_trunc)).dense_at(t);
}

/// Midpoint-exponential product integration v <- exp(h G(t + h/2)) v.
inline DoubledVector evolve_vectorized(const LinearGenerator& g, const DoubledVector& v0, const TimeGrid& grid,
                                       double stability_limit = 0.1) {
  grid.validate();
  if (v0.dim != g.dim()) throw InvalidArgument("evolve_vectorized: vector/generator dimension mismatch");
  const double h = grid.step();
  if (h * g.rate_bound() > stability_limit * (1.0 + 1e-12))
    throw StepTooLarge("evolve_vectorized: h * rate bound = " + std::to_string(h * g.rate_bound()) + " > " +
                       std::to_string(stability_limit));
  DoubledVector v = v0;
  for (std::size_t k = 0; k < grid.n_steps; ++k) {
    const SparseOperator gm = g.at(grid.time(k) + 0.5 * h);
    v.entries = expm_action(gm, v.entries, h);
  }
  return v;
}

inline Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) { return x * y - y * x; }

inline SparseOperator commutator(const SparseOperator& x, const SparseOperator& y) {
  return SparseOperator(x * y) - SparseOperator(y * x);
}

/// Pair indices (m, n) with m, n <= dim - 5, where the infinite-dimensional
/// ladder identities hold exactly in the truncated space.
inline std::vector<Index> interior_pairs(Index dim) {
  std::vector<Index> idx;
  const Index top = dim - kBoundaryLevels;
  for (Index m = 0; m < top; ++m)
    for (Index n = 0; n < top; ++n) idx.push_back(pair_index(m, n, dim));
  return idx;
}

/// Max |entry| of a doubled-space matrix restricted to interior rows and columns.
inline double interior_max_abs(const Eigen::MatrixXcd& m, Index dim) {
  const auto idx = interior_pairs(dim);
  double best = 0.0;
  for (Index c : idx)
    for (Index r : idx) best = std::max(best, std::abs(m(r, c)));
  return best;
}

inline double interior_max_abs(const SparseOperator& m, Index dim) {
  const Index top = dim - kBoundaryLevels;
  auto interior = [&](Index k) { return k / dim < top && k % dim < top; };
  double best = 0.0;
  for (Index r = 0; r < m.outerSize(); ++r) {
    if (!interior(r)) continue;
    for (SparseOperator::InnerIterator it(m, r); it; ++it)
      if (interior(it.col())) best = std::max(best, std::abs(it.value()));
  }
  return best;
}

inline double interior_max_abs(const DoubledVector& v) { return interior_max_abs(devectorize(v)); }

}  // namespace jctes
