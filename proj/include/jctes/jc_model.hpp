#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>

#include "jctes/fock.hpp"

namespace jctes {

enum class Spin { up, down };

/// Atom-field density operator as the 2x2 spin block of field operators
/// rho_ij = <i|rho|j>, with index 1 = up and 2 = down. The full 2N x 2N
/// matrix uses spin-outer ordering: row s*N + n, s = 0 for up.
struct JointDensity {
  FockOperator up_up;
  FockOperator up_down;
  FockOperator down_up;
  FockOperator down_down;

  Index dim() const { return up_up.rows(); }

  static JointDensity zero(Index n) {
    const FockOperator z = FockOperator::Zero(n, n);
    return {z, z, z, z};
  }

  static JointDensity product(const FockOperator& field, Spin spin) {
    JointDensity j = zero(field.rows());
    (spin == Spin::up ? j.up_up : j.down_down) = field;
    return j;
  }

  static JointDensity from_matrix(const Eigen::MatrixXcd& full) {
    if (full.rows() != full.cols() || full.rows() % 2 != 0 || full.rows() < 4)
      throw InvalidArgument("JointDensity: expected a square 2N x 2N matrix with N >= 2");
    const Index n = full.rows() / 2;
    return {full.topLeftCorner(n, n), full.topRightCorner(n, n), full.bottomLeftCorner(n, n),
            full.bottomRightCorner(n, n)};
  }

  Eigen::MatrixXcd to_matrix() const {
    const Index n = dim();
    Eigen::MatrixXcd full(2 * n, 2 * n);
    full << up_up, up_down, down_up, down_down;
    return full;
  }

  cplx trace() const { return up_up.trace() + down_down.trace(); }

  JointDensity& operator+=(const JointDensity& o) {
    up_up += o.up_up;
    up_down += o.up_down;
    down_up += o.down_up;
    down_down += o.down_down;
    return *this;
  }

  JointDensity& operator*=(cplx s) {
    up_up *= s;
    up_down *= s;
    down_up *= s;
    down_down *= s;
    return *this;
  }
};

inline JointDensity operator+(JointDensity lhs, const JointDensity& rhs) { return lhs += rhs; }
inline JointDensity operator*(cplx s, JointDensity j) { return j *= s; }
inline JointDensity operator*(double s, JointDensity j) { return j *= cplx(s); }
inline JointDensity operator-(JointDensity lhs, const JointDensity& rhs) { return lhs += (-1.0) * rhs; }

inline double max_abs(const JointDensity& j) {
  return std::max({max_abs(j.up_up), max_abs(j.up_down), max_abs(j.down_up), max_abs(j.down_down)});
}

inline double interior_max_abs(const JointDensity& j) {
  return std::max({interior_max_abs(j.up_up), interior_max_abs(j.up_down), interior_max_abs(j.down_up),
                   interior_max_abs(j.down_down)});
}

inline double hermiticity_defect(const JointDensity& j) { return hermiticity_defect(j.to_matrix()); }

inline double min_eigenvalue(const JointDensity& j) {
  const Eigen::MatrixXcd full = j.to_matrix();
  const Eigen::MatrixXcd h = 0.5 * (full + full.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double tail_weight(const JointDensity& j) { return tail_weight(j.up_up) + tail_weight(j.down_down); }

inline double photon_number(const JointDensity& j) {
  return (ladder::n_left(j.up_up + j.down_down)).trace().real();
}

/// <sigma_3> = Tr rho_11 - Tr rho_22.
inline double sigma_z(const JointDensity& j) { return (j.up_up.trace() - j.down_down.trace()).real(); }

inline double purity(const JointDensity& j) {
  const Eigen::MatrixXcd full = j.to_matrix();
  return (full.cwiseProduct(full.transpose())).sum().real();
}

/// Pauli components rho_0..rho_3 with rho = (1/2) sum_i rho_i sigma_i.
struct ComponentSet {
  std::array<FockOperator, 4> sigma;

  const FockOperator& operator[](std::size_t i) const { return sigma[i]; }
  FockOperator& operator[](std::size_t i) { return sigma[i]; }

  ComponentSet& operator+=(const ComponentSet& o) {
    for (std::size_t i = 0; i < 4; ++i) sigma[i] += o.sigma[i];
    return *this;
  }
  ComponentSet& operator*=(cplx s) {
    for (auto& m : sigma) m *= s;
    return *this;
  }
};

inline ComponentSet operator+(ComponentSet lhs, const ComponentSet& rhs) { return lhs += rhs; }
inline ComponentSet operator*(cplx s, ComponentSet c) { return c *= s; }
inline ComponentSet operator*(double s, ComponentSet c) { return c *= cplx(s); }

/// The decoupled combinations rho_+- = rho_0 +- rho_1 and rho_c = rho_3 + i rho_2.
struct DerivedComponents {
  FockOperator plus;
  FockOperator minus;
  FockOperator c;
};

inline ComponentSet split_components(const JointDensity& j) {
  return {{j.up_up + j.down_down, j.up_down + j.down_up, kI * (j.up_down - j.down_up),
           j.up_up - j.down_down}};
}

inline JointDensity combine_components(const ComponentSet& c) {
  return {0.5 * (c[0] + c[3]), 0.5 * (c[1] - kI * c[2]), 0.5 * (c[1] + kI * c[2]), 0.5 * (c[0] - c[3])};
}

inline DerivedComponents derived_components(const ComponentSet& c) {
  return {c[0] + c[1], c[0] - c[1], c[3] + kI * c[2]};
}

/// Inverse of derived_components; needs rho_2, rho_3 Hermitian to split rho_c.
inline ComponentSet components_from_derived(const DerivedComponents& d) {
  const FockOperator rho3 = 0.5 * (d.c + d.c.adjoint());
  const FockOperator rho2 = (d.c - d.c.adjoint()) / (2.0 * kI);
  return {{0.5 * (d.plus + d.minus), 0.5 * (d.plus - d.minus), rho2, rho3}};
}

/// H = omega a^+a (x) 1 + lambda (a^+ + a) (x) (sigma_+ + sigma_-), spin-outer ordering.
inline Eigen::MatrixXcd hamiltonian_full(const ModelParams& p) {
  p.validate();
  const Index n = p.n_trunc;
  const FockOperator a = annihilation(n);
  const FockOperator field = p.omega * number_operator(n);
  const FockOperator coupling = p.lambda_c * (a + a.adjoint());
  Eigen::MatrixXcd h(2 * n, 2 * n);
  h << field, coupling, coupling, field;
  return h;
}

namespace detail {

/// X M with X = e^{i phi} a^+ + e^{-i phi} a.
inline FockOperator quadrature_left(const FockOperator& m, double phi) {
  const cplx ph = std::polar(1.0, phi);
  return ph * ladder::adag_left(m) + std::conj(ph) * ladder::a_left(m);
}

/// M X with X = e^{i phi} a^+ + e^{-i phi} a.
inline FockOperator quadrature_right(const FockOperator& m, double phi) {
  const cplx ph = std::polar(1.0, phi);
  return ph * ladder::adag_right(m) + std::conj(ph) * ladder::a_right(m);
}

inline void require_match(const JointDensity& rho, const ModelParams& p) {
  if (rho.dim() != p.n_trunc)
    throw InvalidArgument("dimension mismatch: rho has N=" + std::to_string(rho.dim()) +
                          ", params have N=" + std::to_string(p.n_trunc));
}

// -i[H, rho] + D[rho] with H = free_omega a^+a + lambda X(phi) sigma_1.
inline JointDensity joint_rhs(const JointDensity& rho, double free_omega, double lambda, double phi,
                              double gamma) {
  auto block = [&](const FockOperator& self, const FockOperator& left_partner,
                   const FockOperator& right_partner) {
    FockOperator d = dissipator(self, gamma);
    if (free_omega != 0.0) d += (-kI * free_omega) * (ladder::n_left(self) - ladder::n_right(self));
    if (lambda != 0.0)
      d += (-kI * lambda) * (quadrature_left(left_partner, phi) - quadrature_right(right_partner, phi));
    return d;
  };
  // (H rho)_{s s'} couples rho_{s-bar s'}; (rho H)_{s s'} couples rho_{s s'-bar}.
  return {block(rho.up_up, rho.down_up, rho.up_down), block(rho.up_down, rho.down_down, rho.up_up),
          block(rho.down_up, rho.up_up, rho.down_down), block(rho.down_down, rho.up_down, rho.down_up)};
}

}  // namespace detail

/// Schrodinger-picture damped JC master equation.
inline JointDensity lindblad_rhs(const JointDensity& rho, const ModelParams& p) {
  detail::require_match(rho, p);
  return detail::joint_rhs(rho, p.omega, p.lambda_c, 0.0, p.gamma);
}

/// Same equation in the rotational interaction picture, where the coupling is
/// lambda X(t) sigma_1 with X(t) = a^+ e^{i omega t} + a e^{-i omega t}.
inline JointDensity lindblad_rhs_rotational(const JointDensity& rho, double t, const ModelParams& p) {
  detail::require_match(rho, p);
  return detail::joint_rhs(rho, 0.0, p.lambda_c, p.omega * t, p.gamma);
}

/// U^+ M U with U = exp(-i omega t a^+a); applied entrywise as phases.
inline FockOperator rotate_into(const FockOperator& m, double omega_t) {
  FockOperator out = m;
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r)
      out(r, c) *= std::polar(1.0, omega_t * static_cast<double>(r - c));
  return out;
}

/// U M U^+, the inverse of rotate_into.
inline FockOperator rotate_out_of(const FockOperator& m, double omega_t) { return rotate_into(m, -omega_t); }

inline JointDensity to_rotational_picture(const JointDensity& rho, double t, const ModelParams& p) {
  const double wt = p.omega * t;
  return {rotate_into(rho.up_up, wt), rotate_into(rho.up_down, wt), rotate_into(rho.down_up, wt),
          rotate_into(rho.down_down, wt)};
}

inline JointDensity from_rotational_picture(const JointDensity& rho, double t, const ModelParams& p) {
  const double wt = p.omega * t;
  return {rotate_out_of(rho.up_up, wt), rotate_out_of(rho.up_down, wt), rotate_out_of(rho.down_up, wt),
          rotate_out_of(rho.down_down, wt)};
}

/// -i lambda [X(t), M].
inline FockOperator coupling_commutator(const FockOperator& m, double t, const ModelParams& p) {
  const double phi = p.omega * t;
  return (-kI * p.lambda_c) * (detail::quadrature_left(m, phi) - detail::quadrature_right(m, phi));
}

/// -i lambda {X(t), M}.
inline FockOperator coupling_anticommutator(const FockOperator& m, double t, const ModelParams& p) {
  const double phi = p.omega * t;
  return (-kI * p.lambda_c) * (detail::quadrature_left(m, phi) + detail::quadrature_right(m, phi));
}

/// The four coupled component equations in the rotational picture.
inline ComponentSet component_rhs(const ComponentSet& c, double t, const ModelParams& p) {
  const double g = p.gamma;
  // -lambda{X, rho_3} = -i * (-i lambda {X, rho_3}) and +lambda{X, rho_2} = i * (-i lambda{X, rho_2}).
  return {{coupling_commutator(c[1], t, p) + dissipator(c[0], g),
           coupling_commutator(c[0], t, p) + dissipator(c[1], g),
           -kI * coupling_anticommutator(c[3], t, p) + dissipator(c[2], g),
           kI * coupling_anticommutator(c[2], t, p) + dissipator(c[3], g)}};
}

/// d rho_+-/dt = -+ i lambda [X(t), rho_+-] + D[rho_+-]; sign = +1 or -1.
inline FockOperator pm_rhs(const FockOperator& m, double t, const ModelParams& p, int sign) {
  return static_cast<double>(sign) * coupling_commutator(m, t, p) + dissipator(m, p.gamma);
}

/// d rho_c/dt = -i lambda {X(t), rho_c} + D[rho_c].
inline FockOperator c_rhs(const FockOperator& m, double t, const ModelParams& p) {
  return coupling_anticommutator(m, t, p) + dissipator(m, p.gamma);
}

}  // namespace jctes
