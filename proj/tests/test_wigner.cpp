#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <sstream>

#include "jctes/analytic.hpp"
#include "jctes/io.hpp"
#include "jctes/wigner.hpp"
#include "support.hpp"

using namespace jctes;

namespace {

using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<150>>;

const ModelParams kStandard{1.0, 0.1, 0.2, 40};

FockOperator coherent_projector(cplx alpha, Index n) { return projector(coherent_state(alpha, n).amplitudes); }

PhaseGridSpec square(double half, Index n) { return {-half, half, -half, half, n, n}; }

}  // namespace

TEST(WignerOperator, AgreesWithNormallyOrderedSeries) {
  const Index n = 50;
  for (cplx alpha : {cplx(0.0), cplx(0.3, -0.2), cplx(1.0, 0.5), cplx(-1.2, 1.5), cplx(0.0, 2.0)}) {
    const Eigen::MatrixXcd series = jctes::testing::wigner_operator_series<Wide>(alpha, n);
    const Eigen::MatrixXcd parity = wigner_operator(alpha, n);
    EXPECT_LE((series - parity).cwiseAbs().maxCoeff(), 1e-8) << alpha;
  }
}

TEST(WignerOperator, BasicProperties) {
  // At the origin it is twice the parity operator.
  const FockOperator u = wigner_operator(0.0, 8);
  for (Index k = 0; k < 8; ++k) EXPECT_NEAR(u(k, k).real(), k % 2 == 0 ? 2.0 : -2.0, 1e-14);
  EXPECT_NEAR((u - FockOperator(u.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  EXPECT_LE(hermiticity_defect(wigner_operator(cplx(0.7, -1.1), 20)), 1e-13);
}

TEST(WignerValue, CoherentAndFockStates) {
  const cplx a0(0.6, -0.4);
  const FockOperator rho = coherent_projector(a0, 40);
  for (cplx z : {a0, cplx(0.0), cplx(1.0, 1.0)})
    EXPECT_NEAR(wigner_at(rho, z), 2.0 * std::exp(-2.0 * std::norm(z - a0)), 1e-12);
  // |1><1|: W = 2 (4|z|^2 - 1) e^{-2|z|^2}.
  FockOperator one = FockOperator::Zero(10, 10);
  one(1, 1) = 1.0;
  const cplx z(0.4, 0.3);
  EXPECT_NEAR(wigner_at(one, z), 2.0 * (4.0 * std::norm(z) - 1.0) * std::exp(-2.0 * std::norm(z)), 1e-12);
}

TEST(WignerValue, RejectsNonHermitian) {
  FockOperator m = FockOperator::Zero(4, 4);
  m(0, 1) = 1.0;
  EXPECT_THROW(wigner_at(m, 0.0), InvalidArgument);
  EXPECT_THROW(wigner_grid(m, square(1.0, 3)), InvalidArgument);
  EXPECT_THROW(wigner_at(Eigen::MatrixXcd::Zero(2, 3), 0.0), InvalidArgument);
  // The complex variant accepts it.
  const auto [re, im] = wigner_grid_complex(m, square(1.0, 3));
  EXPECT_EQ(re.values.rows(), 3);
  EXPECT_EQ(im.values.cols(), 3);
}

TEST(WignerGrid, ClosedFormMatchesAnalyticStates) {
  const ModelParams& p = kStandard;
  const cplx a0 = 1.0;
  const PhaseGridSpec spec = square(2.5, 21);
  for (int sign : {+1, -1})
    for (double t : {0.0, 1.5, 5.0}) {
      const PhaseGrid grid = wigner_grid(rho_pm_analytic(coherent_projector(a0, p.n_trunc), t, p, sign), spec);
      const PhaseGrid closed = sample_phase_grid(spec, [&](cplx z) { return wigner_closed_pm(z, t, p, sign, a0); });
      EXPECT_LE((grid.values - closed.values).cwiseAbs().maxCoeff(), 1e-6) << "t=" << t;
    }
}

TEST(WignerGrid, NormalizationAndPeak) {
  const cplx a0(0.5, 0.5);
  const PhaseGrid g = wigner_grid(coherent_projector(a0, 40), PhaseGridSpec{-3.0, 3.0, -3.0, 3.0, 61, 61});
  EXPECT_NEAR(g.normalization(), 1.0, 0.01);
  const auto [i, j] = g.argmax();
  EXPECT_LT(std::abs(g.spec.point(i, j) - a0), 1e-12);
  EXPECT_NEAR(g.values(i, j), 2.0, 1e-12);

  // Trace of a non-Hermitian operator is also reproduced.
  const FockOperator c = rho_c_analytic(coherent_projector(1.0, 40), 2.0, kStandard, RhoCForm::corrected);
  const auto [re, im] = wigner_grid_complex(c, PhaseGridSpec{-4.0, 4.0, -4.0, 4.0, 81, 81});
  EXPECT_NEAR(re.normalization(), c.trace().real(), 0.01);
  EXPECT_NEAR(im.normalization(), c.trace().imag(), 0.01);
}

TEST(WignerGrid, SpecValidation) {
  EXPECT_THROW((PhaseGridSpec{0.0, 1.0, 0.0, 1.0, 0, 3}.validate()), InvalidArgument);
  EXPECT_THROW((PhaseGridSpec{1.0, 0.0, 0.0, 1.0, 3, 3}.validate()), InvalidArgument);
  const PhaseGridSpec single{0.5, 0.5, -0.5, -0.5, 1, 1};
  EXPECT_EQ(single.point(0, 0), cplx(0.5, -0.5));
}

TEST(WignerGrid, CsvAndJsonLayout) {
  const PhaseGrid g = sample_phase_grid(PhaseGridSpec{0.0, 1.0, -1.0, 1.0, 2, 3},
                                        [](cplx z) { return z.real() + 10.0 * z.imag(); });
  std::ostringstream os;
  write_csv(os, g);
  EXPECT_EQ(os.str(), "re,im,w\n0,-1,-10\n0,0,0\n0,1,10\n1,-1,-9\n1,0,1\n1,1,11\n");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);

  const auto j = io::phase_grid_to_json(g);
  EXPECT_EQ(j.at("n_re"), 2);
  EXPECT_EQ(j.at("n_im"), 3);
  EXPECT_EQ(j.at("values").at(1).at(2), 11.0);
  EXPECT_DOUBLE_EQ(j.at("normalization").get<double>(), g.normalization());
}
