#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "common.hpp"
#include "oracles.hpp"

#include "kk/basegeo.hpp"
#include "kk/error.hpp"

using namespace kk;
using namespace kk::basegeo;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd eye(int n) { return MatrixXd::Identity(n, n); }

CoframeField sphere() { return CoframeField::parse({{"1", "0"}, {"0", "sin(x1)"}}, eye(2)); }

}  // namespace

TEST(BaseGeo, LatticeOrderLastAxisFastest) {
  auto pts = expand_lattice({{0.0, 1.0}, {1.0, 2.0}, {2, 3}});
  ASSERT_EQ(pts.size(), 6u);
  EXPECT_EQ(pts[0], (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(pts[1], (std::vector<double>{0.0, 1.5}));
  EXPECT_EQ(pts[3], (std::vector<double>{1.0, 1.0}));
}

TEST(BaseGeo, UnitSphere) {
  auto cf = sphere();
  for (int i = 0; i < 20; ++i) {
    const double theta = 0.2 + 0.13 * i;
    const std::vector<double> x{theta, 0.3 * i};
    auto curv = base_curvature(cf, x);
    EXPECT_NEAR(curv.scalar, 2.0, 1e-12);
    // γ^1_22 = −cot θ
    auto gamma = levi_civita(cf, x);
    EXPECT_NEAR(gamma(0, 1, 1), -std::cos(theta) / std::sin(theta), 1e-12);
    GeometryOptions fd;
    fd.mode = DerivativeMode::FiniteDifference;
    EXPECT_NEAR(base_curvature(cf, x, fd).scalar, 2.0, 1e-6);
  }
}

TEST(BaseGeo, FlatTimesSphere) {
  auto cf = CoframeField::parse({{"1", "0", "0", "0"}, {"0", "1", "0", "0"}, {"0", "0", "1", "0"},
                                 {"0", "0", "0", "sin(x3)"}},
                                eye(4));
  auto curv = base_curvature(cf, std::vector<double>{0.1, 0.2, 1.0, 0.5});
  MatrixXd expected = MatrixXd::Zero(4, 4);
  expected(2, 2) = expected(3, 3) = 1.0;
  EXPECT_LE((curv.ricci - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(curv.scalar, 2.0, 1e-12);
}

TEST(BaseGeo, RindlerIsFlat) {
  MatrixXd b = eye(2);
  b(0, 0) = -1.0;
  auto cf = CoframeField::parse({{"x2", "0"}, {"0", "1"}}, b);
  auto curv = base_curvature(cf, std::vector<double>{0.3, 1.7});
  EXPECT_LE(max_abs(curv.riemann), 1e-12);
}

TEST(BaseGeo, DegenerateCoframeReported) {
  auto cf = sphere();
  EXPECT_THROW(base_curvature(cf, std::vector<double>{0.0, 0.0}), DegenerateCoframeError);
  EXPECT_THROW(CoframeField::parse({{"1", "0"}, {"0", "1"}}, MatrixXd::Zero(2, 2)), Error);
}

TEST(BaseGeo, RandomCoframesMetricAndTorsionFree) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 3;
    auto spec = liealg::builtin_algebra(liealg::Builtin::Abelian, n, 1, eye(n), eye(1));
    auto cf = CoframeField::parse(testutil::random_coframe(rng, n), eye(n));
    auto gf = GaugeField::zero(1, n);
    auto x = testutil::random_point(rng, n);
    for (auto mode : {DerivativeMode::Analytic, DerivativeMode::FiniteDifference}) {
      GeometryOptions opts;
      opts.mode = mode;
      auto geom = compute_geometry(spec, cf, gf, x, opts);
      EXPECT_LE(metricity_residual(geom), 1e-12);
      EXPECT_LE(torsion_residual(geom), 1e-12);
    }
  }
}

// Scalar curvature from coordinate Christoffel symbols of g = eᵀ b e.
TEST(BaseGeo, CoordinateChristoffelOracle) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 2 + trial % 3;
    MatrixXd b = eye(n);
    if (trial % 2) b(0, 0) = -1.0;
    auto exprs = testutil::random_coframe(rng, n);
    auto cf = CoframeField::parse(exprs, b);
    auto x = testutil::random_point(rng, n);
    VectorXd xv = Eigen::Map<VectorXd>(x.data(), n);
    auto metric = [&](const VectorXd& p) {
      MatrixXd e = testutil::eval_matrix(exprs, p);
      return MatrixXd(e.transpose() * b * e);
    };
    const double expected = oracle::scalar_curvature(metric, xv);
    EXPECT_NEAR(base_curvature(cf, x).scalar, expected, 1e-6) << "n=" << n;
  }
}

TEST(BaseGeo, RiemannSymmetriesAndBianchi) {
  std::mt19937_64 rng(23);
  const int n = 4;
  auto cf = CoframeField::parse(testutil::random_coframe(rng, n), eye(n));
  auto curv = base_curvature(cf, testutil::random_point(rng, n));
  const auto& R = curv.riemann;
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d)
        for (int e = 0; e < n; ++e) {
          worst = std::max(worst, std::abs(R(a, c, d, e) + R(a, c, e, d)));
          worst = std::max(worst, std::abs(R(a, c, d, e) + R(c, a, d, e)));  // b = I
          worst = std::max(worst, std::abs(R(a, c, d, e) + R(a, d, e, c) + R(a, e, c, d)));
          worst = std::max(worst, std::abs(R(a, c, d, e) - R(d, e, a, c)));
        }
  EXPECT_LE(worst, 1e-10);
  EXPECT_LE((curv.ricci - curv.ricci.transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BaseGeo, FieldStrengthAbelianAndSu2) {
  auto cf = CoframeField::parse({{"1", "0"}, {"0", "1"}}, eye(2));
  const std::vector<double> x{0.4, -0.3};
  auto u1 = liealg::builtin_algebra(liealg::Builtin::Abelian, 2, 1, eye(2), eye(1));
  auto fs = field_strength(u1, GaugeField::parse({{"-0.5*x2", "0.5*x1"}}, 2), cf, x);
  EXPECT_NEAR(fs.F(0, 0, 1), 1.0, 1e-15);
  EXPECT_NEAR(fs.F(0, 1, 0), -1.0, 1e-15);

  // Constant A^1 = dx1, A^2 = dx2: only the commutator term survives, F^3_12 = 1.
  auto su2 = liealg::builtin_algebra(liealg::Builtin::Su2, 2, 3, eye(2), eye(3));
  auto fs2 = field_strength(su2, GaugeField::parse({{"1", "0"}, {"0", "1"}, {"0", "0"}}, 2), cf, x);
  EXPECT_NEAR(fs2.F(2, 0, 1), 1.0, 1e-15);
  EXPECT_NEAR(fs2.F(0, 0, 1), 0.0, 1e-15);
  EXPECT_NEAR(fs2.F(1, 0, 1), 0.0, 1e-15);
}

TEST(BaseGeo, AnalyticAndFiniteDifferenceAgree) {
  std::mt19937_64 rng(24);
  auto spec = liealg::builtin_algebra(liealg::Builtin::Su2, 3, 3, eye(3), eye(3));
  auto cf = CoframeField::parse(testutil::random_coframe(rng, 3), eye(3));
  auto gf = GaugeField::parse(testutil::random_gauge(rng, 3, 3), 3);
  auto x = testutil::random_point(rng, 3);
  GeometryOptions fd;
  fd.mode = DerivativeMode::FiniteDifference;
  auto a = compute_geometry(spec, cf, gf, x);
  auto f = compute_geometry(spec, cf, gf, x, fd);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dgamma.size(); ++i) worst = std::max(worst, std::abs(a.dgamma.flat()[i] - f.dgamma.flat()[i]));
  for (std::size_t i = 0; i < a.dF.size(); ++i) worst = std::max(worst, std::abs(a.dF.flat()[i] - f.dF.flat()[i]));
  EXPECT_LE(worst, 1e-8);
}
