#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mingraph/grassmann.hpp"
#include "mingraph/invariant_suites.hpp"

using namespace mingraph;

namespace {

Matrix mat(int r, int c, std::initializer_list<double> v) {
  Matrix a(r, c);
  auto it = v.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) a(i, j) = *it++;
  return a;
}

Matrix random_jacobian(std::mt19937_64& rng, int m, int n) {
  std::normal_distribution<double> d(0.0, 1.5);
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = d(rng);
  return a;
}

}  // namespace

TEST(Grassmann, SpectrumSortedAndPadded) {
  const auto s = singular_spectrum(JacobianSample(mat(2, 2, {3, 0, 0, 4})));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_NEAR(s[0], 4.0, 1e-14);
  EXPECT_NEAR(s[1], 3.0, 1e-14);

  // m = 1 < n = 3: one nonzero value, two zeros appended.
  const auto p = singular_spectrum(JacobianSample(mat(1, 3, {3, 4, 0})));
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0], 5.0, 1e-14);
  EXPECT_EQ(p[1], 0.0);
  EXPECT_EQ(p[2], 0.0);
}

TEST(Grassmann, SlopeAndDilation) {
  const SingularSpectrum s({1.0, 1.0});
  EXPECT_NEAR(slope(s), 2.0, 1e-15);
  EXPECT_EQ(two_dilation(SingularSpectrum({7.0})), 0.0);
  EXPECT_NEAR(two_dilation(SingularSpectrum({0.5, 3.0, 2.0})), 6.0, 1e-15);
  EXPECT_NEAR(lipschitz(SingularSpectrum({0.5, 3.0, 2.0})), 3.0, 1e-15);
}

TEST(Grassmann, BernsteinCondition) {
  EXPECT_TRUE(bernstein_condition(SingularSpectrum({1.0, 1.0})));  // Lip = 1: right side infinite
  EXPECT_FALSE(bernstein_condition(SingularSpectrum({2.0, 2.0})));  // 16 > 8/3
  EXPECT_TRUE(bernstein_condition(SingularSpectrum({2.0, 0.5})));    // 1 <= 8/3
  EXPECT_TRUE(bernstein_condition(SingularSpectrum({0.5, 0.5})));
}

TEST(Grassmann, InvalidInputs) {
  Matrix bad = Matrix::Zero(2, 2);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(JacobianSample{bad}, InvalidInput);
  EXPECT_THROW(SingularSpectrum({1.0, -1.0}), InvalidInput);
  EXPECT_THROW(PlaneBasis(mat(2, 1, {1, 1})), InvalidInput);
  EXPECT_THROW(plane_inner(PlaneBasis::coordinate(1, 1), PlaneBasis::coordinate(1, 2)), DimensionMismatch);
  EXPECT_THROW(jordan_angles(PlaneBasis::coordinate(2, 2), PlaneBasis::coordinate(1, 3)), DimensionMismatch);
}

TEST(Grassmann, PlaneInnerOfDiagonalLine) {
  const PlaneBasis line = PlaneBasis::graph_plane(JacobianSample(mat(1, 1, {1})));
  EXPECT_NEAR(plane_inner(PlaneBasis::coordinate(1, 1), line), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Grassmann, JordanAngleOfTiltedLine) {
  const double theta = 0.3;
  const PlaneBasis line = PlaneBasis::graph_plane(JacobianSample(mat(1, 1, {std::tan(theta)})));
  const auto a = jordan_angles(PlaneBasis::coordinate(1, 1), line);
  EXPECT_NEAR(a[0], theta, 1e-15);
}

TEST(Grassmann, TinyAnglesKeepRelativeAccuracy) {
  const double theta = 1e-9;
  const PlaneBasis plane = PlaneBasis::graph_plane(JacobianSample(mat(1, 2, {std::tan(theta), 0.0})));
  const auto a = jordan_angles(PlaneBasis::coordinate(2, 1), plane);
  EXPECT_NEAR(a[0] / theta, 1.0, 1e-12);
  EXPECT_NEAR(a[1], 0.0, 1e-20);
}

TEST(Grassmann, OrientationFlipsPlaneInnerSign) {
  Matrix e = Matrix::Zero(3, 2);
  e(0, 1) = 1.0;
  e(1, 0) = 1.0;  // swapped basis: opposite orientation
  EXPECT_NEAR(plane_inner(PlaneBasis::coordinate(2, 1), PlaneBasis(e)), -1.0, 1e-15);
  EXPECT_NEAR(grassmann_distance(PlaneBasis::coordinate(2, 1), PlaneBasis(e)), 0.0, 1e-15);
}

TEST(GrassmannProperty, TangentsOfAnglesAreSingularValues) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 4, m = 1 + (k / 4) % 4;
    const JacobianSample jac(random_jacobian(rng, m, n));
    const auto s = singular_spectrum(jac);
    const auto th = jordan_angles(PlaneBasis::coordinate(n, m), PlaneBasis::graph_plane(jac));
    for (std::size_t i = 0; i < th.size(); ++i) EXPECT_NEAR(std::tan(th[i]), s[i], 1e-8 * (1 + s[i]));
    EXPECT_NEAR(plane_inner(PlaneBasis::coordinate(n, m), PlaneBasis::graph_plane(jac)), 1.0 / slope(s), 1e-12);
  }
}

TEST(GrassmannProperty, SlopeIsSqrtDetMetric) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 3, m = 1 + (k / 3) % 3;
    const Matrix a = random_jacobian(rng, m, n);
    const Matrix g = Matrix::Identity(n, n) + a.transpose() * a;
    const double v = slope(singular_spectrum(JacobianSample(a)));
    EXPECT_GE(v, 1.0);
    EXPECT_NEAR(v, std::sqrt(g.determinant()), 1e-10 * v);
    EXPECT_GE(slope_gradient_margin(JacobianSample(a)), -1e-10);
  }
}

TEST(GrassmannProperty, DistanceIsAMetricOnSamples) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 100; ++k) {
    const PlaneBasis p = PlaneBasis::graph_plane(JacobianSample(random_jacobian(rng, 2, 3)));
    const PlaneBasis q = PlaneBasis::graph_plane(JacobianSample(random_jacobian(rng, 2, 3)));
    const PlaneBasis r = PlaneBasis::graph_plane(JacobianSample(random_jacobian(rng, 2, 3)));
    EXPECT_NEAR(grassmann_distance(p, q), grassmann_distance(q, p), 1e-12);
    EXPECT_NEAR(grassmann_distance(p, p), 0.0, 1e-7);
    EXPECT_LE(grassmann_distance(p, r), grassmann_distance(p, q) + grassmann_distance(q, r) + 1e-12);
  }
}

TEST(InvariantSuites, CleanRunHasNoFailures) {
  for (const auto& s : run_invariant_suites(3)) {
    EXPECT_GT(s.cases, 0) << s.name;
    EXPECT_EQ(s.failures, 0) << s.name << ": " << (s.messages.empty() ? "" : s.messages.front());
  }
}

TEST(InvariantSuites, SlopeSignFlipIsCaught) {
  FaultInjection f;
  f.slope_sign_flip = true;
  int failures = 0;
  for (const auto& s : run_invariant_suites(3, f)) failures += s.failures;
  EXPECT_GT(failures, 0);
}
