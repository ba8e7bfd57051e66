#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mingraph/algebra_verifier.hpp"
#include "mingraph/parallel.hpp"

using namespace mingraph;

namespace {

const double kSqrt2 = std::sqrt(2.0);

HCoefficients random_h(std::mt19937_64& rng, int m, int n) { return detail::random_h(rng, m, n); }

}  // namespace

TEST(Phi, Examples) {
  EXPECT_EQ(phi(MuTriple(0, 0, 0)), 4.0);
  EXPECT_EQ(phi(MuTriple(2, 2, 0)), 0.0);
  EXPECT_EQ(phi(MuTriple(2, 2, 2)), 0.0);
  EXPECT_THROW(MuTriple(-0.1, 0, 0), InvalidInput);
}

TEST(Phi, SymmetricUnderPermutations) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  for (int k = 0; k < 1000; ++k) {
    std::array<double, 3> m{u(rng), u(rng), u(rng)};
    const double ref = phi(MuTriple(m[0], m[1], m[2]));
    std::sort(m.begin(), m.end());
    do {
      EXPECT_NEAR(phi(MuTriple(m[0], m[1], m[2])), ref, 1e-12 * (1 + std::abs(ref)));
    } while (std::next_permutation(m.begin(), m.end()));
  }
}

TEST(HessfDet, Examples) {
  EXPECT_EQ(hessf_det(0, 0, 0), 8.0);
  EXPECT_NEAR(hessf_det(kSqrt2, kSqrt2, kSqrt2), 0.0, 1e-13);
  EXPECT_EQ(hessf_det(1, 1, 0), 6.0);
}

TEST(HessfDet, ClosedFormMatchesDeterminant) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng);
    const double det = hessf_matrix(a, b, c).determinant();
    EXPECT_NEAR(hessf_det(a, b, c), det, 1e-10 * std::max(1.0, std::abs(det)));
  }
}

TEST(ScanMu123, FineScanHasNoViolations) {
  Mu123ScanOptions opt;
  opt.step = 0.05;
  const auto r = scan_mu123(opt);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_EQ(r.pair_product_violations, 0u);
  EXPECT_NEAR(r.min_value, 0.0, 1e-9);
  ASSERT_EQ(r.argmin.size(), 3u);
  std::vector<double> am = r.argmin;
  std::sort(am.begin(), am.end(), std::greater<>());
  EXPECT_NEAR(am[0], 2.0, 0.05);
  EXPECT_NEAR(am[1], 2.0, 0.05);
  EXPECT_GT(r.unconstrained_region, 0u);
}

TEST(ScanMu123, CoarseScanHasNoViolations) {
  Mu123ScanOptions opt;
  opt.step = 0.5;
  EXPECT_TRUE(scan_mu123(opt).ok());
}

TEST(ScanMu123, UnitCubeMinimumIsTwo) {
  Mu123ScanOptions opt;
  opt.region_cap = 1.0;
  const auto r = scan_mu123(opt);
  EXPECT_NEAR(r.min_value, 2.0, 1e-12);
  EXPECT_EQ(r.argmin, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(ScanMu123, WeakenedConstraintFindsSharpnessWitness) {
  Mu123ScanOptions opt;
  opt.constraint = Mu123Constraint::weakened;
  const auto r = scan_mu123(opt);
  ASSERT_GT(r.violations, 0u);
  ASSERT_EQ(r.witness.size(), 3u);
  const MuTriple w(r.witness[0], r.witness[1], r.witness[2]);
  EXPECT_LT(phi(w), -1e-9);
  EXPECT_FALSE(mu123_admissible(w, Mu123Constraint::strict));
  EXPECT_TRUE(mu123_admissible(w, Mu123Constraint::weakened));
}

TEST(ScanMu123, RejectsSmallBox) {
  Mu123ScanOptions opt;
  opt.mu_max = 3.0;
  EXPECT_THROW(scan_mu123(opt), InvalidInput);
}

TEST(ScanMu123Lambda, BoundHoldsAcrossLambda) {
  EXPECT_NEAR(mu123_lambda_bound(kSqrt2), 0.0, 1e-15);
  EXPECT_NEAR(mu123_lambda_bound(0.0), 2.0 * (2.0 - kSqrt2), 1e-15);
  for (double lam : {0.5, 1.0, kSqrt2}) {
    const auto r = scan_mu123_lambda(lam, 0.05);
    EXPECT_EQ(r.violations, 0u) << lam;
    EXPECT_GE(r.min_value, mu123_lambda_bound(lam) - 1e-9);
  }
  EXPECT_THROW(scan_mu123_lambda(1.5, 0.05), InvalidInput);
  EXPECT_THROW(scan_mu123_lambda(0.0, 0.05), InvalidInput);
}

TEST(DeltaLogvRhs, Examples) {
  HCoefficients zero(2, 3);
  const std::vector<double> lam{1.5, 0.5, 0.2};
  EXPECT_EQ(delta_logv_rhs(lam, zero).total, 0.0);

  HCoefficients h(1, 2);
  h.set(0, 0, 0, 1.0);
  const std::vector<double> l10{1.0, 0.0};
  EXPECT_NEAR(delta_logv_rhs(l10, h).total, 2.0, 1e-15);

  std::mt19937_64 rng(13);
  const HCoefficients r = random_h(rng, 3, 3);
  const std::vector<double> l0(3, 0.0);
  EXPECT_NEAR(delta_logv_rhs(l0, r).total, r.norm_sq(), 1e-13);
}

TEST(DeltaLogvRhs, InvariantUnderRelabeling) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 300; ++k) {
    const int n = 2 + k % 3, m = n + (k / 3) % 2;
    const HCoefficients h = random_h(rng, m, n);
    std::vector<double> lam(static_cast<std::size_t>(n));
    for (auto& x : lam) x = u(rng);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> lam_p(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i) lam_p[static_cast<std::size_t>(perm[i])] = lam[i];  // new index perm[i] <- old i
    const HCoefficients hp = h.permuted(perm);
    const auto a = delta_logv_rhs(lam, h);
    const auto b = delta_logv_rhs(lam_p, hp);
    EXPECT_NEAR(a.total, b.total, 1e-10 * (1 + std::abs(a.total)));
    EXPECT_NEAR(a.decomposed_total, a.total, 1e-10 * (1 + std::abs(a.total)));
    EXPECT_NEAR(a.grad_log_v_sq, b.grad_log_v_sq, 1e-10 * (1 + a.grad_log_v_sq));
  }
}

TEST(DeltaLogvRhs, ShapeMismatchThrows) {
  HCoefficients h(2, 3);
  const std::vector<double> lam{1.0, 0.5};
  EXPECT_THROW(delta_logv_rhs(lam, h), DimensionMismatch);
}

TEST(Sqrt2Inequality, ZeroSecondFundamentalFormIsEquality) {
  HCoefficients zero(3, 3);
  const std::vector<double> lam{kSqrt2, 1.0, 1.0};
  EXPECT_TRUE(sqrt2_hypothesis(lam));
  EXPECT_EQ(sqrt2_margin(lam, zero), 0.0);
  EXPECT_EQ(lambda_margin(lam, zero, kSqrt2), 0.0);
}

TEST(Sqrt2Inequality, SamplerFindsNoViolations) {
  for (int n : {2, 3, 4})
    for (int m : {2, 3, 4}) {
      PointwiseSamplerOptions opt;
      opt.n = n;
      opt.m = m;
      opt.samples = 20000;
      const auto r = check_sqrt2_inequality(opt);
      EXPECT_EQ(r.samples, 20000u);
      EXPECT_EQ(r.violations, 0u) << n << "x" << m;
      EXPECT_GE(r.min_value, -1e-9);
    }
}

TEST(Sqrt2Inequality, BoundarySpectrum) {
  PointwiseSamplerOptions opt;
  opt.samples = 20000;
  opt.fixed_lambda = std::vector<double>{kSqrt2, 1.0, 1.0};
  EXPECT_TRUE(check_sqrt2_inequality(opt).ok());
  opt.fixed_lambda = std::vector<double>{2.0, 1.0, 1.0};
  EXPECT_THROW(check_sqrt2_inequality(opt), InvalidInput);
}

TEST(LambdaInequality, SamplerFindsNoViolations) {
  for (double lam : {0.5, 1.0, kSqrt2}) {
    PointwiseSamplerOptions opt;
    opt.samples = 20000;
    const auto r = check_lambda_inequality(lam, opt);
    EXPECT_EQ(r.violations, 0u) << lam;
  }
  EXPECT_THROW(check_lambda_inequality(1.5, PointwiseSamplerOptions{}), InvalidInput);
}

TEST(LambdaInequality, FlatSpectrumReducesToNormBound) {
  std::mt19937_64 rng(15);
  const std::vector<double> lam(3, 0.0);
  for (int k = 0; k < 100; ++k) {
    const HCoefficients h = random_h(rng, 3, 3);
    EXPECT_NEAR(lambda_margin(lam, h, 1.0), h.norm_sq() / kSqrt2, 1e-12);
  }
}

TEST(Samplers, ReproducibleAcrossThreadCounts) {
  PointwiseSamplerOptions opt;
  opt.samples = 10000;
  opt.seed = 42;
  parallel::set_thread_limit(1);
  const auto a = check_sqrt2_inequality(opt);
  App1Options app;
  app.samples = 2000;
  const auto x = app1_sampler(app);
  parallel::set_thread_limit(4);
  const auto b = check_sqrt2_inequality(opt);
  const auto y = app1_sampler(app);
  parallel::set_thread_limit(0);
  EXPECT_EQ(a.min_value, b.min_value);
  EXPECT_EQ(a.argmin, b.argmin);
  EXPECT_EQ(a.attempts, b.attempts);
  EXPECT_EQ(x.max_value, y.max_value);
  EXPECT_EQ(x.argmax, y.argmax);
  opt.seed = 43;
  EXPECT_NE(check_sqrt2_inequality(opt).min_value, a.min_value);
}

TEST(App1, XiExamples) {
  Matrix a(2, 2);
  a << 10, 0, 0, 0.1;
  EXPECT_NEAR(app1_xi(a)(0, 0), 1.0, 1e-13);
  for (double l1 : {0.5, 3.0, 40.0}) {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = l1;
    const double xi = app1_xi(d)(0, 0);
    EXPECT_NEAR(xi, l1 / std::sqrt(1 + l1 * l1), 1e-13);
    EXPECT_LT(xi, 1.0);
  }
}

TEST(App1, MaxXiDoesNotGrowAsEpsilonShrinks) {
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.3, 0.1, 0.03, 0.01}) {
    App1Options opt;
    opt.epsilon = eps;
    const auto r = app1_sampler(opt);
    EXPECT_EQ(r.samples, 10000u);
    EXPECT_LE(r.max_value, prev + 0.02) << eps;
    prev = r.max_value;
  }
  EXPECT_LE(prev, 1.1);
}

TEST(App1, TinyEpsilonStillBounded) {
  App1Options opt;
  opt.epsilon = 0.001;
  EXPECT_LE(app1_sampler(opt).max_value, 1.1);
}

TEST(App1, HopelessAcceptanceIsReported) {
  App1Options opt;
  opt.epsilon = 1e-9;
  opt.samples = 10;
  EXPECT_THROW(app1_sampler(opt), SamplingFailure);
}
