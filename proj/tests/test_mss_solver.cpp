#include <gtest/gtest.h>

#include <cmath>

#include "mingraph/model_zoo.hpp"
#include "mingraph/mss_solver.hpp"
#include "mingraph/parallel.hpp"

using namespace mingraph;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double c : v) x(k++) = c;
  return x;
}

double interior_error(const GraphPatch& patch, const AnalyticModel& model) {
  double err = 0.0;
  for (std::size_t node = 0; node < patch.node_count(); ++node)
    if (!patch.is_boundary(node))
      err = std::max(err, (patch.node_value(node) - model.value(patch.coords(node))).cwiseAbs().maxCoeff());
  return err;
}

double solve_error(int nodes) {
  const auto model = model_slag_exp();
  GraphPatch p = boundary_patch(model, {nodes, nodes}, 1.0 / (nodes - 1), vec({0.0, 0.0}));
  const auto rep = solve(p);
  EXPECT_TRUE(rep.converged);
  return interior_error(p, model);
}

// x -> lam u(x / lam), with matching derivatives.
AnalyticModel blow_down_like(const AnalyticModel& m, double lam) {
  return AnalyticModel(
      "scaled", m.n(), m.m(), [m, lam](const Vector& x) -> Vector { return lam * m.value(x / lam); },
      [m, lam](const Vector& x) -> Matrix { return m.jacobian(x / lam); },
      [m, lam](const Vector& x) {
        Hessian h = m.hessian(x / lam);
        for (int a = 0; a < h.m(); ++a) h[a] /= lam;
        return h;
      },
      [](const Vector&) { return true; });
}

}  // namespace

TEST(StrongResidual, ParabolaInOneVariable) {
  Matrix j(1, 1);
  j << 2.0;  // u = x^2 at x = 1
  Hessian h(1, 1);
  h[0](0, 0) = 2.0;
  EXPECT_NEAR(residual_strong(j, h)(0), 0.4, 1e-15);
}

TEST(StrongResidual, DivergenceFormMatchesOnGrid) {
  // u = (x^2 + y, x y^2): not minimal, so both forms are O(1).
  const AnalyticModel model(
      "poly", 2, 2, [](const Vector& x) { return vec({x(0) * x(0) + x(1), x(0) * x(1) * x(1)}); },
      [](const Vector& x) {
        Matrix j(2, 2);
        j << 2 * x(0), 1, x(1) * x(1), 2 * x(0) * x(1);
        return j;
      },
      [](const Vector& x) {
        Hessian h(2, 2);
        h[0] << 2, 0, 0, 0;
        h[1] << 0, 2 * x(1), 2 * x(1), 2 * x(0);
        return h;
      },
      [](const Vector&) { return true; });
  double prev = 0.0;
  for (int nodes : {41, 81}) {
    const GraphPatch p = sample_patch(model, {nodes, nodes}, 1.0 / (nodes - 1), vec({0.0, 0.0}));
    const std::size_t mid = p.flat_index({(nodes - 1) / 2, (nodes - 1) / 4});
    const Vector x = p.coords(mid);
    const Vector exact = strong_to_divergence(model.jacobian(x), residual_strong(model.jacobian(x), model.hessian(x)));
    const double err = (residual_divergence(p, mid) - exact).cwiseAbs().maxCoeff();
    EXPECT_LT(err, 1e-2);
    if (prev > 0.0) {
      EXPECT_GE(std::log2(prev / err), 1.9);
    }
    prev = err;
  }
}

TEST(Solver, SecondOrderConvergenceOnSlagExp) {
  const double e17 = solve_error(17);
  const double e33 = solve_error(33);
  EXPECT_LT(e33, 1e-4);
  EXPECT_GT(e17 / e33, 3.5);
}

TEST(Solver, AffineDataIsReproducedQuickly) {
  Matrix a(2, 2);
  a << 1.5, -0.5, 0.25, 2.0;
  const auto model = model_affine(a, vec({0.3, -1.0}));
  GraphPatch p = boundary_patch(model, {21, 21}, 0.05, vec({-0.5, -0.5}));
  SolveOptions opt;
  opt.tol = 1e-12;
  const auto rep = solve(p, opt);
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(rep.iterations, 2);
  EXPECT_LE(rep.residual, 1e-12);
  EXPECT_LE(interior_error(p, model), 1e-12);
}

TEST(Solver, AffineFromZeroInteriorIn3D) {
  Matrix a(2, 3);
  a << 1, 0.5, -1, 0, 2, 0.25;
  const auto model = model_affine(a, vec({0.0, 1.0}));
  GraphPatch p = boundary_patch(model, {7, 7, 7}, 1.0 / 6.0, vec({0.0, 0.0, 0.0}));
  SolveOptions opt;
  opt.initial_guess = InitialGuess::keep;
  const auto rep = solve(p, opt);
  EXPECT_TRUE(rep.converged);
  EXPECT_LE(interior_error(p, model), 1e-9);
}

TEST(Solver, IterationCapReportsNonConvergence) {
  const auto model = model_slag_exp();
  GraphPatch p = boundary_patch(model, {17, 17}, 0.0625, vec({0.0, 0.0}));
  SolveOptions opt;
  opt.max_iter = 1;
  const auto rep = solve(p, opt);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.iterations, 1);
  EXPECT_EQ(rep.residual_history.size(), 2u);
  EXPECT_GT(rep.residual, opt.tol);
}

TEST(Solver, RejectsBadOptionsAndData) {
  const auto model = model_slag_exp();
  GraphPatch p = boundary_patch(model, {5, 5}, 0.25, vec({0.0, 0.0}));
  SolveOptions opt;
  opt.tol = 0.0;
  EXPECT_THROW(solve(p, opt), InvalidInput);
  p.value(0, 0) = std::nan("");
  EXPECT_THROW(solve(p), InvalidInput);
}

TEST(Solver, ThreadCountDoesNotChangeBits) {
  const auto model = model_slag_exp();
  auto run = [&](unsigned threads) {
    parallel::set_thread_limit(threads);
    GraphPatch p = boundary_patch(model, {25, 25}, 1.0 / 24, vec({-0.5, 0.0}));
    solve(p);
    return p.data();
  };
  const auto one = run(1);
  const auto four = run(4);
  parallel::set_thread_limit(0);
  EXPECT_EQ(one, four);
}

TEST(WeakDefect, SecondOrderOnMinimalData) {
  const auto model = model_slag_exp();
  double prev = 0.0;
  for (int nodes : {17, 33, 65}) {
    const GraphPatch p = sample_patch(model, {nodes, nodes}, 1.0 / (nodes - 1), vec({0.0, 0.0}));
    const double d = std::max(weak_harmonicity_defect(p, 0), weak_harmonicity_defect(p, 1));
    if (prev > 0.0) {
      EXPECT_GT(prev / d, 3.5);
    }
    prev = d;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(WeakDefect, NonMinimalDataStaysLarge) {
  const AnalyticModel bowl(
      "bowl", 2, 1, [](const Vector& x) { return vec({x.squaredNorm()}); },
      [](const Vector& x) { return Matrix(2.0 * x.transpose()); },
      [](const Vector&) {
        Hessian h(1, 2);
        h[0] = 2.0 * Matrix::Identity(2, 2);
        return h;
      },
      [](const Vector&) { return true; });
  for (int nodes : {17, 65}) {
    const GraphPatch p = sample_patch(bowl, {nodes, nodes}, 1.0 / (nodes - 1), vec({0.0, 0.0}));
    EXPECT_GT(weak_harmonicity_defect(p, 0), 0.5);
  }
  EXPECT_THROW(weak_harmonicity_defect(sample_patch(bowl, {5, 5}, 0.25, vec({0.0, 0.0})), 1), InvalidInput);
}

TEST(GraphPatchTest, StencilsNeedDepth) {
  const auto model = model_slag_exp();
  const GraphPatch p = sample_patch(model, {9, 9}, 0.125, vec({0.0, 0.0}));
  EXPECT_THROW(patch_jacobian(p, 0), StencilError);
  EXPECT_THROW(residual_divergence(p, p.flat_index({1, 4})), StencilError);
  EXPECT_NO_THROW(residual_divergence(p, p.flat_index({2, 4})));
  const Matrix j = patch_jacobian(p, p.flat_index({4, 4}));
  EXPECT_LT((j - model.jacobian(p.coords(p.flat_index({4, 4})))).cwiseAbs().maxCoeff(), 1e-2);
}

TEST(GraphPatchTest, RejectsInvalidShapes) {
  EXPECT_THROW(GraphPatch(1, {5}, 0.1, vec({0.0})), InvalidInput);
  EXPECT_THROW(GraphPatch(1, {5, 2}, 0.1, vec({0.0, 0.0})), InvalidInput);
  EXPECT_THROW(GraphPatch(0, {5, 5}, 0.1, vec({0.0, 0.0})), InvalidInput);
  EXPECT_THROW(GraphPatch(1, {5, 5}, -0.1, vec({0.0, 0.0})), InvalidInput);
  EXPECT_THROW(GraphPatch(1, {5, 5}, 0.1, vec({0.0})), InvalidInput);
  EXPECT_THROW(sample_patch(model_slag_exp(), {5, 5, 5}, 0.1, vec({0.0, 0.0, 0.0})), DimensionMismatch);
}

TEST(GraphPatchTest, TransfiniteGuessIsExactForAffine) {
  Matrix a(1, 3);
  a << 1, -2, 0.5;
  const auto model = model_affine(a, vec({3.0}));
  GraphPatch p = boundary_patch(model, {5, 6, 7}, 0.2, vec({0.0, 1.0, -1.0}));
  apply_transfinite_guess(p);
  double err = 0.0;
  for (std::size_t node = 0; node < p.node_count(); ++node)
    err = std::max(err, std::abs(p.value(node, 0) - model.value(p.coords(node))(0)));
  EXPECT_LT(err, 1e-13);
}

TEST(SolverProperty, EquivariantUnderFiberRigidMotion) {
  const auto model = model_slag_exp();
  const double c = std::cos(1.1), s = std::sin(1.1);
  Matrix q(2, 2);
  q << c, -s, s, c;
  const Vector t = vec({0.7, -2.0});
  const auto moved = model_rigid_motion(model, Matrix::Identity(2, 2), Vector::Zero(2), q, t);
  GraphPatch a = boundary_patch(model, {21, 21}, 0.05, vec({0.0, 0.0}));
  GraphPatch b = boundary_patch(moved, {21, 21}, 0.05, vec({0.0, 0.0}));
  ASSERT_TRUE(solve(a).converged);
  ASSERT_TRUE(solve(b).converged);
  double err = 0.0;
  for (std::size_t node = 0; node < a.node_count(); ++node)
    err = std::max(err, (b.node_value(node) - (q * a.node_value(node) + t)).cwiseAbs().maxCoeff());
  EXPECT_LE(err, 1e-8);
}

TEST(SolverProperty, EquivariantUnderScaling) {
  const auto model = model_slag_exp();
  const double lam = 2.5;
  const auto scaled = blow_down_like(model, lam);
  GraphPatch a = boundary_patch(model, {21, 21}, 0.05, vec({0.0, 0.0}));
  GraphPatch b = boundary_patch(scaled, {21, 21}, lam * 0.05, vec({0.0, 0.0}));
  ASSERT_TRUE(solve(a).converged);
  ASSERT_TRUE(solve(b).converged);
  double err = 0.0;
  for (std::size_t node = 0; node < a.node_count(); ++node)
    err = std::max(err, (b.node_value(node) - lam * a.node_value(node)).cwiseAbs().maxCoeff());
  EXPECT_LE(err, 1e-8);
}

TEST(SolverProperty, ScalarSolutionObeysMaximumPrinciple) {
  const AnalyticModel saddle(
      "saddle-data", 2, 1, [](const Vector& x) { return vec({std::sin(3 * x(0)) * std::cosh(x(1)) + x(0) * x(1)}); },
      [](const Vector&) { return Matrix(Matrix::Zero(1, 2)); },
      [](const Vector&) { return Hessian(1, 2); }, [](const Vector&) { return true; });
  GraphPatch p = boundary_patch(saddle, {25, 25}, 1.0 / 24, vec({-0.5, -0.5}));
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t node = 0; node < p.node_count(); ++node)
    if (p.is_boundary(node)) {
      lo = std::min(lo, p.value(node, 0));
      hi = std::max(hi, p.value(node, 0));
    }
  SolveOptions opt;
  ASSERT_TRUE(solve(p, opt).converged);
  for (std::size_t node = 0; node < p.node_count(); ++node) {
    EXPECT_GE(p.value(node, 0), lo - 10 * opt.tol);
    EXPECT_LE(p.value(node, 0), hi + 10 * opt.tol);
  }
}
