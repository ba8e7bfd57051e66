#ifndef MINGRAPH_INVARIANT_SUITES_HPP
#define MINGRAPH_INVARIANT_SUITES_HPP

// Seeded property suites over random Jacobians and the model zoo, used by
// the `invariants` command. A fault switch corrupts one quantity so the
// harness itself can be checked for catching it.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mingraph/grassmann.hpp"
#include "mingraph/linalg.hpp"
#include "mingraph/model_zoo.hpp"
#include "mingraph/mss_solver.hpp"

namespace mingraph {

struct FaultInjection {
  bool slope_sign_flip = false;
};

struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::vector<std::string> messages;  // one per failing case

  void check(bool ok, const std::string& what) {
    ++cases;
    if (!ok) {
      ++failures;
      messages.push_back(what);
    }
  }
};

namespace detail {

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale) {
  std::normal_distribution<double> d(0.0, scale);
  Matrix a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = d(rng);
  return a;
}

inline Matrix random_orthogonal(std::mt19937_64& rng, int dim) {
  return orthonormalize_columns(random_matrix(rng, dim, dim, 1.0));
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

inline std::string at(const char* what, int k) {
  std::ostringstream s;
  s << what << " (case " << k << ")";
  return s.str();
}

}  // namespace detail

/// Spectrum, slope, dilation and Jordan-angle identities on random Jacobians.
inline SuiteResult grassmann_suite(std::uint64_t seed, int count, const FaultInjection& fault = {}) {
  SuiteResult r;
  r.name = "grassmann";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 4);
  for (int k = 0; k < count; ++k) {
    const int n = dim(rng), m = dim(rng);
    const JacobianSample jac(detail::random_matrix(rng, m, n, 1.5));
    const SingularSpectrum s = singular_spectrum(jac);
    const double v = fault.slope_sign_flip ? -slope(s) : slope(s);
    const Matrix g = Matrix::Identity(n, n) + jac.entries().transpose() * jac.entries();
    r.check(v >= 1.0, detail::at("slope >= 1", k));
    r.check(detail::close(v, std::sqrt(g.determinant()), 1e-10), detail::at("slope = sqrt(det g)", k));
    bool sorted = true;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) sorted = sorted && s[i] >= s[i + 1] && s[i + 1] >= 0.0;
    r.check(sorted, detail::at("spectrum sorted and nonnegative", k));
    r.check(two_dilation(s) <= lipschitz(s) * lipschitz(s) + 1e-12, detail::at("dilation <= Lip^2", k));
    r.check(slope_gradient_margin(jac) >= -1e-10, detail::at("1 + v |grad u|^2 >= v", k));

    const PlaneBasis base = PlaneBasis::coordinate(n, m);
    const PlaneBasis graph = PlaneBasis::graph_plane(jac);
    r.check(detail::close(plane_inner(base, graph), 1.0 / v, 1e-10), detail::at("<base, graph plane> = 1/v", k));
    const JordanAngles th = jordan_angles(graph, base);
    bool tangents = true;
    for (std::size_t i = 0; i < th.size(); ++i) tangents = tangents && detail::close(std::tan(th[i]), s[i], 1e-8);
    r.check(tangents, detail::at("tan(theta_i) = lambda_i", k));
    r.check(detail::close(grassmann_distance(base, graph), grassmann_distance(graph, base), 1e-12),
            detail::at("distance symmetric", k));

    const Matrix q = detail::random_orthogonal(rng, m);
    const Matrix p = detail::random_orthogonal(rng, n);
    const SingularSpectrum s2 = singular_spectrum(JacobianSample(q * jac.entries() * p));
    r.check(detail::close(slope(s2), slope(s), 1e-10) && detail::close(two_dilation(s2), two_dilation(s), 1e-10),
            detail::at("orthogonal invariance", k));
  }
  return r;
}

/// Closed-form derivatives against finite differences, minimality of the
/// nonlinear models and invariance under graph-preserving rigid motions.
inline SuiteResult model_zoo_suite(std::uint64_t seed, int count, const FaultInjection& fault = {}) {
  SuiteResult r;
  r.name = "model_zoo";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const std::vector<AnalyticModel> models = {model_slag_exp(), model_lawson_osserman(),
                                             model_affine(detail::random_matrix(rng, 3, 2, 1.0), Vector::Ones(3))};
  for (const auto& model : models) {
    const Matrix rb = detail::random_orthogonal(rng, model.n());
    const Matrix rf = detail::random_orthogonal(rng, model.m());
    const Vector sb = detail::random_matrix(rng, model.n(), 1, 1.0);
    const Vector sf = detail::random_matrix(rng, model.m(), 1, 1.0);
    const AnalyticModel moved = model_rigid_motion(model, rb, sb, rf, sf);
    for (int k = 0; k < count; ++k) {
      Vector x(model.n());
      for (int i = 0; i < model.n(); ++i) x(i) = u(rng);
      if (x.norm() < 0.25) x(0) += 1.0;
      const std::string tag = model.label() + " ";
      const Matrix jac = model.jacobian(x);
      const Hessian hess = model.hessian(x);
      const double h = 1e-5;
      Matrix jac_fd(model.m(), model.n());
      double hess_err = 0.0;
      for (int i = 0; i < model.n(); ++i) {
        Vector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        jac_fd.col(i) = (model.value(xp) - model.value(xm)) / (2 * h);
        const Matrix dj = (model.jacobian(xp) - model.jacobian(xm)) / (2 * h);
        for (int a = 0; a < model.m(); ++a)
          hess_err = std::max(hess_err, (dj.row(a).transpose() - hess[a].col(i)).cwiseAbs().maxCoeff());
      }
      const double scale = 1.0 + jac.cwiseAbs().maxCoeff();
      r.check((jac_fd - jac).cwiseAbs().maxCoeff() <= 1e-6 * scale, detail::at((tag + "Jacobian matches FD").c_str(), k));
      r.check(hess_err <= 1e-5 * scale, detail::at((tag + "Hessian matches FD").c_str(), k));
      r.check(residual_strong(jac, hess).cwiseAbs().maxCoeff() <= 1e-8 * scale,
              detail::at((tag + "strong residual vanishes").c_str(), k));

      const Vector y = rb * x + sb;
      const double v = slope(singular_spectrum(JacobianSample(jac)));
      const double v_moved = slope(singular_spectrum(moved.jacobian_sample(y)));
      const double v_seen = fault.slope_sign_flip ? -v : v;
      r.check(detail::close(v_moved, v_seen, 1e-10), detail::at((tag + "slope invariant under rigid motion").c_str(), k));
      r.check(residual_strong(moved.jacobian(y), moved.hessian(y)).cwiseAbs().maxCoeff() <= 1e-8 * scale,
              detail::at((tag + "residual invariant under rigid motion").c_str(), k));
    }
  }
  return r;
}

inline std::vector<SuiteResult> run_invariant_suites(std::uint64_t seed, const FaultInjection& fault = {}) {
  return {grassmann_suite(seed, 500, fault), model_zoo_suite(seed + 1, 50, fault)};
}

}  // namespace mingraph

#endif  // MINGRAPH_INVARIANT_SUITES_HPP
