#ifndef MINGRAPH_DIAGNOSTICS_HPP
#define MINGRAPH_DIAGNOSTICS_HPP

// Second fundamental form in singular-value-adapted frames, both sides of the
// Delta log v identity, Delta v^{-1}, and curvature integrals over balls.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "mingraph/algebra_verifier.hpp"
#include "mingraph/error.hpp"
#include "mingraph/grassmann.hpp"
#include "mingraph/linalg.hpp"
#include "mingraph/model_zoo.hpp"
#include "mingraph/mss_solver.hpp"
#include "mingraph/quadrature.hpp"

namespace mingraph {

/// h_{alpha,ij} at a point, in the frame given by the orthogonal factors of
/// Du = U diag(lambda) V^T. Individual entries depend on the frame when
/// singular values repeat; sums of squares and the Delta log v terms do not.
struct SffTensor {
  int n = 0;
  int m = 0;
  HCoefficients h{1, 1};
  Matrix frame_base;   // V, n x n
  Matrix frame_fiber;  // U, m x m
  std::vector<double> lambda;  // n entries, lambda_i paired with normal i (zero beyond min(m,n))

  double norm_sq() const { return h.norm_sq(); }
};

/// Rotated Hessian U^T D^2u V in a given frame, divided by
/// sqrt((1 + lambda_i^2)(1 + lambda_j^2)(1 + lambda_alpha^2)), lambda_alpha = 0 for alpha >= n.
inline SffTensor sff_in_frame(const Hessian& hess, const Matrix& fiber, const Matrix& base,
                              std::span<const double> lambda) {
  const int m = hess.m();
  const int n = hess.n();
  if (fiber.rows() != m || fiber.cols() != m || base.rows() != n || base.cols() != n ||
      static_cast<int>(lambda.size()) != n)
    throw DimensionMismatch("sff_in_frame: frame shapes do not match the Hessian");
  SffTensor out;
  out.n = n;
  out.m = m;
  out.h = HCoefficients(m, n);
  out.frame_base = base;
  out.frame_fiber = fiber;
  out.lambda.assign(lambda.begin(), lambda.end());
  std::vector<Matrix> rotated(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    Matrix acc = Matrix::Zero(n, n);
    for (int b = 0; b < m; ++b) acc += fiber(b, a) * hess[b];
    rotated[static_cast<std::size_t>(a)] = base.transpose() * acc * base;
  }
  for (int a = 0; a < m; ++a) {
    const double la = a < n ? lambda[static_cast<std::size_t>(a)] : 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double li = lambda[static_cast<std::size_t>(i)];
        const double lj = lambda[static_cast<std::size_t>(j)];
        const double scale = std::sqrt((1.0 + li * li) * (1.0 + lj * lj) * (1.0 + la * la));
        out.h.set(a, i, j, rotated[static_cast<std::size_t>(a)](i, j) / scale);
      }
  }
  return out;
}

/// Adapted frame of Du from a full SVD. Sign rule: each base vector with a
/// nonzero singular value has its first non-negligible entry positive, and
/// the matching fiber vector is flipped with it.
inline SffTensor sff_from_jet(const Matrix& jac, const Hessian& hess) {
  const int m = static_cast<int>(jac.rows());
  const int n = static_cast<int>(jac.cols());
  if (hess.m() != m || hess.n() != n) throw DimensionMismatch("sff_from_jet: Jacobian and Hessian disagree");
  require_finite(jac, "sff_from_jet Jacobian");
  Eigen::JacobiSVD<Matrix> svd(jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix fiber = svd.matrixU();
  Matrix base = svd.matrixV();
  const auto& sv = svd.singularValues();
  std::vector<double> lambda(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    lambda[static_cast<std::size_t>(k)] = sv(k);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (std::abs(base(r, k)) <= 1e-12) continue;
      if (base(r, k) < 0.0) {
        base.col(k) *= -1.0;
        fiber.col(k) *= -1.0;
      }
      break;
    }
  }
  return sff_in_frame(hess, fiber, base, lambda);
}

inline SffTensor sff_at(const AnalyticModel& model, const Vector& x) {
  return sff_from_jet(model.jacobian(x), model.hessian(x));
}

/// |B|^2 = g^{ik} g^{jl} G_{ab} H^a_ij H^b_kl with G = (I + J J^T)^{-1}; frame free.
inline double second_fundamental_norm_sq(const Matrix& jac, const Hessian& hess) {
  const int m = static_cast<int>(jac.rows());
  const int n = static_cast<int>(jac.cols());
  const Matrix g_inv = (Matrix::Identity(n, n) + jac.transpose() * jac).ldlt().solve(Matrix::Identity(n, n));
  const Matrix big_g = (Matrix::Identity(m, m) + jac * jac.transpose()).ldlt().solve(Matrix::Identity(m, m));
  std::vector<Matrix> raised(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) raised[static_cast<std::size_t>(a)] = g_inv * hess[a] * g_inv;
  double s = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) s += big_g(a, b) * raised[static_cast<std::size_t>(a)].cwiseProduct(hess[b]).sum();
  return s;
}

/// Orthogonal projector onto the tangent plane of the graph with Jacobian J.
inline Matrix tangent_projector(const Matrix& jac) {
  const int n = static_cast<int>(jac.cols());
  Matrix f(jac.rows() + n, n);
  f.topRows(n).setIdentity();
  f.bottomRows(jac.rows()) = jac;
  const Matrix g = f.transpose() * f;
  return f * g.ldlt().solve(f.transpose());
}

/// |d gamma|^2 of the Gauss map, from central differences of the tangent
/// projector P: (1/2) g^{ij} <d_i P, d_j P>.
inline double gauss_map_energy_fd(const AnalyticModel& model, const Vector& x, double step = 1e-4) {
  const int n = model.n();
  const Matrix jac = model.jacobian(x);
  const Matrix g_inv = (Matrix::Identity(n, n) + jac.transpose() * jac).ldlt().solve(Matrix::Identity(n, n));
  std::vector<Matrix> dp(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vector xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    dp[static_cast<std::size_t>(i)] =
        (tangent_projector(model.jacobian(xp)) - tangent_projector(model.jacobian(xm))) / (2.0 * step);
  }
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      s += g_inv(i, j) * dp[static_cast<std::size_t>(i)].cwiseProduct(dp[static_cast<std::size_t>(j)]).sum();
  return 0.5 * s;
}

namespace detail {

struct LogVJet {
  double v = 1.0;
  Matrix g_inv;
  Vector grad_log_v;  // d_k log v in domain coordinates
};

// d_k log v = (1/2) tr(g^{-1} d_k g), d_k g_ij = sum_a (u_ik u_j + u_i u_jk).
inline LogVJet log_v_jet(const Matrix& jac, const Hessian& hess) {
  const int n = static_cast<int>(jac.cols());
  LogVJet out;
  const Matrix g = Matrix::Identity(n, n) + jac.transpose() * jac;
  Eigen::LDLT<Matrix> ldlt(g);
  out.g_inv = ldlt.solve(Matrix::Identity(n, n));
  out.v = std::sqrt(ldlt.vectorD().prod());
  out.grad_log_v.resize(n);
  for (int k = 0; k < n; ++k) {
    Matrix dg = Matrix::Zero(n, n);
    for (int a = 0; a < hess.m(); ++a) {
      const Vector hk = hess[a].col(k);
      const Vector ja = jac.row(a).transpose();
      dg += hk * ja.transpose() + ja * hk.transpose();
    }
    out.grad_log_v(k) = 0.5 * out.g_inv.cwiseProduct(dg).sum();
  }
  return out;
}

// (1/v) sum_i d_i(flux_i) by central differences; flux(y) returns an n-vector.
template <class Flux>
double divergence_fd(const Vector& x, double v, double step, Flux&& flux) {
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    Vector xp = x, xm = x;
    xp(i) += step;
    xm(i) -= step;
    s += (flux(xp)(i) - flux(xm)(i)) / (2.0 * step);
  }
  return s / v;
}

}  // namespace detail

struct LogVReport {
  Vector point;
  double v = 1.0;
  double lhs = 0.0;  // intrinsic Laplacian of log v, finite differences
  double rhs = 0.0;  // closed-form curvature expression
  double gap = 0.0;
  double b_norm_sq = 0.0;
  double grad_log_v_sq = 0.0;
  double dilation = 0.0;
  double margin_b = 0.0;       // rhs - |B|^2
  double margin_sqrt2 = 0.0;   // rhs - (sum_{a>n} h^2 + sum (1 + lambda_i^2) h_{i,ii}^2)
  double margin_lambda = 0.0;  // rhs - (1 - L/sqrt2)|B|^2 - |grad log v|^2 / n, L = local 2-dilation
};

inline LogVReport logv_report_from_sff(const SffTensor& sff, double v) {
  LogVReport r;
  const LogvRhs rhs = delta_logv_rhs(std::span<const double>(sff.lambda), sff.h);
  r.v = v;
  r.rhs = rhs.total;
  r.b_norm_sq = rhs.b_norm_sq;
  r.grad_log_v_sq = rhs.grad_log_v_sq;
  r.dilation = sff.n >= 2 ? sff.lambda[0] * sff.lambda[1] : 0.0;
  r.margin_b = rhs.total - rhs.b_norm_sq;
  r.margin_sqrt2 = rhs.total - rhs.normal_and_diagonal;
  r.margin_lambda = rhs.total - ((1.0 - r.dilation / std::sqrt(2.0)) * rhs.b_norm_sq + rhs.grad_log_v_sq / sff.n);
  return r;
}

/// lhs = (1/v) d_i(v g^{ij} d_j log v), the flux taken from exact first and
/// second derivatives at x +- h_fd e_i; rhs from sff_at.
inline LogVReport logv_identity(const AnalyticModel& model, const Vector& x, double h_fd) {
  if (!(h_fd > 0.0)) throw InvalidInput("logv_identity: h_fd must be > 0");
  const SffTensor sff = sff_at(model, x);
  const auto jet = detail::log_v_jet(model.jacobian(x), model.hessian(x));
  LogVReport r = logv_report_from_sff(sff, jet.v);
  r.point = x;
  r.lhs = detail::divergence_fd(x, jet.v, h_fd, [&](const Vector& y) -> Vector {
    const auto j = detail::log_v_jet(model.jacobian(y), model.hessian(y));
    return j.v * (j.g_inv * j.grad_log_v);
  });
  r.gap = r.lhs - r.rhs;
  return r;
}

/// -v^{-1}(sum h^2 + sum lambda_i lambda_j h_{i,jl} h_{j,il} - sum lambda_i lambda_j h_{i,il} h_{j,jl}).
inline double deltav_inverse_from_sff(const SffTensor& sff, double v) {
  const int n = sff.n;
  auto H = [&](int a, int i, int j) { return sff.h.at_or_zero(a, i, j); };
  double cross = 0.0, trace = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double ll = sff.lambda[static_cast<std::size_t>(i)] * sff.lambda[static_cast<std::size_t>(j)];
      if (ll == 0.0) continue;
      for (int l = 0; l < n; ++l) {
        cross += ll * H(i, j, l) * H(j, i, l);
        trace += ll * H(i, i, l) * H(j, j, l);
      }
    }
  return -(sff.norm_sq() + cross - trace) / v;
}

inline double deltav_inverse(const AnalyticModel& model, const Vector& x) {
  const SffTensor sff = sff_at(model, x);
  return deltav_inverse_from_sff(sff, slope(singular_spectrum(model.jacobian_sample(x))));
}

/// Intrinsic Laplacian of v^{-1} by central differences of the flux
/// v g^{ij} d_j(v^{-1}) = -g^{ij} d_j log v.
inline double deltav_inverse_fd(const AnalyticModel& model, const Vector& x, double h_fd) {
  if (!(h_fd > 0.0)) throw InvalidInput("deltav_inverse_fd: h_fd must be > 0");
  const double v = detail::log_v_jet(model.jacobian(x), model.hessian(x)).v;
  return detail::divergence_fd(x, v, h_fd, [&](const Vector& y) -> Vector {
    const auto j = detail::log_v_jet(model.jacobian(y), model.hessian(y));
    return -(j.g_inv * j.grad_log_v);
  });
}

struct CurvatureIntegral {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> est_errors;
  /// Least-squares slope of log(value) against log(radius); NaN if any value <= 0.
  double loglog_slope = std::numeric_limits<double>::quiet_NaN();
};

inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidInput("loglog_slope: need two or more pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

/// rho -> integral of |B|^2 over the graph inside B_rho(center).
inline CurvatureIntegral curvature_integral(const AnalyticModel& model, const Vector& center,
                                            const std::vector<double>& radii, const QuadratureOptions& opt = {}) {
  if (radii.empty()) throw InvalidInput("curvature_integral: no radii");
  CurvatureIntegral out;
  for (double rho : radii) {
    const auto q = ball_integral(model, center, rho, opt, [&](const Vector& x, const Vector&) {
      const Matrix jac = model.jacobian(x);
      const double b2 = second_fundamental_norm_sq(jac, model.hessian(x));
      return b2 * slope(singular_spectrum(JacobianSample(jac)));
    });
    if (!std::isfinite(q.value)) throw Error("curvature_integral: quadrature produced a non-finite value");
    out.radii.push_back(rho);
    out.values.push_back(q.value);
    out.est_errors.push_back(q.est_error);
  }
  if (radii.size() >= 2) out.loglog_slope = loglog_slope(out.radii, out.values);
  return out;
}

/// One row of the per-point diagnostic table.
struct DiagnosticRow {
  Vector x;
  double v = 1.0;
  double lip = 0.0;
  double dilation = 0.0;
  double b_norm_sq = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0;
  double margin_lambda = 0.0;
  double margin_b = 0.0;
  double residual = 0.0;  // max |strong residual component|
};

inline DiagnosticRow diagnose_point(const AnalyticModel& model, const Vector& x, double h_fd) {
  const Matrix jac = model.jacobian(x);
  const Hessian hess = model.hessian(x);
  const SingularSpectrum spec = singular_spectrum(JacobianSample(jac));
  const LogVReport rep = logv_identity(model, x, h_fd);
  DiagnosticRow row;
  row.x = x;
  row.v = slope(spec);
  row.lip = lipschitz(spec);
  row.dilation = two_dilation(spec);
  row.b_norm_sq = rep.b_norm_sq;
  row.lhs = rep.lhs;
  row.rhs = rep.rhs;
  row.gap = rep.gap;
  row.margin_lambda = rep.margin_lambda;
  row.margin_b = rep.margin_b;
  row.residual = residual_strong(jac, hess).cwiseAbs().maxCoeff();
  return row;
}

/// Same table from grid derivatives of a patch; lhs needs depth >= 2, since the
/// flux is differenced across neighbouring nodes.
inline DiagnosticRow diagnose_patch_node(const GraphPatch& patch, std::size_t node) {
  detail::require_depth(patch, node, 2);
  const Matrix jac = patch_jacobian(patch, node);
  const Hessian hess = patch_hessian(patch, node);
  const SingularSpectrum spec = singular_spectrum(JacobianSample(jac));
  const SffTensor sff = sff_from_jet(jac, hess);
  const auto jet = detail::log_v_jet(jac, hess);
  LogVReport rep = logv_report_from_sff(sff, jet.v);
  const int n = patch.n();
  double div = 0.0;
  const auto idx = patch.multi_index(node);
  for (int i = 0; i < n; ++i) {
    auto up = idx, down = idx;
    ++up[static_cast<std::size_t>(i)];
    --down[static_cast<std::size_t>(i)];
    auto flux = [&](std::size_t y) {
      const auto j = detail::log_v_jet(patch_jacobian(patch, y), patch_hessian(patch, y));
      return (j.v * (j.g_inv * j.grad_log_v))(i);
    };
    div += (flux(patch.flat_index(up)) - flux(patch.flat_index(down))) / (2.0 * patch.spacing());
  }
  rep.lhs = div / jet.v;
  DiagnosticRow row;
  row.x = patch.coords(node);
  row.v = slope(spec);
  row.lip = lipschitz(spec);
  row.dilation = two_dilation(spec);
  row.b_norm_sq = rep.b_norm_sq;
  row.lhs = rep.lhs;
  row.rhs = rep.rhs;
  row.gap = rep.lhs - rep.rhs;
  row.margin_lambda = rep.margin_lambda;
  row.margin_b = rep.margin_b;
  row.residual = residual_strong(jac, hess).cwiseAbs().maxCoeff();
  return row;
}

}  // namespace mingraph

#endif  // MINGRAPH_DIAGNOSTICS_HPP
