#ifndef MINGRAPH_MSS_SOLVER_HPP
#define MINGRAPH_MSS_SOLVER_HPP

// Finite-difference discretization of the minimal surface system
//     sum_ij g^{ij} d_i d_j u^alpha = 0,   g = I + Du^T Du,
// on uniform rectangular grids in R^2 and R^3 with Dirichlet data, plus the
// divergence-form and weak-form residuals used as consistency checks.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "mingraph/error.hpp"
#include "mingraph/grassmann.hpp"
#include "mingraph/linalg.hpp"
#include "mingraph/model_zoo.hpp"
#include "mingraph/parallel.hpp"

namespace mingraph {

/// Induced metric of a graph at a point.
struct MetricSample {
  Matrix g;
  Matrix g_inv;
  double v = 1.0;
};

inline MetricSample metric_at(const JacobianSample& jac) {
  MetricSample out;
  out.g = Matrix::Identity(jac.n(), jac.n()) + jac.entries().transpose() * jac.entries();
  Eigen::LDLT<Matrix> ldlt(out.g);
  out.g_inv = ldlt.solve(Matrix::Identity(jac.n(), jac.n()));
  out.v = std::sqrt(ldlt.vectorD().prod());
  return out;
}

/// Strong (nondivergence) residual sum_ij g^{ij} H^alpha_ij, one entry per component.
inline Vector residual_strong(const Matrix& jac, const Hessian& hess) {
  const Matrix g = Matrix::Identity(jac.cols(), jac.cols()) + jac.transpose() * jac;
  const Matrix g_inv = g.ldlt().solve(Matrix::Identity(jac.cols(), jac.cols()));
  Vector r(hess.m());
  for (int a = 0; a < hess.m(); ++a) r(a) = g_inv.cwiseProduct(hess[a]).sum();
  return r;
}

/// The graph Laplacian of the height functions equals (I + J J^T)^{-1} times the
/// strong residual; this maps one onto the other.
inline Vector strong_to_divergence(const Matrix& jac, const Vector& strong) {
  const Matrix normal_metric = Matrix::Identity(jac.rows(), jac.rows()) + jac * jac.transpose();
  return normal_metric.ldlt().solve(strong);
}

/// Uniform grid over a box in R^n (n = 2 or 3) carrying m values per node.
/// Node storage is node-major with the last axis varying fastest; the
/// boundary is the outermost layer of nodes.
class GraphPatch {
 public:
  GraphPatch(int m, std::vector<int> dims, double spacing, Vector origin)
      : m_(m), dims_(std::move(dims)), spacing_(spacing), origin_(std::move(origin)) {
    const int n = static_cast<int>(dims_.size());
    if (n != 2 && n != 3) throw InvalidInput("GraphPatch: only n = 2 or 3 is supported");
    if (m_ < 1) throw InvalidInput("GraphPatch: m must be >= 1");
    for (int d : dims_)
      if (d < 3) throw InvalidInput("GraphPatch: need at least 3 nodes per axis");
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) throw InvalidInput("GraphPatch: spacing must be > 0");
    if (origin_.size() != n || !origin_.allFinite()) throw InvalidInput("GraphPatch: bad origin");
    strides_.assign(static_cast<std::size_t>(n), 1);
    for (int k = n - 2; k >= 0; --k) strides_[k] = strides_[k + 1] * static_cast<std::size_t>(dims_[k + 1]);
    nodes_ = strides_[0] * static_cast<std::size_t>(dims_[0]);
    values_.assign(nodes_ * static_cast<std::size_t>(m_), 0.0);
  }

  int n() const { return static_cast<int>(dims_.size()); }
  int m() const { return m_; }
  const std::vector<int>& dims() const { return dims_; }
  double spacing() const { return spacing_; }
  const Vector& origin() const { return origin_; }
  std::size_t node_count() const { return nodes_; }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  std::vector<int> multi_index(std::size_t node) const {
    std::vector<int> idx(dims_.size());
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      idx[k] = static_cast<int>(node / strides_[k]);
      node %= strides_[k];
    }
    return idx;
  }
  std::size_t flat_index(const std::vector<int>& idx) const {
    std::size_t f = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) f += static_cast<std::size_t>(idx[k]) * strides_[k];
    return f;
  }

  Vector coords(std::size_t node) const {
    const auto idx = multi_index(node);
    Vector x(n());
    for (int k = 0; k < n(); ++k) x(k) = origin_(k) + spacing_ * idx[static_cast<std::size_t>(k)];
    return x;
  }

  /// Distance (in nodes) from the outer layer; 0 on the boundary.
  int depth(std::size_t node) const {
    const auto idx = multi_index(node);
    int d = std::numeric_limits<int>::max();
    for (std::size_t k = 0; k < dims_.size(); ++k) d = std::min({d, idx[k], dims_[k] - 1 - idx[k]});
    return d;
  }
  bool is_boundary(std::size_t node) const { return depth(node) == 0; }

  double value(std::size_t node, int alpha) const { return values_[node * static_cast<std::size_t>(m_) + alpha]; }
  double& value(std::size_t node, int alpha) { return values_[node * static_cast<std::size_t>(m_) + alpha]; }

  Vector node_value(std::size_t node) const {
    return Eigen::Map<const Vector>(values_.data() + node * static_cast<std::size_t>(m_), m_);
  }
  void set_node_value(std::size_t node, const Vector& u) {
    Eigen::Map<Vector>(values_.data() + node * static_cast<std::size_t>(m_), m_) = u;
  }

  const std::vector<double>& data() const { return values_; }
  std::vector<double>& data() { return values_; }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
  }

 private:
  int m_;
  std::vector<int> dims_;
  double spacing_;
  Vector origin_;
  std::vector<std::size_t> strides_;
  std::size_t nodes_ = 0;
  std::vector<double> values_;
};

/// Evaluates the model at every node.
inline GraphPatch sample_patch(const AnalyticModel& model, const std::vector<int>& dims, double spacing,
                               const Vector& origin) {
  if (static_cast<int>(dims.size()) != model.n()) throw DimensionMismatch("sample_patch: dims do not match model.n");
  GraphPatch patch(model.m(), dims, spacing, origin);
  for (std::size_t node = 0; node < patch.node_count(); ++node) patch.set_node_value(node, model.value(patch.coords(node)));
  return patch;
}

/// Evaluates the model on the boundary layer only; interior values are zero.
inline GraphPatch boundary_patch(const AnalyticModel& model, const std::vector<int>& dims, double spacing,
                                 const Vector& origin) {
  if (static_cast<int>(dims.size()) != model.n()) throw DimensionMismatch("boundary_patch: dims do not match model.n");
  GraphPatch patch(model.m(), dims, spacing, origin);
  for (std::size_t node = 0; node < patch.node_count(); ++node)
    if (patch.is_boundary(node)) patch.set_node_value(node, model.value(patch.coords(node)));
  return patch;
}

namespace detail {

inline void require_depth(const GraphPatch& patch, std::size_t node, int needed) {
  if (patch.depth(node) < needed) throw StencilError("finite-difference stencil touches the boundary");
}

// Central first derivatives at an interior node, as an m x n matrix.
inline Matrix grid_jacobian(const GraphPatch& patch, std::size_t node) {
  const int n = patch.n(), m = patch.m();
  const double inv2h = 0.5 / patch.spacing();
  Matrix j(m, n);
  for (int k = 0; k < n; ++k) {
    const std::size_t s = patch.stride(k);
    for (int a = 0; a < m; ++a) j(a, k) = (patch.value(node + s, a) - patch.value(node - s, a)) * inv2h;
  }
  return j;
}

// Central second derivatives at an interior node.
inline Hessian grid_hessian(const GraphPatch& patch, std::size_t node) {
  const int n = patch.n(), m = patch.m();
  const double h = patch.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const double inv_4h2 = 0.25 * inv_h2;
  Hessian hess(m, n);
  for (int a = 0; a < m; ++a) {
    for (int k = 0; k < n; ++k) {
      const std::size_t sk = patch.stride(k);
      hess[a](k, k) = (patch.value(node + sk, a) - 2.0 * patch.value(node, a) + patch.value(node - sk, a)) * inv_h2;
      for (int l = k + 1; l < n; ++l) {
        const std::size_t sl = patch.stride(l);
        const double d = patch.value(node + sk + sl, a) - patch.value(node + sk - sl, a) -
                         patch.value(node - sk + sl, a) + patch.value(node - sk - sl, a);
        hess[a](k, l) = hess[a](l, k) = d * inv_4h2;
      }
    }
  }
  return hess;
}

}  // namespace detail

/// Finite-difference Jacobian at a node at depth >= 1.
inline Matrix patch_jacobian(const GraphPatch& patch, std::size_t node) {
  detail::require_depth(patch, node, 1);
  return detail::grid_jacobian(patch, node);
}

/// Finite-difference Hessian at a node at depth >= 1.
inline Hessian patch_hessian(const GraphPatch& patch, std::size_t node) {
  detail::require_depth(patch, node, 1);
  return detail::grid_hessian(patch, node);
}

/// Discrete strong residual at one interior node.
inline Vector patch_residual_strong(const GraphPatch& patch, std::size_t node) {
  detail::require_depth(patch, node, 1);
  return residual_strong(detail::grid_jacobian(patch, node), detail::grid_hessian(patch, node));
}

/// Divergence form (1/v) sum_i d_i (v g^{ij} d_j u^alpha) by nested central
/// differences. Fluxes are taken at the neighbours x +- h e_i, so the node
/// must sit at depth >= 2.
inline Vector residual_divergence(const GraphPatch& patch, std::size_t node) {
  detail::require_depth(patch, node, 2);
  const int n = patch.n(), m = patch.m();
  auto flux = [&](std::size_t y, int i) -> Vector {
    const Matrix j = detail::grid_jacobian(patch, y);
    const MetricSample met = metric_at(JacobianSample(j));
    // component alpha: v * sum_j g^{ij} d_j u^alpha
    return met.v * (j * met.g_inv.col(i));
  };
  Vector div = Vector::Zero(m);
  for (int i = 0; i < n; ++i) {
    const std::size_t s = patch.stride(i);
    div += (flux(node + s, i) - flux(node - s, i)) / (2.0 * patch.spacing());
  }
  const double v = metric_at(JacobianSample(detail::grid_jacobian(patch, node))).v;
  return div / v;
}

/// Sup-norm of the discrete strong residual over interior nodes.
inline double strong_residual_norm(const GraphPatch& patch) {
  const auto partial = parallel::map_ranges<double>(patch.node_count(), 4096, [&](std::size_t b, std::size_t e) {
    double worst = 0.0;
    for (std::size_t node = b; node < e; ++node) {
      if (patch.is_boundary(node)) continue;
      const Vector r = residual_strong(detail::grid_jacobian(patch, node), detail::grid_hessian(patch, node));
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
  });
  double worst = 0.0;
  for (double w : partial) worst = std::max(worst, w);
  return worst;
}

/// Overwrites interior values with the transfinite (Coons) interpolant of the
/// boundary data; exact for affine and multilinear data.
inline void apply_transfinite_guess(GraphPatch& patch) {
  const int n = patch.n(), m = patch.m();
  const auto& dims = patch.dims();
  for (std::size_t node = 0; node < patch.node_count(); ++node) {
    if (patch.is_boundary(node)) continue;
    const auto idx = patch.multi_index(node);
    Vector acc = Vector::Zero(m);
    for (unsigned subset = 1; subset < (1u << n); ++subset) {
      const int size = std::popcount(subset);
      const double sign = (size % 2 == 1) ? 1.0 : -1.0;
      // Sum over the corners of the faces selected by `subset`.
      for (unsigned corner = 0; corner < (1u << n); ++corner) {
        if ((corner & ~subset) != 0) continue;
        double w = 1.0;
        auto target = idx;
        for (int k = 0; k < n; ++k) {
          if (!(subset & (1u << k))) continue;
          const double t = static_cast<double>(idx[k]) / (dims[k] - 1);
          const bool high = corner & (1u << k);
          w *= high ? t : 1.0 - t;
          target[k] = high ? dims[k] - 1 : 0;
        }
        acc += sign * w * patch.node_value(patch.flat_index(target));
      }
    }
    patch.set_node_value(node, acc);
  }
}

enum class InitialGuess { transfinite, keep };

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 50;
  InitialGuess initial_guess = InitialGuess::transfinite;
  int max_halvings = 30;
  double divergence_factor = 10.0;
  int divergence_patience = 20;
};

/// Step kinds recorded in SolveReport::damping_history.
inline constexpr double kPicardStep = -1.0;

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  bool diverged = false;
  /// Accepted Newton damping factor per iteration, or kPicardStep.
  std::vector<double> damping_history;
  std::vector<double> residual_history;
};

namespace detail {

// Unknown numbering: interior nodes in storage order, m components each.
struct InteriorMap {
  std::vector<std::ptrdiff_t> unknown_of_node;
  std::vector<std::size_t> node_of_unknown;
};

inline InteriorMap build_interior_map(const GraphPatch& patch) {
  InteriorMap map;
  map.unknown_of_node.assign(patch.node_count(), -1);
  for (std::size_t node = 0; node < patch.node_count(); ++node) {
    if (patch.is_boundary(node)) continue;
    map.unknown_of_node[node] = static_cast<std::ptrdiff_t>(map.node_of_unknown.size());
    map.node_of_unknown.push_back(node);
  }
  return map;
}

inline Vector residual_vector(const GraphPatch& patch, const InteriorMap& map) {
  const int m = patch.m();
  Vector f(static_cast<Eigen::Index>(map.node_of_unknown.size()) * m);
  parallel::map_ranges<int>(map.node_of_unknown.size(), 2048, [&](std::size_t b, std::size_t e) {
    for (std::size_t u = b; u < e; ++u) {
      const std::size_t node = map.node_of_unknown[u];
      f.segment(static_cast<Eigen::Index>(u) * m, m) =
          residual_strong(grid_jacobian(patch, node), grid_hessian(patch, node));
    }
    return 0;
  });
  return f;
}

// Jacobian of the discrete strong residual with respect to interior values.
// With F^a = g^{ij}(p) H^a_ij, p = Du:
//   dF^a/dH^b_ij = delta_ab g^{ij},
//   dF^a/dp^b_k  = -2 (g^{-1} H^a g^{-1} p^b)_k.
// `frozen` drops the second term (Picard linearization).
inline Eigen::SparseMatrix<double> residual_jacobian(const GraphPatch& patch, const InteriorMap& map, bool frozen) {
  const int n = patch.n(), m = patch.m();
  const double h = patch.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const double inv_4h2 = 0.25 * inv_h2;
  const double inv_2h = 0.5 / h;
  const auto unknowns = static_cast<Eigen::Index>(map.node_of_unknown.size()) * m;
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(unknowns) * static_cast<std::size_t>(m * (1 + 2 * n + 2 * n * (n - 1))));

  auto add = [&](Eigen::Index row, std::size_t node, int b, double val) {
    const std::ptrdiff_t u = map.unknown_of_node[node];
    if (u < 0) return;  // Dirichlet node
    triplets.emplace_back(row, static_cast<Eigen::Index>(u) * m + b, val);
  };

  for (std::size_t u = 0; u < map.node_of_unknown.size(); ++u) {
    const std::size_t node = map.node_of_unknown[u];
    const Matrix p = grid_jacobian(patch, node);
    const Matrix g = Matrix::Identity(n, n) + p.transpose() * p;
    const Matrix g_inv = g.ldlt().solve(Matrix::Identity(n, n));
    Hessian hess;
    Matrix w;  // column b: g^{-1} p^b
    if (!frozen) {
      hess = grid_hessian(patch, node);
      w = g_inv * p.transpose();
    }
    for (int a = 0; a < m; ++a) {
      const Eigen::Index row = static_cast<Eigen::Index>(u) * m + a;
      // Second-derivative part, component a only.
      double center = 0.0;
      for (int k = 0; k < n; ++k) {
        const std::size_t sk = patch.stride(k);
        add(row, node + sk, a, g_inv(k, k) * inv_h2);
        add(row, node - sk, a, g_inv(k, k) * inv_h2);
        center -= 2.0 * g_inv(k, k) * inv_h2;
        for (int l = k + 1; l < n; ++l) {
          const std::size_t sl = patch.stride(l);
          const double c = 2.0 * g_inv(k, l) * inv_4h2;
          add(row, node + sk + sl, a, c);
          add(row, node + sk - sl, a, -c);
          add(row, node - sk + sl, a, -c);
          add(row, node - sk - sl, a, c);
        }
      }
      add(row, node, a, center);
      if (frozen) continue;
      // Coefficient part, every component b.
      const Matrix gh = g_inv * hess[a];
      for (int b = 0; b < m; ++b) {
        const Vector c = -2.0 * gh * w.col(b);
        for (int k = 0; k < n; ++k) {
          const std::size_t sk = patch.stride(k);
          add(row, node + sk, b, c(k) * inv_2h);
          add(row, node - sk, b, -c(k) * inv_2h);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> jac(unknowns, unknowns);
  jac.setFromTriplets(triplets.begin(), triplets.end());
  return jac;
}

inline void add_to_interior(GraphPatch& patch, const InteriorMap& map, const Vector& delta, double scale) {
  const int m = patch.m();
  for (std::size_t u = 0; u < map.node_of_unknown.size(); ++u)
    for (int a = 0; a < m; ++a)
      patch.value(map.node_of_unknown[u], a) += scale * delta(static_cast<Eigen::Index>(u) * m + a);
}

inline bool solve_linear(const Eigen::SparseMatrix<double>& a, const Vector& rhs, Vector& out) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) return false;
  out = lu.solve(rhs);
  return lu.info() == Eigen::Success && out.allFinite();
}

}  // namespace detail

/// Exposed for tests: the assembled Newton (or frozen-coefficient) Jacobian.
inline Eigen::SparseMatrix<double> solver_jacobian(const GraphPatch& patch, bool frozen = false) {
  return detail::residual_jacobian(patch, detail::build_interior_map(patch), frozen);
}

/// Damped Newton on the nondivergence form. A Newton step is halved until the
/// residual sup-norm decreases; if no damping works, a frozen-coefficient
/// (Picard) step is taken instead. Stops when the residual reaches `tol`, after
/// `max_iter` steps, or when the residual stays above divergence_factor times
/// the best value for divergence_patience consecutive steps. On failure the
/// patch is left at the best iterate seen.
inline SolveReport solve(GraphPatch& patch, const SolveOptions& options = {}) {
  if (!(options.tol > 0.0)) throw InvalidInput("solve: tol must be > 0");
  if (options.max_iter < 0) throw InvalidInput("solve: max_iter must be >= 0");
  for (std::size_t node = 0; node < patch.node_count(); ++node)
    if (patch.is_boundary(node) && !patch.node_value(node).allFinite())
      throw InvalidInput("solve: non-finite boundary value");
  if (options.initial_guess == InitialGuess::transfinite) apply_transfinite_guess(patch);
  if (!patch.all_finite()) throw InvalidInput("solve: non-finite initial values");

  const auto map = detail::build_interior_map(patch);
  auto sup = [](const Vector& f) { return f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff(); };

  SolveReport report;
  Vector f = detail::residual_vector(patch, map);
  double res = sup(f);
  report.residual_history.push_back(res);
  std::vector<double> best_values = patch.data();
  double best = res;
  int bad_streak = 0;

  while (res > options.tol && report.iterations < options.max_iter) {
    ++report.iterations;
    const std::vector<double> start = patch.data();
    bool accepted = false;
    Vector delta;
    if (detail::solve_linear(detail::residual_jacobian(patch, map, false), -f, delta)) {
      double step = 1.0;
      for (int k = 0; k <= options.max_halvings; ++k, step *= 0.5) {
        detail::add_to_interior(patch, map, delta, step);
        const Vector trial = detail::residual_vector(patch, map);
        if (trial.allFinite() && sup(trial) < res) {
          f = trial;
          res = sup(trial);
          report.damping_history.push_back(step);
          accepted = true;
          break;
        }
        patch.data() = start;
      }
    }
    if (!accepted) {
      Vector picard;
      if (!detail::solve_linear(detail::residual_jacobian(patch, map, true), -f, picard)) break;
      detail::add_to_interior(patch, map, picard, 1.0);
      f = detail::residual_vector(patch, map);
      res = f.allFinite() ? sup(f) : std::numeric_limits<double>::infinity();
      report.damping_history.push_back(kPicardStep);
    }
    report.residual_history.push_back(res);
    if (res < best) {
      best = res;
      best_values = patch.data();
    }
    bad_streak = (res > options.divergence_factor * best) ? bad_streak + 1 : 0;
    if (bad_streak >= options.divergence_patience) {
      report.diverged = true;
      break;
    }
    if (!std::isfinite(res)) {
      report.diverged = true;
      break;
    }
  }

  report.converged = best <= options.tol;
  if (res > best) {
    patch.data() = best_values;
    res = best;
  }
  report.residual = res;
  return report;
}

/// Weak-form defect of component alpha: for the hat function phi_p of every
/// interior node p, the discrete integral of v g^{ij} d_i u^alpha d_j phi_p
/// (midpoint rule per cell) divided by the discrete integral of v phi_p.
/// Returns the maximum absolute value over p; O(h^2) on smooth minimal data.
inline double weak_harmonicity_defect(const GraphPatch& patch, int alpha) {
  if (alpha < 0 || alpha >= patch.m()) throw InvalidInput("weak_harmonicity_defect: component out of range");
  const int n = patch.n(), m = patch.m();
  const double h = patch.spacing();
  const auto& dims = patch.dims();
  const unsigned corners = 1u << n;
  const double cell_volume = std::pow(h, n);
  const double half_pow = std::pow(0.5, n - 1);

  // Per-cell data at the cell centre: v and the flux v g^{-1} grad u^alpha.
  std::vector<int> cell_dims(dims.begin(), dims.end());
  for (auto& d : cell_dims) d -= 1;
  std::vector<std::size_t> cell_strides(static_cast<std::size_t>(n), 1);
  for (int k = n - 2; k >= 0; --k) cell_strides[k] = cell_strides[k + 1] * static_cast<std::size_t>(cell_dims[k + 1]);
  const std::size_t cells = cell_strides[0] * static_cast<std::size_t>(cell_dims[0]);
  std::vector<double> cell_v(cells);
  std::vector<Vector> cell_flux(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<int> lo(static_cast<std::size_t>(n));
    std::size_t rest = c;
    for (int k = 0; k < n; ++k) {
      lo[k] = static_cast<int>(rest / cell_strides[k]);
      rest %= cell_strides[k];
    }
    const std::size_t base = patch.flat_index(lo);
    Matrix grad = Matrix::Zero(m, n);
    for (unsigned corner = 0; corner < corners; ++corner) {
      std::size_t node = base;
      for (int k = 0; k < n; ++k)
        if (corner & (1u << k)) node += patch.stride(k);
      const Vector u = patch.node_value(node);
      for (int k = 0; k < n; ++k) grad.col(k) += ((corner & (1u << k)) ? 1.0 : -1.0) * u;
    }
    grad /= (h * static_cast<double>(corners / 2));
    const MetricSample met = metric_at(JacobianSample(grad));
    cell_v[c] = met.v;
    cell_flux[c] = met.v * (met.g_inv * grad.row(alpha).transpose());
  }

  double worst = 0.0;
  for (std::size_t node = 0; node < patch.node_count(); ++node) {
    if (patch.is_boundary(node)) continue;
    const auto idx = patch.multi_index(node);
    double num = 0.0, mass = 0.0;
    for (unsigned corner = 0; corner < corners; ++corner) {
      // Cell whose corner `corner` is this node: lower index idx - corner.
      std::size_t c = 0;
      Vector dphi(n);
      for (int k = 0; k < n; ++k) {
        const bool node_is_high = corner & (1u << k);
        c += static_cast<std::size_t>(idx[k] - (node_is_high ? 1 : 0)) * cell_strides[k];
        dphi(k) = (node_is_high ? 1.0 : -1.0) * half_pow / h;
      }
      num += cell_volume * cell_flux[c].dot(dphi);
      mass += cell_volume * cell_v[c] * std::pow(0.5, n);
    }
    worst = std::max(worst, std::abs(num / mass));
  }
  return worst;
}

}  // namespace mingraph

#endif  // MINGRAPH_MSS_SOLVER_HPP
