#ifndef MINGRAPH_QUADRATURE_HPP
#define MINGRAPH_QUADRATURE_HPP

// Midpoint quadrature of f(x) over {x : |(x, u(x)) - c| <= rho}. The domain box
// is |x - c_x|_inf <= rho, which contains the ball's projection.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "mingraph/error.hpp"
#include "mingraph/linalg.hpp"
#include "mingraph/model_zoo.hpp"
#include "mingraph/parallel.hpp"

namespace mingraph {

inline constexpr int kMinQuadratureResolution = 32;

/// Fraction of rho cut out around a point the model is not defined at.
inline constexpr double kVertexCutoff = 1e-3;

struct QuadratureOptions {
  int resolution = 0;  // nodes per axis; 0 picks default_resolution(n)
  /// Point to cut out (a ball of radius kVertexCutoff * rho). If unset and the
  /// model has a domain predicate rejecting the origin, the origin is used.
  std::optional<Vector> vertex;
};

/// Per-dimension default: reproduces omega_n rho^n for a flat graph within 0.5%.
inline int default_resolution(int n) {
  switch (n) {
    case 1: return 4096;
    case 2: return 256;
    case 3: return 96;
    default: return 32;
  }
}

struct QuadratureResult {
  double value = 0.0;
  double coarse_value = 0.0;  // same rule at resolution / 2
  double excluded_bound = 0.0;
  double est_error = 0.0;  // |value - coarse_value| + excluded_bound
  int resolution = 0;
  std::size_t cells_inside = 0;
};

namespace detail {

inline std::optional<Vector> resolve_vertex(const AnalyticModel& model, const QuadratureOptions& opt) {
  if (opt.vertex) return opt.vertex;
  const Vector origin = Vector::Zero(model.n());
  if (model.domain_predicate() && !model.in_domain(origin)) return origin;
  return std::nullopt;
}

struct QuadPartial {
  double sum = 0.0;
  std::size_t inside = 0;
};

// f(x) is only called at in-ball points; it gets x and the precomputed u(x).
template <class Integrand>
QuadPartial ball_sum(const AnalyticModel& model, const Vector& center, double rho, int res,
                     const std::optional<Vector>& vertex, Integrand& f) {
  const int n = model.n();
  const double h = 2.0 * rho / res;
  const double cell = std::pow(h, n);
  const double cut = kVertexCutoff * rho;
  const Vector cx = center.head(n);
  const Vector cu = center.tail(model.m());
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= static_cast<std::size_t>(res);
  // Chunk by the slowest axis so the partition is fixed by res alone.
  const std::size_t slab = total / static_cast<std::size_t>(res);
  auto partial = parallel::map_ranges<QuadPartial>(static_cast<std::size_t>(res), 1, [&](std::size_t b, std::size_t e) {
    QuadPartial p;
    Vector x(n);
    for (std::size_t s = b; s < e; ++s)
      for (std::size_t r = 0; r < slab; ++r) {
        std::size_t idx = s * slab + r;
        for (int k = n - 1; k >= 0; --k) {
          x(k) = cx(k) - rho + (static_cast<double>(idx % res) + 0.5) * h;
          idx /= static_cast<std::size_t>(res);
        }
        if (vertex && (x - *vertex).norm() < cut) continue;
        if ((x - cx).squaredNorm() > rho * rho) continue;  // |x - c_x| <= |(x,u) - c|
        const Vector u = model.value(x);
        if ((x - cx).squaredNorm() + (u - cu).squaredNorm() > rho * rho) continue;
        p.sum += f(x, u) * cell;
        ++p.inside;
      }
    return p;
  });
  QuadPartial out;
  for (const auto& p : partial) {
    out.sum += p.sum;
    out.inside += p.inside;
  }
  return out;
}

}  // namespace detail

/// Integrates f(x, u(x)) over the part of the domain whose graph point lies in
/// the closed ball B_rho(center), center in R^(n+m).
template <class Integrand>
QuadratureResult ball_integral(const AnalyticModel& model, const Vector& center, double rho,
                               const QuadratureOptions& opt, Integrand f) {
  if (center.size() != model.n() + model.m()) throw DimensionMismatch("ball center must lie in R^(n+m)");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidInput("ball radius must be finite and > 0");
  const int res = opt.resolution == 0 ? default_resolution(model.n()) : opt.resolution;
  if (res < kMinQuadratureResolution) throw InvalidInput("quadrature resolution must be >= 32");
  const auto vertex = detail::resolve_vertex(model, opt);
  QuadratureResult r;
  r.resolution = res;
  const auto fine = detail::ball_sum(model, center, rho, res, vertex, f);
  const auto coarse = detail::ball_sum(model, center, rho, res / 2, vertex, f);
  r.value = fine.sum;
  r.coarse_value = coarse.sum;
  r.cells_inside = fine.inside;
  if (vertex) {
    // Cut-out ball: bounded by 4 times the integrand at its rim times its volume.
    const double cut = kVertexCutoff * rho;
    Vector rim = *vertex;
    rim(0) += cut;
    if (model.in_domain(rim)) {
      const Vector u = model.value(rim);
      r.excluded_bound = 4.0 * std::abs(f(rim, u)) * unit_ball_volume(model.n()) * std::pow(cut, model.n());
    }
  }
  r.est_error = std::abs(r.value - r.coarse_value) + r.excluded_bound;
  return r;
}

}  // namespace mingraph

#endif  // MINGRAPH_QUADRATURE_HPP
