#ifndef MINGRAPH_MEASURE_TOOLS_HPP
#define MINGRAPH_MEASURE_TOOLS_HPP

// Graph volume inside ambient balls, density ratios, the bounded-dilation
// volume growth check and blow-down rescaling.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mingraph/error.hpp"
#include "mingraph/grassmann.hpp"
#include "mingraph/linalg.hpp"
#include "mingraph/model_zoo.hpp"
#include "mingraph/quadrature.hpp"

namespace mingraph {

struct VolumeReport {
  Vector center;
  double radius = 0.0;
  double value = 0.0;
  int resolution = 0;
  double est_error = 0.0;

  double relative_error() const { return value > 0.0 ? est_error / value : std::numeric_limits<double>::infinity(); }
};

/// H^n of the graph inside the closed ball B_radius(center): the midpoint sum
/// of v over domain cells whose graph point lies in the ball.
inline VolumeReport graph_volume(const AnalyticModel& model, const Vector& center, double radius,
                                 const QuadratureOptions& opt = {}) {
  const auto q = ball_integral(model, center, radius, opt, [&](const Vector& x, const Vector&) {
    return slope(singular_spectrum(model.jacobian_sample(x)));
  });
  VolumeReport r;
  r.center = center;
  r.radius = radius;
  r.value = q.value;
  r.resolution = q.resolution;
  r.est_error = q.est_error;
  if (!std::isfinite(r.value) || r.value < 0.0) throw Error("graph_volume: quadrature produced an invalid value");
  return r;
}

struct DensityProfile {
  Vector center;
  std::vector<double> radii;
  std::vector<double> ratios;      // volume / (omega_n rho^n)
  std::vector<double> est_errors;  // in ratio units
  std::vector<double> volumes;

  /// min over k of ratios[k+1] - ratios[k]; +inf for a single radius.
  double monotonicity_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < ratios.size(); ++k) m = std::min(m, ratios[k + 1] - ratios[k]);
    return m;
  }

  /// Every decrease is within `band` times the combined error estimate.
  bool monotone_within(double band = 3.0) const {
    for (std::size_t k = 0; k + 1 < ratios.size(); ++k)
      if (ratios[k + 1] - ratios[k] < -band * (est_errors[k] + est_errors[k + 1])) return false;
    return true;
  }
};

inline void require_increasing_radii(const std::vector<double>& radii) {
  if (radii.empty()) throw InvalidInput("radii must be non-empty");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || !std::isfinite(radii[k])) throw InvalidInput("radii must be finite and > 0");
    if (k > 0 && !(radii[k] > radii[k - 1])) throw InvalidInput("radii must be strictly increasing");
  }
}

/// Density ratios about a point of the graph (see graph_center; for cones the
/// vertex is allowed even though the model is undefined there).
inline DensityProfile density_profile(const AnalyticModel& model, const Vector& center, const std::vector<double>& radii,
                                      const QuadratureOptions& opt = {}) {
  require_increasing_radii(radii);
  if (center.size() != model.n() + model.m()) throw DimensionMismatch("density_profile: center must lie in R^(n+m)");
  const Vector x0 = center.head(model.n());
  if (model.in_domain(x0) && (model.value(x0) - center.tail(model.m())).norm() > 1e-9 * (1.0 + center.norm()))
    throw InvalidInput("density_profile: center is not on the graph");
  DensityProfile p;
  p.center = center;
  const double omega = unit_ball_volume(model.n());
  for (double rho : radii) {
    const VolumeReport v = graph_volume(model, center, rho, opt);
    const double norm = omega * std::pow(rho, model.n());
    p.radii.push_back(rho);
    p.volumes.push_back(v.value);
    p.ratios.push_back(v.value / norm);
    p.est_errors.push_back(v.est_error / norm);
  }
  return p;
}

/// Graph point over x0 (the vertex for cones, where u extends by zero).
inline Vector graph_center(const AnalyticModel& model, const Vector& x0) {
  Vector c = Vector::Zero(model.n() + model.m());
  c.head(model.n()) = x0;
  if (model.in_domain(x0)) c.tail(model.m()) = model.value(x0);
  return c;
}

struct VolumeGrowthReport {
  bool ok = false;
  double constant = 0.0;  // sup_k ratio_k / sqrt(m)
  double max_dilation = 0.0;
  DensityProfile profile;
};

/// Checks two_dilation <= lambda on the domain grid of the largest ball
/// (first offender thrown as PredicateViolation), then reports
/// sup ratio / sqrt(m); ok iff that is finite and the last ratio is at most
/// 1.5 times the first.
inline VolumeGrowthReport volume_growth_bound_check(const AnalyticModel& model, double lambda, const Vector& center,
                                                    const std::vector<double>& radii,
                                                    const QuadratureOptions& opt = {}) {
  require_increasing_radii(radii);
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidInput("volume_growth_bound_check: bad Lambda");
  VolumeGrowthReport rep;
  QuadratureOptions probe = opt;
  probe.resolution = std::clamp(opt.resolution == 0 ? default_resolution(model.n()) : opt.resolution,
                                kMinQuadratureResolution, 64);
  const double rho = radii.back();
  const auto vertex = detail::resolve_vertex(model, probe);
  const int n = model.n();
  const double h = 2.0 * rho / probe.resolution;
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= static_cast<std::size_t>(probe.resolution);
  Vector x(n);
  for (std::size_t idx0 = 0; idx0 < total; ++idx0) {
    std::size_t idx = idx0;
    for (int k = n - 1; k >= 0; --k) {
      x(k) = center(k) - rho + (static_cast<double>(idx % probe.resolution) + 0.5) * h;
      idx /= static_cast<std::size_t>(probe.resolution);
    }
    if (vertex && (x - *vertex).norm() < kVertexCutoff * rho) continue;
    if ((model.graph_point(x) - center).norm() > rho) continue;
    const double dil = two_dilation(singular_spectrum(model.jacobian_sample(x)));
    rep.max_dilation = std::max(rep.max_dilation, dil);
    if (dil > lambda * (1.0 + 1e-12)) {
      std::string where;
      for (int k = 0; k < n; ++k) where += (k ? "," : "") + std::to_string(x(k));
      throw PredicateViolation("2-dilation " + std::to_string(dil) + " exceeds Lambda = " + std::to_string(lambda) +
                               " at x = (" + where + ")");
    }
  }
  rep.profile = density_profile(model, center, radii, opt);
  double sup = 0.0;
  for (double r : rep.profile.ratios) sup = std::max(sup, r);
  rep.constant = sup / std::sqrt(static_cast<double>(model.m()));
  rep.ok = std::isfinite(rep.constant) && rep.profile.ratios.back() <= 1.5 * rep.profile.ratios.front();
  return rep;
}

/// x -> u(r x) / r, with Du(r x) and r D^2u(r x).
inline AnalyticModel blow_down(const AnalyticModel& model, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidInput("blow_down: scale must be finite and > 0");
  auto value = [model, r](const Vector& x) -> Vector { return model.value(r * x) / r; };
  auto jacobian = [model, r](const Vector& x) -> Matrix { return model.jacobian(r * x); };
  auto hessian = [model, r](const Vector& x) {
    Hessian h = model.hessian(r * x);
    for (int a = 0; a < h.m(); ++a) h[a] *= r;
    return h;
  };
  auto domain = [model, r](const Vector& x) { return model.in_domain(r * x); };
  return AnalyticModel(model.label() + "/blowdown", model.n(), model.m(), value, jacobian, hessian, domain);
}

/// max v over the midpoint grid of the box |x|_inf <= half_width; grows
/// without bound under blow-down exactly when v is unbounded along rays.
inline double max_slope(const AnalyticModel& model, double half_width, int resolution = 32) {
  if (!(half_width > 0.0) || resolution < 1) throw InvalidInput("max_slope: bad box");
  const int n = model.n();
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= static_cast<std::size_t>(resolution);
  const double h = 2.0 * half_width / resolution;
  double best = 0.0;
  Vector x(n);
  for (std::size_t idx0 = 0; idx0 < total; ++idx0) {
    std::size_t idx = idx0;
    for (int k = n - 1; k >= 0; --k) {
      x(k) = -half_width + (static_cast<double>(idx % resolution) + 0.5) * h;
      idx /= static_cast<std::size_t>(resolution);
    }
    if (!model.in_domain(x)) continue;
    best = std::max(best, slope(singular_spectrum(model.jacobian_sample(x))));
  }
  return best;
}

}  // namespace mingraph

#endif  // MINGRAPH_MEASURE_TOOLS_HPP
