#ifndef MINGRAPH_MODEL_ZOO_HPP
#define MINGRAPH_MODEL_ZOO_HPP

// Closed-form graph geometries with exact first and second derivatives.

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mingraph/error.hpp"
#include "mingraph/grassmann.hpp"
#include "mingraph/linalg.hpp"

namespace mingraph {

/// A graph x -> u(x) from (a subset of) R^n to R^m given in closed form.
/// Immutable; copies share the underlying callables.
class AnalyticModel {
 public:
  using ValueFn = std::function<Vector(const Vector&)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;
  using HessianFn = std::function<Hessian(const Vector&)>;
  using DomainFn = std::function<bool(const Vector&)>;

  AnalyticModel(std::string label, int n, int m, ValueFn value, JacobianFn jacobian, HessianFn hessian,
                DomainFn domain = nullptr)
      : label_(std::move(label)),
        n_(n),
        m_(m),
        value_(std::move(value)),
        jacobian_(std::move(jacobian)),
        hessian_(std::move(hessian)),
        domain_(std::move(domain)) {
    if (n_ < 1 || m_ < 1) throw InvalidInput("AnalyticModel: n and m must be >= 1");
  }

  const std::string& label() const { return label_; }
  int n() const { return n_; }
  int m() const { return m_; }

  bool in_domain(const Vector& x) const {
    if (x.size() != n_ || !x.allFinite()) return false;
    return !domain_ || domain_(x);
  }

  Vector value(const Vector& x) const {
    check(x);
    return value_(x);
  }
  Matrix jacobian(const Vector& x) const {
    check(x);
    return jacobian_(x);
  }
  Hessian hessian(const Vector& x) const {
    check(x);
    return hessian_(x);
  }

  JacobianSample jacobian_sample(const Vector& x) const { return JacobianSample(jacobian(x)); }

  /// Point (x, u(x)) of the graph in R^(n+m).
  Vector graph_point(const Vector& x) const {
    Vector p(n_ + m_);
    p.head(n_) = x;
    p.tail(m_) = value(x);
    return p;
  }

  const DomainFn& domain_predicate() const { return domain_; }

 private:
  void check(const Vector& x) const {
    if (x.size() != n_) throw DimensionMismatch("AnalyticModel '" + label_ + "': point has wrong dimension");
    if (!in_domain(x)) throw DomainError("AnalyticModel '" + label_ + "': point outside the domain");
  }

  std::string label_;
  int n_;
  int m_;
  ValueFn value_;
  JacobianFn jacobian_;
  HessianFn hessian_;
  DomainFn domain_;
};

/// x -> A x + b.
inline AnalyticModel model_affine(const Matrix& a, const Vector& b) {
  require_finite(a, "model_affine A");
  require_finite(b, "model_affine b");
  if (b.size() != a.rows()) throw DimensionMismatch("model_affine: b must have m = rows(A) entries");
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  return AnalyticModel(
      "affine", n, m, [a, b](const Vector& x) -> Vector { return a * x + b; },
      [a](const Vector&) -> Matrix { return a; }, [m, n](const Vector&) { return Hessian(m, n); });
}

/// u = D phi for phi = e^x cos y: u = (e^x cos y, -e^x sin y). Special
/// Lagrangian, hence minimal; D^2 phi squared is e^{2x} I.
inline AnalyticModel model_slag_exp() {
  auto value = [](const Vector& p) -> Vector {
    const double ex = std::exp(p(0));
    Vector u(2);
    u << ex * std::cos(p(1)), -ex * std::sin(p(1));
    return u;
  };
  auto jacobian = [](const Vector& p) -> Matrix {
    const double ex = std::exp(p(0));
    const double c = ex * std::cos(p(1));
    const double s = ex * std::sin(p(1));
    Matrix j(2, 2);
    j << c, -s, -s, -c;
    return j;
  };
  auto hessian = [](const Vector& p) {
    const double ex = std::exp(p(0));
    const double c = ex * std::cos(p(1));
    const double s = ex * std::sin(p(1));
    Hessian h(2, 2);
    h[0] << c, -s, -s, -c;
    h[1] << -s, -c, -c, s;
    return h;
  };
  return AnalyticModel("slag-exp", 2, 2, value, jacobian, hessian);
}

namespace detail {

// Components of the Hopf map numerator q(x) on R^4 with z1 = a + ib,
// z2 = c + id: (|z1|^2 - |z2|^2, Re 2 z1 conj(z2), Im 2 z1 conj(z2)).
struct HopfQuadratic {
  static Vector value(const Vector& x) {
    const double a = x(0), b = x(1), c = x(2), d = x(3);
    Vector q(3);
    q << a * a + b * b - c * c - d * d, 2.0 * (a * c + b * d), 2.0 * (b * c - a * d);
    return q;
  }
  static Matrix gradient(const Vector& x) {
    const double a = x(0), b = x(1), c = x(2), d = x(3);
    Matrix g(3, 4);
    g << 2 * a, 2 * b, -2 * c, -2 * d,  //
        2 * c, 2 * d, 2 * a, 2 * b,     //
        -2 * d, 2 * c, 2 * b, -2 * a;
    return g;
  }
  static const Hessian& hessian() {
    static const Hessian h = [] {
      Hessian out(3, 4);
      out[0].diagonal() << 2, 2, -2, -2;
      out[1](0, 2) = out[1](2, 0) = 2;
      out[1](1, 3) = out[1](3, 1) = 2;
      out[2](1, 2) = out[2](2, 1) = 2;
      out[2](0, 3) = out[2](3, 0) = -2;
      return out;
    }();
    return h;
  }
};

}  // namespace detail

/// Lawson-Osserman cone over R^4: w(x) = (sqrt5/2) |x| eta(x/|x|) with eta the
/// Hopf map, i.e. w = k q(x)/|x| with q the quadratic Hopf numerator. Defined
/// for x != 0.
inline AnalyticModel model_lawson_osserman() {
  static constexpr double k = 1.1180339887498949;  // sqrt(5)/2
  auto value = [](const Vector& x) -> Vector { return (k / x.norm()) * detail::HopfQuadratic::value(x); };
  auto jacobian = [](const Vector& x) -> Matrix {
    const double r = x.norm();
    const Vector q = detail::HopfQuadratic::value(x);
    const Matrix dq = detail::HopfQuadratic::gradient(x);
    // d(q/r) = dq / r - q x^T / r^3
    return k * (dq / r - q * x.transpose() / (r * r * r));
  };
  auto hessian = [](const Vector& x) {
    const double r = x.norm();
    const double r3 = r * r * r;
    const Vector q = detail::HopfQuadratic::value(x);
    const Matrix dq = detail::HopfQuadratic::gradient(x);
    const Hessian& d2q = detail::HopfQuadratic::hessian();
    const Vector ds = -x / r3;  // gradient of s = 1/r
    const Matrix d2s = -Matrix::Identity(4, 4) / r3 + 3.0 * x * x.transpose() / (r3 * r * r);
    Hessian h(3, 4);
    for (int a = 0; a < 3; ++a) {
      const Vector grad = dq.row(a).transpose();
      h[a] = k * (d2q[a] / r + grad * ds.transpose() + ds * grad.transpose() + q(a) * d2s);
    }
    h.symmetrize();
    return h;
  };
  auto domain = [](const Vector& x) { return x.squaredNorm() > 0.0; };
  return AnalyticModel("lawson-osserman", 4, 3, value, jacobian, hessian, domain);
}

/// Applies a graph-preserving rigid motion: x' = R x + s, u' = Q u + t, so the
/// new graph is x' -> Q u(R^T (x' - s)) + t.
inline AnalyticModel model_rigid_motion(const AnalyticModel& base, const Matrix& rot_base, const Vector& shift_base,
                                        const Matrix& rot_fiber, const Vector& shift_fiber) {
  const int n = base.n();
  const int m = base.m();
  if (rot_base.rows() != n || rot_base.cols() != n || shift_base.size() != n || rot_fiber.rows() != m ||
      rot_fiber.cols() != m || shift_fiber.size() != m)
    throw DimensionMismatch("model_rigid_motion: shapes do not match the model");
  auto pull = [rot_base, shift_base](const Vector& x) -> Vector { return rot_base.transpose() * (x - shift_base); };
  auto value = [base, pull, rot_fiber, shift_fiber](const Vector& x) -> Vector {
    return rot_fiber * base.value(pull(x)) + shift_fiber;
  };
  auto jacobian = [base, pull, rot_base, rot_fiber](const Vector& x) -> Matrix {
    return rot_fiber * base.jacobian(pull(x)) * rot_base.transpose();
  };
  auto hessian = [base, pull, rot_base, rot_fiber, m, n](const Vector& x) {
    const Hessian h = base.hessian(pull(x));
    Hessian out(m, n);
    for (int a = 0; a < m; ++a) {
      Matrix acc = Matrix::Zero(n, n);
      for (int b = 0; b < m; ++b) acc += rot_fiber(a, b) * h[b];
      out[a] = rot_base * acc * rot_base.transpose();
    }
    return out;
  };
  auto domain = [base, pull](const Vector& x) { return base.in_domain(pull(x)); };
  return AnalyticModel(base.label() + "+rigid", n, m, value, jacobian, hessian, domain);
}

/// Orthonormal, orientation-compatible basis of the tangent plane of the graph at (x, u(x)).
inline PlaneBasis model_graph_plane_basis(const AnalyticModel& model, const Vector& x) {
  return PlaneBasis::graph_plane(model.jacobian_sample(x));
}

/// Labels accepted by model_by_label.
inline std::vector<std::string> model_labels() { return {"affine", "slag-exp", "lawson-osserman"}; }

/// Looks a model up by its CLI label. "affine" needs the coefficients; the
/// default is the zero map R^n -> R^m.
inline AnalyticModel model_by_label(const std::string& label, const Matrix& affine_a = Matrix::Zero(2, 2),
                                    const Vector& affine_b = Vector::Zero(2)) {
  if (label == "affine") return model_affine(affine_a, affine_b);
  if (label == "slag-exp") return model_slag_exp();
  if (label == "lawson-osserman") return model_lawson_osserman();
  throw InvalidInput("unknown model label '" + label + "'");
}

}  // namespace mingraph

#endif  // MINGRAPH_MODEL_ZOO_HPP
