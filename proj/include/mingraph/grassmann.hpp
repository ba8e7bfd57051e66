#ifndef MINGRAPH_GRASSMANN_HPP
#define MINGRAPH_GRASSMANN_HPP

// Pointwise Grassmannian invariants of a graph: singular spectrum, slope,
// 2-dilation, Jordan angles between n-planes and the Bernstein-type
// hypothesis on (Lip, 2-dilation).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "mingraph/error.hpp"
#include "mingraph/linalg.hpp"

namespace mingraph {

/// The m x n matrix Du at a point; entry (alpha, i) is d u^alpha / d x_i.
class JacobianSample {
 public:
  explicit JacobianSample(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() < 1 || entries_.cols() < 1)
      throw InvalidInput("JacobianSample: m and n must be >= 1");
    require_finite(entries_, "JacobianSample");
  }

  int m() const { return static_cast<int>(entries_.rows()); }
  int n() const { return static_cast<int>(entries_.cols()); }
  const Matrix& entries() const { return entries_; }
  double operator()(int alpha, int i) const { return entries_(alpha, i); }

 private:
  Matrix entries_;
};

/// Singular values lambda_1 >= ... >= lambda_n >= 0 of a Jacobian, padded
/// with zeros when m < n.
class SingularSpectrum {
 public:
  SingularSpectrum() = default;
  explicit SingularSpectrum(std::vector<double> values) : values_(std::move(values)) {
    for (double x : values_)
      if (!std::isfinite(x) || x < 0.0) throw InvalidInput("SingularSpectrum: entries must be finite and >= 0");
    std::stable_sort(values_.begin(), values_.end(), std::greater<>());
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

inline SingularSpectrum singular_spectrum(const JacobianSample& jac) {
  Eigen::JacobiSVD<Matrix> svd(jac.entries());
  const auto& sv = svd.singularValues();
  std::vector<double> values(static_cast<std::size_t>(jac.n()), 0.0);
  for (Eigen::Index k = 0; k < sv.size(); ++k) values[static_cast<std::size_t>(k)] = sv(k);
  return SingularSpectrum(std::move(values));
}

/// v = prod_i sqrt(1 + lambda_i^2).
inline double slope(const SingularSpectrum& s) {
  double v = 1.0;
  for (double l : s.values()) v *= std::sqrt(1.0 + l * l);
  return v;
}

/// Largest singular value; the pointwise Lipschitz norm of the linear map.
inline double lipschitz(const SingularSpectrum& s) { return s.size() == 0 ? 0.0 : s[0]; }

/// max_{i != j} lambda_i lambda_j = lambda_1 lambda_2. Zero for n = 1 (empty max).
inline double two_dilation(const SingularSpectrum& s) { return s.size() < 2 ? 0.0 : s[0] * s[1]; }

/// True iff (lambda_1 lambda_2)^2 <= 2 lambda_1^2 / |lambda_1^2 - 1|; the right
/// side is +infinity when lambda_1 = 1.
inline bool bernstein_condition(const SingularSpectrum& s) {
  const double lip = lipschitz(s);
  if (lip == 1.0) return true;
  const double dil = two_dilation(s);
  return dil * dil <= 2.0 * lip * lip / std::abs(lip * lip - 1.0);
}

/// Sum over alpha of |grad_M u^alpha|^2 = tr(J g^{-1} J^T), g = I + J^T J.
inline double graph_gradient_energy(const JacobianSample& jac) {
  const Matrix& a = jac.entries();
  const Matrix g = Matrix::Identity(jac.n(), jac.n()) + a.transpose() * a;
  return (a * g.ldlt().solve(a.transpose())).trace();
}

/// 1 + v * sum_alpha |grad_M u^alpha|^2 - v; nonnegative for every Jacobian.
inline double slope_gradient_margin(const JacobianSample& jac) {
  const double v = slope(singular_spectrum(jac));
  return 1.0 + v * graph_gradient_energy(jac) - v;
}

/// An oriented n-plane in R^(n+m), stored as an ambient x n matrix with
/// orthonormal columns.
class PlaneBasis {
 public:
  static constexpr double kOrthonormalTol = 1e-12;

  explicit PlaneBasis(Matrix vectors) : vectors_(std::move(vectors)) {
    if (vectors_.cols() < 1 || vectors_.rows() < vectors_.cols())
      throw InvalidInput("PlaneBasis: need 1 <= dim <= ambient");
    require_finite(vectors_, "PlaneBasis");
    const Matrix gram = vectors_.transpose() * vectors_;
    const double err = (gram - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
    if (err > kOrthonormalTol) throw InvalidInput("PlaneBasis: vectors are not orthonormal");
  }

  /// Orthonormalizes a full-rank spanning set, keeping its orientation.
  static PlaneBasis from_spanning(const Matrix& spanning) { return PlaneBasis(orthonormalize_columns(spanning)); }

  /// span(E_1, ..., E_n) inside R^(n+m).
  static PlaneBasis coordinate(int n, int m) {
    Matrix e = Matrix::Zero(n + m, n);
    e.topRows(n).setIdentity();
    return PlaneBasis(std::move(e));
  }

  /// Tangent plane of a graph with Jacobian J, spanned by E_i + sum_alpha J(alpha,i) E_{n+alpha}.
  static PlaneBasis graph_plane(const JacobianSample& jac) {
    Matrix f(jac.n() + jac.m(), jac.n());
    f.topRows(jac.n()).setIdentity();
    f.bottomRows(jac.m()) = jac.entries();
    return from_spanning(f);
  }

  int dim() const { return static_cast<int>(vectors_.cols()); }
  int ambient() const { return static_cast<int>(vectors_.rows()); }
  const Matrix& vectors() const { return vectors_; }

 private:
  Matrix vectors_;
};

/// Critical angles theta_1 >= ... >= theta_n in [0, pi/2].
class JordanAngles {
 public:
  JordanAngles() = default;
  explicit JordanAngles(std::vector<double> angles) : angles_(std::move(angles)) {
    std::stable_sort(angles_.begin(), angles_.end(), std::greater<>());
  }
  std::size_t size() const { return angles_.size(); }
  double operator[](std::size_t i) const { return angles_[i]; }
  const std::vector<double>& values() const { return angles_; }

 private:
  std::vector<double> angles_;
};

namespace detail {
inline void require_same_shape(const PlaneBasis& p, const PlaneBasis& q) {
  if (p.dim() != q.dim() || p.ambient() != q.ambient())
    throw DimensionMismatch("planes differ in dimension or ambient space");
}
}  // namespace detail

/// Jordan angles between two n-planes. The cosines are the singular values of
/// W = (<e_i, f_j>), clamped into [0,1]; the sines are the singular values of
/// the part of Q orthogonal to P. Pairing largest cosine with smallest sine and
/// taking atan2 keeps small angles accurate where arccos alone loses half the
/// digits. Orientation is ignored.
inline JordanAngles jordan_angles(const PlaneBasis& p, const PlaneBasis& q) {
  detail::require_same_shape(p, q);
  const Matrix w = p.vectors().transpose() * q.vectors();
  const Matrix residual = q.vectors() - p.vectors() * w;
  Eigen::JacobiSVD<Matrix> cos_svd(w);
  Eigen::JacobiSVD<Matrix> sin_svd(residual);
  std::vector<double> cosines(cos_svd.singularValues().data(),
                              cos_svd.singularValues().data() + cos_svd.singularValues().size());
  std::vector<double> sines(sin_svd.singularValues().data(),
                            sin_svd.singularValues().data() + sin_svd.singularValues().size());
  std::sort(cosines.begin(), cosines.end(), std::greater<>());
  std::sort(sines.begin(), sines.end());
  std::vector<double> angles(cosines.size());
  for (std::size_t i = 0; i < cosines.size(); ++i) {
    const double c = std::clamp(cosines[i], 0.0, 1.0);
    const double s = std::clamp(sines[i], 0.0, 1.0);
    angles[i] = std::atan2(s, c);
  }
  return JordanAngles(std::move(angles));
}

/// <e_1 ^ ... ^ e_n, f_1 ^ ... ^ f_n> = det W; carries the orientation sign.
inline double plane_inner(const PlaneBasis& p, const PlaneBasis& q) {
  detail::require_same_shape(p, q);
  return (p.vectors().transpose() * q.vectors()).determinant();
}

/// sqrt(sum theta_i^2).
inline double grassmann_distance(const PlaneBasis& p, const PlaneBasis& q) {
  const auto angles = jordan_angles(p, q);
  double acc = 0.0;
  for (double t : angles.values()) acc += t * t;
  return std::sqrt(acc);
}

}  // namespace mingraph

#endif  // MINGRAPH_GRASSMANN_HPP
