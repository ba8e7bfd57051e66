#ifndef MINGRAPH_LINALG_HPP
#define MINGRAPH_LINALG_HPP

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mingraph/error.hpp"

namespace mingraph {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Second derivatives of an R^m-valued map on R^n: one symmetric n x n block per component.
class Hessian {
 public:
  Hessian() = default;
  Hessian(int m, int n) : blocks_(static_cast<std::size_t>(m), Matrix::Zero(n, n)), n_(n) {}

  int m() const { return static_cast<int>(blocks_.size()); }
  int n() const { return n_; }

  Matrix& operator[](int alpha) { return blocks_[static_cast<std::size_t>(alpha)]; }
  const Matrix& operator[](int alpha) const { return blocks_[static_cast<std::size_t>(alpha)]; }

  double operator()(int alpha, int i, int j) const { return blocks_[static_cast<std::size_t>(alpha)](i, j); }

  /// Symmetrizes each block in place.
  void symmetrize() {
    for (auto& b : blocks_) b = 0.5 * (b + b.transpose()).eval();
  }

 private:
  std::vector<Matrix> blocks_;
  int n_ = 0;
};

inline bool all_finite(const Matrix& a) { return a.allFinite(); }

inline void require_finite(const Matrix& a, const std::string& what) {
  if (!a.allFinite()) throw InvalidInput(what + ": non-finite entry");
}

/// Gram-Schmidt on the columns of `a` (full column rank), computed through a
/// Householder QR with signs fixed so that R has a positive diagonal. The span
/// and the orientation of the column frame are preserved.
inline Matrix orthonormalize_columns(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    if (r(k, k) < 0.0) q.col(k) = -q.col(k);
  }
  return q;
}

/// Surface measure constant omega_n = pi^(n/2) / Gamma(n/2 + 1), with Gamma at
/// half-integers from the recursion Gamma(x+1) = x Gamma(x) seeded by
/// Gamma(1) = 1 and Gamma(1/2) = sqrt(pi).
inline double unit_ball_volume(int n) {
  if (n < 0) throw InvalidInput("unit_ball_volume: negative dimension");
  // Gamma(n/2 + 1) = prod over the recursion.
  double gamma = (n % 2 == 0) ? 1.0 : std::sqrt(M_PI);
  double x = (n % 2 == 0) ? 1.0 : 0.5;
  const double target = 0.5 * n + 1.0;
  while (x < target - 0.25) {
    gamma *= x;
    x += 1.0;
  }
  return std::pow(M_PI, 0.5 * n) / gamma;
}

}  // namespace mingraph

#endif  // MINGRAPH_LINALG_HPP
