#ifndef MINGRAPH_ALGEBRA_VERIFIER_HPP
#define MINGRAPH_ALGEBRA_VERIFIER_HPP

// Exhaustive grid scans and seeded random sampling for the algebraic
// inequalities behind the subharmonicity of log v:
//   * phi(mu) = 4 + mu1 mu2 mu3 - mu1 mu2 - mu1 mu3 - mu2 mu3 >= 0 on the
//     region mu_i mu_j <= 2 + 2/(max mu - 1), and >= (2 - sqrt2)(2 - L^2)
//     when every mu_i mu_j <= L^2 <= 2;
//   * the pointwise lower bounds for the right-hand side of the Delta log v
//     formula, on random symmetric second fundamental forms;
//   * the |xi_11| bound for xi = sqrt(det b) a b^{-1}, b = I + a^T a.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mingraph/error.hpp"
#include "mingraph/grassmann.hpp"
#include "mingraph/linalg.hpp"
#include "mingraph/parallel.hpp"

namespace mingraph {

/// Tolerance applied to every "expression >= 0" assertion.
inline constexpr double kInequalityTol = 1e-9;

struct MuTriple {
  double mu1 = 0.0, mu2 = 0.0, mu3 = 0.0;

  MuTriple() = default;
  MuTriple(double a, double b, double c) : mu1(a), mu2(b), mu3(c) {
    if (!(a >= 0.0 && b >= 0.0 && c >= 0.0)) throw InvalidInput("MuTriple: entries must be >= 0");
  }
  double max() const { return std::max({mu1, mu2, mu3}); }
  double max_pair_product() const { return std::max({mu1 * mu2, mu1 * mu3, mu2 * mu3}); }
};

inline double phi(const MuTriple& t) {
  return 4.0 + t.mu1 * t.mu2 * t.mu3 - t.mu1 * t.mu2 - t.mu1 * t.mu3 - t.mu2 * t.mu3;
}

/// Outcome of a scan or a sampler. `violations == 0` means the checked
/// inequality held on every admissible point.
struct ScanReport {
  std::string check;
  std::vector<std::pair<std::string, double>> params;
  std::uint64_t samples = 0;  // admissible points / accepted samples
  double min_value = std::numeric_limits<double>::infinity();
  std::vector<double> argmin;
  double max_value = -std::numeric_limits<double>::infinity();
  std::vector<double> argmax;
  std::uint64_t violations = 0;
  std::vector<double> witness;  // first violating point, if any
  std::optional<std::uint64_t> seed;
  std::uint64_t attempts = 0;               // proposals drawn by samplers
  std::uint64_t unconstrained_region = 0;   // mu123: points with max mu <= 1
  std::uint64_t pair_product_violations = 0;      // mu123: admissible points with a pair product > 4

  bool ok() const { return violations == 0; }
};

namespace detail {

// Running min/max/violation tally merged in a fixed order.
struct Tally {
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  std::uint64_t attempts = 0;
  std::uint64_t unconstrained = 0;
  std::uint64_t pair_excess = 0;
  double min_value = std::numeric_limits<double>::infinity();
  std::vector<double> argmin;
  double max_value = -std::numeric_limits<double>::infinity();
  std::vector<double> argmax;
  std::vector<double> witness;

  template <class Point>
  void observe(double value, const Point& point) {
    ++samples;
    if (value < min_value) {
      min_value = value;
      argmin.assign(point.begin(), point.end());
    }
    if (value > max_value) {
      max_value = value;
      argmax.assign(point.begin(), point.end());
    }
  }
  template <class Point>
  void violate(const Point& point) {
    if (violations++ == 0) witness.assign(point.begin(), point.end());
  }

  void merge(const Tally& o) {
    samples += o.samples;
    attempts += o.attempts;
    unconstrained += o.unconstrained;
    pair_excess += o.pair_excess;
    if (o.min_value < min_value) {
      min_value = o.min_value;
      argmin = o.argmin;
    }
    if (o.max_value > max_value) {
      max_value = o.max_value;
      argmax = o.argmax;
    }
    if (violations == 0 && o.violations > 0) witness = o.witness;
    violations += o.violations;
  }

  ScanReport to_report(std::string check) const {
    ScanReport r;
    r.check = std::move(check);
    r.samples = samples;
    r.min_value = min_value;
    r.argmin = argmin;
    r.max_value = max_value;
    r.argmax = argmax;
    r.violations = violations;
    r.witness = witness;
    r.attempts = attempts;
    r.unconstrained_region = unconstrained;
    r.pair_product_violations = pair_excess;
    return r;
  }
};

inline std::size_t grid_points(double step, double upper) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidInput("grid step must be > 0");
  if (!(upper >= 0.0) || !std::isfinite(upper)) throw InvalidInput("grid upper bound must be finite and >= 0");
  return static_cast<std::size_t>(std::floor(upper / step + 1e-9)) + 1;
}

// Deterministic per-chunk generator: identical for any thread count.
inline std::mt19937_64 chunk_rng(std::uint64_t seed, std::uint64_t chunk, std::uint64_t salt) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                    static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

inline constexpr std::size_t kSampleChunk = 1024;
inline constexpr double kMinAcceptance = 1e-6;

// Draws `quota` accepted proposals; `draw(rng)` returns true on acceptance
// and records the sample itself. Fails when the acceptance rate drops below
// kMinAcceptance.
template <class Draw>
std::uint64_t draw_accepted(std::mt19937_64& rng, std::size_t quota, Draw&& draw) {
  std::uint64_t attempts = 0;
  std::size_t accepted = 0;
  while (accepted < quota) {
    ++attempts;
    if (draw(rng)) ++accepted;
    if (attempts > 1000000 && static_cast<double>(accepted + 1) / static_cast<double>(attempts) < kMinAcceptance)
      throw SamplingFailure("sampler acceptance rate fell below 1e-6");
  }
  return attempts;
}

}  // namespace detail

enum class Mu123Constraint {
  strict,    // mu_i mu_j <= 2 + 2/(max mu - 1) for all i != j (unconstrained when max mu <= 1)
  weakened,  // mu_i mu_j <= 4 for all i != j; admits points where phi < 0
};

inline bool mu123_admissible(const MuTriple& t, Mu123Constraint c) {
  const double pmax = t.max_pair_product();
  if (c == Mu123Constraint::weakened) return pmax <= 4.0;
  const double top = t.max();
  if (top <= 1.0) return true;
  return pmax <= 2.0 + 2.0 / (top - 1.0);
}

struct Mu123ScanOptions {
  double step = 0.05;
  double mu_max = 4.0;
  Mu123Constraint constraint = Mu123Constraint::strict;
  /// Restricts the scan to triples with max mu <= region_cap (default: no restriction).
  double region_cap = std::numeric_limits<double>::infinity();
};

/// Enumerates the grid {0, step, 2 step, ...}^3 in [0, mu_max]^3 and checks
/// phi >= -1e-9 on every admissible triple. Also checks that admissible
/// triples have all pair products <= 4 (+1e-9).
inline ScanReport scan_mu123(const Mu123ScanOptions& opt) {
  if (!(opt.mu_max >= 4.0)) throw InvalidInput("scan_mu123: mu_max must be >= 4");
  const std::size_t pts = detail::grid_points(opt.step, opt.mu_max);
  auto partial = parallel::map_ranges<detail::Tally>(pts, 1, [&](std::size_t b, std::size_t e) {
    detail::Tally t;
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = 0; j < pts; ++j)
        for (std::size_t k = 0; k < pts; ++k) {
          const MuTriple mu(i * opt.step, j * opt.step, k * opt.step);
          if (mu.max() > opt.region_cap) continue;
          if (!mu123_admissible(mu, opt.constraint)) continue;
          const std::array<double, 3> point{mu.mu1, mu.mu2, mu.mu3};
          if (mu.max() <= 1.0) ++t.unconstrained;
          const double value = phi(mu);
          t.observe(value, point);
          if (value < -kInequalityTol) t.violate(point);
          if (mu.max_pair_product() > 4.0 + kInequalityTol) {
            ++t.pair_excess;
            t.violate(point);
          }
        }
    return t;
  });
  detail::Tally total;
  for (const auto& t : partial) total.merge(t);
  ScanReport r = total.to_report(opt.constraint == Mu123Constraint::strict ? "mu123" : "mu123-weakened");
  r.params = {{"step", opt.step}, {"mu_max", opt.mu_max}};
  if (std::isfinite(opt.region_cap)) r.params.emplace_back("region_cap", opt.region_cap);
  return r;
}

/// Lower bound (2 - sqrt2)(2 - L^2) for phi when all pair products are <= L^2.
inline double mu123_lambda_bound(double lambda) { return (2.0 - std::sqrt(2.0)) * (2.0 - lambda * lambda); }

/// Grid scan of phi >= (2 - sqrt2)(2 - L^2) - 1e-9 over triples in
/// [0, mu_max]^3 whose pair products are all <= L^2.
inline ScanReport scan_mu123_lambda(double lambda, double step, double mu_max = 4.0) {
  if (!(lambda > 0.0 && lambda <= std::sqrt(2.0) + 1e-15))
    throw InvalidInput("scan_mu123_lambda: need 0 < Lambda <= sqrt(2)");
  const double bound = mu123_lambda_bound(lambda);
  const double cap = lambda * lambda;
  const std::size_t pts = detail::grid_points(step, mu_max);
  auto partial = parallel::map_ranges<detail::Tally>(pts, 1, [&](std::size_t b, std::size_t e) {
    detail::Tally t;
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = 0; j < pts; ++j)
        for (std::size_t k = 0; k < pts; ++k) {
          const MuTriple mu(i * step, j * step, k * step);
          if (mu.max_pair_product() > cap) continue;
          const std::array<double, 3> point{mu.mu1, mu.mu2, mu.mu3};
          const double value = phi(mu);
          t.observe(value, point);
          if (value < bound - kInequalityTol) t.violate(point);
        }
    return t;
  });
  detail::Tally total;
  for (const auto& t : partial) total.merge(t);
  ScanReport r = total.to_report("mu123-lambda");
  r.params = {{"lambda", lambda}, {"step", step}, {"mu_max", mu_max}, {"bound", bound}};
  return r;
}

/// Hessian of f(x,y,z) = x^2 + y^2 + z^2 + li lj xy + lj lk yz + li lk xz.
inline Eigen::Matrix3d hessf_matrix(double li, double lj, double lk) {
  Eigen::Matrix3d h;
  h << 2.0, li * lj, li * lk,  //
      li * lj, 2.0, lj * lk,   //
      li * lk, lj * lk, 2.0;
  return h;
}

/// Closed-form determinant of hessf_matrix.
inline double hessf_det(double li, double lj, double lk) {
  const double a = li * li, b = lj * lj, c = lk * lk;
  return 8.0 + 2.0 * a * b * c - 2.0 * a * b - 2.0 * a * c - 2.0 * b * c;
}

/// Second fundamental form coefficients h_{alpha,ij}, symmetric in (i,j).
class HCoefficients {
 public:
  HCoefficients(int m, int n) : m_(m), n_(n), data_(static_cast<std::size_t>(m * n * n), 0.0) {
    if (m < 1 || n < 1) throw InvalidInput("HCoefficients: m and n must be >= 1");
  }

  int m() const { return m_; }
  int n() const { return n_; }

  double operator()(int alpha, int i, int j) const { return data_[index(alpha, i, j)]; }

  /// Zero for alpha >= m (normal directions the graph does not have).
  double at_or_zero(int alpha, int i, int j) const { return alpha < m_ ? data_[index(alpha, i, j)] : 0.0; }

  /// Sets h_{alpha,ij} and h_{alpha,ji}.
  void set(int alpha, int i, int j, double value) {
    if (!std::isfinite(value)) throw InvalidInput("HCoefficients: non-finite entry");
    data_[index(alpha, i, j)] = value;
    data_[index(alpha, j, i)] = value;
  }

  double norm_sq() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return s;
  }

  /// Relabels principal directions: h'_{s(a), s(i), s(j)} = h_{a,i,j}, with the
  /// same permutation acting on normal indices a < n and tangent indices.
  HCoefficients permuted(std::span<const int> perm) const {
    HCoefficients out(m_, n_);
    auto map_normal = [&](int a) { return a < n_ && perm[static_cast<std::size_t>(a)] < m_ ? perm[static_cast<std::size_t>(a)] : a; };
    for (int a = 0; a < m_; ++a)
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          out.data_[out.index(map_normal(a), perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)])] =
              (*this)(a, i, j);
    return out;
  }

 private:
  std::size_t index(int alpha, int i, int j) const {
    return (static_cast<std::size_t>(alpha) * n_ + i) * static_cast<std::size_t>(n_) + j;
  }
  int m_, n_;
  std::vector<double> data_;
};

/// Right-hand side of the Delta log v formula and its regrouping into
///   normal/diagonal + pair (i != j) + triple (i, j, k distinct) parts.
struct LogvRhs {
  double b_norm_sq = 0.0;   // sum h_{a,ij}^2
  double diag_term = 0.0;   // sum lambda_i^2 h_{i,ij}^2
  double cross_term = 0.0;  // sum_{l, i != j} lambda_i lambda_j h_{i,jl} h_{j,il}
  double total = 0.0;

  double normal_and_diagonal = 0.0;  // sum_{a>n} h^2 + sum_i (1 + lambda_i^2) h_{i,ii}^2
  double pair_part = 0.0;
  double triple_part = 0.0;
  double decomposed_total = 0.0;

  /// sum_j (sum_i lambda_i h_{i,ij})^2 = |grad log v|^2.
  double grad_log_v_sq = 0.0;
};

/// Evaluates the formula with h_{a,..} = 0 for a >= m. `lambda` need not be
/// sorted; index i of lambda pairs with normal index i. Throws std::logic_error
/// if the two groupings disagree by more than 1e-10 (relative to the size of
/// the terms).
inline LogvRhs delta_logv_rhs(std::span<const double> lambda, const HCoefficients& h) {
  const int n = h.n();
  const int m = h.m();
  if (static_cast<int>(lambda.size()) != n) throw DimensionMismatch("delta_logv_rhs: lambda must have n entries");
  auto H = [&](int a, int i, int j) { return h.at_or_zero(a, i, j); };
  auto L = [&](int i) { return lambda[static_cast<std::size_t>(i)]; };

  LogvRhs r;
  r.b_norm_sq = h.norm_sq();
  double scale = r.b_norm_sq;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.diag_term += L(i) * L(i) * H(i, i, j) * H(i, i, j);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double t = L(i) * L(j) * H(i, j, l) * H(j, i, l);
        r.cross_term += t;
        scale += std::abs(t);
      }
  r.total = r.b_norm_sq + r.diag_term + r.cross_term;

  for (int a = n; a < m; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r.normal_and_diagonal += H(a, i, j) * H(a, i, j);
  for (int i = 0; i < n; ++i) r.normal_and_diagonal += (1.0 + L(i) * L(i)) * H(i, i, i) * H(i, i, i);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      r.pair_part += (2.0 + L(i) * L(i)) * H(i, i, j) * H(i, i, j) + H(j, i, i) * H(j, i, i) +
                     2.0 * L(i) * L(j) * H(i, j, i) * H(j, i, i);
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        r.triple_part += H(k, i, j) * H(k, i, j) + L(i) * L(j) * H(i, j, k) * H(j, i, k);
      }
  r.decomposed_total = r.normal_and_diagonal + r.pair_part + r.triple_part;
  if (std::abs(r.total - r.decomposed_total) > 1e-10 * std::max(1.0, scale))
    throw std::logic_error("delta_logv_rhs: decomposition does not match the direct sum");

  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += L(i) * H(i, i, j);
    r.grad_log_v_sq += s * s;
  }
  return r;
}

inline LogvRhs delta_logv_rhs(const SingularSpectrum& s, const HCoefficients& h) {
  return delta_logv_rhs(std::span<const double>(s.values()), h);
}

/// lambda_1 >= ... and lambda_1^2 lambda_i^2 <= 2 + lambda_i^2 for i >= 2.
inline bool sqrt2_hypothesis(std::span<const double> sorted_lambda) {
  for (std::size_t i = 1; i < sorted_lambda.size(); ++i) {
    const double l1 = sorted_lambda[0], li = sorted_lambda[i];
    if (l1 * l1 * li * li > 2.0 + li * li) return false;
  }
  return true;
}

/// rhs - [sum_{a>n} h^2 + sum_i (1 + lambda_i^2) h_{i,ii}^2]; >= 0 under sqrt2_hypothesis.
inline double sqrt2_margin(std::span<const double> lambda, const HCoefficients& h) {
  const LogvRhs r = delta_logv_rhs(lambda, h);
  return r.total - r.normal_and_diagonal;
}

/// rhs - [(1 - L/sqrt2)|h|^2 + (1/n) sum_j (sum_i lambda_i h_{i,ij})^2]; >= 0 when lambda_1 lambda_2 <= L <= sqrt2.
inline double lambda_margin(std::span<const double> lambda, const HCoefficients& h, double big_lambda) {
  const LogvRhs r = delta_logv_rhs(lambda, h);
  return r.total - ((1.0 - big_lambda / std::sqrt(2.0)) * r.b_norm_sq + r.grad_log_v_sq / h.n());
}

namespace detail {

inline HCoefficients random_h(std::mt19937_64& rng, int m, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HCoefficients h(m, n);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) h.set(a, i, j, u(rng));
  return h;
}

inline std::vector<double> random_sorted_lambda(std::mt19937_64& rng, int n, double upper) {
  std::uniform_real_distribution<double> u(0.0, upper);
  std::vector<double> l(static_cast<std::size_t>(n));
  for (auto& x : l) x = u(rng);
  std::sort(l.begin(), l.end(), std::greater<>());
  return l;
}

}  // namespace detail

struct PointwiseSamplerOptions {
  int n = 3;
  int m = 3;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  /// Upper end of the uniform lambda proposal.
  double lambda_upper = 3.0;
  /// If set, every sample uses this (sorted) spectrum and only h is random.
  std::optional<std::vector<double>> fixed_lambda;
};

namespace detail {

template <class Hypothesis, class Margin>
ScanReport run_pointwise_sampler(const PointwiseSamplerOptions& opt, std::uint64_t salt, Hypothesis&& hypothesis,
                                 Margin&& margin, std::string check) {
  if (opt.samples == 0) throw InvalidInput("sampler: samples must be > 0");
  if (opt.n < 1 || opt.m < 1) throw InvalidInput("sampler: n and m must be >= 1");
  if (opt.fixed_lambda) {
    if (static_cast<int>(opt.fixed_lambda->size()) != opt.n) throw DimensionMismatch("fixed_lambda must have n entries");
    if (!hypothesis(std::span<const double>(*opt.fixed_lambda)))
      throw InvalidInput("fixed_lambda does not satisfy the hypothesis");
  }
  const std::size_t chunks = (opt.samples + kSampleChunk - 1) / kSampleChunk;
  std::vector<Tally> partial(chunks);
  parallel::for_each_chunk(chunks, [&](std::size_t c) {
    auto rng = chunk_rng(opt.seed, c, salt);
    const std::size_t quota = std::min<std::uint64_t>(kSampleChunk, opt.samples - c * kSampleChunk);
    Tally& t = partial[c];
    t.attempts = draw_accepted(rng, quota, [&](std::mt19937_64& g) {
      std::vector<double> lambda = opt.fixed_lambda ? *opt.fixed_lambda : random_sorted_lambda(g, opt.n, opt.lambda_upper);
      if (!hypothesis(std::span<const double>(lambda))) return false;
      const HCoefficients h = random_h(g, opt.m, opt.n);
      const double value = margin(std::span<const double>(lambda), h);
      t.observe(value, lambda);
      if (value < -kInequalityTol) t.violate(lambda);
      return true;
    });
  });
  Tally total;
  for (const auto& t : partial) total.merge(t);
  ScanReport r = total.to_report(std::move(check));
  r.seed = opt.seed;
  r.params = {{"n", opt.n}, {"m", opt.m}, {"lambda_upper", opt.lambda_upper}};
  return r;
}

}  // namespace detail

/// Samples (lambda, h) with lambda_1^2 lambda_i^2 <= 2 + lambda_i^2 and checks
/// rhs >= sum_{a>n} h^2 + sum_i (1 + lambda_i^2) h_{i,ii}^2 - 1e-9. Values
/// reported are the margins; argmin is the spectrum of the tightest sample.
inline ScanReport check_sqrt2_inequality(const PointwiseSamplerOptions& opt) {
  return detail::run_pointwise_sampler(
      opt, 0x5157, [](std::span<const double> l) { return sqrt2_hypothesis(l); },
      [](std::span<const double> l, const HCoefficients& h) { return sqrt2_margin(l, h); }, "sqrt2-logv");
}

/// Samples (lambda, h) with lambda_1 lambda_2 <= L and checks
/// rhs >= (1 - L/sqrt2)|h|^2 + (1/n) sum_j (sum_i lambda_i h_{i,ij})^2 - 1e-9.
inline ScanReport check_lambda_inequality(double big_lambda, const PointwiseSamplerOptions& opt) {
  if (!(big_lambda > 0.0 && big_lambda <= std::sqrt(2.0) + 1e-15))
    throw InvalidInput("check_lambda_inequality: need 0 < Lambda <= sqrt(2)");
  ScanReport r = detail::run_pointwise_sampler(
      opt, 0x1a4b,
      [big_lambda](std::span<const double> l) { return l.size() < 2 || l[0] * l[1] <= big_lambda; },
      [big_lambda](std::span<const double> l, const HCoefficients& h) { return lambda_margin(l, h, big_lambda); },
      "lambda-logv");
  r.params.emplace_back("lambda", big_lambda);
  return r;
}

/// xi = sqrt(det b) a b^{-1} with b = I + a^T a (m x n, like a).
inline Matrix app1_xi(const Matrix& a) {
  const Eigen::Index n = a.cols();
  const Matrix b = Matrix::Identity(n, n) + a.transpose() * a;
  Eigen::LDLT<Matrix> ldlt(b);
  const double sqrt_det = std::sqrt(ldlt.vectorD().prod());
  return sqrt_det * ldlt.solve(a.transpose()).transpose();
}

struct App1Options {
  double lambda = 1.0;
  double epsilon = 0.01;
  int m = 2;
  int n = 2;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 1;
};

namespace detail {

// Cayley transform of t S for a random skew S: a rotation that is close to
// the identity when t is small.
inline Matrix random_rotation(std::mt19937_64& rng, int dim, double t) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix s = Matrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      s(i, j) = t * normal(rng);
      s(j, i) = -s(i, j);
    }
  const Matrix id = Matrix::Identity(dim, dim);
  return (id - 0.5 * s).partialPivLu().solve(id + 0.5 * s);
}

}  // namespace detail

/// Draws a = q diag(lambda) p with random near-identity rotations p, q,
/// lambda_1 log-uniform in [1, 1e3] and lambda_k (k >= 2) rescaled into
/// [0, min(lambda_1, L/lambda_1)] so that lambda_1 lambda_2 <= L. Keeps the
/// draws with a_11 >= (1 - eps) sqrt(det b) and reports max |xi_11|
/// (max_value, argmax = row-major a) over them.
inline ScanReport app1_sampler(const App1Options& opt) {
  if (!(opt.lambda > 0.0)) throw InvalidInput("app1_sampler: Lambda must be > 0");
  if (!(opt.epsilon > 0.0 && opt.epsilon < 1.0)) throw InvalidInput("app1_sampler: eps must be in (0,1)");
  if (opt.samples == 0) throw InvalidInput("app1_sampler: samples must be > 0");
  if (opt.m < 1 || opt.n < 1) throw InvalidInput("app1_sampler: m and n must be >= 1");
  const int r = std::min(opt.m, opt.n);
  const std::size_t chunks = (opt.samples + detail::kSampleChunk - 1) / detail::kSampleChunk;
  std::vector<detail::Tally> partial(chunks);
  parallel::for_each_chunk(chunks, [&](std::size_t c) {
    auto rng = detail::chunk_rng(opt.seed, c, 0xa991);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t quota = std::min<std::uint64_t>(detail::kSampleChunk, opt.samples - c * detail::kSampleChunk);
    detail::Tally& t = partial[c];
    t.attempts = detail::draw_accepted(rng, quota, [&](std::mt19937_64& g) {
      const double l1 = std::pow(10.0, 3.0 * unit(g));
      std::vector<double> lambda(static_cast<std::size_t>(r));
      lambda[0] = l1;
      const double cap = std::min(l1, opt.lambda / l1);
      for (int k = 1; k < r; ++k) lambda[static_cast<std::size_t>(k)] = cap * unit(g);
      std::sort(lambda.begin() + 1, lambda.end(), std::greater<>());
      const Matrix q = detail::random_rotation(g, opt.m, std::pow(10.0, -4.0 + 4.0 * unit(g)));
      const Matrix p = detail::random_rotation(g, opt.n, std::pow(10.0, -4.0 + 4.0 * unit(g)));
      Matrix sigma = Matrix::Zero(opt.m, opt.n);
      for (int k = 0; k < r; ++k) sigma(k, k) = lambda[static_cast<std::size_t>(k)];
      const Matrix a = q * sigma * p;
      const Matrix b = Matrix::Identity(opt.n, opt.n) + a.transpose() * a;
      const double sqrt_det = std::sqrt(b.determinant());
      if (a(0, 0) < (1.0 - opt.epsilon) * sqrt_det) return false;
      const double xi11 = std::abs(app1_xi(a)(0, 0));
      std::vector<double> flat(static_cast<std::size_t>(a.size()));
      for (int i = 0; i < opt.m; ++i)
        for (int j = 0; j < opt.n; ++j) flat[static_cast<std::size_t>(i * opt.n + j)] = a(i, j);
      t.observe(xi11, flat);
      return true;
    });
  });
  detail::Tally total;
  for (const auto& t : partial) total.merge(t);
  ScanReport rep = total.to_report("app1");
  rep.seed = opt.seed;
  rep.params = {{"lambda", opt.lambda}, {"epsilon", opt.epsilon}, {"m", opt.m}, {"n", opt.n}};
  return rep;
}

}  // namespace mingraph

#endif  // MINGRAPH_ALGEBRA_VERIFIER_HPP
