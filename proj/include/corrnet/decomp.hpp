#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "corrnet/types.hpp"

namespace corrnet {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Real matrix with A^T = -A held exactly.
template <typename Scalar>
class SkewMatrix {
 public:
  SkewMatrix() = default;

  // Accepts a within `rel_tol` of skew-symmetric, relative to its largest entry,
  // and stores the exact skew part (A - A^T)/2.
  template <typename Derived>
  explicit SkewMatrix(const Eigen::MatrixBase<Derived>& a, Scalar rel_tol = Scalar(1e-10)) {
    if (a.rows() != a.cols()) throw ValidationError("skew-symmetric matrix must be square");
    Scalar scale = a.size() ? a.cwiseAbs().maxCoeff() : Scalar(0);
    Scalar asym = a.size() ? (a + a.transpose()).cwiseAbs().maxCoeff() : Scalar(0);
    if (!(asym <= rel_tol * scale)) throw ValidationError("input matrix is not skew-symmetric");
    m_ = (a - a.transpose()) / Scalar(2);
  }

  static SkewMatrix project(const DenseMatrix<Scalar>& a) {
    SkewMatrix s;
    s.m_ = (a - a.transpose()) / Scalar(2);
    return s;
  }

  Index n() const { return m_.rows(); }
  const DenseMatrix<Scalar>& matrix() const { return m_; }
  operator const DenseMatrix<Scalar>&() const { return m_; }

 private:
  DenseMatrix<Scalar> m_;
};

using SkewSymmetricMatrix = SkewMatrix<double>;

// Entrywise prox of tau * ||.||_1.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> soft_threshold(const Eigen::MatrixBase<Derived>& a,
                                                     typename Derived::Scalar tau) {
  using Scalar = typename Derived::Scalar;
  return a.unaryExpr([tau](Scalar x) {
    Scalar m = std::abs(x) - tau;
    return m > Scalar(0) ? std::copysign(m, x) : Scalar(0);
  });
}

template <typename Scalar>
struct SvtResult {
  DenseMatrix<Scalar> x;
  Index rank = 0;
  Scalar nuclear_norm = 0;
};

// State carried between repeated thresholding calls on slowly varying inputs.
template <typename Scalar>
struct SvtWorkspace {
  DenseMatrix<Scalar> basis;  // right singular subspace estimate
  Index dense_below = 64;     // sizes below this use a full SVD
  int cooldown = 0;           // calls left before the partial path is tried again
  int partial_calls = 0;
  int dense_fallbacks = 0;
};

namespace detail {

// Full thresholding through the Gram matrix: with A^T A = V diag(sigma^2) V^T,
// SVT(A) = A V_r diag(1 - tau / sigma) V_r^T over the sigma > tau block. The symmetric
// eigensolver is several times faster than a bidiagonal SVD at the sizes used here.
template <typename Scalar>
SvtResult<Scalar> svt_dense(const DenseMatrix<Scalar>& a, Scalar tau, SvtWorkspace<Scalar>* ws = nullptr) {
  SvtResult<Scalar> out;
  const Index n = a.cols();
  if (n == 0 || a.rows() == 0) {
    out.x = DenseMatrix<Scalar>::Zero(a.rows(), n);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(a.transpose() * a);
  const auto& ev = es.eigenvalues();  // ascending
  Index r = 0;
  while (r < n && ev[n - 1 - r] > tau * tau) ++r;
  out.rank = r;
  if (r == 0) {
    out.x = DenseMatrix<Scalar>::Zero(a.rows(), n);
    return out;
  }
  auto v = es.eigenvectors().rightCols(r);
  if (ws) {
    // seed the next partial call with the leading subspace when it is small enough to pay off
    Index keep = std::max<Index>(r + 6, 8);
    if (keep <= n / 4) ws->basis = es.eigenvectors().rightCols(keep).rowwise().reverse();
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sigma = ev.tail(r).cwiseSqrt();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> factor = (Scalar(1) - tau / sigma.array()).matrix();
  out.nuclear_norm = (sigma.array() - tau).sum();
  out.x = (a * v) * factor.asDiagonal() * v.transpose();
  return out;
}

template <typename Scalar>
DenseMatrix<Scalar> orthonormalize(const DenseMatrix<Scalar>& y) {
  Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(y);
  return qr.householderQ() * DenseMatrix<Scalar>::Identity(y.rows(), y.cols());
}

// Subspace iteration on A^T A from the workspace basis, then Rayleigh-Ritz.
// Returns false when the captured components are not accurate enough.
template <typename Scalar>
bool svt_partial(const DenseMatrix<Scalar>& a, Scalar tau, SvtWorkspace<Scalar>& ws, SvtResult<Scalar>& out) {
  const Index n = a.cols();
  Index k = std::max<Index>(ws.basis.cols(), 8);
  k = std::min(k, n);
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(n));
  std::normal_distribution<double> gauss;
  auto fill = [&](Index cols) {
    DenseMatrix<Scalar> q(n, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < n; ++i) q(i, j) = static_cast<Scalar>(gauss(rng));
    return q;
  };
  DenseMatrix<Scalar> q(n, k);
  Index have = ws.basis.rows() == n ? std::min(ws.basis.cols(), k) : 0;
  if (have > 0) q.leftCols(have) = ws.basis.leftCols(have);
  if (have < k) q.rightCols(k - have) = fill(k - have);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();

  for (int attempt = 0; attempt < 12; ++attempt) {
    q = orthonormalize<Scalar>(q);
    DenseMatrix<Scalar> z = a.transpose() * (a * q);
    q = orthonormalize<Scalar>(z);
    DenseMatrix<Scalar> b = a * q;
    Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Index r = 0;
    while (r < sv.size() && sv[r] > tau) ++r;
    DenseMatrix<Scalar> v = q * svd.matrixV();
    if (r + 3 > k) {
      // beyond a quarter of n the full decomposition is cheaper
      Index grown = std::min(n, 2 * k);
      if (grown > n / 4) return false;
      DenseMatrix<Scalar> next(n, grown);
      next.leftCols(k) = v;
      next.rightCols(grown - k) = fill(grown - k);
      q = next;
      k = grown;
      continue;
    }
    if (r == 0) {
      out.x = DenseMatrix<Scalar>::Zero(a.rows(), n);
      out.rank = 0;
      out.nuclear_norm = 0;
      ws.basis = v;
      return true;
    }
    const auto u = svd.matrixU().leftCols(r);
    Scalar resid = (a.transpose() * u - v.leftCols(r) * sv.head(r).asDiagonal()).norm();
    if (resid > Scalar(100) * eps * sv[0] * std::sqrt(static_cast<Scalar>(n))) {
      q = v;
      continue;
    }
    auto shrunk = (sv.head(r).array() - tau).matrix();
    out.nuclear_norm = shrunk.sum();
    out.x = u * shrunk.asDiagonal() * v.leftCols(r).transpose();
    out.rank = r;
    Index keep = std::min(n, std::max<Index>(r + 6, 8));
    ws.basis = v.leftCols(std::min(keep, k));
    return true;
  }
  return false;
}

}  // namespace detail

// Prox of tau * ||.||_*. With a workspace and a large enough input, uses a warm-started
// partial SVD that falls back to the full decomposition when it cannot certify accuracy.
template <typename Derived>
SvtResult<typename Derived::Scalar> singular_value_threshold(const Eigen::MatrixBase<Derived>& a,
                                                             typename Derived::Scalar tau,
                                                             SvtWorkspace<typename Derived::Scalar>* ws = nullptr) {
  using Scalar = typename Derived::Scalar;
  DenseMatrix<Scalar> m = a;
  if (ws && m.rows() == m.cols() && m.rows() >= ws->dense_below) {
    if (ws->cooldown > 0) {
      --ws->cooldown;
      ws->basis.resize(0, 0);
      return detail::svt_dense<Scalar>(m, tau, ws);
    }
    SvtResult<Scalar> out;
    ++ws->partial_calls;
    if (detail::svt_partial<Scalar>(m, tau, *ws, out)) return out;
    ++ws->dense_fallbacks;
    ws->basis.resize(0, 0);
    SvtResult<Scalar> full = detail::svt_dense<Scalar>(m, tau, ws);
    if (ws->basis.size() == 0) ws->cooldown = 10;
    return full;
  }
  return detail::svt_dense<Scalar>(m, tau);
}

// Largest per-row or per-column count of entries above tau_supp * max|m|.
template <typename Derived>
int deg_max(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar tau_supp = 1e-6) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return 0;
  Scalar top = m.cwiseAbs().maxCoeff();
  if (top == Scalar(0)) return 0;
  auto mask = (m.array().abs() > tau_supp * top).template cast<int>();
  return std::max(mask.rowwise().sum().maxCoeff(), mask.colwise().sum().maxCoeff());
}

// max_k ||U U^T e_k||_2 over the singular vectors above tau_rank * sigma_max.
template <typename Derived>
typename Derived::Scalar incoherence(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar tau_rank = 1e-9) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(m.eval(), Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == Scalar(0)) return Scalar(0);
  Index r = 0;
  while (r < sv.size() && sv[r] > tau_rank * sv[0]) ++r;
  // ||U U^T e_k|| = ||U^T e_k|| = norm of row k of U
  return svd.matrixU().leftCols(r).rowwise().norm().maxCoeff();
}

template <typename Scalar>
struct SufficientCondition {
  bool holds = false;
  int deg = 0;
  Scalar inc = 0;
  Scalar product = 0;
};

inline constexpr double kRecoveryBound = 1.0 / 12.0;

// deg_max(s) * inc(l) < 1/12.
template <typename DS, typename DL>
SufficientCondition<typename DS::Scalar> check_sufficient_condition(const Eigen::MatrixBase<DS>& s,
                                                                    const Eigen::MatrixBase<DL>& l,
                                                                    typename DS::Scalar tau_supp = 1e-6,
                                                                    typename DS::Scalar tau_rank = 1e-9) {
  using Scalar = typename DS::Scalar;
  SufficientCondition<Scalar> r;
  r.deg = deg_max(s, tau_supp);
  r.inc = incoherence(l, tau_rank);
  r.product = static_cast<Scalar>(r.deg) * r.inc;
  r.holds = r.product < static_cast<Scalar>(kRecoveryBound);
  return r;
}

struct SolverConfig {
  double rho = 0.0;  // initial penalty; 0 selects n^2 / (4 sum|C|)
  int max_iters = 20000;
  double primal_tol = 1e-9;  // relative to ||C||_F
  double dual_tol = 1e-9;    // relative to ||C||_F
  double rank_tol = 1e-9;    // singular-value cutoff relative to sigma_max for reported ranks
  bool balance_penalty = true;
  Index dense_svd_below = 64;
};

template <typename Scalar>
struct SplitResult {
  DenseMatrix<Scalar> s;
  DenseMatrix<Scalar> l;
  DenseMatrix<Scalar> y;  // multiplier, reused for warm starts
  Scalar mu = 0;
  bool converged = false;
  int iterations = 0;
  Scalar primal_residual = 0;  // ||C - S - L||_F
  Scalar dual_residual = 0;
  Scalar objective = 0;
  Scalar dual_objective = 0;
  Scalar duality_gap = 0;  // relative to max(1, objective)
  Index rank_l = 0;
};

namespace detail {

template <typename Scalar>
Scalar spectral_norm(const DenseMatrix<Scalar>& a) {
  if (a.size() == 0) return Scalar(0);
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(a);
  return svd.singularValues()(0);
}

template <typename Scalar>
void finish_split(const DenseMatrix<Scalar>& c, Scalar t, SplitResult<Scalar>& r) {
  r.primal_residual = (c - r.s - r.l).norm();
  Scalar nuc = r.l.size() ? Eigen::BDCSVD<DenseMatrix<Scalar>>(r.l).singularValues().sum() : Scalar(0);
  r.objective = t * r.s.cwiseAbs().sum() + (Scalar(1) - t) * nuc;
  // Scale the multiplier into the dual feasible set {||Y||_max <= t, ||Y||_2 <= 1 - t}.
  Scalar scale = 1;
  if (r.y.size()) {
    Scalar ym = r.y.cwiseAbs().maxCoeff();
    Scalar ys = spectral_norm<Scalar>(r.y);
    if (t > 0) scale = std::max(scale, ym / t);
    if (t < 1) scale = std::max(scale, ys / (Scalar(1) - t));
    r.dual_objective = (r.y.array() * c.array()).sum() / scale;
  }
  r.duality_gap = (r.objective - r.dual_objective) / std::max<Scalar>(Scalar(1), r.objective);
}

}  // namespace detail

// min t ||S||_1 + (1 - t) ||L||_*  s.t.  S + L = C, by ADMM on the two proximal maps.
// `warm` supplies a starting point (S, L, Y, mu) from a nearby t.
template <typename Scalar>
SplitResult<Scalar> solve_split(const SkewMatrix<Scalar>& c_in, Scalar t, const SolverConfig& cfg = {},
                                const SplitResult<Scalar>* warm = nullptr) {
  if (!(t >= 0 && t <= 1)) throw ValidationError("penalty t must lie in [0, 1]");
  const DenseMatrix<Scalar>& c = c_in.matrix();
  const Index n = c.rows();
  SplitResult<Scalar> r;
  const Scalar cnorm = c.norm();
  if (t <= 0 || t >= 1 || cnorm == Scalar(0)) {
    r.s = t >= 1 ? DenseMatrix<Scalar>::Zero(n, n) : c;
    r.l = t >= 1 ? c : DenseMatrix<Scalar>::Zero(n, n);
    r.y = DenseMatrix<Scalar>::Zero(n, n);
    r.converged = true;
    r.rank_l = t >= 1 && cnorm > 0 ? Eigen::BDCSVD<DenseMatrix<Scalar>>(c).rank() : 0;
    detail::finish_split<Scalar>(c, t, r);
    r.duality_gap = 0;
    return r;
  }

  Scalar mu = cfg.rho > 0 ? static_cast<Scalar>(cfg.rho)
                          : static_cast<Scalar>(n * n) / (Scalar(4) * c.cwiseAbs().sum());
  DenseMatrix<Scalar> s, l, y;
  if (warm && warm->s.rows() == n) {
    s = warm->s;
    l = warm->l;
    y = warm->y;
    if (warm->mu > 0) mu = warm->mu;
  } else {
    s = DenseMatrix<Scalar>::Zero(n, n);
    l = DenseMatrix<Scalar>::Zero(n, n);
    y = DenseMatrix<Scalar>::Zero(n, n);
  }
  SvtWorkspace<Scalar> ws;
  ws.dense_below = cfg.dense_svd_below;
  const Scalar ptol = static_cast<Scalar>(cfg.primal_tol) * cnorm;
  const Scalar dtol = static_cast<Scalar>(cfg.dual_tol) * cnorm;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    SvtResult<Scalar> sv = singular_value_threshold(c - s + y / mu, (Scalar(1) - t) / mu, &ws);
    l = (sv.x - sv.x.transpose()) / Scalar(2);
    DenseMatrix<Scalar> s_next = soft_threshold(c - l + y / mu, t / mu);
    s_next = (s_next - s_next.transpose()) / Scalar(2);
    DenseMatrix<Scalar> resid = c - s_next - l;
    y += mu * resid;
    Scalar rp = resid.norm();
    Scalar rd = mu * (s_next - s).norm();
    s.swap(s_next);
    r.iterations = it;
    r.primal_residual = rp;
    r.dual_residual = rd;
    r.rank_l = sv.rank;
    if (rp < ptol && rd < dtol) {
      r.converged = true;
      break;
    }
    if (cfg.balance_penalty) {
      if (rp > 10 * rd) mu *= 2;
      else if (rd > 10 * rp) mu /= 2;
    }
  }
  r.s = std::move(s);
  r.l = std::move(l);
  r.y = std::move(y);
  r.mu = mu;
  detail::finish_split<Scalar>(c, t, r);
  return r;
}

// One grid point of a penalty sweep.
struct SweepRecord {
  double t = 0;
  Matrix s;
  Matrix l;
  double diff = 0;
  std::optional<double> tol;
  int degmax_s = 0;
  double inc_l = 0;
  Index rank_l = 0;
  double primal_residual = 0;
  int iterations = 0;
  bool converged = false;
  std::string error;
};

struct SweepResult {
  double eps = 0;
  double c_norm = 0;
  std::vector<SweepRecord> records;  // t = eps, 2 eps, ..., 1
};

struct SweepOptions {
  SolverConfig solver;
  double tau_supp = 1e-6;  // support threshold for degmax_S
  int threads = 1;
  // Grid points per warm-started block; blocks are independent, so results do not
  // depend on the thread count.
  int block = 10;
};

SweepResult sweep(const SkewSymmetricMatrix& c, double eps, const SweepOptions& opts = {},
                  const std::optional<std::pair<Matrix, Matrix>>& truth = std::nullopt);

// tol_t = ||S - S~||/||S~|| + ||L - L~||/||L~|| (a zero reference contributes its absolute error).
double recovery_error(const Matrix& s, const Matrix& l, const Matrix& s_true, const Matrix& l_true);

struct TInterval {
  double lo = 0;
  double hi = 0;
  Index first = 0;  // record indices covered by the zero run
  Index last = 0;
};

struct RegionSelection {
  std::vector<TInterval> regions;
  TInterval middle;
  Index t0_index = -1;
  double t0 = 0;
  SufficientCondition<double> condition;
  // True when more than three regions were found and the preference rule was applied.
  bool ambiguous = false;
  std::string note;
};

// Maximal runs of records with diff_t < tau_zero * ||C||_F.
std::vector<TInterval> zero_regions(const SweepResult& sr, double tau_zero = 1e-3);

class RegionError : public NumericalError {
 public:
  RegionError(const std::string& what, std::vector<TInterval> regions)
      : NumericalError(what), regions_(std::move(regions)) {}
  const std::vector<TInterval>& regions() const { return regions_; }

 private:
  std::vector<TInterval> regions_;
};

// Picks the middle zero region and its midpoint t0. Throws RegionError with fewer than three regions.
RegionSelection select_middle_region(const SweepResult& sr, double tau_zero = 1e-3, double tau_supp = 1e-6);

}  // namespace corrnet
