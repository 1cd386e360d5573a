#include "corrnet/poly_lift.hpp"

#include <cmath>
#include <map>

namespace corrnet {

std::size_t monomial_count(int m, int p) {
  if (m < 1 || p < 0) throw ValidationError("monomial basis needs m >= 1 and p >= 0");
  // C(m+k-1, k) built incrementally: C(m+k-1,k) = C(m+k-2,k-1) * (m+k-1)/k
  long double term = 1.0L;
  long double total = 1.0L;
  for (int k = 1; k <= p; ++k) {
    term = term * static_cast<long double>(m + k - 1) / static_cast<long double>(k);
    total += term;
    if (total > static_cast<long double>(kMaxMonomials)) return kMaxMonomials + 1;
  }
  return static_cast<std::size_t>(std::llround(static_cast<double>(total)));
}

namespace {

// Exponent vectors of total degree k, leading exponent descending.
void degree_block(int m, int k, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos == m - 1) {
    cur[pos] = k;
    out.push_back(cur);
    return;
  }
  for (int e = k; e >= 0; --e) {
    cur[pos] = e;
    degree_block(m, k - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

MonomialBasis enumerate_monomials(int m, int p) {
  std::size_t count = monomial_count(m, p);
  if (count > kMaxMonomials) throw ValidationError("monomial basis larger than 10^6 entries");
  MonomialBasis b{m, p, {}};
  b.entries.reserve(count);
  MultiIndex cur(m, 0);
  for (int k = 0; k <= p; ++k) degree_block(m, k, 0, cur, b.entries);
  return b;
}

double gaussian_moment(int p, double sigma) {
  if (p < 0) throw ValidationError("negative moment order");
  if (p % 2 == 1) return 0.0;
  double dfact = 1.0;
  for (int k = p - 1; k > 1; k -= 2) dfact *= k;
  return std::pow(sigma, p) * dfact;
}

double monomial_second_moment(const MultiIndex& alpha, const MultiIndex& beta, double sigma) {
  if (alpha.size() != beta.size()) throw ValidationError("multi-index length mismatch");
  double r = 1.0;
  for (size_t i = 0; i < alpha.size(); ++i) {
    if ((alpha[i] + beta[i]) % 2 == 1) return 0.0;
    r *= gaussian_moment(alpha[i] + beta[i], sigma);
  }
  return r;
}

double monomial_mean(const MultiIndex& alpha, double sigma) {
  return monomial_second_moment(alpha, MultiIndex(alpha.size(), 0), sigma);
}

ParityClass parity_class(const MultiIndex& alpha) {
  ParityClass c(alpha.size());
  for (size_t i = 0; i < alpha.size(); ++i) c[i] = alpha[i] % 2 == 0 ? 1 : 0;
  return c;
}

ParityClustering parity_permutation(const MonomialBasis& basis) {
  ParityClustering out;
  out.labels.resize(basis.entries.size());
  std::map<ParityClass, int> ids;
  for (size_t k = 0; k < basis.entries.size(); ++k) {
    ParityClass c = parity_class(basis.entries[k]);
    auto [it, fresh] = ids.try_emplace(c, static_cast<int>(out.clusters.size()));
    if (fresh) {
      out.clusters.emplace_back();
      out.patterns.push_back(c);
    }
    out.labels[k] = it->second;
    out.clusters[it->second].push_back(static_cast<Index>(k));
  }
  for (const auto& cl : out.clusters) out.permutation.insert(out.permutation.end(), cl.begin(), cl.end());
  return out;
}

Matrix lifted_moment_matrix(int m, int p, double sigma) {
  MonomialBasis b = enumerate_monomials(m, p);
  std::vector<ParityClass> cls(b.entries.size());
  for (size_t k = 0; k < cls.size(); ++k) cls[k] = parity_class(b.entries[k]);
  Matrix r = Matrix::Zero(b.size(), b.size());
  for (Index i = 0; i < b.size(); ++i)
    for (Index j = i; j < b.size(); ++j) {
      if (cls[i] != cls[j]) continue;  // exact zero by parity
      r(i, j) = r(j, i) = monomial_second_moment(b.entries[i], b.entries[j], sigma);
    }
  return r;
}

Matrix permute_symmetric(const Matrix& a, const std::vector<Index>& perm) {
  Matrix r(perm.size(), perm.size());
  for (size_t i = 0; i < perm.size(); ++i)
    for (size_t j = 0; j < perm.size(); ++j) r(i, j) = a(perm[i], perm[j]);
  return r;
}

Matrix lift_series(const Matrix& v, const MonomialBasis& basis) {
  if (v.rows() != basis.m) throw ValidationError("series row count differs from basis m");
  Matrix y(basis.size(), v.cols());
  for (Index k = 0; k < basis.size(); ++k) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Ones(v.cols());
    const MultiIndex& a = basis.entries[k];
    for (int i = 0; i < basis.m; ++i)
      for (int e = 0; e < a[i]; ++e) row.array() *= v.row(i).array();
    y.row(k) = row;
  }
  return y;
}

std::vector<Index> PolyCorrelationSpec::active_set() const {
  std::vector<Index> act;
  for (Index k = 0; k < gains.cols(); ++k) {
    bool any = false;
    for (Index i = 0; i < gains.rows() && !any; ++i) any = !gains.is_zero_entry(i, k);
    if (any) act.push_back(k);
  }
  return act;
}

void PolyCorrelationSpec::validate(Index n) const {
  if (!(sigma > 0.0)) throw ValidationError("polynomial noise needs sigma > 0");
  Index mcount = static_cast<Index>(monomial_count(m, p));
  if (gains.rows() != n || gains.cols() != mcount)
    throw ValidationError("polynomial gain matrix must be n x M");
  for (Index i = 0; i < n; ++i)
    if (!gains.is_zero_entry(i, 0)) throw ValidationError("constant monomial must carry no gain");
}

Matrix centered_covariance(const PolyCorrelationSpec& spec, const std::vector<Index>& idx) {
  MonomialBasis b = spec.basis();
  Matrix c(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j) {
      const MultiIndex& a = b.entries[idx[i]];
      const MultiIndex& bb = b.entries[idx[j]];
      c(i, j) = monomial_second_moment(a, bb, spec.sigma) - monomial_mean(a, spec.sigma) * monomial_mean(bb, spec.sigma);
    }
  return c;
}

std::vector<std::vector<Index>> active_clusters(const PolyCorrelationSpec& spec) {
  ParityClustering pc = parity_permutation(spec.basis());
  std::vector<std::vector<Index>> out(pc.clusters.size());
  for (Index k : spec.active_set()) out[pc.labels[k]].push_back(k);
  std::erase_if(out, [](const auto& g) { return g.empty(); });
  return out;
}

}  // namespace corrnet
