#pragma once

#include <cstddef>
#include <vector>

#include "corrnet/transfer.hpp"
#include "corrnet/types.hpp"

namespace corrnet {

// Exponent vector alpha of the monomial v^alpha.
using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& a) {
  int d = 0;
  for (int x : a) d += x;
  return d;
}

// All monomials of total degree <= p in m variables, degree-major and lexicographic
// (larger leading exponent first) within each degree. entries[0] is the constant.
struct MonomialBasis {
  int m = 0;
  int p = 0;
  std::vector<MultiIndex> entries;

  Index size() const { return static_cast<Index>(entries.size()); }
};

inline constexpr std::size_t kMaxMonomials = 1000000;

// sum_{k<=p} C(m+k-1, k), saturating at kMaxMonomials + 1.
std::size_t monomial_count(int m, int p);
MonomialBasis enumerate_monomials(int m, int p);

// E[v^p] for v ~ N(0, sigma^2).
double gaussian_moment(int p, double sigma);
// E[v^alpha v^beta] for v ~ N(0, sigma^2 I).
double monomial_second_moment(const MultiIndex& alpha, const MultiIndex& beta, double sigma);
// E[v^alpha].
double monomial_mean(const MultiIndex& alpha, double sigma);

// Entry i is 0 when alpha_i is odd and 1 when it is even.
using ParityClass = std::vector<int>;
ParityClass parity_class(const MultiIndex& alpha);

struct ParityClustering {
  // Basis indices in permuted order.
  std::vector<Index> permutation;
  // Cluster id of each basis index.
  std::vector<int> labels;
  // Basis indices per cluster, clusters in order of first appearance.
  std::vector<std::vector<Index>> clusters;
  std::vector<ParityClass> patterns;
};

ParityClustering parity_permutation(const MonomialBasis& basis);

// E[y y^T] for y = M(v, p), basis order. Entries across parity classes are literal zeros.
Matrix lifted_moment_matrix(int m, int p, double sigma);

// P^T A P for the permutation listing new positions' source indices.
Matrix permute_symmetric(const Matrix& a, const std::vector<Index>& perm);

// Row k at time t is prod_i v_i(t)^alpha_{k,i}.
Matrix lift_series(const Matrix& v, const MonomialBasis& basis);

// Polynomially correlated noise: e = e_o + F_poly (M(v,p) - E M(v,p)), v ~ N(0, sigma^2 I_m) IID.
struct PolyCorrelationSpec {
  int m = 1;
  int p = 1;
  double sigma = 1.0;
  TransferMatrix gains;  // n x M

  MonomialBasis basis() const { return enumerate_monomials(m, p); }
  // Monomial indices with any nonzero gain.
  std::vector<Index> active_set() const;
  void validate(Index n) const;
};

// Covariance of the centered lifted monomials restricted to the given indices.
Matrix centered_covariance(const PolyCorrelationSpec& spec, const std::vector<Index>& indices);

// Active monomial indices grouped by parity cluster (empty groups dropped).
std::vector<std::vector<Index>> active_clusters(const PolyCorrelationSpec& spec);

}  // namespace corrnet
