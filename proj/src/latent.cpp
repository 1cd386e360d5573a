#include "corrnet/latent.hpp"

#include <random>

#include <Eigen/Eigenvalues>

namespace corrnet {

TransferMatrix LatentExpansion::augmented_h() const {
  const Index n = this->n(), l = latent_count();
  TransferMatrix a(n + l, n + l);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j)
      if (!h.is_zero_entry(i, j)) a.set(i, j, h.entry(i, j));
    for (Index j = 0; j < l; ++j)
      if (!f.is_zero_entry(i, j)) a.set(i, n + j, f.entry(i, j));
  }
  return a;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> LatentExpansion::support() const {
  return augmented_h().support();
}

namespace {

std::vector<std::vector<Index>> column_supports(const TransferMatrix& f) {
  std::vector<std::vector<Index>> ch(f.cols());
  for (Index j = 0; j < f.cols(); ++j)
    for (Index i = 0; i < f.rows(); ++i)
      if (!f.is_zero_entry(i, j)) ch[j].push_back(i);
  return ch;
}

}  // namespace

LatentExpansion build_lq_expansion(const TransferMatrix& h, const Vector& base_variances,
                                   const CorrelationGraph& gc, std::uint64_t seed, const LatentGainOptions& opts) {
  if (gc.n() != h.rows()) throw ValidationError("correlation graph size differs from n");
  if (opts.max_delay < 1 || !(opts.min_magnitude > 0.0) || opts.max_magnitude < opts.min_magnitude)
    throw ValidationError("invalid latent gain options");
  MaximalCliqueSet mc = maximal_cliques(gc);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(opts.min_magnitude, opts.max_magnitude);
  std::uniform_int_distribution<int> delay(1, opts.max_delay);
  std::bernoulli_distribution flip(0.5);

  LatentExpansion e;
  e.h = h;
  e.base_variances = base_variances;
  e.f = TransferMatrix(h.rows(), mc.q());
  e.latent_covariance = Matrix::Identity(mc.q(), mc.q()) * opts.latent_variance;
  e.latent_children = mc.cliques;
  for (Index l = 0; l < mc.q(); ++l)
    for (Index i : mc.cliques[l]) {
      double g = mag(rng);
      if (flip(rng)) g = -g;
      e.f.set(i, l, TransferFunction::delay(g, delay(rng)));
    }
  return e;
}

LatentExpansion build_lq_expansion(const Ldim& model, const CorrelationGraph& gc, std::uint64_t seed,
                                   const LatentGainOptions& opts) {
  return build_lq_expansion(model.h(), model.noise().base_variances, gc, seed, opts);
}

LatentExpansion expansion_of(const Ldim& model) {
  LatentFactor lf = latent_factor(model.noise(), model.n());
  LatentExpansion e;
  e.h = model.h();
  e.base_variances = model.noise().base_variances;
  e.f = lf.gains;
  e.latent_covariance = lf.covariance;
  e.latent_children = column_supports(lf.gains);
  return e;
}

Ldim correlated_model(const LatentExpansion& exp) {
  const Matrix& c = exp.latent_covariance;
  if (!c.isDiagonal(0.0) && c.size() > 0) throw ValidationError("correlated_model needs a diagonal latent covariance");
  NoiseSpec ns;
  ns.base_variances = exp.base_variances;
  if (exp.latent_count() > 0) ns.correlation = AffineCorrelationSpec{exp.f, c.diagonal()};
  return Ldim(exp.h, ns);
}

CMatrix noise_psd_of_expansion(const LatentExpansion& exp, double omega) {
  CMatrix phi = exp.base_variances.cast<cdouble>().asDiagonal();
  if (exp.latent_count() > 0) {
    CMatrix f = eval_transfer_matrix(exp.f, omega);
    phi += f * exp.latent_covariance.cast<cdouble>() * f.adjoint();
  }
  return phi;
}

CMatrix observed_psd(const LatentExpansion& exp, double omega) {
  const Index n = exp.n(), l = exp.latent_count();
  CMatrix d = CMatrix::Zero(n + l, n + l);
  d.topLeftCorner(n, n) = exp.base_variances.cast<cdouble>().asDiagonal();
  d.bottomRightCorner(l, l) = exp.latent_covariance.cast<cdouble>();
  return analytic_psd(exp.augmented_h(), d, omega).topLeftCorner(n, n);
}

CorrelationGraph correlation_graph_from_psd(const std::vector<CMatrix>& samples, double tau_supp) {
  if (samples.empty()) return CorrelationGraph(0);
  const Index n = samples.front().rows();
  Matrix peak = Matrix::Zero(n, n);
  for (const CMatrix& s : samples) {
    if (s.rows() != n || s.cols() != n) throw ValidationError("spectral samples differ in size");
    peak = peak.cwiseMax(s.cwiseAbs());
  }
  double top = peak.maxCoeff();
  CorrelationGraph g(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (peak(i, j) > tau_supp * top) g.add_edge(i, j);
  return g;
}

CorrelationGraph correlation_graph_of(const LatentExpansion& exp) {
  return union_of_cliques(exp.n(), column_supports(exp.f));
}

EquivalenceResult check_equivalence(const Ldim& a, const Ldim& b, const std::vector<double>& grid, double tol) {
  if (a.n() != b.n()) return {false, std::numeric_limits<double>::infinity()};
  double dev = 0.0;
  for (double w : grid) dev = std::max(dev, (analytic_psd(a, w) - analytic_psd(b, w)).norm());
  return {dev <= tol, dev};
}

EquivalenceResult check_equivalence(const Ldim& a, const LatentExpansion& b, const std::vector<double>& grid,
                                    double tol) {
  if (a.n() != b.n()) return {false, std::numeric_limits<double>::infinity()};
  double dev = 0.0;
  for (double w : grid) dev = std::max(dev, (analytic_psd(a, w) - observed_psd(b, w)).norm());
  return {dev <= tol, dev};
}

SlSplit analytic_sl_split(const LatentExpansion& exp, double omega) {
  const Index n = exp.n();
  CMatrix a = CMatrix::Identity(n, n) - eval_transfer_matrix(exp.h, omega);
  CVector dinv = exp.base_variances.cwiseInverse().cast<cdouble>();
  SlSplit out;
  out.s = a.adjoint() * dinv.asDiagonal() * a;
  out.s = (out.s + out.s.adjoint()) / 2.0;
  if (exp.latent_count() == 0) {
    out.l = CMatrix::Zero(n, n);
    return out;
  }
  CMatrix f = eval_transfer_matrix(exp.f, omega);
  CMatrix psi = f.adjoint() * dinv.asDiagonal() * a;
  CMatrix sigma = exp.latent_covariance.cast<cdouble>();
  CMatrix lambda = f.adjoint() * dinv.asDiagonal() * f + sigma.llt().solve(CMatrix::Identity(sigma.rows(), sigma.cols()));
  if (!(hermitian_condition(lambda) < kDefaultCondLimit))
    throw NumericalError("latent Gram matrix is singular at omega=" + std::to_string(omega));
  out.l = -psi.adjoint() * lambda.llt().solve(psi);
  out.l = (out.l + out.l.adjoint()) / 2.0;
  return out;
}

StructureReport verify_structure(const LatentExpansion& exp, const CorrelationGraph& gc, std::uint64_t alt_seed) {
  StructureReport r;
  const Index n = exp.n();
  auto ch = column_supports(exp.f);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> shared =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  for (const auto& c : ch)
    for (Index a : c)
      for (Index b : c) shared(a, b) = true;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (gc.has_edge(i, j) != shared(i, j)) {
        r.parent_iff_edge = false;
        r.violations.push_back("pair (" + std::to_string(i) + "," + std::to_string(j) + ") " +
                               (gc.has_edge(i, j) ? "correlated without a common latent parent"
                                                  : "shares a latent parent but is uncorrelated"));
      }
  Index q = maximal_cliques(gc).q();
  if (exp.latent_count() < q) {
    r.count_at_least_q = false;
    r.violations.push_back("latent count " + std::to_string(exp.latent_count()) + " below q=" + std::to_string(q));
  }
  LatentExpansion other = build_lq_expansion(exp.h, exp.base_variances, gc, alt_seed);
  if (other.latent_count() != exp.latent_count() || other.support() != exp.support()) {
    r.seed_invariant = false;
    r.violations.push_back("expansion support differs from a re-seeded expansion of the same graph");
  }
  return r;
}

LatentExpansion remove_latent(const LatentExpansion& exp, Index l) {
  if (l < 0 || l >= exp.latent_count()) throw ValidationError("latent index out of range");
  LatentExpansion r = exp;
  const Index L = exp.latent_count();
  r.f = TransferMatrix(exp.n(), L - 1);
  std::vector<Index> keep;
  for (Index j = 0; j < L; ++j)
    if (j != l) keep.push_back(j);
  for (size_t c = 0; c < keep.size(); ++c)
    for (Index i = 0; i < exp.n(); ++i)
      if (!exp.f.is_zero_entry(i, keep[c])) r.f.set(i, static_cast<Index>(c), exp.f.entry(i, keep[c]));
  Eigen::VectorXi idx(keep.size());
  for (size_t c = 0; c < keep.size(); ++c) idx[c] = static_cast<int>(keep[c]);
  r.latent_covariance = exp.latent_covariance(idx, idx);
  r.latent_children.erase(r.latent_children.begin() + l);
  return r;
}

}  // namespace corrnet
