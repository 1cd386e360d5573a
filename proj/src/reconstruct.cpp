#include "corrnet/reconstruct.hpp"

#include <algorithm>
#include <numeric>

namespace corrnet {

Topology topology_from_sparse(const Matrix& s, double tau_edge, double zero_floor) {
  Topology t(s.rows());
  if (s.size() == 0) return t;
  const double top = s.cwiseAbs().maxCoeff();
  if (top <= zero_floor) return t;
  const double cut = std::max(tau_edge * top, zero_floor);
  for (Index i = 0; i < s.rows(); ++i)
    for (Index j = i + 1; j < s.cols(); ++j)
      if (std::max(std::abs(s(i, j)), std::abs(s(j, i))) > cut) t.add_edge(i, j);
  return t;
}

Topology direct_threshold_topology(const CMatrix& phi_inv, double tau_edge) {
  return topology_from_sparse(phi_inv.imag(), tau_edge);
}

EdgeMetrics evaluate_edges(const Topology& estimate, const Topology& truth) {
  if (estimate.n() != truth.n()) throw ValidationError("graphs differ in node count");
  EdgeMetrics m;
  for (const Edge& e : estimate.edges()) (truth.edges().count(e) ? m.true_positives : m.false_positives)++;
  m.false_negatives = truth.edge_count() - m.true_positives;
  const double denom = truth.edge_count() > 0 ? static_cast<double>(truth.edge_count()) : 1.0;
  m.total_error_fraction = static_cast<double>(m.false_positives + m.false_negatives) / denom;
  return m;
}

DirectBaseline direct_threshold_best(const CMatrix& phi_inv, const Topology& truth) {
  Matrix c = phi_inv.imag();
  const double top = c.size() ? c.cwiseAbs().maxCoeff() : 0.0;
  // candidate cut points: each distinct off-diagonal magnitude, plus "keep everything"
  std::vector<double> levels{0.0};
  for (Index i = 0; i < c.rows(); ++i)
    for (Index j = i + 1; j < c.cols(); ++j) levels.push_back(std::abs(c(i, j)));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  DirectBaseline best;
  bool have = false;
  for (double lv : levels) {
    double tau = top > 0 ? lv / top : 0.0;
    Topology t = topology_from_sparse(c, tau);
    EdgeMetrics m = evaluate_edges(t, truth);
    if (!have || m.false_positives + m.false_negatives < best.metrics.false_positives + best.metrics.false_negatives) {
      best = {t, tau, m};
      have = true;
    }
  }
  return best;
}

LowRankGraph correlation_graph_from_lowrank(const Matrix& l, double tau_rank, double tau_supp, double jaccard) {
  const Index n = l.rows();
  LowRankGraph out;
  out.graph = CorrelationGraph(n);
  if (n == 0 || l.cwiseAbs().maxCoeff() == 0.0) return out;
  Eigen::BDCSVD<Matrix> svd(l, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  Index r = 0;
  while (r < sv.size() && sv[r] > tau_rank * sv[0]) ++r;
  out.rank = r;
  Matrix u = svd.matrixU().leftCols(r);
  Matrix p = u * u.transpose();
  const double bar = tau_supp * p.cwiseAbs().maxCoeff();

  std::vector<std::vector<Index>> rows(n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if (std::abs(p(i, j)) > bar) rows[i].push_back(j);
  auto jac = [&](Index a, Index b) {
    std::vector<Index> both;
    std::set_intersection(rows[a].begin(), rows[a].end(), rows[b].begin(), rows[b].end(), std::back_inserter(both));
    size_t uni = rows[a].size() + rows[b].size() - both.size();
    return uni ? static_cast<double>(both.size()) / static_cast<double>(uni) : 0.0;
  };

  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Index a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(p(i, j)) > bar && jac(i, j) >= jaccard) parent[find(i)] = find(j);

  std::vector<std::vector<Index>> comp(n);
  for (Index i = 0; i < n; ++i)
    if (!rows[i].empty()) comp[find(i)].push_back(i);
  Index singles = 0;
  for (auto& c : comp) {
    if (c.size() >= 2) out.groups.push_back(c);
    else if (c.size() == 1) ++singles;
  }
  std::sort(out.groups.begin(), out.groups.end());
  out.graph = union_of_cliques(n, out.groups);

  std::vector<int> label(n, -1);
  for (size_t g = 0; g < out.groups.size(); ++g)
    for (Index i : out.groups[g]) label[i] = static_cast<int>(g);
  bool leak = false;
  for (Index i = 0; i < n && !leak; ++i)
    for (Index j : rows[i])
      if (label[i] != label[j]) leak = true;
  std::vector<std::string> notes;
  if (leak) notes.push_back("projector support crosses group boundaries");
  if (singles > 0) notes.push_back(std::to_string(singles) + " node(s) in the low-rank support without a group");
  if (r != 2 * static_cast<Index>(out.groups.size()))
    notes.push_back("rank " + std::to_string(r) + " differs from two per group");
  out.best_effort = !notes.empty();
  for (size_t k = 0; k < notes.size(); ++k) out.note += (k ? "; " : "") + notes[k];
  return out;
}

ReconstructionReport end_to_end(const CMatrix& phi_inv, double omega, const PipelineConfig& cfg,
                                const std::optional<GroundTruth>& truth) {
  ReconstructionReport rep;
  rep.omega = omega;
  rep.eps = cfg.eps;
  rep.tau_edge = cfg.tau_edge;
  rep.tau_zero = cfg.tau_zero;
  rep.tau_rank = cfg.tau_rank;
  rep.tau_supp = cfg.tau_supp;
  rep.topology = Topology(phi_inv.rows());

  const double scale = phi_inv.size() ? phi_inv.cwiseAbs().maxCoeff() : 0.0;
  if (phi_inv.size() == 0 || phi_inv.imag().cwiseAbs().maxCoeff() <= kVanishingImag * scale) {
    rep.error = "imaginary part of the inverse PSD vanishes at this frequency; no phase information to decompose";
    return rep;
  }
  SkewSymmetricMatrix c(Matrix(phi_inv.imag()));
  std::optional<std::pair<Matrix, Matrix>> split;
  if (truth) split = truth->split;
  rep.sweep = sweep(c, cfg.eps, cfg.sweep, split);
  rep.regions = zero_regions(rep.sweep, cfg.tau_zero);
  if (truth) rep.direct = direct_threshold_best(phi_inv, truth->topology);

  try {
    rep.selection = select_middle_region(rep.sweep, cfg.tau_zero, cfg.sweep.tau_supp);
  } catch (const RegionError& e) {
    rep.error = e.what();
    return rep;
  }
  const SweepRecord& rec = rep.sweep.records[rep.selection->t0_index];
  rep.topology = topology_from_sparse(rec.s, cfg.tau_edge);
  rep.correlation = correlation_graph_from_lowrank(rec.l, cfg.tau_rank, cfg.tau_supp);
  if (truth) {
    rep.metrics = evaluate_edges(rep.topology, truth->topology);
    if (truth->correlation) rep.correlation_metrics = evaluate_edges(rep.correlation->graph, *truth->correlation);
  }
  return rep;
}

}  // namespace corrnet
