#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corrnet/decomp.hpp"
#include "corrnet/graph.hpp"

namespace corrnet {

// Edge (i,j), i<j, iff |s_ij| > tau_edge * max|s| and |s_ij| > zero_floor.
Topology topology_from_sparse(const Matrix& s, double tau_edge, double zero_floor = 0.0);

// Im part below this fraction of max|phi_inv| counts as identically zero.
inline constexpr double kVanishingImag = 1e-12;

// Edge iff |Im phi_inv_ij| > tau_edge * max |Im phi_inv|.
Topology direct_threshold_topology(const CMatrix& phi_inv, double tau_edge);

struct EdgeMetrics {
  Index true_positives = 0;
  Index false_positives = 0;
  Index false_negatives = 0;
  double total_error_fraction = 0;  // (FP + FN) / |truth|
};

EdgeMetrics evaluate_edges(const Topology& estimate, const Topology& truth);

struct DirectBaseline {
  Topology topology;
  double tau_edge = 0;
  EdgeMetrics metrics;
};

// Direct thresholding with the relative threshold that minimizes total error against truth.
DirectBaseline direct_threshold_best(const CMatrix& phi_inv, const Topology& truth);

struct LowRankGraph {
  CorrelationGraph graph;
  std::vector<std::vector<Index>> groups;
  Index rank = 0;
  bool best_effort = false;  // set when the grouping is not a clean partition
  std::string note;
};

// Heuristic: groups nodes whose rows of the projector U U^T (truncated SVD of l) have
// overlapping supports (Jaccard >= 0.5); each group becomes a clique.
LowRankGraph correlation_graph_from_lowrank(const Matrix& l, double tau_rank = 1e-6, double tau_supp = 1e-6,
                                            double jaccard = 0.5);

struct PipelineConfig {
  double eps = 0.01;
  SweepOptions sweep;
  double tau_zero = 1e-3;
  double tau_edge = 1e-6;  // 0.05 for estimated inputs
  double tau_rank = 1e-6;
  double tau_supp = 1e-6;
};

struct GroundTruth {
  Topology topology;
  std::optional<CorrelationGraph> correlation;
  std::optional<std::pair<Matrix, Matrix>> split;  // (Im S~, Im L~)
};

struct ReconstructionReport {
  double omega = 0;
  double eps = 0;
  double tau_edge = 0;
  double tau_zero = 0;
  double tau_rank = 0;
  double tau_supp = 0;
  SweepResult sweep;
  std::vector<TInterval> regions;
  std::optional<RegionSelection> selection;
  std::string error;  // region-selection failure; other fields are partial

  Topology topology;
  std::optional<LowRankGraph> correlation;
  std::optional<EdgeMetrics> metrics;
  std::optional<EdgeMetrics> correlation_metrics;
  std::optional<DirectBaseline> direct;

  bool ok() const { return error.empty(); }
};

// IPSDM -> C = Im part -> sweep -> middle region -> supports of S and L at t0.
ReconstructionReport end_to_end(const CMatrix& phi_inv, double omega, const PipelineConfig& cfg = {},
                                const std::optional<GroundTruth>& truth = std::nullopt);

}  // namespace corrnet
