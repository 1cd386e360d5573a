#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "corrnet/latent.hpp"
#include "corrnet/reconstruct.hpp"

namespace corrnet {

enum class CorrelationKind { Affine, Polynomial };

struct GeneratorConfig {
  Index n = 29;
  Index edges = 16;
  Index q = 3;            // affine: number of disjoint cliques
  Index clique_size = 9;  // affine clique size; polynomial: children of the active cluster
  CorrelationKind kind = CorrelationKind::Affine;
  // Latent nodes at least four hops apart: disjoint cliques whose members have no parents
  // (edges may leave a clique, never enter one).
  bool assumption5 = false;

  double gain_lo = 0.1;
  double gain_hi = 0.9;
  double row_sum = 0.9;
  double var_lo = 1.0;
  double var_hi = 1.0;
  LatentGainOptions latent;

  // Polynomial noise: lift degree and the active monomials (0-based basis indices).
  int poly_m = 2;
  int poly_p = 3;
  double poly_sigma = 1.0;
  std::vector<Index> poly_active = {1, 6, 8};

  // Recoverability gate: analytic sweeps at these frequencies must show three zero
  // regions with the exact topology at t0. Empty disables the gate.
  std::vector<double> validate_omegas = {3.0 * kPi / 8.0};
  double validate_eps = 0.02;
  int max_attempts = 64;
  std::uint64_t seed = 0;
};

struct GeneratedModel {
  Ldim model;
  LatentExpansion expansion;
  DirectedGraph graph;
  Topology topology;
  CorrelationGraph correlation;
  std::uint64_t seed = 0;          // requested seed
  std::uint64_t attempt_seed = 0;  // seed of the accepted draw
  int attempts = 0;
  // deg_max(Im S) * inc(Im L) of the analytic split at the first validation frequency.
  double sufficient_product = 0;
  std::vector<double> t0;  // chosen t0 per validation frequency (empty without latent nodes)
};

// One unvalidated random draw.
GeneratedModel draw_model(const GeneratorConfig& cfg, std::uint64_t draw_seed);

// Retries draws until the recoverability gate passes; throws ValidationError after max_attempts.
GeneratedModel generate_benchmark(const GeneratorConfig& cfg);

// C = Im S + Im L of the analytic split and the (Im S, Im L) truth.
struct AnalyticInput {
  CMatrix phi_inv;
  Matrix s;
  Matrix l;
};

AnalyticInput analytic_input(const LatentExpansion& exp, double omega);

// Synthetic skew pair for decomposition tests: S on a random perfect matching (deg_max 1,
// magnitudes in [0.5, 1], random signs) and L = sigma (u v^T - v u^T) with u, v orthonormal
// and every entry +-1/sqrt(n), so inc(L) = sqrt(2/n). n must be even.
struct PlantedSplit {
  Matrix s;
  Matrix l;
};

PlantedSplit planted_split(Index n, std::uint64_t seed, double sigma);

}  // namespace corrnet
