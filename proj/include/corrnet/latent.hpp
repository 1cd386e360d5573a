#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corrnet/cliques.hpp"
#include "corrnet/netmodel.hpp"

namespace corrnet {

// Augmented model with uncorrelated e_o and strict-parent latent nodes:
// e = e_o + F e_h, Phi_e = diag(base) + F Sigma_h F^*.
struct LatentExpansion {
  TransferMatrix h;           // n x n
  TransferMatrix f;           // n x L
  Vector base_variances;      // spectra of e_o
  Matrix latent_covariance;   // L x L; diagonal for L_q expansions
  std::vector<std::vector<Index>> latent_children;

  Index n() const { return h.rows(); }
  Index latent_count() const { return f.cols(); }
  // [[H, F], [0, 0]] over the n + L augmented nodes.
  TransferMatrix augmented_h() const;
  // Support of augmented_h().
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support() const;
};

struct LatentGainOptions {
  double min_magnitude = 0.3;
  double max_magnitude = 1.0;
  // Each latent-to-child gain is f z^-d with d uniform in 1..max_delay.
  int max_delay = 4;
  double latent_variance = 1.0;
};

// One latent node per maximal clique of gc, with seeded single-delay gains to the clique's members.
LatentExpansion build_lq_expansion(const TransferMatrix& h, const Vector& base_variances,
                                   const CorrelationGraph& gc, std::uint64_t seed,
                                   const LatentGainOptions& opts = {});
LatentExpansion build_lq_expansion(const Ldim& model, const CorrelationGraph& gc, std::uint64_t seed,
                                   const LatentGainOptions& opts = {});

// The expansion carried by a model's own noise spec (affine latents or lifted monomials).
LatentExpansion expansion_of(const Ldim& model);

// Equivalent model with correlated noise (requires diagonal latent covariance).
Ldim correlated_model(const LatentExpansion& exp);

CMatrix noise_psd_of_expansion(const LatentExpansion& exp, double omega);
// Observed block of the augmented model's PSD.
CMatrix observed_psd(const LatentExpansion& exp, double omega);

inline constexpr double kDefaultSupportTol = 1e-6;

// Edge (i,j) iff max_w |Phi_ij(w)| > tau_supp * max over all entries and w.
CorrelationGraph correlation_graph_from_psd(const std::vector<CMatrix>& samples, double tau_supp = kDefaultSupportTol);

// Correlation graph implied by the one-latent-per-group structure of an expansion.
CorrelationGraph correlation_graph_of(const LatentExpansion& exp);

struct EquivalenceResult {
  bool equivalent = false;
  double max_deviation = 0.0;
};

EquivalenceResult check_equivalence(const Ldim& a, const Ldim& b, const std::vector<double>& grid, double tol);
EquivalenceResult check_equivalence(const Ldim& a, const LatentExpansion& b, const std::vector<double>& grid,
                                    double tol);

struct SlSplit {
  CMatrix s;
  CMatrix l;
};

// S = (I-H)^* D^-1 (I-H), L = -Psi^* Lambda^-1 Psi, S + L = Phi_o^-1.
SlSplit analytic_sl_split(const LatentExpansion& exp, double omega);

struct StructureReport {
  bool parent_iff_edge = true;
  bool count_at_least_q = true;
  bool seed_invariant = true;
  std::vector<std::string> violations;

  bool ok() const { return parent_iff_edge && count_at_least_q && seed_invariant; }
};

StructureReport verify_structure(const LatentExpansion& exp, const CorrelationGraph& gc,
                                 std::uint64_t alt_seed = 0x5eed);

// Copy of exp without latent column l.
LatentExpansion remove_latent(const LatentExpansion& exp, Index l);

}  // namespace corrnet
