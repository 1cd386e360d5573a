#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "corrnet/graph.hpp"
#include "corrnet/poly_lift.hpp"
#include "corrnet/transfer.hpp"

namespace corrnet {

// e = e_o + F h with h white, unit-lag covariance `latent_variances` on the diagonal.
struct AffineCorrelationSpec {
  TransferMatrix gains;  // n x L
  Vector latent_variances;
};

struct NoiseSpec {
  Vector base_variances;  // white spectra of e_o
  std::variant<std::monostate, AffineCorrelationSpec, PolyCorrelationSpec> correlation;
};

// Common form of both correlation kinds: e = e_o + F h, Cov(h) = covariance, h white.
struct LatentFactor {
  TransferMatrix gains;
  Matrix covariance;
};

LatentFactor latent_factor(const NoiseSpec& noise, Index n);
CMatrix noise_psd(const NoiseSpec& noise, Index n, double omega);

struct WellPosedness {
  bool ok = false;
  double min_abs_det = 0.0;
};

inline constexpr int kDefaultWellPosedGrid = 512;
inline constexpr double kDefaultDetTol = 1e-8;

// Scans |det(I - H(e^{jw}))| on a uniform grid of the circle.
WellPosedness check_well_posed(const TransferMatrix& h, int grid_size = kDefaultWellPosedGrid,
                               double tau_det = kDefaultDetTol);

// Linear dynamic influence model x = H x + e.
class Ldim {
 public:
  Ldim(TransferMatrix h, NoiseSpec noise, int grid_size = kDefaultWellPosedGrid);

  Index n() const { return h_.rows(); }
  const TransferMatrix& h() const { return h_; }
  const NoiseSpec& noise() const { return noise_; }

 private:
  TransferMatrix h_;
  NoiseSpec noise_;
};

WellPosedness check_well_posed(const Ldim& model, int grid_size = kDefaultWellPosedGrid,
                               double tau_det = kDefaultDetTol);

// Edge j -> i whenever H_ij is nonzero.
DirectedGraph directed_graph_of(const TransferMatrix& h);

inline constexpr double kDefaultCondLimit = 1e12;

// (I - H)^* phi_e^{-1} (I - H), Hermitian-symmetrized.
CMatrix analytic_ipsdm(const TransferMatrix& h, const CMatrix& phi_e, double omega,
                       double cond_limit = kDefaultCondLimit);
CMatrix analytic_ipsdm(const Ldim& model, double omega);

// (I - H)^{-1} phi_e (I - H)^{-*}.
CMatrix analytic_psd(const TransferMatrix& h, const CMatrix& phi_e, double omega, double tau_det = kDefaultDetTol);
CMatrix analytic_psd(const Ldim& model, double omega);

// count points -pi + 2 pi (k+1)/count, a uniform grid of (-pi, pi].
std::vector<double> frequency_grid(int count);

// Hermitian condition number lambda_max / lambda_min (infinity if not positive definite).
double hermitian_condition(const CMatrix& a);

}  // namespace corrnet
