#pragma once

#include <cstdint>
#include <vector>

#include "corrnet/latent.hpp"
#include "corrnet/netmodel.hpp"
#include "corrnet/poly_lift.hpp"

namespace corrnet {

struct TimeSeries {
  Matrix values;  // n x N, one row per node
  std::uint64_t seed = 0;

  Index n() const { return values.rows(); }
  Index samples() const { return values.cols(); }
};

struct NoiseSeries {
  TimeSeries e;
  TimeSeries latent;  // latent drivers (e_h, or v for polynomial noise)
};

// Independent stream seed derived from a base seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// e = e_o + F e_h with Gaussian e_o ~ N(0, diag(base)), e_h ~ N(0, Sigma_h), both white.
NoiseSeries simulate_noise_affine(const LatentExpansion& exp, Index samples, std::uint64_t seed);

// e = e_o + F_poly (M(v,p) - E M(v,p)), v ~ N(0, sigma^2 I_m) white.
NoiseSeries simulate_noise_poly(const PolyCorrelationSpec& spec, const Vector& base_variances, Index samples,
                                std::uint64_t seed);

// x(t) = sum_{tau>=1} H_tau x(t - tau) + e(t), dropping the first burn_in samples.
TimeSeries simulate_ldim(const TransferMatrix& h, const TimeSeries& e, Index burn_in);

// Draws noise for the model's own correlation spec and runs the recursion; returns `samples` points.
TimeSeries simulate_model(const Ldim& model, Index samples, std::uint64_t seed, Index burn_in = 1000);

enum class Window { Hann, Rectangular };

struct WelchConfig {
  Index segment_length = 4096;
  double overlap = 0.5;
  Window window = Window::Hann;
  Index burn_in = 1000;
};

struct SpectralEstimate {
  std::vector<double> omegas;
  std::vector<CMatrix> values;  // Hermitian n x n per omega
  Index segments = 0;
};

// Averaged windowed cross-periodograms on the FFT grid 2 pi k / segment_length, k = 0..segment_length/2.
// Phi_ij = (1 / (K sum w^2)) sum_seg X_i conj(X_j), so white unit-variance input gives Phi ~ I.
SpectralEstimate welch_cross_psd(const TimeSeries& x, const WelchConfig& cfg = {});

// Same estimator evaluated at arbitrary frequencies by direct DTFT of each segment.
SpectralEstimate welch_at(const TimeSeries& x, const std::vector<double>& omegas, const WelchConfig& cfg = {});

inline constexpr double kEstimateCondLimit = 1e8;

// Inverse of the estimate at omega (must be on the estimate grid), Hermitian-symmetrized.
CMatrix estimate_ipsdm(const SpectralEstimate& est, double omega, double cond_limit = kEstimateCondLimit);
CMatrix estimate_ipsdm(const CMatrix& phi, double omega, double cond_limit = kEstimateCondLimit);

}  // namespace corrnet
