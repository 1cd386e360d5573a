#include "corrnet/spectral.hpp"

#include <cmath>
#include <random>

#include <unsupported/Eigen/FFT>

namespace corrnet {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// rows x cols standard normals, column by column.
Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

// e(t) += sum_tau F_tau drive(t + lead - tau)
void add_filtered(Matrix& e, const TransferMatrix& f, const Matrix& drive, Index lead) {
  for (int tau = 0; tau < f.lags(); ++tau) {
    const Matrix& ft = f.tap(tau);
    if (ft.isZero(0.0)) continue;
    e.noalias() += ft * drive.middleCols(lead - tau, e.cols());
  }
}

Matrix cholesky_factor(const Matrix& cov) {
  if (cov.size() == 0) return cov;
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("latent covariance is not positive definite");
  return llt.matrixL();
}

}  // namespace

NoiseSeries simulate_noise_affine(const LatentExpansion& exp, Index samples, std::uint64_t seed) {
  if (samples < 1) throw ValidationError("sample count must be positive");
  const Index n = exp.n(), l = exp.latent_count();
  const Index lead = std::max(0, exp.f.lags() - 1);
  std::mt19937_64 rng_o(derive_seed(seed, 1)), rng_h(derive_seed(seed, 2));
  NoiseSeries out;
  out.e.seed = out.latent.seed = seed;
  out.e.values = exp.base_variances.cwiseSqrt().asDiagonal() * gaussian(n, samples, rng_o);
  Matrix h = cholesky_factor(exp.latent_covariance) * gaussian(l, samples + lead, rng_h);
  if (l > 0) add_filtered(out.e.values, exp.f, h, lead);
  out.latent.values = h.rightCols(samples);
  return out;
}

NoiseSeries simulate_noise_poly(const PolyCorrelationSpec& spec, const Vector& base_variances, Index samples,
                                std::uint64_t seed) {
  if (samples < 1) throw ValidationError("sample count must be positive");
  const Index n = base_variances.size();
  spec.validate(n);
  MonomialBasis basis = spec.basis();
  std::vector<Index> act = spec.active_set();
  const Index lead = std::max(0, spec.gains.lags() - 1);
  std::mt19937_64 rng_o(derive_seed(seed, 1)), rng_h(derive_seed(seed, 2));
  NoiseSeries out;
  out.e.seed = out.latent.seed = seed;
  out.e.values = base_variances.cwiseSqrt().asDiagonal() * gaussian(n, samples, rng_o);
  Matrix v = spec.sigma * gaussian(spec.m, samples + lead, rng_h);
  if (!act.empty()) {
    MonomialBasis sub{basis.m, basis.p, {}};
    TransferMatrix f(n, static_cast<Index>(act.size()));
    Vector mean(act.size());
    for (size_t c = 0; c < act.size(); ++c) {
      sub.entries.push_back(basis.entries[act[c]]);
      mean[c] = monomial_mean(basis.entries[act[c]], spec.sigma);
      for (Index i = 0; i < n; ++i)
        if (!spec.gains.is_zero_entry(i, act[c])) f.set(i, static_cast<Index>(c), spec.gains.entry(i, act[c]));
    }
    Matrix y = lift_series(v, sub);
    y.colwise() -= mean;
    add_filtered(out.e.values, f, y, lead);
  }
  out.latent.values = v.rightCols(samples);
  return out;
}

TimeSeries simulate_ldim(const TransferMatrix& h, const TimeSeries& e, Index burn_in) {
  if (!h.strictly_causal()) throw ValidationError("simulation needs strictly causal H (zero lag-0 taps)");
  if (h.rows() != e.n()) throw ValidationError("noise series row count differs from n");
  if (burn_in < 0 || burn_in >= e.samples()) throw ValidationError("burn-in must be below the sample count");
  const Index total = e.samples();
  Matrix x = e.values;
  std::vector<int> active;
  for (int tau = 1; tau < h.lags(); ++tau)
    if (!h.tap(tau).isZero(0.0)) active.push_back(tau);
  for (Index t = 0; t < total; ++t)
    for (int tau : active)
      if (t >= tau) x.col(t).noalias() += h.tap(tau) * x.col(t - tau);
  TimeSeries out;
  out.seed = e.seed;
  out.values = x.rightCols(total - burn_in);
  return out;
}

TimeSeries simulate_model(const Ldim& model, Index samples, std::uint64_t seed, Index burn_in) {
  const Index total = samples + burn_in;
  NoiseSeries noise;
  if (const auto* p = std::get_if<PolyCorrelationSpec>(&model.noise().correlation))
    noise = simulate_noise_poly(*p, model.noise().base_variances, total, seed);
  else
    noise = simulate_noise_affine(expansion_of(model), total, seed);
  return simulate_ldim(model.h(), noise.e, burn_in);
}

namespace {

Vector make_window(Index len, Window kind) {
  Vector w(len);
  for (Index t = 0; t < len; ++t)
    w[t] = kind == Window::Hann ? 0.5 - 0.5 * std::cos(2.0 * kPi * t / len) : 1.0;
  return w;
}

struct Segments {
  Index length, hop, count;
};

Segments plan(const TimeSeries& x, const WelchConfig& cfg) {
  if (cfg.segment_length < 8 || (cfg.segment_length & (cfg.segment_length - 1)) != 0)
    throw ValidationError("segment length must be a power of two >= 8");
  if (!(cfg.overlap >= 0.0 && cfg.overlap < 1.0)) throw ValidationError("overlap must lie in [0, 1)");
  if (x.samples() < 4 * cfg.segment_length) throw ValidationError("insufficient data: need N >= 4 * segment length");
  Index hop = std::max<Index>(1, static_cast<Index>(std::llround(cfg.segment_length * (1.0 - cfg.overlap))));
  Index count = (x.samples() - cfg.segment_length) / hop + 1;
  return {cfg.segment_length, hop, count};
}

void finalize(SpectralEstimate& est, double norm) {
  for (CMatrix& m : est.values) {
    m /= norm;
    m = (m + m.adjoint()).eval() / 2.0;
  }
}

}  // namespace

SpectralEstimate welch_cross_psd(const TimeSeries& x, const WelchConfig& cfg) {
  Segments sg = plan(x, cfg);
  const Index n = x.n(), bins = sg.length / 2 + 1;
  Vector w = make_window(sg.length, cfg.window);
  SpectralEstimate est;
  est.segments = sg.count;
  for (Index k = 0; k < bins; ++k) est.omegas.push_back(2.0 * kPi * k / sg.length);
  est.values.assign(bins, CMatrix::Zero(n, n));
  Eigen::FFT<double> fft;
  std::vector<double> buf(sg.length);
  std::vector<cdouble> spec;
  CMatrix xf(n, bins);
  for (Index s = 0; s < sg.count; ++s) {
    for (Index i = 0; i < n; ++i) {
      for (Index t = 0; t < sg.length; ++t) buf[t] = x.values(i, s * sg.hop + t) * w[t];
      fft.fwd(spec, buf);
      for (Index k = 0; k < bins; ++k) xf(i, k) = spec[k];
    }
    for (Index k = 0; k < bins; ++k) est.values[k].noalias() += xf.col(k) * xf.col(k).adjoint();
  }
  finalize(est, static_cast<double>(sg.count) * w.squaredNorm());
  return est;
}

SpectralEstimate welch_at(const TimeSeries& x, const std::vector<double>& omegas, const WelchConfig& cfg) {
  Segments sg = plan(x, cfg);
  const Index n = x.n();
  Vector w = make_window(sg.length, cfg.window);
  SpectralEstimate est;
  est.segments = sg.count;
  est.omegas = omegas;
  est.values.assign(omegas.size(), CMatrix::Zero(n, n));
  // windowed kernels w(t) e^{-j omega t}, one column per frequency
  CMatrix kern(sg.length, omegas.size());
  for (size_t f = 0; f < omegas.size(); ++f)
    for (Index t = 0; t < sg.length; ++t) kern(t, f) = w[t] * std::polar(1.0, -omegas[f] * static_cast<double>(t));
  for (Index s = 0; s < sg.count; ++s) {
    CMatrix xf = x.values.middleCols(s * sg.hop, sg.length).cast<cdouble>() * kern;
    for (size_t f = 0; f < omegas.size(); ++f) est.values[f].noalias() += xf.col(f) * xf.col(f).adjoint();
  }
  finalize(est, static_cast<double>(sg.count) * w.squaredNorm());
  return est;
}

CMatrix estimate_ipsdm(const CMatrix& phi, double omega, double cond_limit) {
  double cond = hermitian_condition(phi);
  if (!(cond < cond_limit))
    throw NumericalError("spectral estimate ill-conditioned at omega=" + std::to_string(omega) + " (condition " +
                         std::to_string(cond) + ")");
  CMatrix inv = phi.llt().solve(CMatrix::Identity(phi.rows(), phi.cols()));
  return (inv + inv.adjoint()) / 2.0;
}

CMatrix estimate_ipsdm(const SpectralEstimate& est, double omega, double cond_limit) {
  for (size_t k = 0; k < est.omegas.size(); ++k)
    if (std::abs(est.omegas[k] - omega) < 1e-12) return estimate_ipsdm(est.values[k], omega, cond_limit);
  throw ValidationError("omega=" + std::to_string(omega) + " is not on the estimate grid");
}

}  // namespace corrnet
