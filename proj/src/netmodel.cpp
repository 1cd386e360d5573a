#include "corrnet/netmodel.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace corrnet {

LatentFactor latent_factor(const NoiseSpec& noise, Index n) {
  if (const auto* a = std::get_if<AffineCorrelationSpec>(&noise.correlation))
    return {a->gains, a->latent_variances.asDiagonal()};
  if (const auto* p = std::get_if<PolyCorrelationSpec>(&noise.correlation)) {
    std::vector<Index> act = p->active_set();
    TransferMatrix f(n, static_cast<Index>(act.size()));
    for (size_t c = 0; c < act.size(); ++c)
      for (Index i = 0; i < n; ++i)
        if (!p->gains.is_zero_entry(i, act[c])) f.set(i, static_cast<Index>(c), p->gains.entry(i, act[c]));
    return {f, centered_covariance(*p, act)};
  }
  return {TransferMatrix(n, 0), Matrix(0, 0)};
}

CMatrix noise_psd(const NoiseSpec& noise, Index n, double omega) {
  CMatrix phi = noise.base_variances.cast<cdouble>().asDiagonal();
  LatentFactor lf = latent_factor(noise, n);
  if (lf.gains.cols() > 0) {
    CMatrix f = eval_transfer_matrix(lf.gains, omega);
    phi += f * lf.covariance.cast<cdouble>() * f.adjoint();
  }
  return phi;
}

WellPosedness check_well_posed(const TransferMatrix& h, int grid_size, double tau_det) {
  if (grid_size < 8) throw ValidationError("well-posedness grid needs at least 8 points");
  if (h.rows() != h.cols()) throw ValidationError("H must be square");
  double worst = std::numeric_limits<double>::infinity();
  const Index n = h.rows();
  for (double w : frequency_grid(grid_size)) {
    CMatrix a = CMatrix::Identity(n, n) - eval_transfer_matrix(h, w);
    worst = std::min(worst, n == 0 ? 1.0 : std::abs(a.partialPivLu().determinant()));
  }
  return {worst > tau_det, worst};
}

WellPosedness check_well_posed(const Ldim& model, int grid_size, double tau_det) {
  return check_well_posed(model.h(), grid_size, tau_det);
}

Ldim::Ldim(TransferMatrix h, NoiseSpec noise, int grid_size) : h_(std::move(h)), noise_(std::move(noise)) {
  const Index n = h_.rows();
  if (h_.cols() != n) throw ValidationError("H must be square");
  if (!h_.zero_diagonal()) throw ValidationError("H must have a zero diagonal");
  if (noise_.base_variances.size() != n) throw ValidationError("base variance count differs from n");
  if (!(noise_.base_variances.array() > 0.0).all())
    throw ValidationError("base noise variances must be positive (topological detectability)");
  if (const auto* a = std::get_if<AffineCorrelationSpec>(&noise_.correlation)) {
    if (a->gains.rows() != n || a->gains.cols() != a->latent_variances.size())
      throw ValidationError("affine latent gains must be n x L with L latent variances");
    if (!(a->latent_variances.array() > 0.0).all()) throw ValidationError("latent variances must be positive");
  } else if (const auto* p = std::get_if<PolyCorrelationSpec>(&noise_.correlation)) {
    p->validate(n);
  }
  WellPosedness wp = check_well_posed(h_, grid_size);
  if (!wp.ok) throw ValidationError("model is not well posed: min |det(I-H)| = " + std::to_string(wp.min_abs_det));
}

DirectedGraph directed_graph_of(const TransferMatrix& h) {
  DirectedGraph g(h.rows());
  auto s = h.support();
  for (Index i = 0; i < h.rows(); ++i)
    for (Index j = 0; j < h.cols(); ++j)
      if (i != j && s(i, j)) g.add_edge(j, i);
  return g;
}

double hermitian_condition(const CMatrix& a) {
  if (a.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::EigenvaluesOnly);
  const Vector& ev = es.eigenvalues();
  if (ev.minCoeff() <= 0.0) return std::numeric_limits<double>::infinity();
  return ev.maxCoeff() / ev.minCoeff();
}

CMatrix analytic_ipsdm(const TransferMatrix& h, const CMatrix& phi_e, double omega, double cond_limit) {
  const Index n = h.rows();
  double cond = hermitian_condition(phi_e);
  if (!(cond < cond_limit))
    throw NumericalError("noise spectrum not invertible at omega=" + std::to_string(omega) +
                         " (condition " + std::to_string(cond) + ")");
  CMatrix a = CMatrix::Identity(n, n) - eval_transfer_matrix(h, omega);
  CMatrix r = a.adjoint() * phi_e.llt().solve(a);
  return (r + r.adjoint()) / 2.0;
}

CMatrix analytic_ipsdm(const Ldim& model, double omega) {
  return analytic_ipsdm(model.h(), noise_psd(model.noise(), model.n(), omega), omega);
}

CMatrix analytic_psd(const TransferMatrix& h, const CMatrix& phi_e, double omega, double tau_det) {
  const Index n = h.rows();
  CMatrix a = CMatrix::Identity(n, n) - eval_transfer_matrix(h, omega);
  Eigen::PartialPivLU<CMatrix> lu(a);
  if (!(std::abs(lu.determinant()) > tau_det))
    throw NumericalError("I - H is singular at omega=" + std::to_string(omega));
  CMatrix t = lu.inverse();
  CMatrix r = t * phi_e * t.adjoint();
  return (r + r.adjoint()) / 2.0;
}

CMatrix analytic_psd(const Ldim& model, double omega) {
  return analytic_psd(model.h(), noise_psd(model.noise(), model.n(), omega), omega);
}

std::vector<double> frequency_grid(int count) {
  std::vector<double> w(count);
  for (int k = 0; k < count; ++k) w[k] = -kPi + 2.0 * kPi * (k + 1) / count;
  return w;
}

}  // namespace corrnet
