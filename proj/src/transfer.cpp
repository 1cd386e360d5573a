#include "corrnet/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace corrnet {

TransferFunction::TransferFunction(std::vector<double> taps) : taps_(std::move(taps)) {
  for (double c : taps_)
    if (!std::isfinite(c)) throw ValidationError("transfer function tap is not finite");
  while (!taps_.empty() && taps_.back() == 0.0) taps_.pop_back();
}

TransferFunction TransferFunction::delay(double gain, int d) {
  if (d < 0) throw ValidationError("negative delay");
  std::vector<double> t(static_cast<size_t>(d) + 1, 0.0);
  t[d] = gain;
  return TransferFunction(std::move(t));
}

cdouble TransferFunction::operator()(double omega) const {
  cdouble acc = 0.0;
  for (size_t k = 0; k < taps_.size(); ++k)
    acc += taps_[k] * std::polar(1.0, -omega * static_cast<double>(k));
  return acc;
}

TransferMatrix::TransferMatrix(Index rows, Index cols) : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw ValidationError("negative transfer matrix size");
}

void TransferMatrix::set(Index i, Index j, const TransferFunction& tf) {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw ValidationError("transfer matrix index out of range");
  const auto& c = tf.taps();
  while (taps_.size() < c.size()) taps_.push_back(Matrix::Zero(rows_, cols_));
  for (size_t k = 0; k < taps_.size(); ++k) taps_[k](i, j) = k < c.size() ? c[k] : 0.0;
  trim();
}

TransferFunction TransferMatrix::entry(Index i, Index j) const {
  std::vector<double> c(taps_.size());
  for (size_t k = 0; k < taps_.size(); ++k) c[k] = taps_[k](i, j);
  return TransferFunction(std::move(c));
}

bool TransferMatrix::is_zero_entry(Index i, Index j) const {
  return std::all_of(taps_.begin(), taps_.end(), [&](const Matrix& m) { return m(i, j) == 0.0; });
}

bool TransferMatrix::strictly_causal() const { return taps_.empty() || taps_.front().isZero(0.0); }

bool TransferMatrix::zero_diagonal() const {
  if (rows_ != cols_) return false;
  for (const Matrix& m : taps_)
    if (!m.diagonal().isZero(0.0)) return false;
  return true;
}

Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> TransferMatrix::support() const {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> s =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(rows_, cols_, false);
  for (const Matrix& m : taps_) s = s.array() || (m.array() != 0.0);
  return s;
}

void TransferMatrix::trim() {
  while (!taps_.empty() && taps_.back().isZero(0.0)) taps_.pop_back();
}

TransferMatrix operator+(const TransferMatrix& a, const TransferMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw ValidationError("transfer matrix size mismatch");
  TransferMatrix r(a.rows_, a.cols_);
  size_t lags = std::max(a.taps_.size(), b.taps_.size());
  r.taps_.assign(lags, Matrix::Zero(a.rows_, a.cols_));
  for (size_t k = 0; k < a.taps_.size(); ++k) r.taps_[k] += a.taps_[k];
  for (size_t k = 0; k < b.taps_.size(); ++k) r.taps_[k] += b.taps_[k];
  r.trim();
  return r;
}

TransferMatrix operator*(double s, const TransferMatrix& a) {
  TransferMatrix r = a;
  for (Matrix& m : r.taps_) m *= s;
  r.trim();
  return r;
}

CMatrix eval_transfer_matrix(const TransferMatrix& h, double omega) {
  CMatrix out = CMatrix::Zero(h.rows(), h.cols());
  for (int k = 0; k < h.lags(); ++k) out += std::polar(1.0, -omega * k) * h.tap(k).cast<cdouble>();
  return out;
}

}  // namespace corrnet
