#pragma once

#include <vector>

#include "corrnet/types.hpp"

namespace corrnet {

// FIR transfer function c_0 + c_1 z^-1 + ... + c_d z^-d. Trailing zero taps are trimmed.
class TransferFunction {
 public:
  TransferFunction() = default;
  explicit TransferFunction(std::vector<double> taps);

  // g z^-d
  static TransferFunction delay(double gain, int d);

  const std::vector<double>& taps() const { return taps_; }
  int degree() const { return taps_.empty() ? 0 : static_cast<int>(taps_.size()) - 1; }
  bool is_zero() const { return taps_.empty(); }
  bool strictly_causal() const { return taps_.empty() || taps_.front() == 0.0; }

  cdouble operator()(double omega) const;

 private:
  std::vector<double> taps_;
};

// rows x cols matrix of FIR transfer functions, stored as one real matrix per lag.
class TransferMatrix {
 public:
  TransferMatrix() = default;
  TransferMatrix(Index rows, Index cols);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  void set(Index i, Index j, const TransferFunction& tf);
  TransferFunction entry(Index i, Index j) const;
  bool is_zero_entry(Index i, Index j) const;

  // Number of stored lags (max degree + 1), zero for an all-zero matrix.
  int lags() const { return static_cast<int>(taps_.size()); }
  // Coefficient matrix of z^-tau.
  const Matrix& tap(int tau) const { return taps_.at(tau); }

  bool strictly_causal() const;
  bool zero_diagonal() const;

  // Boolean support pattern (entry nonzero at any lag).
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> support() const;

  friend TransferMatrix operator+(const TransferMatrix& a, const TransferMatrix& b);
  friend TransferMatrix operator*(double s, const TransferMatrix& a);

 private:
  void trim();

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Matrix> taps_;
};

// H(e^{j omega}) = sum_tau H_tau e^{-j omega tau}.
CMatrix eval_transfer_matrix(const TransferMatrix& h, double omega);

}  // namespace corrnet
