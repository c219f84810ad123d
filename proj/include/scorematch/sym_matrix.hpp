#pragma once

#include <Eigen/Dense>
#include <vector>

#include "scorematch/errors.hpp"

namespace scorematch {

/// Dense symmetric matrix with packed upper-triangle storage.
///
/// Only one triangle is stored, so the logical matrix is exactly symmetric
/// by construction and cannot drift. All entries are validated to be finite
/// when a matrix is built; operations never mutate their inputs.
class SymMatrix {
 public:
  SymMatrix() = default;

  /// Zero matrix of dimension p.
  explicit SymMatrix(int p);

  /// From packed upper triangle, row major: (0,0..p-1), (1,1..p-1), ...
  SymMatrix(int p, std::vector<double> packed);

  static SymMatrix identity(int p);

  /// Symmetrizes a square dense matrix as (M + M^T)/2.
  static SymMatrix from_dense(const Eigen::MatrixXd& m);

  int dim() const { return p_; }

  double operator()(int i, int j) const {
    return tri_[offset(i, j)];
  }

  const std::vector<double>& packed() const { return tri_; }

  Eigen::MatrixXd dense() const;

  double trace() const;

  SymMatrix operator+(const SymMatrix& other) const;
  SymMatrix operator-(const SymMatrix& other) const;
  SymMatrix operator*(double s) const;

  std::size_t offset(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i) * p_ - static_cast<std::size_t>(i) * (i - 1) / 2 +
           (j - i);
  }

 private:
  void check_finite() const;

  int p_ = 0;
  std::vector<double> tri_;
};

/// tr(AB) = sum_i A_ii B_ii + 2 sum_{i<j} A_ij B_ij.
double trace_inner(const SymMatrix& a, const SymMatrix& b);

/// (AB + BA)/2. The identity is the unit: A o I = A.
SymMatrix jordan_product(const SymMatrix& a, const SymMatrix& b);

double frobenius_norm(const SymMatrix& a);

/// Cholesky factorization A = L L^T with strictly positive pivots.
///
/// Positive definiteness is defined operationally: the matrix is PD exactly
/// when the factorization runs to completion. On failure the 1-based index
/// of the first non-positive leading minor is recorded instead of throwing,
/// since indefinite inputs are an expected outcome for score matching fits.
class SpdFactor {
 public:
  static SpdFactor compute(const SymMatrix& a);

  bool is_pd() const { return failing_minor_ == 0; }

  /// 1-based index of the first failing leading minor; 0 when PD.
  int failing_minor() const { return failing_minor_; }

  double log_det() const;
  SymMatrix inverse() const;

  /// Lower-triangular factor; valid only when is_pd().
  const Eigen::MatrixXd& matrix_l() const;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  SpdFactor() = default;

  int p_ = 0;
  int failing_minor_ = 0;
  Eigen::MatrixXd l_;
};

}  // namespace scorematch
