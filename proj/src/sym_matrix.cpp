#include "scorematch/sym_matrix.hpp"

#include <cmath>

namespace scorematch {

namespace {

std::size_t tri_size(int p) {
  return static_cast<std::size_t>(p) * (p + 1) / 2;
}

void check_dim(const SymMatrix& a, const SymMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(what) + ": dimensions " +
                         std::to_string(a.dim()) + " and " +
                         std::to_string(b.dim()) + " do not match");
  }
}

}  // namespace

SymMatrix::SymMatrix(int p) : p_(p), tri_(tri_size(p), 0.0) {
  if (p < 0) throw InvalidInput("matrix dimension must be non-negative");
}

SymMatrix::SymMatrix(int p, std::vector<double> packed)
    : p_(p), tri_(std::move(packed)) {
  if (p < 0) throw InvalidInput("matrix dimension must be non-negative");
  if (tri_.size() != tri_size(p)) {
    throw DimensionError("packed triangle has " + std::to_string(tri_.size()) +
                         " entries, expected " + std::to_string(tri_size(p)));
  }
  check_finite();
}

SymMatrix SymMatrix::identity(int p) {
  SymMatrix m(p);
  for (int i = 0; i < p; ++i) m.tri_[m.offset(i, i)] = 1.0;
  return m;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("from_dense: matrix is not square");
  }
  const int p = static_cast<int>(m.rows());
  SymMatrix out(p);
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j)
      out.tri_[out.offset(i, j)] = (m(i, j) + m(j, i)) / 2.0;
  out.check_finite();
  return out;
}

void SymMatrix::check_finite() const {
  for (double v : tri_) {
    if (!std::isfinite(v)) {
      throw InvalidInput("symmetric matrix entries must be finite");
    }
  }
}

Eigen::MatrixXd SymMatrix::dense() const {
  Eigen::MatrixXd m(p_, p_);
  for (int i = 0; i < p_; ++i)
    for (int j = i; j < p_; ++j) m(i, j) = m(j, i) = tri_[offset(i, j)];
  return m;
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < p_; ++i) t += tri_[offset(i, i)];
  return t;
}

SymMatrix SymMatrix::operator+(const SymMatrix& other) const {
  check_dim(*this, other, "operator+");
  SymMatrix out(p_);
  for (std::size_t k = 0; k < tri_.size(); ++k)
    out.tri_[k] = tri_[k] + other.tri_[k];
  return out;
}

SymMatrix SymMatrix::operator-(const SymMatrix& other) const {
  check_dim(*this, other, "operator-");
  SymMatrix out(p_);
  for (std::size_t k = 0; k < tri_.size(); ++k)
    out.tri_[k] = tri_[k] - other.tri_[k];
  return out;
}

SymMatrix SymMatrix::operator*(double s) const {
  SymMatrix out(p_);
  for (std::size_t k = 0; k < tri_.size(); ++k) out.tri_[k] = tri_[k] * s;
  return out;
}

double trace_inner(const SymMatrix& a, const SymMatrix& b) {
  check_dim(a, b, "trace_inner");
  const int p = a.dim();
  double diag = 0.0, off = 0.0;
  for (int i = 0; i < p; ++i) {
    diag += a(i, i) * b(i, i);
    for (int j = i + 1; j < p; ++j) off += a(i, j) * b(i, j);
  }
  return diag + 2.0 * off;
}

SymMatrix jordan_product(const SymMatrix& a, const SymMatrix& b) {
  check_dim(a, b, "jordan_product");
  const Eigen::MatrixXd ad = a.dense();
  const Eigen::MatrixXd bd = b.dense();
  const Eigen::MatrixXd ab = ad * bd;
  return SymMatrix::from_dense((ab + ab.transpose()) / 2.0);
}

double frobenius_norm(const SymMatrix& a) {
  return std::sqrt(trace_inner(a, a));
}

SpdFactor SpdFactor::compute(const SymMatrix& a) {
  for (double v : a.packed()) {
    if (std::isnan(v)) throw InvalidInput("factorization input contains NaN");
  }
  SpdFactor f;
  f.p_ = a.dim();
  f.l_ = a.dense();
  Eigen::MatrixXd& l = f.l_;
  for (int j = 0; j < f.p_; ++j) {
    double d = l(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) {
      f.failing_minor_ = j + 1;
      return f;
    }
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < f.p_; ++i) {
      double s = l(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  l.triangularView<Eigen::StrictlyUpper>().setZero();
  return f;
}

double SpdFactor::log_det() const {
  if (!is_pd()) {
    throw Error("log_det: matrix is not positive definite (leading minor " +
                std::to_string(failing_minor_) + ")");
  }
  double s = 0.0;
  for (int i = 0; i < p_; ++i) s += std::log(l_(i, i));
  return 2.0 * s;
}

const Eigen::MatrixXd& SpdFactor::matrix_l() const {
  if (!is_pd()) throw Error("matrix_l: matrix is not positive definite");
  return l_;
}

Eigen::VectorXd SpdFactor::solve(const Eigen::VectorXd& b) const {
  if (!is_pd()) throw Error("solve: matrix is not positive definite");
  Eigen::VectorXd y = l_.triangularView<Eigen::Lower>().solve(b);
  return l_.triangularView<Eigen::Lower>().transpose().solve(y);
}

SymMatrix SpdFactor::inverse() const {
  if (!is_pd()) throw Error("inverse: matrix is not positive definite");
  Eigen::MatrixXd inv =
      l_.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p_, p_));
  inv = l_.triangularView<Eigen::Lower>().transpose().solve(inv);
  return SymMatrix::from_dense(inv);
}

}  // namespace scorematch
