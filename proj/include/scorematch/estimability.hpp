#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "scorematch/model_space.hpp"

namespace scorematch {

/// The d x d system of the linear score matching equations:
/// m_uv = n tr(e^u W e^v) against rhs_u = tr(e^u).
struct GramSystem {
  Eigen::MatrixXd m;
  Eigen::VectorXd rhs;
  int n = 0;
  int rank_estimate = 0;
  double condition_estimate = 0.0;
  double smallest_sv = 0.0;
  double largest_sv = 0.0;
};

GramSystem build_gram(const ModelSpace& space, const SymMatrix& w, int n);

/// Necessary condition d <= T_p - T_r with r = max(p-n, 0), T_k = k(k+1)/2.
/// A true answer does not certify estimability.
bool dimension_bound_check(int d, int p, int n);

struct EstimabilityCheck {
  int d = 0;
  long long dimension_bound = 0;  // T_p - T_r
  bool bound_ok = false;
  bool estimable = false;
  int trials = 0;
  /// Best (largest) relative smallest singular value seen across trials;
  /// distinguishes near-degenerate spaces from structurally singular ones.
  double best_min_sv_ratio = 0.0;
};

/// Randomized certificate: draws `trials` datasets of n standard normal
/// p-vectors and tests the Gram system for full rank (smallest singular
/// value > 1e-10 x largest). Because det M(x) is a polynomial in x, one
/// full-rank witness certifies almost-sure existence, while repeated
/// all-singular draws give overwhelming evidence of never-existence.
EstimabilityCheck check_estimability(const ModelSpace& space, int n,
                                     std::uint64_t seed, int trials = 3);

bool is_n_estimable(const ModelSpace& space, int n, std::uint64_t seed,
                    int trials = 3);

namespace detail {

/// Row-sparse view of a symmetric generator, used to evaluate
/// tr(A W B) = sum_i row_i(A)^T W row_i(B) deterministically.
struct SparseRows {
  int p = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;
};

SparseRows sparse_rows(const SymMatrix& g);

double gram_entry(const SymMatrix& w, const SparseRows& a,
                  const SparseRows& b);

}  // namespace detail

}  // namespace scorematch
