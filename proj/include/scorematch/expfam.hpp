#pragma once

#include <Eigen/Dense>
#include <functional>

#include "scorematch/model_space.hpp"

namespace scorematch {

/// An exponential family presented through the two per-sample quantities the
/// score matching equation consumes: the Gram term D(x)*D(x) (d x d,
/// symmetric PSD) and the drift term D(x)*grad b(x) + laplacian t(x)
/// (length d), both in the chosen coordinates of the parameter space.
/// Nothing else about t, b or the base measure is needed, and the
/// log-normalizer is never evaluated. Callbacks must be pure.
///
/// Note the estimator is not invariant under transformations of x or change
/// of base measure; no automatic standardization is attempted here.
struct ExponentialFamily {
  int dim = 0;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> gram_term;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> drift_term;
};

/// Empirical sandwich (Godambe) covariance pieces for the estimator.
struct SandwichEstimate {
  Eigen::MatrixXd psi_hat;    // (1/n) sum gram_term(x_i)
  Eigen::MatrixXd h_hat;      // covariance of per-sample estimating functions, divisor n
  Eigen::MatrixXd cov_theta;  // psi^-1 h psi^-1 / n
};

/// Solves sum_i [gram_term(x_i) theta + drift_term(x_i)] = 0 for theta.
/// Rows of `samples` are observations. The accumulated system is solved by
/// LDLT with one step of iterative refinement; singularity is declared when
/// the SVD condition estimate exceeds 1e12 (throws NotEstimableError with
/// the rank).
Eigen::VectorXd solve_sme(const ExponentialFamily& family,
                          const Eigen::MatrixXd& samples);

/// Minimized objective sum_i <theta, drift_term(x_i)> / 2, valid at the
/// solution of the estimating equation (terms depending on x alone are
/// dropped throughout).
double minimal_score(const ExponentialFamily& family,
                     const Eigen::MatrixXd& samples,
                     const Eigen::VectorXd& theta);

/// Requires n >= 2.
SandwichEstimate sandwich_covariance(const ExponentialFamily& family,
                                     const Eigen::MatrixXd& samples,
                                     const Eigen::VectorXd& theta);

/// Gaussian linear concentration model over the model space L, presented
/// generically: gram_term(x)_uv = <e^u x, e^v x>, drift_term = -tr(e^u).
ExponentialFamily gaussian_concentration_family(const ModelSpace& space);

/// One-dimensional Gaussian with the precision as canonical parameter:
/// gram_term(x) = x^2, drift_term(x) = -1.
ExponentialFamily gaussian_precision_1d();

}  // namespace scorematch
