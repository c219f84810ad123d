#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>

#include "scorematch/estimability.hpp"
#include "scorematch/model_space.hpp"

namespace scorematch {

enum class FitMethod { Sme, Mle, Jordan };

const char* to_string(FitMethod m);

struct FitDiagnostics {
  double gram_condition = std::numeric_limits<double>::quiet_NaN();
  /// max_u |tr(e^u W K) - tr(e^u)| for the score matching system.
  double system_residual = std::numeric_limits<double>::quiet_NaN();
  /// log det K - tr(KW), filled by the likelihood solver.
  double loglik = std::numeric_limits<double>::quiet_NaN();
  /// Newton iterations saved by warm-starting at the score matching
  /// estimate instead of the identity (sme_then_mle only).
  int iterations_saved = 0;
  int backtrack_steps = 0;
};

struct FitResult {
  SymMatrix K;
  Eigen::VectorXd theta;
  /// Minimized score matching objective, -n tr(K)/2 for the linear and
  /// closed-form methods; the quadratic objective evaluated at theta for
  /// the likelihood solver.
  double j2 = std::numeric_limits<double>::quiet_NaN();
  bool positive_definite = false;
  FitMethod method = FitMethod::Sme;
  int iterations = 0;
  double gradient_norm = std::numeric_limits<double>::quiet_NaN();
  /// Always true for the linear and closed-form methods; false when the
  /// Newton solver hit its iteration cap (best iterate is returned).
  bool converged = true;
  FitDiagnostics diagnostics;
};

struct MleOptions {
  int max_iter = 200;
  double grad_tol = 1e-10;
  /// Start coordinates; defaults to the coordinates of the identity.
  std::optional<Eigen::VectorXd> start;
};

/// Score matching estimate: solves sum_v theta_v tr(e^u W e^v) = tr(e^u).
/// W is the n-divisor scatter of (already centered) data; the estimators
/// never re-center. The fit is returned even when K is not positive
/// definite, with the flag set. Throws NotEstimableError on a singular
/// system.
FitResult sme_fit(const ModelSpace& space, const SymMatrix& w, int n);

/// Closed form K = (proj_L W)^-1 for Jordan subalgebras containing the
/// identity, where the score matching and maximum likelihood estimators
/// coincide. Requires an invertible projection.
FitResult jordan_fit(const ModelSpace& space, const SymMatrix& w, int n = 1);

/// Maximum likelihood by damped Newton on l(K) = log det K - tr(KW) over
/// L intersected with the positive definite cone: exact gradient
/// g_u = tr(e^u (K^-1 - W)) and Hessian h_uv = -tr(e^u K^-1 e^v K^-1),
/// backtracking halving until the iterate stays positive definite and the
/// Armijo condition (constant 1e-4) holds; stops when
/// ||g||_inf <= grad_tol * (1 + max_u |tr(e^u W)|).
/// Returns the best iterate flagged non-converged when max_iter is hit;
/// throws MleNonexistentError when an unbounded ascent ray is detected
/// (heuristic: 20 consecutive accepted steps that double ||K||_F without
/// the gradient decreasing).
FitResult mle_fit(const ModelSpace& space, const SymMatrix& w, int n,
                  const MleOptions& opts = {});

/// Runs sme_fit, then Newton started at the score matching estimate when it
/// is positive definite (at the identity otherwise). Also runs the identity
/// start to report iterations saved.
FitResult sme_then_mle(const ModelSpace& space, const SymMatrix& w, int n,
                       const MleOptions& opts = {});

}  // namespace scorematch
