#include "scorematch/fit.hpp"

#include <cmath>

#include "scorematch/errors.hpp"

namespace scorematch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double quadratic_j2(const ModelSpace& space, const SymMatrix& w, int n,
                    const Eigen::VectorXd& theta, const SymMatrix& k) {
  // J_2(K) = n (tr(KWK)/2 - tr(K)).
  const Eigen::MatrixXd kd = k.dense();
  const double kwk = (kd * w.dense() * kd).trace();
  return n * (kwk / 2.0 - theta.dot(space.trace_rhs()));
}

Eigen::VectorXd gradient(const ModelSpace& space, const SymMatrix& k_inv,
                         const SymMatrix& w) {
  const int d = space.dim();
  Eigen::VectorXd g(d);
  for (int u = 0; u < d; ++u)
    g[u] = trace_inner(space.generator(u), k_inv) -
           trace_inner(space.generator(u), w);
  return g;
}

double loglik(const SpdFactor& factor, const SymMatrix& k, const SymMatrix& w) {
  return factor.log_det() - trace_inner(k, w);
}

}  // namespace

const char* to_string(FitMethod m) {
  switch (m) {
    case FitMethod::Sme: return "sme";
    case FitMethod::Mle: return "mle";
    case FitMethod::Jordan: return "jordan";
  }
  return "?";
}

FitResult sme_fit(const ModelSpace& space, const SymMatrix& w, int n) {
  const GramSystem sys = build_gram(space, w, n);
  const int d = space.dim();
  if (sys.rank_estimate < d || sys.condition_estimate > 1e12) {
    throw NotEstimableError(
        "score matching system is singular (rank " +
            std::to_string(sys.rank_estimate) + " of " + std::to_string(d) +
            ", smallest sv " + std::to_string(sys.smallest_sv) + ")",
        sys.rank_estimate, sys.smallest_sv, sys.largest_sv);
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(sys.m);
  const Eigen::VectorXd scaled_rhs = static_cast<double>(n) * sys.rhs;
  Eigen::VectorXd theta = ldlt.solve(scaled_rhs);
  theta += ldlt.solve(scaled_rhs - sys.m * theta);

  FitResult fit;
  fit.method = FitMethod::Sme;
  fit.theta = theta;
  fit.K = space.to_matrix(theta);
  fit.j2 = -n * fit.K.trace() / 2.0;
  fit.positive_definite = SpdFactor::compute(fit.K).is_pd();
  fit.iterations = 0;
  fit.diagnostics.gram_condition = sys.condition_estimate;
  fit.diagnostics.system_residual =
      ((sys.m * theta - scaled_rhs) / static_cast<double>(n))
          .cwiseAbs()
          .maxCoeff();
  return fit;
}

FitResult jordan_fit(const ModelSpace& space, const SymMatrix& w, int n) {
  if (w.dim() != space.p())
    throw DimensionError("jordan_fit: W dimension does not match model space");
  if (n < 1) throw InvalidInput("jordan_fit: n must be positive");
  if (!space.is_jordan_subalgebra())
    throw InvalidInput("jordan_fit: model space is not a Jordan subalgebra");
  if (!space.contains_identity())
    throw InvalidInput("jordan_fit: model space does not contain the identity");

  const SymMatrix projected = space.project(w);
  const SpdFactor factor = SpdFactor::compute(projected);
  if (!factor.is_pd()) {
    throw Error("jordan_fit: projected scatter is singular (leading minor " +
                std::to_string(factor.failing_minor()) + ")");
  }
  const SymMatrix k_inv = factor.inverse();

  FitResult fit;
  fit.method = FitMethod::Jordan;
  // Jordan subalgebras with identity are closed under inversion, so the
  // inverse lies back in L; report it in basis coordinates.
  fit.theta = space.coordinates(k_inv);
  fit.K = space.to_matrix(fit.theta);
  const double residual = frobenius_norm(k_inv - fit.K);
  if (residual > 1e-8 * (1.0 + frobenius_norm(k_inv))) {
    throw Error("jordan_fit: inverse left the model space (residual " +
                std::to_string(residual) + ")");
  }
  fit.j2 = -n * fit.K.trace() / 2.0;
  fit.positive_definite = true;
  fit.iterations = 0;
  return fit;
}

FitResult mle_fit(const ModelSpace& space, const SymMatrix& w, int n,
                  const MleOptions& opts) {
  if (w.dim() != space.p())
    throw DimensionError("mle_fit: W dimension does not match model space");
  if (n < 1) throw InvalidInput("mle_fit: n must be positive");
  const int d = space.dim();

  Eigen::VectorXd theta;
  if (opts.start) {
    if (opts.start->size() != d)
      throw DimensionError("mle_fit: start coordinates have wrong length");
    theta = *opts.start;
  } else {
    theta = space.from_matrix(SymMatrix::identity(space.p()));
  }

  SymMatrix k = space.to_matrix(theta);
  SpdFactor factor = SpdFactor::compute(k);
  if (!factor.is_pd())
    throw InvalidInput("mle_fit: start is not positive definite");

  double scale = 0.0;
  for (int u = 0; u < d; ++u)
    scale = std::max(scale, std::abs(trace_inner(space.generator(u), w)));
  const double tol = opts.grad_tol * (1.0 + scale);

  FitResult fit;
  fit.method = FitMethod::Mle;
  fit.converged = false;

  double ll = loglik(factor, k, w);
  double prev_gnorm = std::numeric_limits<double>::infinity();
  double prev_knorm = frobenius_norm(k);
  int growth_streak = 0;
  int backtracks = 0;
  int iter = 0;

  for (; iter < opts.max_iter; ++iter) {
    const SymMatrix k_inv = factor.inverse();
    const Eigen::VectorXd g = gradient(space, k_inv, w);
    const double gnorm = g.cwiseAbs().maxCoeff();
    if (gnorm <= tol) {
      fit.converged = true;
      fit.gradient_norm = gnorm;
      break;
    }

    // Exact negated Hessian b_uv = tr(e^u K^-1 e^v K^-1); positive definite
    // on independent generators, so the damped step is globally convergent
    // on this concave objective.
    const Eigen::MatrixXd kid = k_inv.dense();
    Eigen::MatrixXd b(d, d);
    for (int u = 0; u < d; ++u) {
      const Eigen::MatrixXd cu = kid * space.generator(u).dense() * kid;
      const SymMatrix cus = SymMatrix::from_dense(cu);
      for (int v = u; v < d; ++v) {
        const double entry = trace_inner(space.generator(v), cus);
        b(u, v) = entry;
        b(v, u) = entry;
      }
    }
    const Eigen::VectorXd direction = Eigen::LDLT<Eigen::MatrixXd>(b).solve(g);
    const double slope = g.dot(direction);

    double alpha = 1.0;
    bool accepted = false;
    SymMatrix k_try = k;
    SpdFactor factor_try = factor;
    double ll_try = ll;
    // Near the optimum the required Armijo increase underflows the
    // objective's floating resolution; without the slack the final
    // quadratic-convergence step is rejected on exact fp equality and the
    // gradient stalls around sqrt(eps).
    const double armijo_slack =
        16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(ll));
    for (int h = 0; h <= 60; ++h) {
      k_try = space.to_matrix(theta + alpha * direction);
      factor_try = SpdFactor::compute(k_try);
      if (factor_try.is_pd()) {
        ll_try = loglik(factor_try, k_try, w);
        if (ll_try >= ll + 1e-4 * alpha * slope - armijo_slack) {
          accepted = true;
          break;
        }
      }
      alpha /= 2.0;
      ++backtracks;
    }
    if (!accepted) {
      fit.gradient_norm = gnorm;
      break;  // reported as non-convergence below
    }

    theta += alpha * direction;
    k = k_try;
    factor = factor_try;
    ll = ll_try;
    fit.gradient_norm = gnorm;

    const double knorm = frobenius_norm(k);
    if (knorm >= 2.0 * prev_knorm && gnorm >= prev_gnorm) {
      if (++growth_streak >= 20) {
        throw MleNonexistentError(
            "likelihood appears unbounded: iterates grow without the "
            "gradient decreasing (heuristic ray detection)");
      }
    } else {
      growth_streak = 0;
    }
    prev_knorm = knorm;
    prev_gnorm = gnorm;
  }

  fit.theta = theta;
  fit.K = k;
  fit.positive_definite = true;
  fit.iterations = iter;
  fit.j2 = quadratic_j2(space, w, n, theta, k);
  fit.diagnostics.loglik = ll;
  fit.diagnostics.backtrack_steps = backtracks;
  return fit;
}

FitResult sme_then_mle(const ModelSpace& space, const SymMatrix& w, int n,
                       const MleOptions& opts) {
  const FitResult sme = sme_fit(space, w, n);

  MleOptions from_identity = opts;
  from_identity.start.reset();
  const FitResult baseline = mle_fit(space, w, n, from_identity);

  if (!sme.positive_definite) return baseline;

  MleOptions warm = opts;
  warm.start = sme.theta;
  FitResult fit = mle_fit(space, w, n, warm);
  fit.diagnostics.iterations_saved = baseline.iterations - fit.iterations;
  return fit;
}

}  // namespace scorematch
