#include "scorematch/expfam.hpp"

#include <Eigen/SVD>
#include <memory>

#include "scorematch/errors.hpp"

namespace scorematch {

namespace {

struct Accumulated {
  Eigen::MatrixXd gram;
  Eigen::VectorXd drift;
};

Accumulated accumulate(const ExponentialFamily& family,
                       const Eigen::MatrixXd& samples) {
  if (family.dim < 1) throw InvalidInput("family dimension must be positive");
  if (samples.rows() < 1) throw InvalidInput("need at least one sample");
  Accumulated acc{Eigen::MatrixXd::Zero(family.dim, family.dim),
                  Eigen::VectorXd::Zero(family.dim)};
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const Eigen::VectorXd x = samples.row(i);
    const Eigen::MatrixXd g = family.gram_term(x);
    const Eigen::VectorXd dr = family.drift_term(x);
    if (g.rows() != family.dim || g.cols() != family.dim ||
        dr.size() != family.dim)
      throw DimensionError("family callback returned wrong dimensions");
    acc.gram += g;
    acc.drift += dr;
  }
  return acc;
}

// Shared singularity policy: condition estimate above 1e12 declares the
// accumulated Gram matrix singular.
void check_condition(const Eigen::MatrixXd& gram, const char* what) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram);
  const auto& sv = svd.singularValues();
  const double largest = sv(0);
  const double smallest = sv(sv.size() - 1);
  if (!(largest > 0.0) || !(smallest * 1e12 > largest)) {
    int rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > 1e-10 * largest) ++rank;
    throw NotEstimableError(std::string(what) +
                                ": accumulated Gram matrix is singular "
                                "(rank " + std::to_string(rank) + " of " +
                                std::to_string(sv.size()) + ")",
                            rank, smallest, largest);
  }
}

}  // namespace

Eigen::VectorXd solve_sme(const ExponentialFamily& family,
                          const Eigen::MatrixXd& samples) {
  const Accumulated acc = accumulate(family, samples);
  check_condition(acc.gram, "solve_sme");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(acc.gram);
  Eigen::VectorXd theta = ldlt.solve(-acc.drift);
  // One step of iterative refinement.
  theta -= ldlt.solve(acc.gram * theta + acc.drift);
  return theta;
}

double minimal_score(const ExponentialFamily& family,
                     const Eigen::MatrixXd& samples,
                     const Eigen::VectorXd& theta) {
  if (theta.size() != family.dim)
    throw DimensionError("minimal_score: coefficient length mismatch");
  double total = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    total += theta.dot(family.drift_term(samples.row(i)));
  }
  return total / 2.0;
}

SandwichEstimate sandwich_covariance(const ExponentialFamily& family,
                                     const Eigen::MatrixXd& samples,
                                     const Eigen::VectorXd& theta) {
  const Eigen::Index n = samples.rows();
  if (n < 2) throw InvalidInput("sandwich_covariance needs n >= 2");
  if (theta.size() != family.dim)
    throw DimensionError("sandwich_covariance: coefficient length mismatch");

  const int d = family.dim;
  Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd scores(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = samples.row(i);
    const Eigen::MatrixXd g = family.gram_term(x);
    psi += g;
    scores.row(i) = (g * theta + family.drift_term(x)).transpose();
  }
  psi /= static_cast<double>(n);

  const Eigen::RowVectorXd mean = scores.colwise().mean();
  Eigen::MatrixXd centered = scores.rowwise() - mean;
  // Plug-in covariance with divisor n, not n-1.
  Eigen::MatrixXd h = centered.transpose() * centered / static_cast<double>(n);

  check_condition(psi, "sandwich_covariance");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(psi);
  Eigen::MatrixXd cov = ldlt.solve(h);
  cov = ldlt.solve(cov.transpose()).transpose();
  cov /= static_cast<double>(n);

  SandwichEstimate out;
  out.psi_hat = std::move(psi);
  out.h_hat = std::move(h);
  out.cov_theta = (cov + cov.transpose()) / 2.0;
  return out;
}

ExponentialFamily gaussian_concentration_family(const ModelSpace& space) {
  auto shared = std::make_shared<const ModelSpace>(space);
  ExponentialFamily family;
  family.dim = shared->dim();
  family.gram_term = [shared](const Eigen::VectorXd& x) {
    if (x.size() != shared->p())
      throw DimensionError("gram_term: observation length mismatch");
    const int d = shared->dim();
    Eigen::MatrixXd images(d, x.size());
    for (int u = 0; u < d; ++u)
      images.row(u) = (shared->generator(u).dense() * x).transpose();
    return Eigen::MatrixXd(images * images.transpose());
  };
  family.drift_term = [shared](const Eigen::VectorXd&) {
    return Eigen::VectorXd(-shared->trace_rhs());
  };
  return family;
}

ExponentialFamily gaussian_precision_1d() {
  ExponentialFamily family;
  family.dim = 1;
  family.gram_term = [](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g(1, 1);
    g(0, 0) = x(0) * x(0);
    return g;
  };
  family.drift_term = [](const Eigen::VectorXd&) {
    return Eigen::VectorXd::Constant(1, -1.0);
  };
  return family;
}

}  // namespace scorematch
