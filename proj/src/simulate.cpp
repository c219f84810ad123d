#include "scorematch/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "scorematch/io.hpp"
#include "scorematch/rng.hpp"

namespace scorematch {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

SymMatrix lattice_concentration(int s) {
  if (s < 2) throw InvalidInput("lattice requires s >= 2");
  const int p = s * s;
  SymMatrix probe(p);
  std::vector<double> packed(static_cast<std::size_t>(p) * (p + 1) / 2, 0.0);
  for (int i = 1; i <= p; ++i) {
    packed[probe.offset(i - 1, i - 1)] = 1.0;
    if (i + s <= p) packed[probe.offset(i - 1, i + s - 1)] = 0.2;
    if (i % s != 0 && i + 1 <= p) packed[probe.offset(i - 1, i)] = 0.2;
  }
  SymMatrix k(p, std::move(packed));
  if (!SpdFactor::compute(k).is_pd())
    throw Error("lattice concentration matrix is not positive definite");
  return k;
}

Eigen::MatrixXd sample_gaussian(const SymMatrix& k, int n,
                                std::uint64_t seed) {
  if (n < 1) throw InvalidInput("sample_gaussian: n must be positive");
  const SpdFactor factor = SpdFactor::compute(k);
  if (!factor.is_pd())
    throw InvalidInput("sample_gaussian: K is not positive definite "
                       "(leading minor " +
                       std::to_string(factor.failing_minor()) + ")");
  const int p = k.dim();
  const CounterRng rng(seed);
  Eigen::MatrixXd z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j)
      z(i, j) = rng.normal(static_cast<std::uint64_t>(i) * p + j);
  // Rows solve C^T x = z with K = C C^T, so Cov(x) = K^-1.
  const auto& l = factor.matrix_l();
  Eigen::MatrixXd x =
      l.triangularView<Eigen::Lower>().transpose().solve(z.transpose());
  return x.transpose();
}

std::pair<int, int> edge_errors(const SymMatrix& true_k,
                                const std::vector<Edge>& edges) {
  const int p = true_k.dim();
  std::set<Edge> fitted;
  for (Edge e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
    if (e.first < 0 || e.second >= p)
      throw InvalidInput("edge_errors: edge out of range");
    fitted.insert(e);
  }
  int missing = 0, extra = 0;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      const bool true_edge = true_k(i, j) != 0.0;
      const bool in_fit = fitted.count({i, j}) > 0;
      if (true_edge && !in_fit) ++missing;
      if (!true_edge && in_fit) ++extra;
    }
  return {missing, extra};
}

std::vector<CurvePoint> sme_vs_mle_curve(const ModelSpace& space,
                                         const Eigen::MatrixXd& data,
                                         const std::vector<int>& n_grid,
                                         bool center) {
  if (n_grid.empty()) throw InvalidInput("sme_vs_mle_curve: empty grid");
  std::vector<CurvePoint> curve;
  curve.reserve(n_grid.size());
  for (int n : n_grid) {
    CurvePoint pt;
    pt.n = n;
    if (n < 1 || n > data.rows()) {
      pt.status = "not_enough_rows";
      curve.push_back(pt);
      continue;
    }
    const Eigen::MatrixXd prefix = data.topRows(n);
    const SymMatrix w =
        scatter_matrix(center ? center_columns(prefix) : prefix);
    // tight tolerance and a generous cap: the sqrt(n) scaling of the curve
    // amplifies solver error, and small prefixes need the extra iterations
    MleOptions opts;
    opts.max_iter = 500;
    opts.grad_tol = 1e-11;
    try {
      const FitResult sme = sme_fit(space, w, n);
      const FitResult mle = mle_fit(space, w, n, opts);
      if (!mle.converged) {
        pt.status = "non_convergence";
      } else {
        pt.scaled_frob = std::sqrt(static_cast<double>(n)) *
                         frobenius_norm(sme.K - mle.K);
        pt.status = "ok";
      }
    } catch (const NotEstimableError&) {
      pt.status = "not_estimable";
    } catch (const MleNonexistentError&) {
      pt.status = "non_convergence";
    }
    curve.push_back(pt);
  }
  return curve;
}

std::vector<ExperimentRow> run_experiment(int s,
                                          const std::vector<int>& n_over_p,
                                          int trials, std::uint64_t seed,
                                          const SearchConfig& cfg) {
  if (trials < 1) throw InvalidInput("run_experiment: trials must be positive");
  if (n_over_p.empty()) throw InvalidInput("run_experiment: empty n grid");
  for (int m : n_over_p)
    if (m < 1) throw InvalidInput("run_experiment: n/p multiples must be >= 1");

  const SymMatrix true_k = lattice_concentration(s);
  const int p = true_k.dim();
  const int max_mult = *std::max_element(n_over_p.begin(), n_over_p.end());
  const CounterRng rng(seed);

  std::vector<ExperimentRow> rows;
  rows.reserve(static_cast<std::size_t>(trials) * n_over_p.size());
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = rng.split(t).seed();
    const Eigen::MatrixXd data = sample_gaussian(true_k, max_mult * p,
                                                 trial_seed);
    for (int mult : n_over_p) {
      ExperimentRow row;
      row.seed = trial_seed;
      row.s = s;
      row.p = p;
      row.n = mult * p;

      const Eigen::MatrixXd prefix = data.topRows(row.n);
      const auto t_search = std::chrono::steady_clock::now();
      const SearchResult found = search(prefix, cfg);
      row.search_seconds = seconds_since(t_search);
      row.fits_evaluated = found.fits_evaluated;
      std::tie(row.missing, row.extra) = edge_errors(true_k, found.edges);

      const auto t_fit = std::chrono::steady_clock::now();
      try {
        const ModelSpace space =
            ModelSpace::from_graph(uncoloured_graph(p, found.edges));
        const SymMatrix w = scatter_matrix(
            cfg.center ? center_columns(prefix) : prefix);
        const FitResult sme = sme_fit(space, w, row.n);
        const FitResult mle = mle_fit(space, w, row.n);
        if (mle.converged) {
          row.frob_sme_mle = std::sqrt(static_cast<double>(row.n)) *
                             frobenius_norm(sme.K - mle.K);
        }
      } catch (const Error&) {
        // kept as NaN; the selected graph is always estimable, so only the
        // likelihood solver can fail here
      }
      row.fit_seconds = seconds_since(t_fit);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_experiment_tsv(std::ostream& out,
                          const std::vector<ExperimentRow>& rows) {
  out << "seed\ts\tp\tn\tmissing\textra\tfrob_sme_mle\tfits_evaluated\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g", r.frob_sme_mle);
    out << r.seed << '\t' << r.s << '\t' << r.p << '\t' << r.n << '\t'
        << r.missing << '\t' << r.extra << '\t' << buf << '\t'
        << r.fits_evaluated << '\n';
  }
}

}  // namespace scorematch
