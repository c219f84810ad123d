#include "scorematch/estimability.hpp"

#include <Eigen/SVD>
#include <algorithm>

#include "scorematch/rng.hpp"

namespace scorematch {

namespace detail {

SparseRows sparse_rows(const SymMatrix& g) {
  SparseRows sr;
  sr.p = g.dim();
  sr.rows.resize(sr.p);
  for (int i = 0; i < sr.p; ++i) {
    for (int j = 0; j < sr.p; ++j) {
      const double v = g(i, j);
      if (v != 0.0) sr.rows[i].emplace_back(j, v);
    }
  }
  return sr;
}

double gram_entry(const SymMatrix& w, const SparseRows& a,
                  const SparseRows& b) {
  // tr(A W B) = sum_i row_i(A)^T W row_i(B), iterated in a fixed order so
  // the value is a pure function of (W, A, B).
  double total = 0.0;
  for (int i = 0; i < a.p; ++i) {
    if (a.rows[i].empty() || b.rows[i].empty()) continue;
    for (const auto& [j, av] : a.rows[i])
      for (const auto& [k, bv] : b.rows[i]) total += av * bv * w(j, k);
  }
  return total;
}

}  // namespace detail

GramSystem build_gram(const ModelSpace& space, const SymMatrix& w, int n) {
  if (w.dim() != space.p())
    throw DimensionError("build_gram: W dimension does not match model space");
  if (n < 1) throw InvalidInput("build_gram: n must be positive");

  const int d = space.dim();
  std::vector<detail::SparseRows> rows;
  rows.reserve(d);
  for (int u = 0; u < d; ++u)
    rows.push_back(detail::sparse_rows(space.generator(u)));

  GramSystem sys;
  sys.n = n;
  sys.m.resize(d, d);
  for (int u = 0; u < d; ++u)
    for (int v = u; v < d; ++v) {
      const double entry = n * detail::gram_entry(w, rows[u], rows[v]);
      sys.m(u, v) = entry;
      sys.m(v, u) = entry;
    }
  sys.rhs = space.trace_rhs();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.m);
  const auto& sv = svd.singularValues();
  sys.largest_sv = sv(0);
  sys.smallest_sv = sv(d - 1);
  sys.condition_estimate =
      sys.smallest_sv > 0.0
          ? sys.largest_sv / sys.smallest_sv
          : std::numeric_limits<double>::infinity();
  sys.rank_estimate = 0;
  for (int k = 0; k < d; ++k)
    if (sv(k) > 1e-10 * sys.largest_sv) ++sys.rank_estimate;
  return sys;
}

bool dimension_bound_check(int d, int p, int n) {
  if (d < 1 || p < 1 || n < 1)
    throw InvalidInput("dimension_bound_check: arguments must be positive");
  const long long r = std::max(p - n, 0);
  const auto tri = [](long long k) { return k * (k + 1) / 2; };
  return d <= tri(p) - tri(r);
}

EstimabilityCheck check_estimability(const ModelSpace& space, int n,
                                     std::uint64_t seed, int trials) {
  if (n < 1) throw InvalidInput("check_estimability: n must be positive");
  if (trials < 1) throw InvalidInput("check_estimability: trials must be positive");

  const int p = space.p();
  const int d = space.dim();
  const auto tri = [](long long k) { return k * (k + 1) / 2; };
  const long long r = std::max(p - n, 0);

  EstimabilityCheck out;
  out.d = d;
  out.dimension_bound = tri(p) - tri(r);
  out.bound_ok = dimension_bound_check(d, p, n);
  out.trials = trials;

  const CounterRng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const CounterRng trial = rng.split(t);
    Eigen::MatrixXd x(n, p);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < p; ++j)
        x(i, j) = trial.normal(static_cast<std::uint64_t>(i) * p + j);
    const SymMatrix w =
        SymMatrix::from_dense(x.transpose() * x / static_cast<double>(n));
    const GramSystem sys = build_gram(space, w, n);
    const double ratio =
        sys.largest_sv > 0.0 ? sys.smallest_sv / sys.largest_sv : 0.0;
    out.best_min_sv_ratio = std::max(out.best_min_sv_ratio, ratio);
    if (ratio > 1e-10) {
      // One full-rank witness certifies almost-sure existence.
      out.estimable = true;
      return out;
    }
  }
  out.estimable = false;
  return out;
}

bool is_n_estimable(const ModelSpace& space, int n, std::uint64_t seed,
                    int trials) {
  return check_estimability(space, n, seed, trials).estimable;
}

}  // namespace scorematch
