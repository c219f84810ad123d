#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "scorematch/io.hpp"
#include "scorematch/rng.hpp"
#include "scorematch/search.hpp"
#include "scorematch/simulate.hpp"

using namespace scorematch;

namespace {

// Replays a trace: every evaluated candidate is refit from scratch through
// the public estimator and must reproduce the recorded objective.
void replay_trace(const SearchResult& res, const Eigen::MatrixXd& data,
                  bool center) {
  const int n = static_cast<int>(data.rows());
  const int p = static_cast<int>(data.cols());
  const SymMatrix w =
      scatter_matrix(center ? center_columns(data) : data);
  std::set<Edge> current(res.tree_edges.begin(), res.tree_edges.end());
  for (const MoveRecord& mv : res.trace) {
    std::set<Edge> candidate = current;
    if (mv.add)
      candidate.insert(mv.edge);
    else
      candidate.erase(mv.edge);
    const std::vector<Edge> edges(candidate.begin(), candidate.end());
    if (mv.estimable) {
      const ModelSpace space = ModelSpace::from_graph(uncoloured_graph(p, edges));
      const FitResult fit = sme_fit(space, w, n);
      const double j = penalized_objective(fit, n, res.lambda, space.dim());
      CHECK(std::abs(j - mv.j_after) <= 1e-9 * (1.0 + std::abs(j)));
    }
    if (mv.accepted) current = candidate;
  }
  const std::set<Edge> final_set(res.edges.begin(), res.edges.end());
  CHECK(current == final_set);
}

}  // namespace

TEST_CASE("penalized objective arithmetic") {
  FitResult fit;
  fit.j2 = -5 * 0.7 / 2.0;  // n tr(K)/2 with tr = 0.7, n = 5
  CHECK(penalized_objective(fit, 5, 0.1, 2) ==
        doctest::Approx(-0.15).epsilon(1e-12));
  CHECK(penalized_objective(fit, 5, 0.0, 2) ==
        doctest::Approx(-0.35).epsilon(1e-12));
}

TEST_CASE("saturated model objective at the identity scatter") {
  const ModelSpace full = ModelSpace::full(3);
  const FitResult fit = sme_fit(full, SymMatrix::identity(3), 10);
  CHECK(frobenius_norm(fit.K - SymMatrix::identity(3)) <= 1e-10);
  CHECK(penalized_objective(fit, 10, 0.1, 6) ==
        doctest::Approx(-0.9).epsilon(1e-10));
}

TEST_CASE("default penalty values") {
  // frozen against exact evaluation of sqrt(p) log log(np) / (2n)
  CHECK(default_lambda(160, 16) ==
        doctest::Approx(0.025752855801161935).epsilon(1e-12));
  CHECK(default_lambda(1, 4) ==
        doctest::Approx(0.32663425997828098).epsilon(1e-12));
  CHECK(default_lambda(320, 16) < default_lambda(160, 16));
  CHECK_THROWS_AS(default_lambda(1, 2), InvalidInput);  // np <= e
}

TEST_CASE("kruskal examples") {
  Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(3, 3);
  r2(0, 1) = r2(1, 0) = 0.9;
  r2(0, 2) = r2(2, 0) = 0.5;
  r2(1, 2) = r2(2, 1) = 0.1;
  const std::vector<Edge> expected = {{0, 1}, {0, 2}};
  CHECK(kruskal_tree_init(r2) == expected);

  Eigen::MatrixXd two = Eigen::MatrixXd::Zero(2, 2);
  two(0, 1) = two(1, 0) = 0.3;
  CHECK(kruskal_tree_init(two) == std::vector<Edge>{{0, 1}});

  CHECK(kruskal_tree_init(Eigen::MatrixXd::Zero(1, 1)).empty());
}

TEST_CASE("kruskal returns a spanning tree") {
  const CounterRng rng(71);
  for (int p : {4, 7, 10}) {
    Eigen::MatrixXd r2 = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j)
        r2(i, j) = r2(j, i) = rng.uniform(p * 100 + i * p + j);
    const auto tree = kruskal_tree_init(r2);
    CHECK(static_cast<int>(tree.size()) == p - 1);
    // connected and acyclic via union-find
    std::vector<int> parent(p);
    for (int i = 0; i < p; ++i) parent[i] = i;
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (Edge e : tree) {
      const int a = find(e.first), b = find(e.second);
      CHECK(a != b);
      parent[a] = b;
    }
  }
}

TEST_CASE("forward completes the four-cycle in most draws, then stops") {
  // at n = 100 the completion probability is only ~1/4 (the signal per edge
  // sits at the penalty's noise level); from n ~ 200 it is a clear majority
  const SymMatrix truth = lattice_concentration(2);
  const std::vector<Edge> cycle_edges = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  int completed = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd data = sample_gaussian(truth, 200, 1000 + seed);
    const Eigen::MatrixXd centered = center_columns(data);
    const SymMatrix cov = scatter_matrix(centered);
    GraphSearch gs(cov, squared_correlations(cov), 200,
                   default_lambda(200, 4), {});
    gs.init_tree();
    gs.forward();
    const std::set<Edge> present(gs.edges().begin(), gs.edges().end());
    if (std::all_of(cycle_edges.begin(), cycle_edges.end(),
                    [&](Edge e) { return present.count(e) > 0; }))
      ++completed;

    // literal rule: the phase ends right after the first rejection
    const SearchResult res = search(data);
    bool seen_reject = false;
    for (const MoveRecord& mv : res.trace) {
      if (mv.phase != SearchPhase::Forward) continue;
      CHECK_FALSE(seen_reject);
      if (!mv.accepted) seen_reject = true;
    }
  }
  CHECK(completed > 10);
}

TEST_CASE("forward leaves the graph alone when nothing improves") {
  // independent variables: no edge pays its penalty
  const Eigen::MatrixXd data =
      sample_gaussian(SymMatrix::identity(4), 400, 72);
  const SearchResult res = search(data);
  int forward_accepts = 0;
  for (const MoveRecord& mv : res.trace)
    if (mv.phase == SearchPhase::Forward && mv.accepted) ++forward_accepts;
  CHECK(forward_accepts == 0);
}

TEST_CASE("backward removes a spurious extra edge at large n") {
  const SymMatrix truth = lattice_concentration(2);
  const SearchConfig cfg;
  int removed = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd data = sample_gaussian(truth, 800, 2000 + seed);
    const Eigen::MatrixXd centered = center_columns(data);
    const SymMatrix cov = scatter_matrix(centered);
    GraphSearch gs(cov, squared_correlations(cov), 800,
                   default_lambda(800, 4), cfg);
    // true support plus a spurious chord
    gs.init_edges({{0, 1}, {0, 2}, {1, 3}, {2, 3}, {0, 3}});
    gs.backward();
    const auto [missing, extra] = edge_errors(truth, gs.edges());
    if (extra == 0 && missing == 0) ++removed;
  }
  CHECK(removed > 10);
}

TEST_CASE("backward stops after one idle sweep and logs every candidate") {
  const SymMatrix truth = lattice_concentration(2);
  const Eigen::MatrixXd data = sample_gaussian(truth, 300, 73);
  const SearchResult res = search(data);
  for (const MoveRecord& mv : res.trace)
    if (mv.phase == SearchPhase::Backward && mv.estimable)
      CHECK(std::isfinite(mv.j_after));
}

TEST_CASE("accepted moves strictly decrease the objective") {
  const SymMatrix truth = lattice_concentration(3);
  const Eigen::MatrixXd data = sample_gaussian(truth, 90, 74);
  const SearchConfig cfg;
  const SearchResult res = search(data, cfg);
  double j = res.tree_objective;
  for (const MoveRecord& mv : res.trace) {
    CHECK(mv.j_before == j);
    if (mv.accepted) {
      CHECK(mv.j_after < j - cfg.improvement_tol);
      j = mv.j_after;
    }
  }
  CHECK(j == res.final_objective);
}

TEST_CASE("trace replays against the public estimator") {
  const SymMatrix truth = lattice_concentration(2);
  const Eigen::MatrixXd data = sample_gaussian(truth, 150, 75);
  const SearchResult res = search(data);
  replay_trace(res, data, true);
}

TEST_CASE("no candidate graph is evaluated twice within a phase") {
  const SymMatrix truth = lattice_concentration(3);
  const Eigen::MatrixXd data = sample_gaussian(truth, 60, 76);
  const SearchResult res = search(data);

  std::set<std::vector<Edge>> seen_forward, seen_backward;
  std::set<Edge> current(res.tree_edges.begin(), res.tree_edges.end());
  for (const MoveRecord& mv : res.trace) {
    std::set<Edge> candidate = current;
    if (mv.add)
      candidate.insert(mv.edge);
    else
      candidate.erase(mv.edge);
    std::vector<Edge> key(candidate.begin(), candidate.end());
    auto& seen =
        mv.phase == SearchPhase::Forward ? seen_forward : seen_backward;
    CHECK(seen.insert(key).second);
    if (mv.accepted) current = candidate;
  }
}

TEST_CASE("search output is invariant to row order") {
  const SymMatrix truth = lattice_concentration(2);
  const Eigen::MatrixXd data = sample_gaussian(truth, 120, 77);
  Eigen::MatrixXd reversed(data.rows(), data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    reversed.row(i) = data.row(data.rows() - 1 - i);
  const SearchResult a = search(data);
  const SearchResult b = search(reversed);
  CHECK(a.edges == b.edges);
}

TEST_CASE("incremental and rebuilt gram systems trace identically") {
  const SymMatrix truth = lattice_concentration(2);
  const Eigen::MatrixXd data = sample_gaussian(truth, 64, 78);
  SearchConfig fast;
  fast.incremental_gram = true;
  SearchConfig slow;
  slow.incremental_gram = false;
  const SearchResult a = search(data, fast);
  const SearchResult b = search(data, slow);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    // bitwise: the two paths must produce identical doubles
    CHECK(a.trace[k].j_before == b.trace[k].j_before);
    CHECK(a.trace[k].j_after == b.trace[k].j_after);
    CHECK(a.trace[k].edge == b.trace[k].edge);
    CHECK(a.trace[k].accepted == b.trace[k].accepted);
  }
  CHECK(a.edges == b.edges);
  CHECK(a.final_objective == b.final_objective);
}

TEST_CASE("two correlated variables beat the empty graph") {
  Eigen::MatrixXd k2(2, 2);
  k2 << 1.0, 0.8, 0.8, 1.0;
  const Eigen::MatrixXd data =
      sample_gaussian(SymMatrix::from_dense(k2), 300, 79);
  const SearchResult res = search(data);
  CHECK(res.edges == std::vector<Edge>{{0, 1}});

  // direct objective comparison of the two candidate models
  const int n = 300;
  const SymMatrix w = scatter_matrix(center_columns(data));
  const FitResult with_edge =
      sme_fit(ModelSpace::from_graph(uncoloured_graph(2, {{0, 1}})), w, n);
  const FitResult without =
      sme_fit(ModelSpace::diagonal(2), w, n);
  const double lam = default_lambda(n, 2);
  CHECK(penalized_objective(with_edge, n, lam, 3) <
        penalized_objective(without, n, lam, 2));
}

TEST_CASE("zero-variance columns are rejected by name") {
  Eigen::MatrixXd data(5, 3);
  data.setRandom();
  data.col(2).setConstant(4.2);
  try {
    search(data);
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("column 2") != std::string::npos);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(search(Eigen::MatrixXd::Random(5, 1)), InvalidInput);
  SearchConfig cfg;
  cfg.lambda = -0.5;
  CHECK_THROWS_AS(search(Eigen::MatrixXd::Random(5, 3), cfg), InvalidInput);
}
