#include "scorematch/search.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "scorematch/io.hpp"

namespace scorematch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Dsu {
  explicit Dsu(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<int> parent;
};

}  // namespace

double penalized_objective(const FitResult& fit, int n, double lambda, int d) {
  if (n < 1) throw InvalidInput("penalized_objective: n must be positive");
  return fit.j2 / n + lambda * d;
}

double default_lambda(int n, int p) {
  if (n < 1 || p < 1) throw InvalidInput("default_lambda: n, p must be positive");
  const double np = static_cast<double>(n) * p;
  const double inner = std::log(np);
  if (!(inner > 1.0))
    throw InvalidInput("default_lambda requires np > e");
  return std::sqrt(static_cast<double>(p)) * std::log(inner) / (2.0 * n);
}

std::vector<Edge> kruskal_tree_init(const Eigen::MatrixXd& r2) {
  if (r2.rows() != r2.cols()) throw DimensionError("kruskal: matrix not square");
  const int p = static_cast<int>(r2.rows());
  if (p < 2) return {};

  std::vector<Edge> candidates;
  candidates.reserve(p * (p - 1) / 2);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) candidates.emplace_back(i, j);
  std::sort(candidates.begin(), candidates.end(), [&](Edge a, Edge b) {
    const double wa = r2(a.first, a.second);
    const double wb = r2(b.first, b.second);
    if (wa != wb) return wa > wb;
    return a < b;
  });

  Dsu dsu(p);
  std::vector<Edge> tree;
  tree.reserve(p - 1);
  for (Edge e : candidates) {
    if (dsu.unite(e.first, e.second)) {
      tree.push_back(e);
      if (static_cast<int>(tree.size()) == p - 1) break;
    }
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

GraphSearch::GraphSearch(const SymMatrix& w, const Eigen::MatrixXd& r2, int n,
                         double lambda, const SearchConfig& cfg)
    : w_(w), r2_(r2), p_(w.dim()), n_(n), lambda_(lambda), cfg_(cfg) {
  if (r2_.rows() != p_ || r2_.cols() != p_)
    throw DimensionError("GraphSearch: R2 dimension does not match W");
  if (n_ < 1) throw InvalidInput("GraphSearch: n must be positive");
}

// tr(e_a W e_b) for unit vertex ({i,i}) and edge generators. Single
// additions per branch, so the value does not depend on argument order;
// combined with the canonical generator ordering this makes cached and
// rebuilt Gram entries bitwise identical.
double GraphSearch::edge_entry(Edge a, Edge b) const {
  const bool va = a.first == a.second;
  const bool vb = b.first == b.second;
  if (va && vb) return a.first == b.first ? w_(a.first, a.first) : 0.0;
  if (va) {
    return (a.first == b.first || a.first == b.second)
               ? w_(b.first, b.second)
               : 0.0;
  }
  if (vb) {
    return (b.first == a.first || b.first == a.second)
               ? w_(a.first, a.second)
               : 0.0;
  }
  double total = 0.0;
  if (a.first == b.first) total += w_(a.second, b.second);
  if (a.first == b.second) total += w_(a.second, b.first);
  if (a.second == b.first) total += w_(a.first, b.second);
  if (a.second == b.second) total += w_(a.first, b.first);
  return total;
}

Eigen::MatrixXd GraphSearch::gram_for(const std::vector<Edge>& edges) const {
  const int d = p_ + static_cast<int>(edges.size());
  auto desc = [&](int u) -> Edge {
    return u < p_ ? Edge{u, u} : edges[u - p_];
  };
  Eigen::MatrixXd m(d, d);
  for (int u = 0; u < d; ++u)
    for (int v = u; v < d; ++v) {
      const double entry = edge_entry(desc(u), desc(v));
      m(u, v) = entry;
      m(v, u) = entry;
    }
  return m;
}

Eigen::MatrixXd GraphSearch::insert_edge_gram(
    const std::vector<Edge>& old_edges, const Eigen::MatrixXd& old_m, Edge e,
    int pos) const {
  const int old_d = static_cast<int>(old_m.rows());
  const int k = p_ + pos;
  Eigen::MatrixXd m(old_d + 1, old_d + 1);
  // Old rows/cols >= k shift to index+1; row/col k is filled below.
  m.topLeftCorner(k, k) = old_m.topLeftCorner(k, k);
  m.block(k + 1, 0, old_d - k, k) = old_m.block(k, 0, old_d - k, k);
  m.block(0, k + 1, k, old_d - k) = old_m.block(0, k, k, old_d - k);
  m.block(k + 1, k + 1, old_d - k, old_d - k) =
      old_m.block(k, k, old_d - k, old_d - k);

  auto desc = [&](int u) -> Edge {
    if (u < p_) return Edge{u, u};
    const int idx = u - p_;
    return idx < pos ? old_edges[idx] : old_edges[idx - 1];
  };
  for (int u = 0; u <= old_d; ++u) {
    const double entry = u == k ? edge_entry(e, e)
                                : edge_entry(u < k ? desc(u) : e,
                                             u < k ? e : desc(u));
    m(u, k) = entry;
    m(k, u) = entry;
  }
  return m;
}

Eigen::MatrixXd GraphSearch::remove_edge_gram(const Eigen::MatrixXd& old_m,
                                              int pos) const {
  const int old_d = static_cast<int>(old_m.rows());
  const int k = p_ + pos;
  Eigen::MatrixXd m(old_d - 1, old_d - 1);
  m.topLeftCorner(k, k) = old_m.topLeftCorner(k, k);
  m.topRightCorner(k, old_d - 1 - k) =
      old_m.block(0, k + 1, k, old_d - 1 - k);
  m.bottomLeftCorner(old_d - 1 - k, k) =
      old_m.block(k + 1, 0, old_d - 1 - k, k);
  m.bottomRightCorner(old_d - 1 - k, old_d - 1 - k) =
      old_m.block(k + 1, k + 1, old_d - 1 - k, old_d - 1 - k);
  return m;
}

namespace {

// Solves the score matching system of a candidate graph and evaluates the
// penalized objective. Shared by the incremental and rebuild paths so the
// two produce bitwise identical traces.
struct SolveOutcome {
  bool estimable = false;
  double j = kNaN;
  Eigen::VectorXd theta;
};

SolveOutcome solve_candidate(const Eigen::MatrixXd& m, int p, int n_edges,
                             double lambda) {
  SolveOutcome out;
  const int d = static_cast<int>(m.rows());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d);
  rhs.head(p).setOnes();

  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) return out;
  if (ldlt.rcond() < 1e-12) return out;
  Eigen::VectorXd theta = ldlt.solve(rhs);
  theta += ldlt.solve(rhs - m * theta);
  if (!theta.allFinite()) return out;
  const double residual = (m * theta - rhs).cwiseAbs().maxCoeff();
  if (!(residual <= 1e-8)) return out;

  out.estimable = true;
  out.theta = std::move(theta);
  out.j = -out.theta.dot(rhs) / 2.0 + lambda * (p + n_edges);
  return out;
}

}  // namespace

void GraphSearch::init_tree() {
  init_edges(kruskal_tree_init(r2_));
  tree_edges_ = edges_;
  tree_j_ = current_j_;
}

void GraphSearch::init_edges(const std::vector<Edge>& edges) {
  std::vector<Edge> sorted = edges;
  for (auto& e : sorted)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(sorted.begin(), sorted.end());

  Eigen::MatrixXd m = gram_for(sorted);
  ++fits_;
  SolveOutcome out =
      solve_candidate(m, p_, static_cast<int>(sorted.size()), lambda_);
  if (!out.estimable) {
    throw NotEstimableError("initial graph is not estimable", -1, 0.0, 0.0);
  }
  edges_ = std::move(sorted);
  m_ = std::move(m);
  current_j_ = out.j;
  if (tree_edges_.empty()) {
    tree_edges_ = edges_;
    tree_j_ = current_j_;
  }
}

void GraphSearch::forward() {
  std::vector<Edge> absent;
  for (int i = 0; i < p_; ++i)
    for (int j = i + 1; j < p_; ++j) {
      const Edge e{i, j};
      if (!std::binary_search(edges_.begin(), edges_.end(), e))
        absent.push_back(e);
    }
  std::sort(absent.begin(), absent.end(), [&](Edge a, Edge b) {
    const double wa = r2_(a.first, a.second);
    const double wb = r2_(b.first, b.second);
    if (wa != wb) return wa > wb;
    return a < b;
  });

  int failures = 0;
  for (Edge e : absent) {
    const int pos = static_cast<int>(
        std::lower_bound(edges_.begin(), edges_.end(), e) - edges_.begin());
    Eigen::MatrixXd m = cfg_.incremental_gram
                            ? insert_edge_gram(edges_, m_, e, pos)
                            : Eigen::MatrixXd();
    std::vector<Edge> trial = edges_;
    trial.insert(trial.begin() + pos, e);
    if (!cfg_.incremental_gram) m = gram_for(trial);

    ++fits_;
    SolveOutcome out =
        solve_candidate(m, p_, static_cast<int>(trial.size()), lambda_);

    MoveRecord rec;
    rec.phase = SearchPhase::Forward;
    rec.edge = e;
    rec.add = true;
    rec.j_before = current_j_;
    rec.j_after = out.j;
    rec.estimable = out.estimable;
    rec.accepted = out.estimable && out.j < current_j_ - cfg_.improvement_tol;
    trace_.push_back(rec);

    if (rec.accepted) {
      edges_ = std::move(trial);
      m_ = std::move(m);
      current_j_ = out.j;
      failures = 0;
    } else {
      if (++failures >= cfg_.forward_patience) break;
    }
  }
}

void GraphSearch::backward() {
  // Memo of candidate edge sets already evaluated in this phase; the spec
  // forbids evaluating the same graph twice within a phase, and repeated
  // sweeps would otherwise re-test unchanged removals.
  std::map<std::vector<Edge>, bool> seen;
  bool removed_any = true;
  while (removed_any) {
    ++sweeps_;
    removed_any = false;
    std::vector<Edge> sweep_order = edges_;
    std::sort(sweep_order.begin(), sweep_order.end(), [&](Edge a, Edge b) {
      const double wa = r2_(a.first, a.second);
      const double wb = r2_(b.first, b.second);
      if (wa != wb) return wa < wb;
      return a < b;
    });

    for (Edge e : sweep_order) {
      const auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
      if (it == edges_.end() || *it != e) continue;  // already removed
      const int pos = static_cast<int>(it - edges_.begin());

      std::vector<Edge> trial = edges_;
      trial.erase(trial.begin() + pos);
      if (auto found = seen.find(trial); found != seen.end()) continue;

      Eigen::MatrixXd m = cfg_.incremental_gram ? remove_edge_gram(m_, pos)
                                                : gram_for(trial);
      ++fits_;
      SolveOutcome out =
          solve_candidate(m, p_, static_cast<int>(trial.size()), lambda_);

      MoveRecord rec;
      rec.phase = SearchPhase::Backward;
      rec.edge = e;
      rec.add = false;
      rec.j_before = current_j_;
      rec.j_after = out.j;
      rec.estimable = out.estimable;
      rec.accepted = out.estimable && out.j < current_j_ - cfg_.improvement_tol;
      trace_.push_back(rec);

      if (rec.accepted) {
        edges_ = std::move(trial);
        m_ = std::move(m);
        current_j_ = out.j;
        removed_any = true;
      } else {
        seen.emplace(std::move(trial), true);
      }
    }
    if (!cfg_.backward_fixed_point) break;
  }
}

SearchResult GraphSearch::result() const {
  SearchResult res;
  res.edges = edges_;
  res.tree_edges = tree_edges_;
  res.lambda = lambda_;
  res.tree_objective = tree_j_;
  res.final_objective = current_j_;
  res.trace = trace_;
  res.fits_evaluated = fits_;
  res.backward_sweeps = sweeps_;
  return res;
}

SearchResult search(const Eigen::MatrixXd& data, const SearchConfig& cfg) {
  const int n = static_cast<int>(data.rows());
  const int p = static_cast<int>(data.cols());
  if (n < 1) throw InvalidInput("search: need at least one observation");
  if (p < 2) throw InvalidInput("search: need at least two variables");

  const Eigen::MatrixXd centered = center_columns(data);
  // Correlations are centering-invariant, so R2 always comes from the
  // centered scatter; W honours the configuration.
  const SymMatrix cov = scatter_matrix(centered);
  const Eigen::MatrixXd r2 = squared_correlations(cov);
  const SymMatrix w = cfg.center ? cov : scatter_matrix(data);

  const double lambda = cfg.lambda ? *cfg.lambda : default_lambda(n, p);
  if (lambda < 0.0) throw InvalidInput("search: lambda must be >= 0");

  GraphSearch gs(w, r2, n, lambda, cfg);
  gs.init_tree();
  gs.forward();
  gs.backward();
  return gs.result();
}

}  // namespace scorematch
