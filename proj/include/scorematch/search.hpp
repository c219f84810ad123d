#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <vector>

#include "scorematch/fit.hpp"
#include "scorematch/model_space.hpp"

namespace scorematch {

struct SearchConfig {
  /// Penalty weight; empty selects default_lambda(n, p).
  std::optional<double> lambda;
  bool center = true;
  /// A move is accepted only when it decreases the objective by more than
  /// this, so floating noise is never mistaken for improvement.
  double improvement_tol = 1e-12;
  /// Consecutive non-improving candidates tolerated before the forward
  /// phase stops. 1 is the literal stop-at-first-failure rule.
  int forward_patience = 1;
  /// Sweep the backward phase until a full sweep removes nothing; false
  /// does a single sweep.
  bool backward_fixed_point = true;
  /// Update the Gram system by one row/column per move instead of
  /// rebuilding it; both modes produce bitwise identical traces.
  bool incremental_gram = true;
};

enum class SearchPhase { Forward, Backward };

struct MoveRecord {
  SearchPhase phase = SearchPhase::Forward;
  Edge edge{0, 0};
  bool add = true;
  double j_before = std::numeric_limits<double>::quiet_NaN();
  double j_after = std::numeric_limits<double>::quiet_NaN();
  bool accepted = false;
  /// False when the candidate fit was singular; such candidates count as
  /// non-improving.
  bool estimable = true;
};

struct SearchResult {
  std::vector<Edge> edges;
  std::vector<Edge> tree_edges;
  double lambda = 0.0;
  double tree_objective = std::numeric_limits<double>::quiet_NaN();
  double final_objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<MoveRecord> trace;
  int fits_evaluated = 0;
  int backward_sweeps = 0;
};

/// J_lambda = J_2(K)/n + lambda d = -tr(K)/2 + lambda d. Valid (and cheap)
/// whether or not K is positive definite.
double penalized_objective(const FitResult& fit, int n, double lambda, int d);

/// sqrt(p) log(log(np)) / (2n), natural logarithms. Requires np > e.
double default_lambda(int n, int p);

/// Maximum-weight spanning tree of the complete graph under squared
/// correlation weights (Kruskal; ties broken lexicographically). The
/// diagonal of r2 is ignored. Returns p-1 edges, or none when p < 2.
std::vector<Edge> kruskal_tree_init(const Eigen::MatrixXd& r2);

/// Greedy penalized model search over uncoloured graphs, exposed stepwise:
/// tree initialization, forward edge addition in decreasing squared
/// correlation order, backward removal sweeps in increasing order. The
/// greedy order defines the semantics, so the loop is sequential.
class GraphSearch {
 public:
  GraphSearch(const SymMatrix& w, const Eigen::MatrixXd& r2, int n,
              double lambda, const SearchConfig& cfg = {});

  /// Kruskal tree start.
  void init_tree();

  /// Arbitrary starting edge set (must be estimable).
  void init_edges(const std::vector<Edge>& edges);

  void forward();
  void backward();

  double objective() const { return current_j_; }
  const std::vector<Edge>& edges() const { return edges_; }

  SearchResult result() const;

 private:
  Eigen::MatrixXd gram_for(const std::vector<Edge>& edges) const;
  Eigen::MatrixXd insert_edge_gram(const std::vector<Edge>& old_edges,
                                   const Eigen::MatrixXd& old_m,
                                   Edge e, int pos) const;
  Eigen::MatrixXd remove_edge_gram(const Eigen::MatrixXd& old_m,
                                   int pos) const;
  double edge_entry(Edge a, Edge b) const;

  SymMatrix w_;
  Eigen::MatrixXd r2_;
  int p_ = 0;
  int n_ = 0;
  double lambda_ = 0.0;
  SearchConfig cfg_;

  std::vector<Edge> edges_;
  Eigen::MatrixXd m_;  // cached Gram of the current graph
  double current_j_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<Edge> tree_edges_;
  double tree_j_ = std::numeric_limits<double>::quiet_NaN();
  std::vector<MoveRecord> trace_;
  mutable int fits_ = 0;
  int sweeps_ = 0;
};

/// Full pipeline: center (if configured), form W and squared correlations,
/// Kruskal tree, forward, backward. Deterministic given inputs. Throws
/// InvalidInput naming the column when a data column has zero variance.
SearchResult search(const Eigen::MatrixXd& data, const SearchConfig& cfg = {});

}  // namespace scorematch
