#pragma once

#include <string>
#include <utility>
#include <vector>

#include "scorematch/sym_matrix.hpp"

namespace scorematch {

using Edge = std::pair<int, int>;

/// Vertex and edge colour classes defining a symmetry-constrained
/// concentration model. Vertex classes partition {0..p-1}; edge classes
/// partition a set of undirected edges (stored with i < j).
struct ColouredGraph {
  int p = 0;
  std::vector<std::vector<int>> vertex_classes;
  std::vector<std::vector<Edge>> edge_classes;

  /// All edges across classes, sorted.
  std::vector<Edge> edges() const;
};

/// Validates partitions and normalizes edges to i < j.
ColouredGraph make_coloured_graph(int p,
                                  std::vector<std::vector<int>> vertex_classes,
                                  std::vector<std::vector<Edge>> edge_classes);

/// Graph with every vertex and edge in its own colour class.
ColouredGraph uncoloured_graph(int p, const std::vector<Edge>& edges);

/// Square lattice on p = s^2 vertices, all classes singletons. Built from
/// the 1-based rule: j = i+s, or j = i+1 when i is not a multiple of s;
/// vertices are exposed 0-based. Edge count is 2s(s-1).
ColouredGraph lattice_graph(int s);

/// Circular autoregressive model of order q on a ring of p vertices: one
/// vertex class and one edge class per circular distance 1..q. Requires
/// q < p/2 so distance classes do not collide.
ColouredGraph circular_ar_graph(int p, int q);

/// Symmetry model for the five math exam subjects (columns ordered
/// mechanics, vectors, algebra, analysis, statistics): three vertex colour
/// classes and three edge colour classes.
ColouredGraph mathmarks_graph();

/// Linear subspace L of Sym(p) spanned by pairwise orthogonal generators.
/// Immutable after construction; all operations are pure.
class ModelSpace {
 public:
  /// Generators must be pairwise orthogonal under the trace inner product
  /// (relative tolerance 1e-10) and nonzero. Non-orthogonal lists are
  /// rejected, not orthogonalized, so coefficients always refer to the
  /// caller's own generators.
  static ModelSpace from_generators(std::vector<SymMatrix> generators,
                                    std::vector<std::string> labels = {});

  /// One 0/1 diagonal generator per vertex class and one symmetric 0/1
  /// generator per edge class; d = |V-classes| + |E-classes|.
  static ModelSpace from_graph(const ColouredGraph& g);

  static ModelSpace full(int p);
  static ModelSpace diagonal(int p);

  /// The 4-dimensional Jordan subalgebra of Sym(4) studied by Jensen (1988),
  /// with generators labelled a, b, c, f:
  ///   [a  c  0  f]
  ///   [c  b -f  0]
  ///   [0 -f  a  c]
  ///   [f  0  c  b]
  /// Its score matching system is singular for a single observation even
  /// though the dimension bound holds, and the MLE fails to exist as well.
  static ModelSpace jensen_space();

  int p() const { return p_; }
  int dim() const { return static_cast<int>(generators_.size()); }
  const SymMatrix& generator(int u) const { return generators_[u]; }
  const std::vector<SymMatrix>& generators() const { return generators_; }
  const std::vector<std::string>& labels() const { return labels_; }
  double generator_sq_norm(int u) const { return sq_norms_[u]; }

  /// tr(e^u) for every generator; the right-hand side of the score
  /// matching equations.
  const Eigen::VectorXd& trace_rhs() const { return trace_rhs_; }

  /// Orthogonal projection onto L.
  SymMatrix project(const SymMatrix& m) const;

  /// Coordinates of the projection of m (no membership check).
  Eigen::VectorXd coordinates(const SymMatrix& m) const;

  /// Linear combination sum_u theta_u e^u.
  SymMatrix to_matrix(const Eigen::VectorXd& theta) const;

  /// Inverse of to_matrix on L; throws NotInSpanError when the projection
  /// residual exceeds 1e-10 relative.
  Eigen::VectorXd from_matrix(const SymMatrix& k) const;

  /// True when every pairwise Jordan product of generators stays in L
  /// (residual <= 1e-10 * (1 + ||e^u o e^v||)).
  bool is_jordan_subalgebra() const;

  /// project(I) == I within 1e-10.
  bool contains_identity() const;

 private:
  ModelSpace() = default;

  int p_ = 0;
  std::vector<SymMatrix> generators_;
  std::vector<std::string> labels_;
  std::vector<double> sq_norms_;
  Eigen::VectorXd trace_rhs_;
};

/// Modified Gram-Schmidt in Sym(p) under the trace inner product; members
/// with relative norm below drop_tol are dropped. Explicit utility for
/// callers who do want an orthogonal basis of a span.
std::vector<SymMatrix> gram_schmidt(const std::vector<SymMatrix>& mats,
                                    double drop_tol = 1e-10);

}  // namespace scorematch
