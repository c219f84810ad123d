#include "scorematch/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace scorematch {

namespace {

Edge normalized(Edge e) {
  if (e.first > e.second) std::swap(e.first, e.second);
  return e;
}

}  // namespace

std::vector<Edge> ColouredGraph::edges() const {
  std::vector<Edge> all;
  for (const auto& cls : edge_classes)
    all.insert(all.end(), cls.begin(), cls.end());
  std::sort(all.begin(), all.end());
  return all;
}

ColouredGraph make_coloured_graph(int p,
                                  std::vector<std::vector<int>> vertex_classes,
                                  std::vector<std::vector<Edge>> edge_classes) {
  if (p < 1) throw InvalidInput("graph needs at least one vertex");
  std::vector<bool> seen(p, false);
  int covered = 0;
  for (const auto& cls : vertex_classes) {
    if (cls.empty()) throw InvalidInput("empty vertex colour class");
    for (int v : cls) {
      if (v < 0 || v >= p)
        throw InvalidInput("vertex " + std::to_string(v) + " out of range");
      if (seen[v])
        throw InvalidInput("vertex " + std::to_string(v) +
                           " appears in two colour classes");
      seen[v] = true;
      ++covered;
    }
  }
  if (covered != p)
    throw InvalidInput("vertex colour classes do not cover all vertices");

  std::set<Edge> seen_edges;
  for (auto& cls : edge_classes) {
    if (cls.empty()) throw InvalidInput("empty edge colour class");
    for (auto& e : cls) {
      e = normalized(e);
      if (e.first < 0 || e.second >= p || e.first == e.second)
        throw InvalidInput("invalid edge (" + std::to_string(e.first) + "," +
                           std::to_string(e.second) + ")");
      if (!seen_edges.insert(e).second)
        throw InvalidInput("duplicate edge (" + std::to_string(e.first) + "," +
                           std::to_string(e.second) + ")");
    }
  }
  ColouredGraph g;
  g.p = p;
  g.vertex_classes = std::move(vertex_classes);
  g.edge_classes = std::move(edge_classes);
  return g;
}

ColouredGraph uncoloured_graph(int p, const std::vector<Edge>& edges) {
  std::vector<std::vector<int>> vcls(p);
  for (int v = 0; v < p; ++v) vcls[v] = {v};
  std::vector<Edge> sorted_edges;
  sorted_edges.reserve(edges.size());
  for (Edge e : edges) sorted_edges.push_back(normalized(e));
  std::sort(sorted_edges.begin(), sorted_edges.end());
  std::vector<std::vector<Edge>> ecls;
  ecls.reserve(sorted_edges.size());
  for (Edge e : sorted_edges) ecls.push_back({e});
  return make_coloured_graph(p, std::move(vcls), std::move(ecls));
}

ColouredGraph lattice_graph(int s) {
  if (s < 2) throw InvalidInput("lattice requires s >= 2");
  const int p = s * s;
  std::vector<Edge> edges;
  // 1-based construction: j = i+s, and j = i+1 when i is not a multiple of s.
  for (int i = 1; i <= p; ++i) {
    if (i + s <= p) edges.emplace_back(i - 1, i + s - 1);
    if (i % s != 0 && i + 1 <= p) edges.emplace_back(i - 1, i);
  }
  return uncoloured_graph(p, edges);
}

ColouredGraph circular_ar_graph(int p, int q) {
  if (p < 1 || q < 1) throw InvalidInput("circular AR requires p >= 1, q >= 1");
  if (2 * q >= p)
    throw InvalidInput("circular AR requires q < p/2; distance classes "
                       "collide at q = " + std::to_string(q));
  std::vector<std::vector<int>> vcls(1);
  for (int v = 0; v < p; ++v) vcls[0].push_back(v);
  std::vector<std::vector<Edge>> ecls(q);
  for (int k = 1; k <= q; ++k) {
    for (int v = 0; v < p; ++v)
      ecls[k - 1].push_back(normalized({v, (v + k) % p}));
    std::sort(ecls[k - 1].begin(), ecls[k - 1].end());
  }
  return make_coloured_graph(p, std::move(vcls), std::move(ecls));
}

ColouredGraph mathmarks_graph() {
  // Columns: 0 mechanics, 1 vectors, 2 algebra, 3 analysis, 4 statistics.
  return make_coloured_graph(
      5, {{2}, {1, 3}, {0, 4}},
      {{{1, 2}, {2, 4}}, {{2, 3}, {3, 4}}, {{0, 1}, {0, 2}}});
}

ModelSpace ModelSpace::from_generators(std::vector<SymMatrix> generators,
                                       std::vector<std::string> labels) {
  if (generators.empty()) throw InvalidInput("model space needs generators");
  const int p = generators.front().dim();
  const int d = static_cast<int>(generators.size());
  if (d > p * (p + 1) / 2)
    throw InvalidInput("more generators than dim Sym(p)");
  if (!labels.empty() && static_cast<int>(labels.size()) != d)
    throw InvalidInput("label count does not match generator count");

  std::vector<double> norms(d);
  for (int u = 0; u < d; ++u) {
    if (generators[u].dim() != p)
      throw DimensionError("generators have mixed dimensions");
    norms[u] = trace_inner(generators[u], generators[u]);
    if (!(norms[u] > 0.0)) throw InvalidInput("zero generator at index " +
                                              std::to_string(u));
  }
  for (int u = 0; u < d; ++u) {
    for (int v = u + 1; v < d; ++v) {
      const double ip = trace_inner(generators[u], generators[v]);
      if (std::abs(ip) > 1e-10 * std::sqrt(norms[u] * norms[v]))
        throw InvalidInput("generators " + std::to_string(u) + " and " +
                           std::to_string(v) + " are not orthogonal");
    }
  }

  ModelSpace space;
  space.p_ = p;
  space.generators_ = std::move(generators);
  space.sq_norms_ = std::move(norms);
  if (labels.empty()) {
    labels.reserve(d);
    for (int u = 0; u < d; ++u) labels.push_back("g" + std::to_string(u));
  }
  space.labels_ = std::move(labels);
  space.trace_rhs_.resize(d);
  for (int u = 0; u < d; ++u) space.trace_rhs_[u] = space.generators_[u].trace();
  return space;
}

ModelSpace ModelSpace::from_graph(const ColouredGraph& g) {
  // Re-validate so spaces built from hand-rolled structs stay sound.
  ColouredGraph checked =
      make_coloured_graph(g.p, g.vertex_classes, g.edge_classes);
  const int p = checked.p;
  std::vector<SymMatrix> gens;
  std::vector<std::string> labels;
  int idx = 0;
  for (const auto& cls : checked.vertex_classes) {
    SymMatrix e(p);
    std::vector<double> packed(static_cast<std::size_t>(p) * (p + 1) / 2, 0.0);
    for (int v : cls) packed[e.offset(v, v)] = 1.0;
    gens.emplace_back(p, std::move(packed));
    labels.push_back("v" + std::to_string(idx++));
  }
  idx = 0;
  for (const auto& cls : checked.edge_classes) {
    SymMatrix e(p);
    std::vector<double> packed(static_cast<std::size_t>(p) * (p + 1) / 2, 0.0);
    for (Edge ed : cls) packed[e.offset(ed.first, ed.second)] = 1.0;
    gens.emplace_back(p, std::move(packed));
    labels.push_back("e" + std::to_string(idx++));
  }
  return from_generators(std::move(gens), std::move(labels));
}

ModelSpace ModelSpace::full(int p) {
  std::vector<SymMatrix> gens;
  std::vector<std::string> labels;
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      SymMatrix e(p);
      std::vector<double> packed(static_cast<std::size_t>(p) * (p + 1) / 2, 0.0);
      packed[e.offset(i, j)] = 1.0;
      gens.emplace_back(p, std::move(packed));
      labels.push_back(i == j ? "E" + std::to_string(i)
                              : "E" + std::to_string(i) + "-" + std::to_string(j));
    }
  }
  return from_generators(std::move(gens), std::move(labels));
}

ModelSpace ModelSpace::diagonal(int p) {
  std::vector<SymMatrix> gens;
  std::vector<std::string> labels;
  for (int i = 0; i < p; ++i) {
    SymMatrix e(p);
    std::vector<double> packed(static_cast<std::size_t>(p) * (p + 1) / 2, 0.0);
    packed[e.offset(i, i)] = 1.0;
    gens.emplace_back(p, std::move(packed));
    labels.push_back("d" + std::to_string(i));
  }
  return from_generators(std::move(gens), std::move(labels));
}

ModelSpace ModelSpace::jensen_space() {
  auto gen = [](std::vector<std::pair<Edge, double>> entries) {
    SymMatrix probe(4);
    std::vector<double> packed(10, 0.0);
    for (auto& [pos, val] : entries) packed[probe.offset(pos.first, pos.second)] = val;
    return SymMatrix(4, std::move(packed));
  };
  std::vector<SymMatrix> gens = {
      gen({{{0, 0}, 1.0}, {{2, 2}, 1.0}}),                    // a
      gen({{{1, 1}, 1.0}, {{3, 3}, 1.0}}),                    // b
      gen({{{0, 1}, 1.0}, {{2, 3}, 1.0}}),                    // c
      gen({{{0, 3}, 1.0}, {{1, 2}, -1.0}}),                   // f
  };
  return from_generators(std::move(gens), {"a", "b", "c", "f"});
}

SymMatrix ModelSpace::project(const SymMatrix& m) const {
  return to_matrix(coordinates(m));
}

Eigen::VectorXd ModelSpace::coordinates(const SymMatrix& m) const {
  if (m.dim() != p_) throw DimensionError("coordinates: dimension mismatch");
  Eigen::VectorXd c(dim());
  for (int u = 0; u < dim(); ++u)
    c[u] = trace_inner(generators_[u], m) / sq_norms_[u];
  return c;
}

SymMatrix ModelSpace::to_matrix(const Eigen::VectorXd& theta) const {
  if (theta.size() != dim())
    throw DimensionError("to_matrix: coefficient length " +
                         std::to_string(theta.size()) + " != dim " +
                         std::to_string(dim()));
  std::vector<double> packed(static_cast<std::size_t>(p_) * (p_ + 1) / 2, 0.0);
  for (int u = 0; u < dim(); ++u) {
    const auto& g = generators_[u].packed();
    const double t = theta[u];
    if (t == 0.0) continue;
    for (std::size_t k = 0; k < packed.size(); ++k) packed[k] += t * g[k];
  }
  return SymMatrix(p_, std::move(packed));
}

Eigen::VectorXd ModelSpace::from_matrix(const SymMatrix& k) const {
  Eigen::VectorXd c = coordinates(k);
  const double residual = frobenius_norm(k - to_matrix(c));
  const double scale = frobenius_norm(k);
  if (residual > 1e-10 * (1.0 + scale)) {
    throw NotInSpanError("matrix lies outside the model space (residual " +
                             std::to_string(residual) + ")",
                         residual);
  }
  return c;
}

bool ModelSpace::is_jordan_subalgebra() const {
  for (int u = 0; u < dim(); ++u) {
    for (int v = u; v < dim(); ++v) {
      const SymMatrix prod = jordan_product(generators_[u], generators_[v]);
      const double res = frobenius_norm(prod - project(prod));
      if (res > 1e-10 * (1.0 + frobenius_norm(prod))) return false;
    }
  }
  return true;
}

bool ModelSpace::contains_identity() const {
  const SymMatrix id = SymMatrix::identity(p_);
  return frobenius_norm(id - project(id)) <= 1e-10 * (1.0 + std::sqrt(p_));
}

std::vector<SymMatrix> gram_schmidt(const std::vector<SymMatrix>& mats,
                                    double drop_tol) {
  std::vector<SymMatrix> basis;
  double scale = 0.0;
  for (const auto& m : mats) scale = std::max(scale, frobenius_norm(m));
  for (const auto& m : mats) {
    SymMatrix r = m;
    for (const auto& b : basis) {
      const double c = trace_inner(b, r) / trace_inner(b, b);
      r = r - b * c;
    }
    if (frobenius_norm(r) > drop_tol * (1.0 + scale)) basis.push_back(r);
  }
  return basis;
}

}  // namespace scorematch
