#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "scorematch/model_space.hpp"
#include "scorematch/rng.hpp"

using namespace scorematch;

namespace {

SymMatrix random_sym(int p, const CounterRng& rng, std::uint64_t base) {
  Eigen::MatrixXd m(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      m(i, j) = rng.normal(base + static_cast<std::uint64_t>(i) * p + j);
  return SymMatrix::from_dense(m);
}

}  // namespace

TEST_CASE("graph basis dimensions") {
  // four-cycle: 4 singleton vertex classes + 4 singleton edge classes
  const ModelSpace cycle = ModelSpace::from_graph(lattice_graph(2));
  CHECK(cycle.dim() == 8);

  const ModelSpace marks = ModelSpace::from_graph(mathmarks_graph());
  CHECK(marks.p() == 5);
  CHECK(marks.dim() == 6);

  const ColouredGraph single = make_coloured_graph(3, {{0, 1, 2}}, {});
  const ModelSpace span_i = ModelSpace::from_graph(single);
  CHECK(span_i.dim() == 1);
  CHECK(frobenius_norm(span_i.generator(0) - SymMatrix::identity(3)) == 0.0);
}

TEST_CASE("vertex class generators sum to the identity") {
  for (const ColouredGraph& g :
       {lattice_graph(3), circular_ar_graph(7, 2), mathmarks_graph()}) {
    const ModelSpace space = ModelSpace::from_graph(g);
    SymMatrix sum(space.p());
    int vertex_gens = 0;
    for (int u = 0; u < space.dim(); ++u) {
      if (space.labels()[u][0] == 'v') {
        sum = sum + space.generator(u);
        ++vertex_gens;
      }
    }
    CHECK(vertex_gens == static_cast<int>(g.vertex_classes.size()));
    CHECK(frobenius_norm(sum - SymMatrix::identity(space.p())) == 0.0);
  }
}

TEST_CASE("projection examples") {
  const CounterRng rng(21);
  const SymMatrix m = random_sym(3, rng, 0);
  const ModelSpace full = ModelSpace::full(3);
  CHECK(frobenius_norm(full.project(m) - m) <= 1e-14);

  const ModelSpace diag = ModelSpace::diagonal(2);
  Eigen::MatrixXd md(2, 2);
  md << 5, 1, 1, 2;
  const SymMatrix projected = diag.project(SymMatrix::from_dense(md));
  Eigen::MatrixXd expect(2, 2);
  expect << 5, 0, 0, 2;
  CHECK(frobenius_norm(projected - SymMatrix::from_dense(expect)) == 0.0);

  const ModelSpace marks = ModelSpace::from_graph(mathmarks_graph());
  const SymMatrix id5 = SymMatrix::identity(5);
  CHECK(frobenius_norm(marks.project(id5) - id5) == 0.0);
  CHECK(marks.contains_identity());
}

TEST_CASE("projection is idempotent and Pythagorean") {
  const CounterRng rng(22);
  const ModelSpace space = ModelSpace::from_graph(lattice_graph(2));
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix m = random_sym(4, rng.split(trial), 0);
    const SymMatrix pm = space.project(m);
    CHECK(frobenius_norm(space.project(pm) - pm) <=
          1e-12 * (1.0 + frobenius_norm(pm)));

    const double whole = trace_inner(m, m);
    const double parts = trace_inner(pm, pm) + trace_inner(m - pm, m - pm);
    CHECK(std::abs(whole - parts) <= 1e-10 * (1.0 + std::abs(whole)));

    // residual orthogonal to every generator
    for (int u = 0; u < space.dim(); ++u)
      CHECK(std::abs(trace_inner(m - pm, space.generator(u))) <= 1e-12);
  }
}

TEST_CASE("coefficient round trips") {
  const ModelSpace diag = ModelSpace::diagonal(2);
  Eigen::VectorXd theta(2);
  theta << 0.2, 0.5;
  const SymMatrix k = diag.to_matrix(theta);
  CHECK(k(0, 0) == 0.2);
  CHECK(k(1, 1) == 0.5);
  CHECK(k(0, 1) == 0.0);

  CHECK(frobenius_norm(diag.to_matrix(Eigen::VectorXd::Zero(2))) == 0.0);

  const CounterRng rng(23);
  for (const ModelSpace& space :
       {ModelSpace::from_graph(mathmarks_graph()), ModelSpace::jensen_space(),
        ModelSpace::full(3)}) {
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd t(space.dim());
      for (int u = 0; u < space.dim(); ++u)
        t[u] = rng.split(trial).normal(u);
      const Eigen::VectorXd back = space.from_matrix(space.to_matrix(t));
      CHECK((back - t).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("from_matrix rejects matrices outside the span") {
  const ModelSpace diag = ModelSpace::diagonal(2);
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 1, 1;
  CHECK_THROWS_AS(diag.from_matrix(SymMatrix::from_dense(m)), NotInSpanError);
  try {
    diag.from_matrix(SymMatrix::from_dense(m));
  } catch (const NotInSpanError& e) {
    CHECK(e.residual > 1.0);  // off-diagonal mass sqrt(2)
  }
}

TEST_CASE("lattice graphs") {
  const ColouredGraph four = lattice_graph(2);
  CHECK(four.p == 4);
  const std::vector<Edge> expected = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  CHECK(four.edges() == expected);

  // independent enumeration oracle for s = 3: vertical pairs (i, i+3) and
  // horizontal pairs within each row of the 3x3 grid
  std::set<Edge> oracle;
  for (int i = 0; i < 9; ++i) {
    if (i + 3 < 9) oracle.insert({i, i + 3});
    if (i % 3 != 2) oracle.insert({i, i + 1});
  }
  const auto got = lattice_graph(3).edges();
  CHECK(got.size() == 12);
  CHECK(std::set<Edge>(got.begin(), got.end()) == oracle);

  CHECK(lattice_graph(4).edges().size() == 24);
  CHECK(lattice_graph(4).p == 16);
  CHECK_THROWS_AS(lattice_graph(1), InvalidInput);
}

TEST_CASE("circular AR graphs") {
  const ColouredGraph ar = circular_ar_graph(7, 2);
  CHECK(ar.vertex_classes.size() == 1);
  CHECK(ar.edge_classes.size() == 2);
  CHECK(ar.edge_classes[0].size() == 7);
  CHECK(ar.edge_classes[1].size() == 7);
  CHECK(ModelSpace::from_graph(ar).dim() == 3);

  const ColouredGraph ring = circular_ar_graph(5, 1);
  CHECK(ring.vertex_classes.size() == 1);
  CHECK(ring.edge_classes.size() == 1);
  CHECK(ring.edge_classes[0].size() == 5);

  CHECK_THROWS_AS(circular_ar_graph(6, 3), InvalidInput);
}

TEST_CASE("jordan subalgebra detection") {
  CHECK(ModelSpace::diagonal(3).is_jordan_subalgebra());
  CHECK(ModelSpace::full(3).is_jordan_subalgebra());
  CHECK(ModelSpace::jensen_space().is_jordan_subalgebra());
  CHECK_FALSE(ModelSpace::from_graph(lattice_graph(2)).is_jordan_subalgebra());

  // symmetric circulants with every distance class present are closed;
  // dropping a distance class breaks closure
  CHECK(ModelSpace::from_graph(circular_ar_graph(7, 3)).is_jordan_subalgebra());
  CHECK_FALSE(
      ModelSpace::from_graph(circular_ar_graph(7, 2)).is_jordan_subalgebra());
}

TEST_CASE("cycle cross-edge product leaves the space") {
  // consecutive edge generators multiply into the missing chord
  const ModelSpace cycle = ModelSpace::from_graph(
      uncoloured_graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}));
  SymMatrix e01(4), e12(4);
  {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, 4);
    a(0, 1) = a(1, 0) = 1;
    e01 = SymMatrix::from_dense(a);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(4, 4);
    b(1, 2) = b(2, 1) = 1;
    e12 = SymMatrix::from_dense(b);
  }
  const SymMatrix prod = jordan_product(e01, e12);
  CHECK(prod(0, 2) == 0.5);
  CHECK(frobenius_norm(cycle.project(prod)) == 0.0);
  CHECK(frobenius_norm(prod - cycle.project(prod)) > 0.1);
}

TEST_CASE("jordan projection commutes with multiplication by members") {
  const CounterRng rng(24);
  for (const ModelSpace& space :
       {ModelSpace::jensen_space(), ModelSpace::diagonal(4)}) {
    REQUIRE(space.is_jordan_subalgebra());
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd t(space.dim());
      for (int u = 0; u < space.dim(); ++u) t[u] = rng.split(trial).normal(u);
      const SymMatrix a = space.to_matrix(t);
      const SymMatrix b = random_sym(space.p(), rng.split(trial), 500);
      const SymMatrix lhs = space.project(jordan_product(a, b));
      const SymMatrix rhs = jordan_product(a, space.project(b));
      CHECK(frobenius_norm(lhs - rhs) <= 1e-10 * (1.0 + frobenius_norm(rhs)));
    }
  }
}

TEST_CASE("generator list validation") {
  const SymMatrix id2 = SymMatrix::identity(2);
  const SymMatrix e00 = SymMatrix::from_dense(
      (Eigen::MatrixXd(2, 2) << 1, 0, 0, 0).finished());
  CHECK_THROWS_AS(ModelSpace::from_generators({id2, e00}), InvalidInput);
  CHECK_THROWS_AS(ModelSpace::from_generators({SymMatrix(2)}), InvalidInput);
  CHECK_THROWS_AS(ModelSpace::from_generators({id2}, {"a", "b"}), InvalidInput);
  CHECK_THROWS_AS(ModelSpace::from_generators({}), InvalidInput);

  // d > dim Sym(p) is impossible for an orthogonal list, so the guard fires
  // via the count check before orthogonality
  std::vector<SymMatrix> too_many(4, SymMatrix::identity(1));
  CHECK_THROWS_AS(ModelSpace::from_generators(too_many), InvalidInput);
}

TEST_CASE("partition validation") {
  CHECK_THROWS_AS(make_coloured_graph(3, {{0, 1}}, {}), InvalidInput);
  CHECK_THROWS_AS(make_coloured_graph(3, {{0, 1}, {1, 2}}, {}), InvalidInput);
  CHECK_THROWS_AS(make_coloured_graph(3, {{0, 1, 2}, {}}, {}), InvalidInput);
  CHECK_THROWS_AS(make_coloured_graph(3, {{0, 1, 3}}, {}), InvalidInput);
  CHECK_THROWS_AS(
      make_coloured_graph(3, {{0, 1, 2}}, {{{0, 1}}, {{1, 0}}}), InvalidInput);
  CHECK_THROWS_AS(make_coloured_graph(3, {{0, 1, 2}}, {{{1, 1}}}), InvalidInput);
  CHECK_THROWS_AS(make_coloured_graph(3, {{0, 1, 2}}, {{}}), InvalidInput);
}

TEST_CASE("gram schmidt produces an orthogonal basis of the span") {
  const CounterRng rng(25);
  std::vector<SymMatrix> mats;
  for (int k = 0; k < 4; ++k) mats.push_back(random_sym(3, rng, 100 * k));
  mats.push_back(mats[0] + mats[1]);  // dependent member gets dropped
  const auto basis = gram_schmidt(mats);
  CHECK(basis.size() == 4);
  for (std::size_t u = 0; u < basis.size(); ++u)
    for (std::size_t v = u + 1; v < basis.size(); ++v)
      CHECK(std::abs(trace_inner(basis[u], basis[v])) <= 1e-8);
  CHECK_NOTHROW(ModelSpace::from_generators(basis));
}
