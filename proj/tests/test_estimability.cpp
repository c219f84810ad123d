#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "scorematch/estimability.hpp"
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

// Random orthogonal generator list containing the identity, d members total.
ModelSpace random_space_with_identity(int p, int d, const CounterRng& rng) {
  std::vector<SymMatrix> raw = {SymMatrix::identity(p)};
  for (int k = 1; k < d + 3 && static_cast<int>(raw.size()) < d + 3; ++k)
    raw.push_back(random_sym(p, rng, 100 * k));
  auto basis = gram_schmidt(raw);
  basis.resize(std::min<std::size_t>(basis.size(), d));
  return ModelSpace::from_generators(basis);
}

}  // namespace

TEST_CASE("gram system hand examples") {
  // basis {E00, E11, E01+E10} with a single observation x = (1, 0)
  const SymMatrix e00 = SymMatrix(2, {1, 0, 0});
  const SymMatrix e11 = SymMatrix(2, {0, 0, 1});
  const SymMatrix e01 = SymMatrix(2, {0, 1, 0});
  const ModelSpace space = ModelSpace::from_generators({e00, e11, e01});
  const SymMatrix w = SymMatrix(2, {1, 0, 0});

  const GramSystem sys = build_gram(space, w, 1);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
  expected(0, 0) = 1;
  expected(2, 2) = 1;
  CHECK((sys.m - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sys.rank_estimate == 2);
  CHECK(sys.rhs[0] == 1.0);
  CHECK(sys.rhs[1] == 1.0);
  CHECK(sys.rhs[2] == 0.0);
}

TEST_CASE("gram system with identity scatter is the generator gram") {
  const ModelSpace space = ModelSpace::from_graph(lattice_graph(2));
  const GramSystem sys = build_gram(space, SymMatrix::identity(4), 5);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(8, 8);
  for (int u = 0; u < 8; ++u)
    expected(u, u) = 5.0 * space.generator_sq_norm(u);
  CHECK((sys.m - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("jensen space single-observation gram and its null vector") {
  const ModelSpace space = ModelSpace::jensen_space();
  Eigen::VectorXd x(4);
  x << 1, 0, 0, 0;
  const SymMatrix w = SymMatrix::from_dense(x * x.transpose());
  const GramSystem sys = build_gram(space, w, 1);

  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
  expected(0, 0) = 1;
  expected(2, 2) = 1;
  expected(3, 3) = 1;
  CHECK((sys.m - expected).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXd null_vec(4);
  null_vec << 0, 1, 0, 0;
  CHECK((sys.m * null_vec).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sys.rank_estimate == 3);
}

TEST_CASE("jensen null vector formula annihilates the gram for random x") {
  const ModelSpace space = ModelSpace::jensen_space();
  const CounterRng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(4);
    for (int j = 0; j < 4; ++j) x[j] = rng.split(trial).normal(j);
    const SymMatrix w = SymMatrix::from_dense(x * x.transpose());
    const GramSystem sys = build_gram(space, w, 1);

    Eigen::VectorXd v(4);
    v << x[1] * x[1] + x[3] * x[3], x[0] * x[0] + x[2] * x[2],
        -x[0] * x[1] - x[2] * x[3], x[1] * x[2] - x[0] * x[3];
    const double scale = sys.m.cwiseAbs().maxCoeff() * v.cwiseAbs().maxCoeff();
    CHECK((sys.m * v).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + scale));
    CHECK(sys.smallest_sv <= 1e-10 * sys.largest_sv);
  }
}

TEST_CASE("gram systems are symmetric positive semidefinite") {
  const CounterRng rng(40);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 5;
    Eigen::MatrixXd x(n, 4);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 4; ++j)
        x(i, j) = rng.split(trial).normal(static_cast<std::uint64_t>(i) * 4 + j);
    const SymMatrix w =
        SymMatrix::from_dense(x.transpose() * x / static_cast<double>(n));
    const GramSystem sys =
        build_gram(ModelSpace::from_graph(lattice_graph(2)), w, n);
    CHECK((sys.m - sys.m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sys.m).eigenvalues();
    CHECK(ev.minCoeff() >= -1e-10 * std::max(1.0, ev.maxCoeff()));
  }
}

TEST_CASE("dimension bound") {
  CHECK_FALSE(dimension_bound_check(8, 4, 2));  // four-cycle: 8 > 10 - 3
  CHECK(dimension_bound_check(4, 4, 1));        // 10 - 6 = 4, bound met
  CHECK(dimension_bound_check(10, 4, 4));       // n >= p: full T_p allowed
  CHECK(dimension_bound_check(10, 4, 9));
  CHECK_THROWS_AS(dimension_bound_check(0, 4, 1), InvalidInput);
}

TEST_CASE("randomized estimability verdicts") {
  const ModelSpace cycle = ModelSpace::from_graph(lattice_graph(2));
  CHECK_FALSE(is_n_estimable(cycle, 2, 7));
  CHECK(is_n_estimable(cycle, 3, 7));
  CHECK_FALSE(is_n_estimable(ModelSpace::jensen_space(), 1, 7));

  const EstimabilityCheck failed = check_estimability(cycle, 2, 7);
  CHECK(failed.best_min_sv_ratio <= 1e-10);
  CHECK_FALSE(failed.bound_ok);
  CHECK(failed.dimension_bound == 7);

  // the jensen space passes the bound yet is never 1-estimable
  const EstimabilityCheck jensen = check_estimability(ModelSpace::jensen_space(), 1, 7);
  CHECK(jensen.bound_ok);
  CHECK_FALSE(jensen.estimable);
}

TEST_CASE("bound failure implies non-estimability on tested instances") {
  const CounterRng rng(42);
  for (int p = 3; p <= 5; ++p) {
    for (int n = 1; n < p; ++n) {
      const ModelSpace space =
          random_space_with_identity(p, p * (p + 1) / 2, rng.split(p * 10 + n));
      if (!dimension_bound_check(space.dim(), p, n))
        CHECK_FALSE(is_n_estimable(space, n, 99, 2));
    }
  }
}

TEST_CASE("estimability is monotone in generator subsets and in n") {
  const CounterRng rng(43);
  const ModelSpace space = random_space_with_identity(4, 7, rng);
  REQUIRE(is_n_estimable(space, 3, 5));

  for (int trial = 0; trial < 10; ++trial) {
    // random generator subset
    std::vector<SymMatrix> subset;
    for (int u = 0; u < space.dim(); ++u)
      if (rng.split(trial).bits(u) % 2 == 0) subset.push_back(space.generator(u));
    if (subset.empty()) continue;
    const ModelSpace sub = ModelSpace::from_generators(subset);
    CHECK(is_n_estimable(sub, 3, 5));
  }

  CHECK(is_n_estimable(space, 4, 5));  // estimable at n implies n+1
}

TEST_CASE("estimability is invariant under congruence") {
  const CounterRng rng(44);
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = rng.normal(4 * i + j);
  a += 4.0 * Eigen::MatrixXd::Identity(4, 4);  // comfortably invertible
  REQUIRE(std::abs(a.determinant()) > 1e-3);

  const auto congruent = [&](const ModelSpace& space) {
    std::vector<SymMatrix> mapped;
    for (int u = 0; u < space.dim(); ++u)
      mapped.push_back(SymMatrix::from_dense(
          a * space.generator(u).dense() * a.transpose()));
    return ModelSpace::from_generators(gram_schmidt(mapped));
  };

  const ModelSpace cycle = ModelSpace::from_graph(lattice_graph(2));
  const ModelSpace jensen = ModelSpace::jensen_space();
  const ModelSpace diag = ModelSpace::diagonal(4);

  CHECK(is_n_estimable(congruent(cycle), 3, 11) ==
        is_n_estimable(cycle, 3, 11));
  CHECK(is_n_estimable(congruent(cycle), 2, 11) ==
        is_n_estimable(cycle, 2, 11));
  CHECK(is_n_estimable(congruent(jensen), 1, 11) ==
        is_n_estimable(jensen, 1, 11));
  CHECK(is_n_estimable(congruent(diag), 1, 11) ==
        is_n_estimable(diag, 1, 11));
}

TEST_CASE("spaces containing the identity are estimable at n = p-1") {
  const CounterRng rng(45);
  for (int p = 3; p <= 5; ++p) {
    for (int trial = 0; trial < 5; ++trial) {
      const int d_max = p * (p + 1) / 2 - 1;
      const int d = 2 + static_cast<int>(
                            rng.split(p * 100 + trial).bits(0) %
                            static_cast<std::uint64_t>(d_max - 1));
      const ModelSpace space =
          random_space_with_identity(p, d, rng.split(p * 100 + trial));
      REQUIRE(space.dim() <= d_max);
      CHECK(is_n_estimable(space, p - 1, 17));
    }
  }
}
