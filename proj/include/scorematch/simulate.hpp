#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "scorematch/model_space.hpp"
#include "scorematch/search.hpp"

namespace scorematch {

/// Ground-truth lattice concentration matrix on p = s^2 vertices: unit
/// diagonal, 0.2 on lattice-neighbour pairs. Diagonally dominant, hence
/// positive definite (verified at construction).
SymMatrix lattice_concentration(int s);

/// n i.i.d. rows from N(0, K^-1): z ~ N(0, I), solve C^T x = z with
/// K = C C^T. Deterministic per (K, n, seed).
Eigen::MatrixXd sample_gaussian(const SymMatrix& k, int n, std::uint64_t seed);

/// (missing, extra) of a fitted edge set against the support of the true
/// concentration matrix: missing counts true nonzero off-diagonal pairs
/// absent from the set, extra counts fitted edges whose true entry is zero.
std::pair<int, int> edge_errors(const SymMatrix& true_k,
                                const std::vector<Edge>& edges);

struct CurvePoint {
  int n = 0;
  double scaled_frob = std::numeric_limits<double>::quiet_NaN();
  std::string status;  // "ok", "not_estimable", "non_convergence"
};

/// sqrt(n) ||K_sme - K_mle||_F fitted on the first n rows for each n in the
/// grid (prefix subsampling, matching a growing-n design). Estimator
/// failures are recorded per grid point, not fatal.
std::vector<CurvePoint> sme_vs_mle_curve(const ModelSpace& space,
                                         const Eigen::MatrixXd& data,
                                         const std::vector<int>& n_grid,
                                         bool center = true);

struct ExperimentRow {
  std::uint64_t seed = 0;
  int s = 0;
  int p = 0;
  int n = 0;
  int missing = 0;
  int extra = 0;
  double frob_sme_mle = std::numeric_limits<double>::quiet_NaN();
  int fits_evaluated = 0;
  double search_seconds = 0.0;
  double fit_seconds = 0.0;
};

/// Lattice recovery experiment: per trial, simulate 10 s^2 (or max grid
/// multiple) rows from the lattice model and run the search on each prefix
/// n = m s^2, recording edge errors and the scaled Frobenius distance
/// between the two estimators on the selected graph. Trials derive
/// independent sub-seeds, so reports are reproducible and mergeable in
/// trial order.
std::vector<ExperimentRow> run_experiment(int s,
                                          const std::vector<int>& n_over_p,
                                          int trials, std::uint64_t seed,
                                          const SearchConfig& cfg = {});

/// One row per (trial, n): seed, s, p, n, missing, extra, frob_sme_mle,
/// fits_evaluated.
void write_experiment_tsv(std::ostream& out,
                          const std::vector<ExperimentRow>& rows);

}  // namespace scorematch
