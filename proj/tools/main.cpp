#include <CLI11.hpp>
#include <string>

#include "scorematch/cli.hpp"

namespace cli = scorematch::cli;

namespace {

// CLI11 parses "auto" or a number for --lambda.
void add_lambda_option(CLI::App* cmd, std::string& raw) {
  cmd->add_option("--lambda", raw,
                  "penalty weight, or 'auto' for sqrt(p)loglog(np)/(2n)")
      ->default_val("auto");
}

std::optional<double> parse_lambda(const std::string& raw) {
  if (raw == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--lambda must be a number or 'auto'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Score matching estimation for Gaussian linear concentration "
               "models: fitting, existence diagnostics, penalized model "
               "search and lattice simulation experiments."};
  app.require_subcommand(1);

  cli::FitArgs fit;
  auto* fit_cmd = app.add_subcommand(
      "fit", "Fit a concentration model to a CSV dataset");
  fit_cmd->add_option("--data", fit.data_path, "CSV dataset, rows = observations")
      ->required();
  fit_cmd->add_option("--model", fit.model_path, "model JSON file")->required();
  fit_cmd->add_option("--method", fit.method, "sme | mle | auto")
      ->default_val("auto");
  fit_cmd->add_option("--center", fit.center, "center columns before fitting")
      ->default_val(true);
  fit_cmd->add_option("--out", fit.out_path, "output JSON path (default stdout)");

  cli::SearchArgs search;
  std::string search_lambda = "auto";
  auto* search_cmd = app.add_subcommand(
      "search", "Greedy penalized model search over uncoloured graphs");
  search_cmd->add_option("--data", search.data_path, "CSV dataset")->required();
  add_lambda_option(search_cmd, search_lambda);
  search_cmd->add_option("--center", search.center, "center columns")
      ->default_val(true);
  search_cmd->add_option("--out", search.out_path,
                         "output model JSON path (default stdout)");
  search_cmd->add_option("--trace", search.trace_path, "move trace TSV path");

  cli::EstimabilityArgs est;
  auto* est_cmd = app.add_subcommand(
      "estimability", "Dimension bound and randomized existence certificate");
  est_cmd->add_option("--model", est.model_path, "model JSON file")->required();
  est_cmd->add_option("--n", est.n, "number of observations")->required();
  est_cmd->add_option("--trials", est.trials, "random datasets to draw")
      ->default_val(3);
  est_cmd->add_option("--seed", est.seed, "rng seed")->default_val(0);

  cli::SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand(
      "simulate", "Sample from the square lattice concentration model");
  sim_cmd->add_option("--lattice-s", sim.lattice_s, "lattice side, p = s^2")
      ->required();
  sim_cmd->add_option("--n", sim.n, "rows to sample")->required();
  sim_cmd->add_option("--seed", sim.seed, "rng seed")->default_val(0);
  sim_cmd->add_option("--out", sim.out_path, "output CSV path (default stdout)");

  cli::ExperimentArgs exp;
  std::string exp_lambda = "auto";
  auto* exp_cmd = app.add_subcommand(
      "experiment",
      "Lattice recovery experiment: search on prefixes n = m*s^2 per trial");
  exp_cmd->add_option("--s", exp.s, "lattice side")->required();
  exp_cmd->add_option("--n-over-p", exp.n_over_p,
                      "comma-separated n/p multiples")
      ->delimiter(',');
  exp_cmd->add_option("--trials", exp.trials, "independent trials")
      ->default_val(20);
  exp_cmd->add_option("--seed", exp.seed, "rng seed")->default_val(0);
  add_lambda_option(exp_cmd, exp_lambda);
  exp_cmd->add_option("--out", exp.out_path, "output TSV path (default stdout)");

  cli::CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand(
      "compare",
      "Scaled Frobenius distance between the score matching and maximum "
      "likelihood estimates over growing prefixes");
  cmp_cmd->add_option("--data", cmp.data_path, "CSV dataset")->required();
  cmp_cmd->add_option("--model", cmp.model_path, "model JSON file")->required();
  cmp_cmd->add_option("--n-grid", cmp.n_grid, "comma-separated sample sizes")
      ->required()
      ->delimiter(',');
  cmp_cmd->add_option("--center", cmp.center, "center columns")
      ->default_val(true);
  cmp_cmd->add_option("--out", cmp.out_path, "output TSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kValidationError;
  }

  try {
    if (fit_cmd->parsed()) return cli::run_fit(fit);
    if (search_cmd->parsed()) {
      search.lambda = parse_lambda(search_lambda);
      return cli::run_search(search);
    }
    if (est_cmd->parsed()) return cli::run_estimability(est);
    if (sim_cmd->parsed()) return cli::run_simulate(sim);
    if (exp_cmd->parsed()) {
      exp.lambda = parse_lambda(exp_lambda);
      return cli::run_experiment(exp);
    }
    if (cmp_cmd->parsed()) return cli::run_compare(cmp);
  } catch (const CLI::Error& e) {
    return app.exit(e) == 0 ? 0 : cli::kValidationError;
  }
  return cli::kValidationError;
}
