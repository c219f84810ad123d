#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scorematch::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kValidationError = 2;
inline constexpr int kNotEstimable = 3;
inline constexpr int kNonConvergence = 4;

struct FitArgs {
  std::string data_path;
  std::string model_path;
  std::string method = "auto";  // sme | mle | auto
  bool center = true;
  std::string out_path;  // empty = stdout
};

struct SearchArgs {
  std::string data_path;
  std::optional<double> lambda;  // empty = auto
  bool center = true;
  std::string out_path;
  std::string trace_path;
};

struct EstimabilityArgs {
  std::string model_path;
  int n = 1;
  int trials = 3;
  std::uint64_t seed = 0;
};

struct SimulateArgs {
  int lattice_s = 2;
  int n = 100;
  std::uint64_t seed = 0;
  std::string out_path;
};

struct ExperimentArgs {
  int s = 2;
  std::vector<int> n_over_p = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int trials = 20;
  std::uint64_t seed = 0;
  std::optional<double> lambda;
  std::string out_path;
};

struct CompareArgs {
  std::string data_path;
  std::string model_path;
  std::vector<int> n_grid;
  bool center = true;
  std::string out_path;
};

int run_fit(const FitArgs& args);
int run_search(const SearchArgs& args);
int run_estimability(const EstimabilityArgs& args);
int run_simulate(const SimulateArgs& args);
int run_experiment(const ExperimentArgs& args);
int run_compare(const CompareArgs& args);

}  // namespace scorematch::cli
