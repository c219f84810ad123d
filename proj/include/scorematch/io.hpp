#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "scorematch/model_space.hpp"

namespace scorematch {

struct Dataset {
  Eigen::MatrixXd rows;               // observations x variables
  std::vector<std::string> columns;   // empty when the file had no header
};

/// Comma-delimited, rectangular, all cells finite reals; a single leading
/// header row is detected by its cells failing to parse as numbers.
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const Eigen::MatrixXd& rows,
               const std::vector<std::string>& columns = {});

/// Model document: {"p": int, "vertex_classes": [[int]],
/// "edge_classes": [[[i, j]]]} with 0-based indices.
ColouredGraph read_model_json(std::istream& in);
ColouredGraph read_model_json_file(const std::string& path);
void write_model_json(std::ostream& out, const ColouredGraph& g);

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& data);

/// X^T X / n.
SymMatrix scatter_matrix(const Eigen::MatrixXd& data);

/// r2_ij = cov_ij^2 / (cov_ii cov_jj) from the centered covariance; throws
/// InvalidInput naming the first zero-variance column.
Eigen::MatrixXd squared_correlations(const SymMatrix& cov);

}  // namespace scorematch
