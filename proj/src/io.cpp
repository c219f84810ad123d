#include "scorematch/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace scorematch {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file: " + path);
  return in;
}

}  // namespace

Dataset read_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::string line;
  std::size_t width = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const auto cells = split_line(line);
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!parse_double(cells[j], values[j])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty() && header.empty()) {
        header = cells;
        width = cells.size();
        continue;
      }
      throw InvalidInput("line " + std::to_string(lineno) +
                         ": cell does not parse as a finite real");
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw InvalidInput("line " + std::to_string(lineno) +
                         ": expected " + std::to_string(width) + " cells, got " +
                         std::to_string(cells.size()));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw InvalidInput("dataset has no data rows");

  Dataset ds;
  ds.columns = std::move(header);
  ds.rows.resize(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      ds.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
  return ds;
}

Dataset read_csv_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const Eigen::MatrixXd& rows,
               const std::vector<std::string>& columns) {
  if (!columns.empty()) {
    if (static_cast<Eigen::Index>(columns.size()) != rows.cols())
      throw DimensionError("write_csv: header width mismatch");
    for (std::size_t j = 0; j < columns.size(); ++j)
      out << (j ? "," : "") << columns[j];
    out << '\n';
  }
  char buf[64];
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", rows(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

ColouredGraph read_model_json(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("model file is not valid JSON: ") +
                       e.what());
  }
  try {
    const int p = doc.at("p").get<int>();
    std::vector<std::vector<int>> vcls =
        doc.at("vertex_classes").get<std::vector<std::vector<int>>>();
    std::vector<std::vector<Edge>> ecls;
    for (const auto& cls : doc.at("edge_classes")) {
      std::vector<Edge> edges;
      for (const auto& e : cls) {
        if (!e.is_array() || e.size() != 2)
          throw InvalidInput("edges must be 2-integer pairs");
        edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      }
      ecls.push_back(std::move(edges));
    }
    return make_coloured_graph(p, std::move(vcls), std::move(ecls));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed model file: ") + e.what());
  }
}

ColouredGraph read_model_json_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_model_json(in);
}

void write_model_json(std::ostream& out, const ColouredGraph& g) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["p"] = g.p;
  doc["vertex_classes"] = g.vertex_classes;
  auto& ecls = doc["edge_classes"] = nlohmann::json::array();
  for (const auto& cls : g.edge_classes) {
    nlohmann::json jc = nlohmann::json::array();
    for (const Edge& e : cls) jc.push_back({e.first, e.second});
    ecls.push_back(std::move(jc));
  }
  out << doc.dump(2) << '\n';
}

Eigen::MatrixXd center_columns(const Eigen::MatrixXd& data) {
  return data.rowwise() - data.colwise().mean();
}

SymMatrix scatter_matrix(const Eigen::MatrixXd& data) {
  if (data.rows() < 1) throw InvalidInput("scatter_matrix: no rows");
  return SymMatrix::from_dense(data.transpose() * data /
                               static_cast<double>(data.rows()));
}

Eigen::MatrixXd squared_correlations(const SymMatrix& cov) {
  const int p = cov.dim();
  for (int j = 0; j < p; ++j) {
    if (!(cov(j, j) > 0.0))
      throw InvalidInput("column " + std::to_string(j) +
                         " has zero variance");
  }
  Eigen::MatrixXd r2(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      r2(i, j) = cov(i, j) * cov(i, j) / (cov(i, i) * cov(j, j));
  return r2;
}

}  // namespace scorematch
