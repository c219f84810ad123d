#include "scorematch/cli.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "scorematch/estimability.hpp"
#include "scorematch/expfam.hpp"
#include "scorematch/fit.hpp"
#include "scorematch/io.hpp"
#include "scorematch/search.hpp"
#include "scorematch/simulate.hpp"

namespace scorematch::cli {

namespace {

using nlohmann::json;

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

void write_document(const std::string& out_path, const json& doc) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << std::endl;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw InvalidInput("cannot write file: " + out_path);
  out << doc.dump(2) << '\n';
}

json error_object(const std::string& type, const std::string& message) {
  json doc;
  doc["schema_version"] = 1;
  doc["generated_at"] = timestamp_utc();
  doc["error"] = {{"type", type}, {"message", message}};
  return doc;
}

int emit_error(const std::string& out_path, json doc, int code) {
  try {
    write_document(out_path, doc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return code;
}

// Maps library exceptions onto the documented exit codes, writing a
// machine-readable error object.
template <typename Fn>
int guarded(const std::string& out_path, Fn&& fn) {
  try {
    return fn();
  } catch (const NotEstimableError& e) {
    json doc = error_object("not_estimable", e.what());
    doc["error"]["rank"] = e.rank;
    doc["error"]["smallest_sv"] = e.smallest_sv;
    doc["error"]["largest_sv"] = e.largest_sv;
    return emit_error(out_path, doc, kNotEstimable);
  } catch (const MleNonexistentError& e) {
    return emit_error(out_path, error_object("mle_nonexistent", e.what()),
                      kNonConvergence);
  } catch (const std::exception& e) {
    return emit_error(out_path, error_object("validation", e.what()),
                      kValidationError);
  }
}

std::vector<double> lower_triangle(const SymMatrix& k) {
  std::vector<double> tri;
  tri.reserve(static_cast<std::size_t>(k.dim()) * (k.dim() + 1) / 2);
  for (int i = 0; i < k.dim(); ++i)
    for (int j = 0; j <= i; ++j) tri.push_back(k(i, j));
  return tri;
}

json graph_json(const ColouredGraph& g) {
  json doc;
  doc["p"] = g.p;
  doc["vertex_classes"] = g.vertex_classes;
  json ecls = json::array();
  for (const auto& cls : g.edge_classes) {
    json jc = json::array();
    for (const Edge& e : cls) jc.push_back({e.first, e.second});
    ecls.push_back(std::move(jc));
  }
  doc["edge_classes"] = std::move(ecls);
  return doc;
}

json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

struct ResolvedModel {
  ModelSpace space;
  std::optional<ColouredGraph> graph;
  std::string builtin;
};

// Model files are JSON documents; a few named spaces that are not
// expressible as coloured graphs are reachable as "builtin:<name>".
ResolvedModel resolve_model(const std::string& path) {
  if (path == "builtin:jensen")
    return {ModelSpace::jensen_space(), std::nullopt, "jensen"};
  if (path == "builtin:mathmarks") {
    ColouredGraph g = mathmarks_graph();
    return {ModelSpace::from_graph(g), g, "mathmarks"};
  }
  ColouredGraph g = read_model_json_file(path);
  return {ModelSpace::from_graph(g), std::move(g), ""};
}

}  // namespace

int run_fit(const FitArgs& args) {
  return guarded(args.out_path, [&]() -> int {
    if (args.method != "sme" && args.method != "mle" && args.method != "auto")
      throw InvalidInput("--method must be sme, mle or auto");

    const Dataset ds = read_csv_file(args.data_path);
    const ResolvedModel model = resolve_model(args.model_path);
    const ModelSpace& space = model.space;
    if (space.p() != ds.rows.cols())
      throw DimensionError("model has p=" + std::to_string(space.p()) +
                           " but dataset has " +
                           std::to_string(ds.rows.cols()) + " columns");

    const int n = static_cast<int>(ds.rows.rows());
    const Eigen::MatrixXd data =
        args.center ? center_columns(ds.rows) : ds.rows;
    const SymMatrix w = scatter_matrix(data);

    FitResult fit;
    if (args.method == "mle") {
      fit = mle_fit(space, w, n);
    } else if (args.method == "sme") {
      fit = sme_fit(space, w, n);
    } else {
      fit = (space.is_jordan_subalgebra() && space.contains_identity())
                ? jordan_fit(space, w, n)
                : sme_fit(space, w, n);
    }

    // Sandwich standard errors apply to the score matching estimate (the
    // closed form coincides with it on Jordan spaces).
    std::vector<double> std_errors;
    if (fit.method != FitMethod::Mle && n >= 2) {
      const ExponentialFamily family = gaussian_concentration_family(space);
      const SandwichEstimate sandwich =
          sandwich_covariance(family, data, fit.theta);
      for (int u = 0; u < space.dim(); ++u)
        std_errors.push_back(std::sqrt(std::max(0.0, sandwich.cov_theta(u, u))));
    }

    json doc;
    doc["schema_version"] = 1;
    doc["command"] = "fit";
    doc["generated_at"] = timestamp_utc();
    doc["data"] = {{"path", args.data_path},
                   {"n", n},
                   {"p", space.p()},
                   {"centered", args.center}};
    doc["model"] = model.graph ? graph_json(*model.graph)
                               : json{{"builtin", model.builtin},
                                      {"p", space.p()}};
    doc["model"]["d"] = space.dim();
    doc["method"] = to_string(fit.method);
    doc["estimable"] = true;
    json theta = json::array();
    for (int u = 0; u < space.dim(); ++u) {
      json item = {{"label", space.labels()[u]}, {"value", fit.theta[u]}};
      item["std_error"] = std_errors.empty() ? json(nullptr)
                                             : json(std_errors[u]);
      theta.push_back(std::move(item));
    }
    doc["theta"] = std::move(theta);
    doc["K_lower_triangle"] = lower_triangle(fit.K);
    doc["j2"] = fit.j2;
    doc["positive_definite"] = fit.positive_definite;
    doc["converged"] = fit.converged;
    doc["iterations"] = fit.iterations;
    doc["gradient_norm"] = number_or_null(fit.gradient_norm);
    doc["diagnostics"] = {
        {"gram_condition", number_or_null(fit.diagnostics.gram_condition)},
        {"system_residual", number_or_null(fit.diagnostics.system_residual)},
        {"loglik", number_or_null(fit.diagnostics.loglik)},
    };
    write_document(args.out_path, doc);
    return fit.converged ? kOk : kNonConvergence;
  });
}

int run_search(const SearchArgs& args) {
  return guarded(args.out_path, [&]() -> int {
    const Dataset ds = read_csv_file(args.data_path);

    SearchConfig cfg;
    cfg.lambda = args.lambda;
    cfg.center = args.center;
    const SearchResult res = search(ds.rows, cfg);

    const int p = static_cast<int>(ds.rows.cols());
    if (!args.out_path.empty()) {
      std::ofstream out(args.out_path);
      if (!out) throw InvalidInput("cannot write file: " + args.out_path);
      write_model_json(out, uncoloured_graph(p, res.edges));
    } else {
      write_model_json(std::cout, uncoloured_graph(p, res.edges));
    }

    if (!args.trace_path.empty()) {
      std::ofstream out(args.trace_path);
      if (!out) throw InvalidInput("cannot write file: " + args.trace_path);
      out << "phase\tmove\ti\tj\tj_before\tj_after\taccepted\testimable\n";
      char b1[64], b2[64];
      for (const MoveRecord& mv : res.trace) {
        std::snprintf(b1, sizeof(b1), "%.17g", mv.j_before);
        std::snprintf(b2, sizeof(b2), "%.17g", mv.j_after);
        out << (mv.phase == SearchPhase::Forward ? "forward" : "backward")
            << '\t' << (mv.add ? "add" : "remove") << '\t' << mv.edge.first
            << '\t' << mv.edge.second << '\t' << b1 << '\t' << b2 << '\t'
            << (mv.accepted ? 1 : 0) << '\t' << (mv.estimable ? 1 : 0)
            << '\n';
      }
    }

    std::cerr << "lambda " << res.lambda << ", tree " << res.tree_edges.size()
              << " edges (J " << res.tree_objective << "), final "
              << res.edges.size() << " edges (J " << res.final_objective
              << "), " << res.fits_evaluated << " fits\n";
    return kOk;
  });
}

int run_estimability(const EstimabilityArgs& args) {
  return guarded("", [&]() -> int {
    const ModelSpace space = resolve_model(args.model_path).space;
    const EstimabilityCheck check =
        check_estimability(space, args.n, args.seed, args.trials);
    std::cout << "p: " << space.p() << "\n"
              << "d: " << check.d << "\n"
              << "T_p - T_r: " << check.dimension_bound << "\n"
              << "dimension_bound_ok: " << (check.bound_ok ? "true" : "false")
              << "\n"
              << "estimable: " << (check.estimable ? "true" : "false") << "\n"
              << "trials: " << check.trials << "\n"
              << "smallest_sv_ratio: " << check.best_min_sv_ratio << "\n";
    return check.estimable ? kOk : kNotEstimable;
  });
}

int run_simulate(const SimulateArgs& args) {
  return guarded("", [&]() -> int {
    const SymMatrix k = lattice_concentration(args.lattice_s);
    const Eigen::MatrixXd data = sample_gaussian(k, args.n, args.seed);
    std::vector<std::string> columns;
    for (int j = 0; j < k.dim(); ++j) columns.push_back("x" + std::to_string(j));
    if (args.out_path.empty()) {
      write_csv(std::cout, data, columns);
    } else {
      std::ofstream out(args.out_path);
      if (!out) throw InvalidInput("cannot write file: " + args.out_path);
      write_csv(out, data, columns);
    }
    return kOk;
  });
}

int run_experiment(const ExperimentArgs& args) {
  return guarded("", [&]() -> int {
    SearchConfig cfg;
    cfg.lambda = args.lambda;
    const auto rows = scorematch::run_experiment(args.s, args.n_over_p,
                                                 args.trials, args.seed, cfg);
    if (args.out_path.empty()) {
      write_experiment_tsv(std::cout, rows);
    } else {
      std::ofstream out(args.out_path);
      if (!out) throw InvalidInput("cannot write file: " + args.out_path);
      write_experiment_tsv(out, rows);
    }
    return kOk;
  });
}

int run_compare(const CompareArgs& args) {
  return guarded("", [&]() -> int {
    const Dataset ds = read_csv_file(args.data_path);
    const ModelSpace space = resolve_model(args.model_path).space;
    if (space.p() != ds.rows.cols())
      throw DimensionError("model has p=" + std::to_string(space.p()) +
                           " but dataset has " +
                           std::to_string(ds.rows.cols()) + " columns");

    std::vector<int> grid = args.n_grid;
    if (grid.empty())
      throw InvalidInput("--n-grid must list at least one sample size");

    const auto curve = sme_vs_mle_curve(space, ds.rows, grid, args.center);
    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!args.out_path.empty()) {
      file.open(args.out_path);
      if (!file) throw InvalidInput("cannot write file: " + args.out_path);
      out = &file;
    }
    *out << "n\tfrob_sme_mle\tstatus\n";
    char buf[64];
    for (const CurvePoint& pt : curve) {
      std::snprintf(buf, sizeof(buf), "%.17g", pt.scaled_frob);
      *out << pt.n << '\t' << buf << '\t' << pt.status << '\n';
    }
    return kOk;
  });
}

}  // namespace scorematch::cli
