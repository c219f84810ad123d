#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "scorematch/estimability.hpp"
#include "scorematch/expfam.hpp"
#include "scorematch/fit.hpp"
#include "scorematch/io.hpp"
#include "scorematch/model_space.hpp"
#include "scorematch/search.hpp"
#include "scorematch/simulate.hpp"
#include "scorematch/sym_matrix.hpp"

namespace py = pybind11;
using namespace scorematch;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Score matching estimation for Gaussian linear concentration "
            "models";

  // errors
  const auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base);
  py::register_exception<InvalidInput>(m, "InvalidInputError", base);
  py::register_exception<NotEstimableError>(m, "NotEstimableError", base);
  py::register_exception<MleNonexistentError>(m, "MleNonexistentError", base);
  py::register_exception<NotInSpanError>(m, "NotInSpanError", base);

  // symmetric-matrix kernel
  py::class_<SymMatrix>(m, "SymMatrix")
      .def(py::init([](const Eigen::MatrixXd& dense) {
             return SymMatrix::from_dense(dense);
           }),
           py::arg("dense"), "Build from a square array, symmetrized as (M+M^T)/2")
      .def_static("identity", &SymMatrix::identity, py::arg("p"))
      .def_static("zero", [](int p) { return SymMatrix(p); }, py::arg("p"))
      .def_property_readonly("p", &SymMatrix::dim)
      .def("to_numpy", &SymMatrix::dense)
      .def("trace", &SymMatrix::trace)
      .def("__getitem__",
           [](const SymMatrix& s, std::pair<int, int> ij) {
             if (ij.first < 0 || ij.first >= s.dim() || ij.second < 0 ||
                 ij.second >= s.dim())
               throw py::index_error();
             return s(ij.first, ij.second);
           })
      .def("__sub__", &SymMatrix::operator-)
      .def("__add__", &SymMatrix::operator+)
      .def("__repr__", [](const SymMatrix& s) {
        return "SymMatrix(p=" + std::to_string(s.dim()) + ")";
      });

  m.def("trace_inner", &trace_inner, py::arg("a"), py::arg("b"));
  m.def("jordan_product", &jordan_product, py::arg("a"), py::arg("b"));
  m.def("frobenius_norm", &frobenius_norm, py::arg("a"));
  m.def(
      "log_det",
      [](const SymMatrix& a) {
        const SpdFactor f = SpdFactor::compute(a);
        if (!f.is_pd())
          throw Error("matrix is not positive definite (leading minor " +
                      std::to_string(f.failing_minor()) + ")");
        return f.log_det();
      },
      py::arg("a"));
  m.def(
      "inverse_spd",
      [](const SymMatrix& a) {
        const SpdFactor f = SpdFactor::compute(a);
        if (!f.is_pd())
          throw Error("matrix is not positive definite (leading minor " +
                      std::to_string(f.failing_minor()) + ")");
        return f.inverse();
      },
      py::arg("a"));
  m.def(
      "is_positive_definite",
      [](const SymMatrix& a) { return SpdFactor::compute(a).is_pd(); },
      py::arg("a"));

  // model spaces
  py::class_<ColouredGraph>(m, "ColouredGraph")
      .def(py::init([](int p, std::vector<std::vector<int>> vcls,
                       std::vector<std::vector<Edge>> ecls) {
             return make_coloured_graph(p, std::move(vcls), std::move(ecls));
           }),
           py::arg("p"), py::arg("vertex_classes"), py::arg("edge_classes"))
      .def_readonly("p", &ColouredGraph::p)
      .def_readonly("vertex_classes", &ColouredGraph::vertex_classes)
      .def_readonly("edge_classes", &ColouredGraph::edge_classes)
      .def("edges", &ColouredGraph::edges);

  m.def("uncoloured_graph", &uncoloured_graph, py::arg("p"), py::arg("edges"));
  m.def("lattice_graph", &lattice_graph, py::arg("s"));
  m.def("circular_ar_graph", &circular_ar_graph, py::arg("p"), py::arg("q"));
  m.def("mathmarks_graph", &mathmarks_graph);

  py::class_<ModelSpace>(m, "ModelSpace")
      .def_static("from_generators", &ModelSpace::from_generators,
                  py::arg("generators"),
                  py::arg("labels") = std::vector<std::string>{})
      .def_static("from_graph", &ModelSpace::from_graph, py::arg("graph"))
      .def_static("full", &ModelSpace::full, py::arg("p"))
      .def_static("diagonal", &ModelSpace::diagonal, py::arg("p"))
      .def_static("jensen_space", &ModelSpace::jensen_space)
      .def_property_readonly("p", &ModelSpace::p)
      .def_property_readonly("d", &ModelSpace::dim)
      .def_property_readonly("labels", &ModelSpace::labels)
      .def("generator", &ModelSpace::generator, py::arg("u"),
           py::return_value_policy::copy)
      .def("project", &ModelSpace::project, py::arg("m"))
      .def("coordinates", &ModelSpace::coordinates, py::arg("m"))
      .def("to_matrix", &ModelSpace::to_matrix, py::arg("theta"))
      .def("from_matrix", &ModelSpace::from_matrix, py::arg("k"))
      .def("is_jordan_subalgebra", &ModelSpace::is_jordan_subalgebra)
      .def("contains_identity", &ModelSpace::contains_identity);

  m.def("gram_schmidt", &gram_schmidt, py::arg("mats"),
        py::arg("drop_tol") = 1e-10);

  // generic exponential-family engine
  py::class_<ExponentialFamily>(m, "ExponentialFamily")
      .def(py::init([](int dim,
                       std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> g,
                       std::function<Eigen::VectorXd(const Eigen::VectorXd&)> d) {
             ExponentialFamily f;
             f.dim = dim;
             f.gram_term = std::move(g);
             f.drift_term = std::move(d);
             return f;
           }),
           py::arg("dim"), py::arg("gram_term"), py::arg("drift_term"))
      .def_readonly("dim", &ExponentialFamily::dim);

  py::class_<SandwichEstimate>(m, "SandwichEstimate")
      .def_readonly("psi_hat", &SandwichEstimate::psi_hat)
      .def_readonly("h_hat", &SandwichEstimate::h_hat)
      .def_readonly("cov_theta", &SandwichEstimate::cov_theta);

  m.def("solve_sme", &solve_sme, py::arg("family"), py::arg("samples"));
  m.def("minimal_score", &minimal_score, py::arg("family"), py::arg("samples"),
        py::arg("theta"));
  m.def("sandwich_covariance", &sandwich_covariance, py::arg("family"),
        py::arg("samples"), py::arg("theta"));
  m.def("gaussian_concentration_family", &gaussian_concentration_family,
        py::arg("space"));
  m.def("gaussian_precision_1d", &gaussian_precision_1d);

  // estimability
  py::class_<GramSystem>(m, "GramSystem")
      .def_readonly("m", &GramSystem::m)
      .def_readonly("rhs", &GramSystem::rhs)
      .def_readonly("n", &GramSystem::n)
      .def_readonly("rank_estimate", &GramSystem::rank_estimate)
      .def_readonly("condition_estimate", &GramSystem::condition_estimate)
      .def_readonly("smallest_sv", &GramSystem::smallest_sv)
      .def_readonly("largest_sv", &GramSystem::largest_sv);

  m.def("build_gram", &build_gram, py::arg("space"), py::arg("w"), py::arg("n"));
  m.def("dimension_bound_check", &dimension_bound_check, py::arg("d"),
        py::arg("p"), py::arg("n"));

  py::class_<EstimabilityCheck>(m, "EstimabilityCheck")
      .def_readonly("d", &EstimabilityCheck::d)
      .def_readonly("dimension_bound", &EstimabilityCheck::dimension_bound)
      .def_readonly("bound_ok", &EstimabilityCheck::bound_ok)
      .def_readonly("estimable", &EstimabilityCheck::estimable)
      .def_readonly("trials", &EstimabilityCheck::trials)
      .def_readonly("best_min_sv_ratio", &EstimabilityCheck::best_min_sv_ratio);

  m.def("check_estimability", &check_estimability, py::arg("space"),
        py::arg("n"), py::arg("seed") = 0, py::arg("trials") = 3);
  m.def("is_n_estimable", &is_n_estimable, py::arg("space"), py::arg("n"),
        py::arg("seed") = 0, py::arg("trials") = 3);

  // concentration estimators
  py::enum_<FitMethod>(m, "FitMethod")
      .value("SME", FitMethod::Sme)
      .value("MLE", FitMethod::Mle)
      .value("JORDAN", FitMethod::Jordan);

  py::class_<FitDiagnostics>(m, "FitDiagnostics")
      .def_readonly("gram_condition", &FitDiagnostics::gram_condition)
      .def_readonly("system_residual", &FitDiagnostics::system_residual)
      .def_readonly("loglik", &FitDiagnostics::loglik)
      .def_readonly("iterations_saved", &FitDiagnostics::iterations_saved)
      .def_readonly("backtrack_steps", &FitDiagnostics::backtrack_steps);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("K", &FitResult::K)
      .def_readonly("theta", &FitResult::theta)
      .def_readonly("j2", &FitResult::j2)
      .def_readonly("positive_definite", &FitResult::positive_definite)
      .def_readonly("method", &FitResult::method)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("gradient_norm", &FitResult::gradient_norm)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("diagnostics", &FitResult::diagnostics);

  m.def("sme_fit", &sme_fit, py::arg("space"), py::arg("w"), py::arg("n"));
  m.def("jordan_fit", &jordan_fit, py::arg("space"), py::arg("w"),
        py::arg("n") = 1);
  m.def(
      "mle_fit",
      [](const ModelSpace& space, const SymMatrix& w, int n, int max_iter,
         double grad_tol, std::optional<Eigen::VectorXd> start) {
        MleOptions opts;
        opts.max_iter = max_iter;
        opts.grad_tol = grad_tol;
        opts.start = std::move(start);
        return mle_fit(space, w, n, opts);
      },
      py::arg("space"), py::arg("w"), py::arg("n"), py::arg("max_iter") = 200,
      py::arg("grad_tol") = 1e-10, py::arg("start") = std::nullopt);
  m.def(
      "sme_then_mle",
      [](const ModelSpace& space, const SymMatrix& w, int n, int max_iter,
         double grad_tol) {
        MleOptions opts;
        opts.max_iter = max_iter;
        opts.grad_tol = grad_tol;
        return sme_then_mle(space, w, n, opts);
      },
      py::arg("space"), py::arg("w"), py::arg("n"), py::arg("max_iter") = 200,
      py::arg("grad_tol") = 1e-10);

  // model search
  py::class_<SearchConfig>(m, "SearchConfig")
      .def(py::init<>())
      .def_readwrite("lambda_", &SearchConfig::lambda)
      .def_readwrite("center", &SearchConfig::center)
      .def_readwrite("improvement_tol", &SearchConfig::improvement_tol)
      .def_readwrite("forward_patience", &SearchConfig::forward_patience)
      .def_readwrite("backward_fixed_point", &SearchConfig::backward_fixed_point)
      .def_readwrite("incremental_gram", &SearchConfig::incremental_gram);

  py::enum_<SearchPhase>(m, "SearchPhase")
      .value("FORWARD", SearchPhase::Forward)
      .value("BACKWARD", SearchPhase::Backward);

  py::class_<MoveRecord>(m, "MoveRecord")
      .def_readonly("phase", &MoveRecord::phase)
      .def_readonly("edge", &MoveRecord::edge)
      .def_readonly("add", &MoveRecord::add)
      .def_readonly("j_before", &MoveRecord::j_before)
      .def_readonly("j_after", &MoveRecord::j_after)
      .def_readonly("accepted", &MoveRecord::accepted)
      .def_readonly("estimable", &MoveRecord::estimable);

  py::class_<SearchResult>(m, "SearchResult")
      .def_readonly("edges", &SearchResult::edges)
      .def_readonly("tree_edges", &SearchResult::tree_edges)
      .def_readonly("lambda_", &SearchResult::lambda)
      .def_readonly("tree_objective", &SearchResult::tree_objective)
      .def_readonly("final_objective", &SearchResult::final_objective)
      .def_readonly("trace", &SearchResult::trace)
      .def_readonly("fits_evaluated", &SearchResult::fits_evaluated)
      .def_readonly("backward_sweeps", &SearchResult::backward_sweeps);

  m.def("penalized_objective", &penalized_objective, py::arg("fit"),
        py::arg("n"), py::arg("lambda_"), py::arg("d"));
  m.def("default_lambda", &default_lambda, py::arg("n"), py::arg("p"));
  m.def("kruskal_tree_init", &kruskal_tree_init, py::arg("r2"));
  m.def("search", &search, py::arg("data"), py::arg("config") = SearchConfig{});

  // simulation
  m.def("lattice_concentration", &lattice_concentration, py::arg("s"));
  m.def("sample_gaussian", &sample_gaussian, py::arg("k"), py::arg("n"),
        py::arg("seed"));
  m.def("edge_errors", &edge_errors, py::arg("true_k"), py::arg("edges"));

  py::class_<CurvePoint>(m, "CurvePoint")
      .def_readonly("n", &CurvePoint::n)
      .def_readonly("scaled_frob", &CurvePoint::scaled_frob)
      .def_readonly("status", &CurvePoint::status);

  m.def("sme_vs_mle_curve", &sme_vs_mle_curve, py::arg("space"),
        py::arg("data"), py::arg("n_grid"), py::arg("center") = true);

  py::class_<ExperimentRow>(m, "ExperimentRow")
      .def_readonly("seed", &ExperimentRow::seed)
      .def_readonly("s", &ExperimentRow::s)
      .def_readonly("p", &ExperimentRow::p)
      .def_readonly("n", &ExperimentRow::n)
      .def_readonly("missing", &ExperimentRow::missing)
      .def_readonly("extra", &ExperimentRow::extra)
      .def_readonly("frob_sme_mle", &ExperimentRow::frob_sme_mle)
      .def_readonly("fits_evaluated", &ExperimentRow::fits_evaluated);

  m.def("run_experiment", &run_experiment, py::arg("s"), py::arg("n_over_p"),
        py::arg("trials"), py::arg("seed"),
        py::arg("config") = SearchConfig{});

  // io helpers
  m.def("center_columns", &center_columns, py::arg("data"));
  m.def("scatter_matrix", &scatter_matrix, py::arg("data"));
  m.def("squared_correlations", &squared_correlations, py::arg("cov"));
}
