#include <fpa/baselines.hpp>
#include <fpa/bench.hpp>
#include <fpa/errors.hpp>
#include <fpa/instances.hpp>
#include <fpa/solver.hpp>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

namespace py = pybind11;
using namespace fpa;

namespace {

py::dict trace_columns(const Trace& trace)
{
    const auto n = static_cast<Index>(trace.size());
    Vector obj(n), stat(n), gamma(n), tmin(n), tmax(n), el(n), eps(n);
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> k(n), sel(n);
    for (Index r = 0; r < n; ++r) {
        const auto& row = trace[static_cast<std::size_t>(r)];
        k[r] = static_cast<std::int64_t>(row.k);
        obj[r] = row.objective;
        stat[r] = row.stationarity;
        sel[r] = static_cast<std::int64_t>(row.selected);
        gamma[r] = row.gamma;
        tmin[r] = row.tau_min;
        tmax[r] = row.tau_max;
        el[r] = row.elapsed_s;
        eps[r] = row.eps_total;
    }
    py::dict d;
    d["k"] = k;
    d["objective"] = obj;
    d["stationarity"] = stat;
    d["selected"] = sel;
    d["gamma"] = gamma;
    d["tau_min"] = tmin;
    d["tau_max"] = tmax;
    d["elapsed_s"] = el;
    d["eps_total"] = eps;
    return d;
}

Vector start_point(const CompositeProblem& p, const std::optional<Vector>& x0)
{
    if (!x0) return Vector::Zero(p.dim());
    if (x0->size() != p.dim()) throw InvalidArgument("x0 has the wrong length");
    return *x0;
}

SolveResult solve(const CompositeProblem& p, const std::string& surrogate, const std::string& selection, double rho,
                  double gamma0, double theta, double alpha1, double alpha2, std::optional<double> tau, double tol,
                  std::size_t max_iters, double time_budget_s, std::size_t workers, const std::optional<Vector>& x0)
{
    bench::RunOptions o;
    o.surrogate = surrogate;
    o.selection = selection;
    o.rho = rho;
    o.gamma0 = gamma0;
    o.theta = theta;
    o.alpha1 = alpha1;
    o.alpha2 = alpha2;
    if (tau) {
        o.tau_init = "value";
        o.tau = tau;
    }
    o.tol = tol;
    o.max_iters = max_iters;
    o.time_budget_s = time_budget_s;
    o.workers = workers;
    const SolverConfig cfg = bench::make_solver_config(o);
    const Vector start = start_point(p, x0);
    py::gil_scoped_release release;
    return run_algorithm1(p, cfg, start);
}

py::dict instance_dict(const LassoInstance& inst)
{
    py::dict d;
    d["A"] = inst.A;
    d["b"] = inst.b;
    d["c"] = inst.c;
    d["x_star"] = inst.x_star ? py::cast(*inst.x_star) : py::none();
    d["v_star"] = inst.v_star ? py::cast(*inst.v_star) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(_fpa, m)
{
    m.doc() = "Parallel block-coordinate solver for F + G composite problems";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericFailure>(m, "NumericFailure", PyExc_ArithmeticError);

    py::class_<CompositeProblem>(m, "Problem")
        .def_static("lasso", &make_lasso, py::arg("A"), py::arg("b"), py::arg("c"),
                    "||A x - b||^2 + c ||x||_1 with scalar blocks.")
        .def_static("group_lasso", &make_group_lasso, py::arg("A"), py::arg("b"), py::arg("c"),
                    py::arg("block_size"), "||A x - b||^2 + c sum_i ||x_i||_2.")
        .def_static("sparse_logistic", &make_sparse_logistic, py::arg("features"), py::arg("labels"),
                    py::arg("c"), "Logistic loss plus c ||x||_1; labels are +-1.")
        .def_property_readonly("dim", &CompositeProblem::dim)
        .def_property_readonly("num_blocks", &CompositeProblem::num_blocks)
        .def("objective", [](const CompositeProblem& p, const Vector& x) {
            if (x.size() != p.dim()) throw InvalidArgument("x has the wrong length");
            return eval_objective(p, x);
        }, py::arg("x"));

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("x", &SolveResult::x)
        .def_readonly("last_iterate", &SolveResult::last_iterate)
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("final_objective", &SolveResult::final_objective)
        .def_readonly("final_stationarity", &SolveResult::final_stationarity)
        .def_readonly("elapsed_s", &SolveResult::elapsed_s)
        .def_readonly("tau", &SolveResult::tau)
        .def_property_readonly("reason", [](const SolveResult& r) { return std::string(to_string(r.reason)); })
        .def_property_readonly("converged",
                               [](const SolveResult& r) { return r.reason == TerminationReason::Converged; })
        .def_property_readonly("trace", [](const SolveResult& r) { return trace_columns(r.trace); })
        .def("trace_csv", [](const SolveResult& r, bool include_elapsed) {
            return trace_to_csv(r.trace, include_elapsed);
        }, py::arg("include_elapsed") = true);

    const double inf = std::numeric_limits<double>::infinity();
    m.def("solve", &solve, py::arg("problem"), py::kw_only(), py::arg("surrogate") = "exact",
          py::arg("selection") = "threshold", py::arg("rho") = 0.5, py::arg("gamma0") = 0.9,
          py::arg("theta") = 1e-3, py::arg("alpha1") = 0.0, py::arg("alpha2") = 1.0,
          py::arg("tau") = py::none(), py::arg("tol") = 1e-9, py::arg("max_iters") = 5000,
          py::arg("time_budget_s") = inf, py::arg("workers") = 1, py::arg("x0") = py::none(),
          "Runs the parallel block algorithm. tau=None uses tr(A^T A) / (2 n).");

    m.def("fista", [](const CompositeProblem& p, const std::optional<Vector>& x0, double tol, std::size_t max_iters,
                      double time_budget_s, std::size_t workers) {
        FistaOptions o;
        o.tolerance = tol;
        o.max_iterations = max_iters;
        o.time_budget_s = time_budget_s;
        o.workers = workers;
        const Vector start = start_point(p, x0);
        py::gil_scoped_release release;
        return run_fista(p, start, o);
    }, py::arg("problem"), py::kw_only(), py::arg("x0") = py::none(), py::arg("tol") = 1e-8,
          py::arg("max_iters") = 100000, py::arg("time_budget_s") = inf, py::arg("workers") = 1);

    m.def("gauss_seidel", [](const CompositeProblem& p, const std::optional<Vector>& x0, double tol,
                             std::size_t max_sweeps, double time_budget_s, std::optional<double> tau) {
        GaussSeidelOptions o;
        o.tolerance = tol;
        o.max_sweeps = max_sweeps;
        o.time_budget_s = time_budget_s;
        if (tau) o.tau = Vector::Constant(1, *tau);
        const Vector start = start_point(p, x0);
        py::gil_scoped_release release;
        return run_gauss_seidel(p, start, o);
    }, py::arg("problem"), py::kw_only(), py::arg("x0") = py::none(), py::arg("tol") = 1e-8,
          py::arg("max_sweeps") = 1000, py::arg("time_budget_s") = inf, py::arg("tau") = py::none());

    m.def("generate_lasso", [](const std::string& profile, std::uint64_t seed, std::optional<double> c,
                               std::optional<double> scale) {
        auto params = profile_params(profile, seed);
        if (c) params.c = *c;
        if (scale) params.scale = *scale;
        return instance_dict(generate_nesterov_lasso(params));
    }, py::arg("profile") = "desk-high", py::arg("seed") = 0, py::arg("c") = py::none(),
          py::arg("scale") = py::none(),
          "Lasso instance with known optimum; returns a dict with A, b, c, x_star, v_star.");

    m.def("load_instance", [](const std::string& dir) { return instance_dict(load_instance(dir)); }, py::arg("path"));

    m.def("kkt_residual", [](const Matrix& A, const Vector& b, double c, const Vector& x) {
        return lasso_kkt_residual(A, b, c, x);
    }, py::arg("A"), py::arg("b"), py::arg("c"), py::arg("x"),
          "Largest violation of the l1 optimality conditions of ||A x - b||^2 + c ||x||_1.");

    m.def("soft_threshold", py::overload_cast<const Vector&, double>(&soft_threshold), py::arg("v"), py::arg("t"));
}
