#pragma once

#include <fpa/problem.hpp>
#include <fpa/selection.hpp>
#include <fpa/surrogate.hpp>
#include <fpa/thread_pool.hpp>
#include <fpa/trace.hpp>
#include <fpa/types.hpp>

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace fpa {

enum class TauInit {
    LassoTrace,  // tau_i = tr(A^T A) / (2 n)
    Explicit,    // SolverConfig::tau_values (one value, or one per block)
};

struct IterationSnapshot;

struct SolverConfig {
    SurrogateKind surrogate = SurrogateKind::ExactBlock;
    ErrorBoundKind error_bound = ErrorBoundKind::ExactDistance;
    SelectionPolicy selection{};
    double gamma0 = 0.9;
    double theta = 1e-3;
    TauInit tau_init = TauInit::LassoTrace;
    Vector tau_values;
    int tau_change_budget = 50;
    int tau_halve_after = 10;
    EpsilonSchedule eps{};
    double tolerance = 1e-9;
    std::size_t max_iterations = 5000;
    double time_budget_s = std::numeric_limits<double>::infinity();
    std::size_t workers = 1;
    /// Accuracy used for blocks without a closed form when eps_i^k == 0.
    double exact_tolerance = 1e-12;
    /// Recompute A x from scratch every this many iterations (0 = never).
    std::size_t cache_refresh_interval = 100;
    /// Called once per iteration after selection, before the update.
    std::function<void(const IterationSnapshot&)> observer;

    void validate() const;
};

enum class TerminationReason { Converged, IterationCap, TimeBudget };

const char* to_string(TerminationReason r) noexcept;

struct SolveResult {
    /// Returned solution: the best response at the last iterate for a
    /// converged run, the last iterate otherwise.
    Vector x;
    Vector last_iterate;
    Trace trace;
    TerminationReason reason = TerminationReason::IterationCap;
    std::size_t iterations = 0;
    double final_objective = 0.0;
    double final_stationarity = 0.0;
    double elapsed_s = 0.0;
    Vector tau;
    /// Largest relative gap seen between the incrementally maintained A x and
    /// a fresh product.
    double max_cache_drift = 0.0;
};

/// Everything the solver knows at iteration k, between selection and update.
struct IterationSnapshot {
    std::size_t k = 0;
    const Vector& x;
    const Vector& z;          // per-block subproblem solutions, flattened
    const Vector& block_grad; // grad F(x), flattened
    const Vector& eps;        // requested accuracy per block
    const Vector& certified;  // certified accuracy per block
    const ErrorBounds& bounds;
    const IndexList& selected;
    double gamma = 0.0;
    const Vector& tau;
    double objective = 0.0;
};

class IterationFailure : public std::runtime_error {
public:
    IterationFailure(const std::string& what, Trace partial) : std::runtime_error(what), trace_(std::move(partial)) {}
    const Trace& trace() const noexcept { return trace_; }

private:
    Trace trace_;
};

/// Result of solving every block subproblem at a common anchor.
struct BlockSweep {
    Vector z;
    Vector grad;
    Vector eps;
    Vector certified;
    std::vector<std::size_t> inner_iterations;
};

/// Owns the per-problem precomputation and the worker pool used for the
/// parallel block step. Results never depend on the worker count.
class BlockEngine {
public:
    BlockEngine(const CompositeProblem& problem, std::size_t workers);

    const CompositeProblem& problem() const noexcept { return *problem_; }
    const SurrogateContext& context() const noexcept { return ctx_; }
    ThreadPool& pool() noexcept { return pool_; }

    /// eps_i = schedule(gamma, ||grad_i F||) per block.
    BlockSweep sweep(const Vector& x, const Vector& predictor, const Vector& tau, SurrogateKind kind,
                     const EpsilonSchedule& schedule, double gamma, double exact_tolerance = 1e-12);
    /// Explicit per-block accuracies.
    BlockSweep sweep(const Vector& x, const Vector& predictor, const Vector& tau, SurrogateKind kind,
                     const Vector& eps, double exact_tolerance = 1e-12);

private:
    template <class EpsFn>
    BlockSweep run(const Vector& x, const Vector& predictor, const Vector& tau, SurrogateKind kind, EpsFn&& eps_fn,
                   double exact_tolerance);

    const CompositeProblem* problem_;
    SurrogateContext ctx_;
    ThreadPool pool_;
};

/// tau_i = tr(A^T A) / (2 n) for every block.
Vector lasso_trace_tau(const CompositeProblem& p);
/// Expands a scalar or per-block tau specification; validates positivity.
Vector expand_tau(const CompositeProblem& p, const Vector& values);

struct XhatResult {
    Vector z;
    std::vector<BlockSolution> blocks;
};

/// Solves all block subproblems at x with accuracies eps (one per block).
XhatResult compute_xhat_parallel(const CompositeProblem& p, const Vector& x, const Vector& tau, SurrogateKind kind,
                                 const Vector& eps, std::size_t workers = 1);

/// max_i ||xhat_i(x, tau_i) - x_i|| with exact block solutions.
double stationarity_residual(const CompositeProblem& p, const Vector& x, const Vector& tau, SurrogateKind kind);

/// Inexact parallel block algorithm: parallel block solves, greedy selection,
/// convex-combination update with diminishing stepsize.
SolveResult run_algorithm1(const CompositeProblem& p, const SolverConfig& config, const Vector& x0);
SolveResult run_algorithm1(const CompositeProblem& p, const SolverConfig& config);

struct DescentCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// Evaluates
///   (xhat(y) - y)_S^T grad F(y)_S + sum_{i in S} [g_i(xhat_i) - g_i(y_i)]
///     <= -min_i tau_i ||(xhat(y) - y)_S||^2
/// with tolerance 1e-8.
DescentCheck verify_descent_inequality(const CompositeProblem& p, const Vector& y, const Vector& tau,
                                       const IndexList& S, SurrogateKind kind);

/// ||(xhat - x)_S|| >= (rho / N) ||xhat - x||.
bool verify_selection_bound(const BlockPartition& bp, const Vector& E, double rho, const Vector& xhat,
                            const Vector& x, const IndexList& S);

}  // namespace fpa
