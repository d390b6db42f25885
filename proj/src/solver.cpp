#include <fpa/errors.hpp>
#include <fpa/solver.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace fpa {

const char* to_string(TerminationReason r) noexcept
{
    switch (r) {
    case TerminationReason::Converged: return "converged";
    case TerminationReason::IterationCap: return "iteration-cap";
    case TerminationReason::TimeBudget: return "time-budget";
    }
    return "?";
}

void SolverConfig::validate() const
{
    if (!(gamma0 > 0.0 && gamma0 <= 1.0)) throw InvalidArgument("gamma0 must lie in (0, 1]");
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
    if (!(selection.rho > 0.0 && selection.rho <= 1.0)) throw InvalidArgument("rho must lie in (0, 1]");
    if (!(eps.alpha1 >= 0.0) || !(eps.alpha2 >= 0.0)) throw InvalidArgument("alpha1 and alpha2 must be nonnegative");
    if (tau_init == TauInit::Explicit && tau_values.size() == 0)
        throw InvalidArgument("explicit tau initialization needs tau values");
    if (tau_change_budget < 0) throw InvalidArgument("tau change budget must be nonnegative");
    if (!(tolerance >= 0.0)) throw InvalidArgument("tolerance must be nonnegative");
    if (!(time_budget_s > 0.0)) throw InvalidArgument("time budget must be positive");
    if (!(exact_tolerance > 0.0)) throw InvalidArgument("exact tolerance must be positive");
    if (workers < 1) throw InvalidArgument("need at least one worker");
}

// ---------------------------------------------------------------------------
// BlockEngine
// ---------------------------------------------------------------------------

BlockEngine::BlockEngine(const CompositeProblem& problem, std::size_t workers)
    : problem_(&problem), ctx_(problem), pool_(workers)
{
}

template <class EpsFn>
BlockSweep BlockEngine::run(const Vector& x, const Vector& predictor, const Vector& tau, SurrogateKind kind,
                            EpsFn&& eps_fn, double exact_tolerance)
{
    const auto& p = *problem_;
    const auto& bp = p.partition;
    const Index N = bp.num_blocks();
    if (tau.size() != N) throw InvalidArgument("need one tau per block");

    const Anchor anchor = make_anchor(p, x, predictor, kind);
    BlockSweep out;
    out.z.resize(p.dim());
    out.grad.resize(p.dim());
    out.eps.resize(N);
    out.certified.resize(N);
    out.inner_iterations.assign(static_cast<std::size_t>(N), 0);

    pool_.parallel_for(static_cast<std::size_t>(N), [&](std::size_t begin, std::size_t end) {
        for (auto bi = begin; bi < end; ++bi) {
            const auto i = static_cast<Index>(bi);
            const auto model = BlockModel::build(ctx_, anchor, i, kind);
            const double eps = eps_fn(i, model.anchor_gradient().norm());
            const BlockSubproblem sub{model, tau[i], p.reg, p.feasible(i)};
            auto sol = solve_block(sub, eps, exact_tolerance);
            bp.block(out.z, i) = sol.z;
            bp.block(out.grad, i) = model.anchor_gradient();
            out.eps[i] = eps;
            out.certified[i] = sol.certified_accuracy;
            out.inner_iterations[bi] = sol.inner_iterations;
        }
    });
    return out;
}

BlockSweep BlockEngine::sweep(const Vector& x, const Vector& predictor, const Vector& tau, SurrogateKind kind,
                              const EpsilonSchedule& schedule, double gamma, double exact_tolerance)
{
    return run(
        x, predictor, tau, kind,
        [&](Index, double grad_norm) { return schedule.epsilon_for_block(gamma, grad_norm); }, exact_tolerance);
}

BlockSweep BlockEngine::sweep(const Vector& x, const Vector& predictor, const Vector& tau, SurrogateKind kind,
                              const Vector& eps, double exact_tolerance)
{
    if (eps.size() != problem_->num_blocks()) throw InvalidArgument("need one accuracy per block");
    return run(x, predictor, tau, kind, [&](Index i, double) { return eps[i]; }, exact_tolerance);
}

// ---------------------------------------------------------------------------
// tau initialization
// ---------------------------------------------------------------------------

Vector lasso_trace_tau(const CompositeProblem& p)
{
    const double t = p.smooth.matrix().squaredNorm() / (2.0 * static_cast<double>(p.dim()));
    if (!(t > 0.0)) throw InvalidArgument("tr(A^T A) is zero; pick tau explicitly");
    return Vector::Constant(p.num_blocks(), t);
}

Vector expand_tau(const CompositeProblem& p, const Vector& values)
{
    Vector tau;
    if (values.size() == 1) {
        tau = Vector::Constant(p.num_blocks(), values[0]);
    } else if (values.size() == p.num_blocks()) {
        tau = values;
    } else {
        throw InvalidArgument("tau needs one value or one value per block");
    }
    if (!(tau.array() > 0.0).all() || !tau.allFinite()) throw InvalidArgument("all tau_i must be positive");
    return tau;
}

// ---------------------------------------------------------------------------
// One-shot helpers
// ---------------------------------------------------------------------------

XhatResult compute_xhat_parallel(const CompositeProblem& p, const Vector& x, const Vector& tau, SurrogateKind kind,
                                 const Vector& eps, std::size_t workers)
{
    if (x.size() != p.dim()) throw InvalidArgument("point dimension mismatch");
    BlockEngine engine(p, workers);
    const Vector pred = p.smooth.predictor(x);
    auto sw = engine.sweep(x, pred, tau, kind, eps);
    XhatResult out;
    out.blocks.resize(static_cast<std::size_t>(p.num_blocks()));
    for (Index i = 0; i < p.num_blocks(); ++i) {
        auto& b = out.blocks[static_cast<std::size_t>(i)];
        b.z = p.partition.block(sw.z, i);
        b.certified_accuracy = sw.certified[i];
        b.inner_iterations = sw.inner_iterations[static_cast<std::size_t>(i)];
    }
    out.z = std::move(sw.z);
    return out;
}

double stationarity_residual(const CompositeProblem& p, const Vector& x, const Vector& tau, SurrogateKind kind)
{
    const auto r = compute_xhat_parallel(p, x, tau, kind, Vector::Zero(p.num_blocks()));
    return exact_distance_bounds(p.partition, x, r.z).M;
}

// ---------------------------------------------------------------------------
// Main loop
// ---------------------------------------------------------------------------

namespace {

void check_start(const CompositeProblem& p, const SolverConfig& cfg, const Vector& x0)
{
    p.validate();
    cfg.validate();
    if (x0.size() != p.dim()) throw InvalidArgument("starting point has the wrong dimension");
    for (Index i = 0; i < p.num_blocks(); ++i)
        if (!p.feasible(i).contains(p.partition.block(x0, i)))
            throw InvalidArgument("starting point is not feasible in block " + std::to_string(i));
    if (cfg.surrogate != SurrogateKind::Linearized && !p.smooth.is_convex())
        throw InvalidArgument("nonconvex F only runs with the linearized surrogate");
    if (cfg.error_bound == ErrorBoundKind::ProjectedGradient && p.reg.kind() != RegularizerKind::Zero)
        throw InvalidArgument("projected-gradient error bound requires G == 0");
    if (cfg.eps.alpha1 > 0.0 && p.reg.kind() != RegularizerKind::Zero &&
        !std::isfinite(p.reg.lipschitz(p.partition)))
        throw InvalidArgument("inexact block solves require a globally Lipschitz regularizer");
}

}  // namespace

SolveResult run_algorithm1(const CompositeProblem& p, const SolverConfig& cfg)
{
    return run_algorithm1(p, cfg, Vector::Zero(p.dim()));
}

SolveResult run_algorithm1(const CompositeProblem& p, const SolverConfig& cfg, const Vector& x0)
{
    TraceClock clock;
    check_start(p, cfg, x0);

    BlockEngine engine(p, cfg.workers);
    const auto& bp = p.partition;
    const auto& A = p.smooth.matrix();

    Vector tau0 = cfg.tau_init == TauInit::LassoTrace ? lasso_trace_tau(p) : expand_tau(p, cfg.tau_values);
    TauController tc(std::move(tau0), cfg.tau_change_budget, cfg.tau_halve_after);
    auto step = StepsizeState::start(cfg.gamma0, cfg.theta);

    SolveResult res;
    res.x = x0;
    Vector& x = res.x;
    Vector pred = p.smooth.predictor(x);
    double objective = p.smooth.value_from_predictor(pred) + p.reg.value(x, bp);
    tc.set_reference(objective);

    bool done = false;
    Vector best_response;
    for (std::size_t k = 0; k < cfg.max_iterations; ++k) {
        if (clock.elapsed() >= cfg.time_budget_s) {
            res.reason = TerminationReason::TimeBudget;
            done = true;
            break;
        }

        // Every block subproblem at x^k.
        BlockSweep sw;
        try {
            sw = engine.sweep(x, pred, tc.tau(), cfg.surrogate, cfg.eps, step.gamma, cfg.exact_tolerance);
        } catch (const AccuracyNotMet& e) {
            throw IterationFailure("iteration " + std::to_string(k) + ": " + e.what(), res.trace);
        }

        // Error bounds and block selection.
        const ErrorBounds eb = cfg.error_bound == ErrorBoundKind::ExactDistance
                                   ? exact_distance_bounds(bp, x, sw.z)
                                   : projected_gradient_bounds(p, x, sw.grad);
        if (!std::isfinite(eb.M) || !std::isfinite(objective))
            throw IterationFailure("iteration " + std::to_string(k) + ": objective or error bound is not finite",
                                   res.trace);
        const bool converged = eb.M <= cfg.tolerance;
        IndexList S;
        if (!converged) S = select_blocks(cfg.selection, eb.E, eb.M);

        IterationRecord rec;
        rec.k = k;
        rec.objective = objective;
        rec.stationarity = eb.M;
        rec.selected = S.size();
        rec.gamma = step.gamma;
        rec.tau_min = tc.tau_min();
        rec.tau_max = tc.tau_max();
        for (auto i : S) rec.eps_total += sw.certified[i];
        rec.elapsed_s = clock.elapsed();
        res.trace.push_back(rec);

        if (cfg.observer) {
            cfg.observer(IterationSnapshot{k, x, sw.z, sw.grad, sw.eps, sw.certified, eb, S, step.gamma, tc.tau(),
                                           objective});
        }
        if (converged) {
            res.reason = TerminationReason::Converged;
            res.iterations = k;
            best_response = std::move(sw.z);
            done = true;
            break;
        }

        // x^{k+1} = x^k + gamma^k (zhat^k - x^k), zhat_i = x_i off S.
        for (auto i : S) {
            const Index off = bp.offset(i);
            const Index ni = bp.size(i);
            const Vector delta = step.gamma * (sw.z.segment(off, ni) - x.segment(off, ni));
            x.segment(off, ni) += delta;
            pred.noalias() += A.middleCols(off, ni) * delta;
        }
        res.iterations = k + 1;

        if (cfg.cache_refresh_interval > 0 && (k + 1) % cfg.cache_refresh_interval == 0) {
            const Vector fresh = p.smooth.predictor(x);
            const double drift = (fresh - pred).norm() / std::max(1.0, fresh.norm());
            res.max_cache_drift = std::max(res.max_cache_drift, drift);
            pred = fresh;
        }

        objective = p.smooth.value_from_predictor(pred) + p.reg.value(x, bp);
        tc.update(objective);
        gamma_next(step);
    }
    if (!done) res.reason = TerminationReason::IterationCap;

    // A converged run reports the block best response at x^k: it lies within
    // M^k of x^k and carries the exact zero pattern of the regularizer.
    res.last_iterate = x;
    if (res.reason == TerminationReason::Converged) res.x = std::move(best_response);
    res.final_objective = eval_objective(p, res.x);
    const Vector exact = engine
                             .sweep(res.x, p.smooth.predictor(res.x), tc.tau(), cfg.surrogate,
                                    Vector::Zero(p.num_blocks()), cfg.exact_tolerance)
                             .z;
    res.final_stationarity = exact_distance_bounds(bp, res.x, exact).M;
    res.tau = tc.tau();
    res.elapsed_s = clock.elapsed();
    return res;
}

// ---------------------------------------------------------------------------
// Checkable inequalities
// ---------------------------------------------------------------------------

DescentCheck verify_descent_inequality(const CompositeProblem& p, const Vector& y, const Vector& tau,
                                       const IndexList& S, SurrogateKind kind)
{
    const auto& bp = p.partition;
    BlockEngine engine(p, 1);
    const auto sw = engine.sweep(y, p.smooth.predictor(y), tau, kind, Vector::Zero(p.num_blocks()), 1e-14);
    double lin = 0.0;
    double dist2 = 0.0;
    for (auto i : S) {
        bp.check_index(i);
        const Vector d = bp.block(sw.z, i) - bp.block(y, i);
        lin += d.dot(bp.block(sw.grad, i)) + p.reg.block_value(bp.block(sw.z, i)) - p.reg.block_value(bp.block(y, i));
        dist2 += d.squaredNorm();
    }
    DescentCheck out;
    out.lhs = lin;
    out.rhs = -tau.minCoeff() * dist2;
    out.holds = out.lhs <= out.rhs + 1e-8;
    return out;
}

bool verify_selection_bound(const BlockPartition& bp, const Vector& E, double rho, const Vector& xhat,
                            const Vector& x, const IndexList& S)
{
    if (E.size() != bp.num_blocks()) throw InvalidArgument("need one error bound per block");
    double sel2 = 0.0;
    for (auto i : S) sel2 += (bp.block(xhat, i) - bp.block(x, i)).squaredNorm();
    const double full = (xhat - x).norm();
    const double bound = rho / static_cast<double>(bp.num_blocks()) * full;
    return std::sqrt(sel2) >= bound * (1.0 - 1e-12);
}

}  // namespace fpa
