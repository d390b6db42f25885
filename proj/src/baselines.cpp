#include <fpa/baselines.hpp>
#include <fpa/errors.hpp>
#include <fpa/thread_pool.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace fpa {

namespace {

double next_momentum(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

Vector prox_full(const CompositeProblem& p, const Vector& v, double step)
{
    const auto& bp = p.partition;
    Vector out(v.size());
    for (Index i = 0; i < bp.num_blocks(); ++i)
        bp.block(out, i) = prox_block(p.reg, p.feasible(i), bp.block(v, i), step);
    return out;
}

void check_x0(const CompositeProblem& p, const Vector& x0)
{
    p.validate();
    if (x0.size() != p.dim()) throw InvalidArgument("starting point has the wrong dimension");
}

}  // namespace

std::vector<double> fista_momentum_sequence(std::size_t count)
{
    std::vector<double> t;
    t.reserve(count);
    double cur = 1.0;
    for (std::size_t k = 0; k < count; ++k) {
        t.push_back(cur);
        cur = next_momentum(cur);
    }
    return t;
}

SolveResult run_fista(const CompositeProblem& p, const Vector& x0, const FistaOptions& opts)
{
    TraceClock clock;
    check_x0(p, x0);
    if (!(opts.tolerance >= 0.0)) throw InvalidArgument("tolerance must be nonnegative");

    const auto& A = p.smooth.matrix();
    const double L = estimate_lipschitz_gradient(p);
    if (!(L > 0.0)) throw NumericFailure("gradient Lipschitz constant is zero", L);
    ThreadPool pool(opts.workers);

    auto gradient_from_predictor = [&](const Vector& u) {
        const Vector w = p.smooth.loss_gradient(u);
        Vector g(p.dim());
        pool.parallel_for(static_cast<std::size_t>(p.dim()), [&](std::size_t b, std::size_t e) {
            const auto len = static_cast<Index>(e - b);
            g.segment(static_cast<Index>(b), len).noalias() =
                A.middleCols(static_cast<Index>(b), len).transpose() * w;
        });
        return g;
    };

    SolveResult res;
    res.x = x0;
    Vector& x = res.x;
    Vector Ax = A * x;
    Vector y = x;
    Vector Ay = Ax;
    double t = 1.0;
    double objective = p.smooth.value_from_predictor(Ax) + p.reg.value(x, p.partition);

    res.reason = TerminationReason::IterationCap;
    for (std::size_t k = 0; k < opts.max_iterations; ++k) {
        if (clock.elapsed() >= opts.time_budget_s) {
            res.reason = TerminationReason::TimeBudget;
            break;
        }
        const Vector g = gradient_from_predictor(Ay);
        Vector x_new = prox_full(p, y - g / L, 1.0 / L);
        const double residual = (x_new - y).norm();
        const double t_new = next_momentum(t);
        const double beta = (t - 1.0) / t_new;

        IterationRecord rec;
        rec.k = k;
        rec.objective = objective;
        rec.stationarity = residual;
        rec.selected = static_cast<std::size_t>(p.num_blocks());
        rec.gamma = beta;
        rec.tau_min = rec.tau_max = L;
        rec.elapsed_s = clock.elapsed();
        res.trace.push_back(rec);
        res.final_stationarity = residual;

        if (residual <= opts.tolerance) {
            res.reason = TerminationReason::Converged;
            break;
        }

        const Vector Ax_new = A * x_new;
        y = x_new + beta * (x_new - x);
        Ay = Ax_new + beta * (Ax_new - Ax);
        x = std::move(x_new);
        Ax = Ax_new;
        t = t_new;
        objective = p.smooth.value_from_predictor(Ax) + p.reg.value(x, p.partition);
        res.iterations = k + 1;
    }

    res.final_objective = eval_objective(p, x);
    res.tau = Vector::Constant(1, L);
    res.elapsed_s = clock.elapsed();
    return res;
}

SolveResult run_gauss_seidel(const CompositeProblem& p, const Vector& x0, const GaussSeidelOptions& opts)
{
    TraceClock clock;
    check_x0(p, x0);
    if (opts.surrogate != SurrogateKind::Linearized && !p.smooth.is_convex())
        throw InvalidArgument("nonconvex F only runs with the linearized surrogate");

    const auto& bp = p.partition;
    const auto& A = p.smooth.matrix();
    const Vector tau = opts.tau.size() == 0 ? lasso_trace_tau(p) : expand_tau(p, opts.tau);
    const SurrogateContext ctx(p);

    SolveResult res;
    res.x = x0;
    Vector& x = res.x;
    Vector pred = A * x;
    res.reason = TerminationReason::IterationCap;

    for (std::size_t sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        if (clock.elapsed() >= opts.time_budget_s) {
            res.reason = TerminationReason::TimeBudget;
            break;
        }
        const double objective = p.smooth.value_from_predictor(pred) + p.reg.value(x, bp);
        double largest_change = 0.0;
        for (Index i = 0; i < bp.num_blocks(); ++i) {
            const Anchor anchor = make_anchor(p, x, pred, opts.surrogate);
            const auto model = BlockModel::build(ctx, anchor, i, opts.surrogate);
            const BlockSubproblem sub{model, tau[i], p.reg, p.feasible(i)};
            const auto sol = solve_block(sub, 0.0, opts.exact_tolerance);
            const Vector delta = sol.z - bp.block(x, i);
            const double change = delta.norm();
            if (!std::isfinite(change))
                throw IterationFailure("sweep " + std::to_string(sweep) + ": block update is not finite", res.trace);
            largest_change = std::max(largest_change, change);
            bp.block(x, i) = sol.z;
            pred.noalias() += A.middleCols(bp.offset(i), bp.size(i)) * delta;
        }

        IterationRecord rec;
        rec.k = sweep;
        rec.objective = objective;
        rec.stationarity = largest_change;
        rec.selected = static_cast<std::size_t>(bp.num_blocks());
        rec.gamma = 1.0;
        rec.tau_min = tau.minCoeff();
        rec.tau_max = tau.maxCoeff();
        rec.elapsed_s = clock.elapsed();
        res.trace.push_back(rec);
        res.iterations = sweep + 1;
        res.final_stationarity = largest_change;

        if (largest_change <= opts.tolerance) {
            res.reason = TerminationReason::Converged;
            break;
        }
    }

    res.final_objective = eval_objective(p, x);
    res.tau = tau;
    res.elapsed_s = clock.elapsed();
    return res;
}

}  // namespace fpa
