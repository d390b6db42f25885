#include <fpa/errors.hpp>
#include <fpa/selection.hpp>

#include <algorithm>
#include <cmath>

namespace fpa {

StepsizeState StepsizeState::start(double gamma0, double theta)
{
    if (!(gamma0 > 0.0 && gamma0 <= 1.0)) throw InvalidArgument("gamma0 must lie in (0, 1]");
    if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
    return {gamma0, theta, gamma0};
}

double gamma_next(StepsizeState& s)
{
    s.gamma = s.gamma * (1.0 - s.theta * s.gamma);
    return s.gamma;
}

ErrorBounds exact_distance_bounds(const BlockPartition& bp, const Vector& x, const Vector& xhat)
{
    if (x.size() != bp.dim() || xhat.size() != bp.dim()) throw InvalidArgument("error bounds: dimension mismatch");
    ErrorBounds eb;
    eb.E.resize(bp.num_blocks());
    for (Index i = 0; i < bp.num_blocks(); ++i) eb.E[i] = (bp.block(xhat, i) - bp.block(x, i)).norm();
    eb.M = eb.E.size() > 0 ? eb.E.maxCoeff() : 0.0;
    return eb;
}

ErrorBounds projected_gradient_bounds(const CompositeProblem& p, const Vector& x, const Vector& grad)
{
    if (p.reg.kind() != RegularizerKind::Zero)
        throw InvalidArgument("projected-gradient error bound is only available when G == 0");
    const auto& bp = p.partition;
    ErrorBounds eb;
    eb.E.resize(bp.num_blocks());
    for (Index i = 0; i < bp.num_blocks(); ++i) {
        const Vector xi = bp.block(x, i);
        eb.E[i] = (p.feasible(i).project(xi - bp.block(grad, i)) - xi).norm();
    }
    eb.M = eb.E.size() > 0 ? eb.E.maxCoeff() : 0.0;
    return eb;
}

IndexList select_blocks(const SelectionPolicy& policy, const Vector& E, double M)
{
    if (!(policy.rho > 0.0 && policy.rho <= 1.0)) throw InvalidArgument("rho must lie in (0, 1]");
    const Index N = E.size();
    IndexList all(static_cast<std::size_t>(N));
    for (Index i = 0; i < N; ++i) all[static_cast<std::size_t>(i)] = i;
    if (M <= 0.0 || policy.mode == SelectionMode::FullJacobi) return all;

    if (policy.mode == SelectionMode::SingleGreedy) {
        Index best = 0;
        E.maxCoeff(&best);
        return {best};
    }
    IndexList S;
    const double threshold = policy.rho * M;
    for (Index i = 0; i < N; ++i)
        if (E[i] >= threshold) S.push_back(i);
    return S;
}

TauController::TauController(Vector tau, int change_budget, int halve_after)
    : tau_(std::move(tau)), budget_(change_budget), halve_after_(halve_after)
{
    if (tau_.size() == 0 || !(tau_.array() > 0.0).all() || !tau_.allFinite())
        throw InvalidArgument("all tau_i must be positive and finite");
    if (change_budget < 0) throw InvalidArgument("tau change budget must be nonnegative");
    if (halve_after < 1) throw InvalidArgument("halving window must be at least one iteration");
}

const Vector& TauController::update(double current_objective)
{
    if (!last_) {
        last_ = current_objective;
        return tau_;
    }
    const bool decreased = current_objective < *last_;
    last_ = current_objective;
    if (!decreased) {
        consecutive_ = 0;
        if (budget_ > 0) {
            tau_ *= 2.0;
            --budget_;
            ++doublings_;
        }
        return tau_;
    }
    if (++consecutive_ >= halve_after_) {
        consecutive_ = 0;
        if (budget_ > 0) {
            tau_ *= 0.5;
            --budget_;
            ++halvings_;
        }
    }
    return tau_;
}

double EpsilonSchedule::epsilon_for_block(double gamma, double grad_norm) const
{
    if (alpha1 == 0.0) return 0.0;
    const double inv = grad_norm > 0.0 ? 1.0 / grad_norm : alpha2;
    return gamma * alpha1 * std::min(alpha2, inv);
}

}  // namespace fpa
