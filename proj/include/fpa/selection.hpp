#pragma once

#include <fpa/problem.hpp>
#include <fpa/types.hpp>

#include <optional>

namespace fpa {

// ---------------------------------------------------------------------------
// Diminishing stepsize gamma^{k+1} = gamma^k (1 - theta gamma^k).
// ---------------------------------------------------------------------------
struct StepsizeState {
    double gamma = 0.9;
    double theta = 1e-3;
    double gamma0 = 0.9;

    /// Validates gamma0 in (0, 1] and theta in (0, 1).
    static StepsizeState start(double gamma0, double theta);
};

/// Advances `s` and returns the new gamma.
double gamma_next(StepsizeState& s);

// ---------------------------------------------------------------------------
// Error bounds E_i and M = max_i E_i.
// ---------------------------------------------------------------------------
enum class ErrorBoundKind {
    ExactDistance,      // ||xhat_i - x_i||
    ProjectedGradient,  // ||P_{X_i}(x_i - grad_i F) - x_i||, G == 0 only
};

struct ErrorBounds {
    Vector E;
    double M = 0.0;
};

ErrorBounds exact_distance_bounds(const BlockPartition& bp, const Vector& x, const Vector& xhat);
/// `grad` is the full gradient of F at x.
ErrorBounds projected_gradient_bounds(const CompositeProblem& p, const Vector& x, const Vector& grad);

// ---------------------------------------------------------------------------
// Block selection S^k.
// ---------------------------------------------------------------------------
enum class SelectionMode {
    ThresholdAll,  // every i with E_i >= rho M
    FullJacobi,    // all blocks
    SingleGreedy,  // argmax E_i (lowest index on ties)
};

struct SelectionPolicy {
    double rho = 0.5;
    SelectionMode mode = SelectionMode::ThresholdAll;
};

/// Never empty. When M == 0 every block is returned.
IndexList select_blocks(const SelectionPolicy& policy, const Vector& E, double M);

// ---------------------------------------------------------------------------
// Proximal weight adaptation: double all tau_i when the objective fails to
// decrease, halve them after `halve_after` consecutive decreases. Every
// adjustment spends one unit of a finite budget.
// ---------------------------------------------------------------------------
class TauController {
public:
    TauController() = default;
    TauController(Vector tau, int change_budget = 50, int halve_after = 10);

    const Vector& tau() const noexcept { return tau_; }
    double tau_min() const { return tau_.minCoeff(); }
    double tau_max() const { return tau_.maxCoeff(); }
    int remaining_budget() const noexcept { return budget_; }
    int consecutive_decreases() const noexcept { return consecutive_; }
    int doublings() const noexcept { return doublings_; }
    int halvings() const noexcept { return halvings_; }
    std::optional<double> last_objective() const noexcept { return last_; }

    /// Records a reference objective without adapting tau.
    void set_reference(double objective) { last_ = objective; }
    /// Feeds V(x^{k+1}); returns the (possibly) updated tau.
    const Vector& update(double current_objective);

private:
    Vector tau_;
    int budget_ = 0;
    int halve_after_ = 10;
    int consecutive_ = 0;
    int doublings_ = 0;
    int halvings_ = 0;
    std::optional<double> last_;
};

inline const Vector& tau_update(TauController& tc, double current_objective)
{
    return tc.update(current_objective);
}

// ---------------------------------------------------------------------------
// Inexactness schedule eps_i^k = gamma^k alpha1 min{alpha2, 1/||grad_i F||}.
// ---------------------------------------------------------------------------
struct EpsilonSchedule {
    double alpha1 = 0.0;
    double alpha2 = 1.0;

    double epsilon_for_block(double gamma, double grad_norm) const;
};

inline double epsilon_for_block(const EpsilonSchedule& s, double gamma, double grad_norm)
{
    return s.epsilon_for_block(gamma, grad_norm);
}

}  // namespace fpa
