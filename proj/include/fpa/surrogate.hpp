#pragma once

#include <fpa/problem.hpp>
#include <fpa/types.hpp>

#include <cstddef>
#include <limits>
#include <vector>

namespace fpa {

/// Convex block approximations P_i(.; x) of F around an anchor x.
enum class SurrogateKind {
    Linearized,   // F(x) + grad_i F(x)^T (u - x_i)
    ExactBlock,   // F(u, x_{-i}); needs F convex along the block
    NewtonBlock,  // second-order expansion of F along the block
};

const char* to_string(SurrogateKind kind) noexcept;

/// Per-problem data shared by every block model: Gram blocks A_i^T A_i and
/// curvature bounds. Built once, read concurrently afterwards.
class SurrogateContext {
public:
    explicit SurrogateContext(const CompositeProblem& problem);

    const CompositeProblem& problem() const noexcept { return *problem_; }
    const Matrix& gram(Index i) const { return gram_.at(static_cast<std::size_t>(i)); }
    /// Global bound on the curvature of F(., x_{-i}) along block i.
    double block_curvature_bound(Index i) const { return block_lipschitz_.at(static_cast<std::size_t>(i)); }

private:
    const CompositeProblem* problem_;
    std::vector<Matrix> gram_;
    std::vector<double> block_lipschitz_;
};

/// Quantities at the anchor x that every block model reads: the predictor
/// u = A x, the loss gradient w (grad F = A^T w) and, for Newton models, the
/// loss curvature.
struct Anchor {
    const Vector* x = nullptr;
    const Vector* predictor = nullptr;
    Vector loss_grad;
    Vector loss_curv;
    double smooth_value = 0.0;
};

Anchor make_anchor(const CompositeProblem& p, const Vector& x, const Vector& predictor, SurrogateKind kind);

/// P_i(.; x) restricted to one block. Holds non-owning pointers into the
/// Anchor and SurrogateContext it was built from.
class BlockModel {
public:
    static BlockModel build(const SurrogateContext& ctx, const Anchor& anchor, Index i, SurrogateKind kind);
    static BlockModel linearized(Vector anchor_point, Vector grad, double base_value = 0.0);
    /// P(u) = base + g^T d + d^T H d / 2 with d = u - anchor. H must be PSD.
    static BlockModel quadratic(Vector anchor_point, Vector grad, Matrix hess, double base_value = 0.0);

    SurrogateKind kind() const noexcept { return kind_; }
    Index size() const noexcept { return anchor_.size(); }
    const Vector& anchor() const noexcept { return anchor_; }
    /// grad_{x_i} F(x), which equals the model gradient at the anchor.
    const Vector& anchor_gradient() const noexcept { return grad_; }
    bool is_quadratic() const noexcept { return hess_.size() > 0 || kind_ == SurrogateKind::Linearized; }
    /// Hessian of a quadratic model; empty for linear and non-quadratic models.
    const Matrix& hessian() const noexcept { return hess_; }

    double value(const Vector& u) const;
    Vector gradient(const Vector& u) const;
    /// Lipschitz constant of u -> gradient(u).
    double lipschitz() const noexcept { return lipschitz_; }

private:
    SurrogateKind kind_ = SurrogateKind::Linearized;
    Vector anchor_;
    Vector grad_;
    Matrix hess_;
    double base_ = 0.0;
    double lipschitz_ = 0.0;

    // Non-quadratic exact block model.
    const SmoothOracle* oracle_ = nullptr;
    const Vector* predictor_ = nullptr;
    Index offset_ = 0;
};

/// The tau-regularized block problem
///   min_{u in X_i} P_i(u; x) + tau/2 ||u - x_i||^2 + g_i(u).
struct BlockSubproblem {
    const BlockModel& model;
    double tau;
    const SeparableRegularizer& reg;
    const FeasibleBlock& feas;

    double value(const Vector& u) const;
};

struct BlockSolution {
    Vector z;
    /// Guaranteed bound on ||z - xhat||.
    double certified_accuracy = 0.0;
    std::size_t inner_iterations = 0;
};

double soft_threshold(double v, double t);
Vector soft_threshold(const Vector& v, double t);
Vector group_soft_threshold(const Vector& v, double t);

/// prox of step * g_i plus the indicator of X_i.
Vector prox_block(const SeparableRegularizer& reg, const FeasibleBlock& feas, const Vector& v, double step);

/// Scalar Lasso block: argmin ||a u - r||^2 + tau/2 (u - anchor)^2 + c|u|,
/// with r = b - A_{-i} x_{-i}.
BlockSolution solve_block_exact_lasso(const Vector& column, const Vector& residual, double anchor, double tau,
                                      double c);

/// argmin_u u^T M u / 2 - rhs^T u + tau/2 ||u||^2 + c ||u||_2 with M PSD and
/// M + tau I positive definite, via bisection on the scalar ||u||.
BlockSolution solve_group_shrinkage(const Matrix& M, const Vector& rhs, double tau, double c);

/// Group Lasso block with least-squares F: M = 2 A_i^T A_i,
/// rhs = 2 A_i^T r + tau x_i.
BlockSolution solve_block_exact_group(const Matrix& block_columns, const Vector& residual, const Vector& anchor,
                                      double tau, double c);

BlockSolution solve_block_linearized(const BlockSubproblem& sub, const Vector& grad);
BlockSolution solve_block_newton(const BlockSubproblem& sub, const Vector& grad, const Matrix& hess);

/// True when `sub` has a closed-form (or scalar root-find) minimizer.
bool has_closed_form(const BlockSubproblem& sub);
/// Exact minimizer through the closed-form paths. Throws InvalidArgument when
/// has_closed_form(sub) is false.
BlockSolution solve_block_closed_form(const BlockSubproblem& sub);

struct InnerSolveOptions {
    std::size_t max_iterations = 100000;
};

/// Proximal-gradient iterations on the block problem until the fixed-point
/// residual certifies ||z - xhat|| <= target_eps. Delegates to the closed
/// form when target_eps == 0 and one exists.
BlockSolution inexact_inner_solve(const BlockSubproblem& sub, double target_eps, InnerSolveOptions opts = {});

/// Dispatch used by the solvers: target_eps > 0 goes through the inner solver,
/// target_eps == 0 uses the closed form or, failing that, the inner solver at
/// `exact_tolerance`.
BlockSolution solve_block(const BlockSubproblem& sub, double target_eps, double exact_tolerance = 1e-12);

}  // namespace fpa
