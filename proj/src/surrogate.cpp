#include <fpa/errors.hpp>
#include <fpa/surrogate.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fpa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Spectrum {
    double min = 0.0;
    double max = 0.0;
};

Spectrum symmetric_spectrum(const Matrix& H)
{
    if (H.rows() == 1) return {H(0, 0), H(0, 0)};
    Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

void require_psd(const Matrix& H)
{
    const auto sp = symmetric_spectrum(H);
    if (sp.min < -1e-10 * std::max(1.0, std::abs(sp.max))) {
        throw InvalidArgument("block Hessian is not positive semidefinite (min eigenvalue " + std::to_string(sp.min) +
                              "); the surrogate would not be convex");
    }
}

}  // namespace

const char* to_string(SurrogateKind kind) noexcept
{
    switch (kind) {
    case SurrogateKind::Linearized: return "linear";
    case SurrogateKind::ExactBlock: return "exact";
    case SurrogateKind::NewtonBlock: return "newton";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// SurrogateContext / Anchor
// ---------------------------------------------------------------------------

SurrogateContext::SurrogateContext(const CompositeProblem& problem) : problem_(&problem)
{
    const auto& bp = problem.partition;
    const auto& A = problem.smooth.matrix();
    const Vector bound = problem.smooth.curvature_bound();
    const bool finite_bound = bound.allFinite();
    gram_.resize(static_cast<std::size_t>(bp.num_blocks()));
    block_lipschitz_.resize(gram_.size(), kInf);
    for (Index i = 0; i < bp.num_blocks(); ++i) {
        const auto cols = A.middleCols(bp.offset(i), bp.size(i));
        auto& G = gram_[static_cast<std::size_t>(i)];
        G = cols.transpose() * cols;
        if (!finite_bound) continue;
        const Matrix W = cols.transpose() * bound.asDiagonal() * cols;
        block_lipschitz_[static_cast<std::size_t>(i)] = symmetric_spectrum(W).max;
    }
}

Anchor make_anchor(const CompositeProblem& p, const Vector& x, const Vector& predictor, SurrogateKind kind)
{
    Anchor a;
    a.x = &x;
    a.predictor = &predictor;
    a.loss_grad = p.smooth.loss_gradient(predictor);
    a.smooth_value = p.smooth.value_from_predictor(predictor);
    if (kind == SurrogateKind::NewtonBlock && p.smooth.kind() != SmoothKind::LeastSquares)
        a.loss_curv = p.smooth.loss_curvature(predictor);
    return a;
}

// ---------------------------------------------------------------------------
// BlockModel
// ---------------------------------------------------------------------------

BlockModel BlockModel::linearized(Vector anchor_point, Vector grad, double base_value)
{
    if (anchor_point.size() != grad.size()) throw InvalidArgument("linearized model: size mismatch");
    BlockModel m;
    m.kind_ = SurrogateKind::Linearized;
    m.anchor_ = std::move(anchor_point);
    m.grad_ = std::move(grad);
    m.base_ = base_value;
    return m;
}

BlockModel BlockModel::quadratic(Vector anchor_point, Vector grad, Matrix hess, double base_value)
{
    const Index n = anchor_point.size();
    if (grad.size() != n || hess.rows() != n || hess.cols() != n)
        throw InvalidArgument("quadratic model: size mismatch");
    require_psd(hess);
    BlockModel m;
    m.kind_ = SurrogateKind::NewtonBlock;
    m.anchor_ = std::move(anchor_point);
    m.grad_ = std::move(grad);
    m.lipschitz_ = std::max(0.0, symmetric_spectrum(hess).max);
    m.hess_ = std::move(hess);
    m.base_ = base_value;
    return m;
}

BlockModel BlockModel::build(const SurrogateContext& ctx, const Anchor& anchor, Index i, SurrogateKind kind)
{
    const auto& p = ctx.problem();
    p.partition.check_index(i);
    const Index off = p.partition.offset(i);
    const Index ni = p.partition.size(i);
    const auto cols = p.smooth.matrix().middleCols(off, ni);
    Vector xi = anchor.x->segment(off, ni);
    Vector grad = cols.transpose() * anchor.loss_grad;

    switch (kind) {
    case SurrogateKind::Linearized:
        return linearized(std::move(xi), std::move(grad), anchor.smooth_value);

    case SurrogateKind::NewtonBlock: {
        Matrix H = p.smooth.kind() == SmoothKind::LeastSquares
                       ? Matrix(2.0 * ctx.gram(i))
                       : Matrix(cols.transpose() * anchor.loss_curv.asDiagonal() * cols);
        return quadratic(std::move(xi), std::move(grad), std::move(H), anchor.smooth_value);
    }

    case SurrogateKind::ExactBlock: {
        if (!p.smooth.is_convex())
            throw InvalidArgument("exact block surrogate requires F convex along each block");
        if (p.smooth.kind() == SmoothKind::LeastSquares) {
            // F is quadratic, so its second-order expansion is exact.
            auto m = quadratic(std::move(xi), std::move(grad), 2.0 * ctx.gram(i), anchor.smooth_value);
            m.kind_ = SurrogateKind::ExactBlock;
            return m;
        }
        BlockModel m;
        m.kind_ = SurrogateKind::ExactBlock;
        m.anchor_ = std::move(xi);
        m.grad_ = std::move(grad);
        m.base_ = anchor.smooth_value;
        m.lipschitz_ = ctx.block_curvature_bound(i);
        m.oracle_ = &p.smooth;
        m.predictor_ = anchor.predictor;
        m.offset_ = off;
        return m;
    }
    }
    throw InvalidArgument("unknown surrogate kind");
}

double BlockModel::value(const Vector& u) const
{
    const Vector d = u - anchor_;
    if (oracle_ != nullptr) {
        const Vector pred = *predictor_ + oracle_->matrix().middleCols(offset_, size()) * d;
        return oracle_->value_from_predictor(pred);
    }
    double v = base_ + grad_.dot(d);
    if (hess_.size() > 0) v += 0.5 * d.dot(hess_ * d);
    return v;
}

Vector BlockModel::gradient(const Vector& u) const
{
    const Vector d = u - anchor_;
    if (oracle_ != nullptr) {
        const auto cols = oracle_->matrix().middleCols(offset_, size());
        const Vector pred = *predictor_ + cols * d;
        return cols.transpose() * oracle_->loss_gradient(pred);
    }
    if (hess_.size() > 0) return grad_ + hess_ * d;
    return grad_;
}

double BlockSubproblem::value(const Vector& u) const
{
    return model.value(u) + 0.5 * tau * (u - model.anchor()).squaredNorm() + reg.block_value(u);
}

// ---------------------------------------------------------------------------
// Shrinkage operators
// ---------------------------------------------------------------------------

double soft_threshold(double v, double t)
{
    // |v| == t lands on 0.
    const double mag = std::abs(v) - t;
    if (mag <= 0.0) return 0.0;
    return v > 0 ? mag : -mag;
}

Vector soft_threshold(const Vector& v, double t)
{
    return v.unaryExpr([t](double e) { return soft_threshold(e, t); });
}

Vector group_soft_threshold(const Vector& v, double t)
{
    const double nv = v.norm();
    if (nv <= t) return Vector::Zero(v.size());
    return (1.0 - t / nv) * v;
}

Vector prox_block(const SeparableRegularizer& reg, const FeasibleBlock& feas, const Vector& v, double step)
{
    switch (reg.kind()) {
    case RegularizerKind::Zero:
        return feas.project(v);
    case RegularizerKind::L1:
        return feas.project(soft_threshold(v, reg.weight() * step));
    case RegularizerKind::GroupL2:
        if (v.size() == 1) return feas.project(soft_threshold(v, reg.weight() * step));
        if (!feas.is_all_space())
            throw InvalidArgument("group-norm regularizer combined with box constraints is not supported");
        return group_soft_threshold(v, reg.weight() * step);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Closed-form block solvers
// ---------------------------------------------------------------------------

BlockSolution solve_block_exact_lasso(const Vector& column, const Vector& residual, double anchor, double tau,
                                      double c)
{
    if (column.size() != residual.size()) throw InvalidArgument("column and residual differ in length");
    if (tau < 0 || c < 0) throw InvalidArgument("tau and c must be nonnegative");
    const double denom = 2.0 * column.squaredNorm() + tau;
    if (denom <= 0.0) throw DegenerateSubproblem("zero column with tau = 0 has no unique block minimizer");
    BlockSolution s;
    s.z = Vector::Constant(1, soft_threshold(2.0 * column.dot(residual) + tau * anchor, c) / denom);
    return s;
}

BlockSolution solve_group_shrinkage(const Matrix& M, const Vector& rhs, double tau, double c)
{
    const Index n = rhs.size();
    BlockSolution s;
    if (rhs.norm() <= c) {
        s.z = Vector::Zero(n);
        return s;
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const Vector mu = (es.eigenvalues().array().max(0.0) + tau).matrix();
    const Vector w = es.eigenvectors().transpose() * rhs;
    const double mu_min = mu.minCoeff();
    const double mu_max = mu.maxCoeff();
    if (!(mu_min > 0.0)) throw NumericFailure("group block: no finite bracket for ||u|| (M + tau I singular)", 0.0);

    // ||u(s)|| = s  <=>  phi(s) = sum_j w_j^2 / (mu_j s + c)^2 - 1 = 0, phi decreasing,
    // phi(0) > 0 since ||rhs|| > c, phi(||rhs|| / mu_min) < 0.
    auto phi = [&](double t) {
        return (w.array().square() / (mu.array() * t + c).square()).sum() - 1.0;
    };
    double lo = 0.0;
    double hi = w.norm() / mu_min;
    if (!(phi(hi) <= 0.0)) throw NumericFailure("group block: root bracket failed", hi);
    // Bisect down to adjacent doubles; well inside the 1e-12 target.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (phi(mid) > 0.0 ? lo : hi) = mid;
        s.inner_iterations = static_cast<std::size_t>(it + 1);
    }
    const double t = 0.5 * (lo + hi);
    const Vector scaled = (t * w.array() / (mu.array() * t + c)).matrix();
    s.z = es.eigenvectors() * scaled;

    // Distance certificate from one proximal-gradient step on the block problem.
    const double L = mu_max;
    const Vector grad = M * s.z - rhs + tau * s.z;
    const Vector step = group_soft_threshold(s.z - grad / L, c / L);
    s.certified_accuracy = (s.z - step).norm() * (L / mu_min);
    return s;
}

BlockSolution solve_block_exact_group(const Matrix& block_columns, const Vector& residual, const Vector& anchor,
                                      double tau, double c)
{
    if (block_columns.rows() != residual.size() || block_columns.cols() != anchor.size())
        throw InvalidArgument("group block: dimension mismatch");
    const Matrix M = 2.0 * block_columns.transpose() * block_columns;
    const Vector rhs = 2.0 * block_columns.transpose() * residual + tau * anchor;
    return solve_group_shrinkage(M, rhs, tau, c);
}

bool has_closed_form(const BlockSubproblem& sub)
{
    const auto& m = sub.model;
    if (!m.is_quadratic()) return false;
    if (m.size() == 1) return true;
    if (m.kind() == SurrogateKind::Linearized)
        return sub.reg.kind() != RegularizerKind::GroupL2 || sub.feas.is_all_space();
    if (!sub.feas.is_all_space()) return false;
    return sub.reg.kind() != RegularizerKind::L1;
}

BlockSolution solve_block_closed_form(const BlockSubproblem& sub)
{
    if (!has_closed_form(sub)) throw InvalidArgument("block subproblem has no closed-form solution");
    const auto& m = sub.model;
    const Vector& x = m.anchor();
    const Vector& g = m.anchor_gradient();
    BlockSolution s;

    if (m.kind() == SurrogateKind::Linearized) {
        if (!(sub.tau > 0)) throw InvalidArgument("linearized block update needs tau > 0");
        s.z = prox_block(sub.reg, sub.feas, x - g / sub.tau, 1.0 / sub.tau);
        return s;
    }

    const Matrix& H = m.hessian();
    if (m.size() == 1) {
        // min g d + (h + tau) d^2 / 2 + c|x + d| over an interval: the
        // unconstrained minimizer clamped to the interval.
        const double denom = H(0, 0) + sub.tau;
        if (!(denom > 0.0)) throw DegenerateSubproblem("scalar block has zero curvature and tau = 0");
        const double v = denom * x[0] - g[0];
        const double c = sub.reg.kind() == RegularizerKind::Zero ? 0.0 : sub.reg.weight();
        s.z = sub.feas.project(Vector::Constant(1, soft_threshold(v, c) / denom));
        return s;
    }

    const Matrix K = H + sub.tau * Matrix::Identity(m.size(), m.size());
    if (sub.reg.kind() == RegularizerKind::Zero) {
        Eigen::LDLT<Matrix> ldlt(K);
        if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0))
            throw DegenerateSubproblem("block system H + tau I is singular");
        s.z = x - ldlt.solve(g);
        return s;
    }
    // Group norm, unconstrained.
    return solve_group_shrinkage(H, K * x - g, sub.tau, sub.reg.weight());
}

BlockSolution solve_block_linearized(const BlockSubproblem& sub, const Vector& grad)
{
    if (!(sub.tau > 0)) throw InvalidArgument("linearized block update needs tau > 0");
    if (grad.size() != sub.model.size()) throw InvalidArgument("gradient has wrong block size");
    BlockSolution s;
    s.z = prox_block(sub.reg, sub.feas, sub.model.anchor() - grad / sub.tau, 1.0 / sub.tau);
    return s;
}

BlockSolution solve_block_newton(const BlockSubproblem& sub, const Vector& grad, const Matrix& hess)
{
    const auto model = BlockModel::quadratic(sub.model.anchor(), grad, hess);
    const BlockSubproblem newton{model, sub.tau, sub.reg, sub.feas};
    return solve_block(newton, 0.0);
}

// ---------------------------------------------------------------------------
// Inner proximal-gradient solver
// ---------------------------------------------------------------------------

BlockSolution inexact_inner_solve(const BlockSubproblem& sub, double target_eps, InnerSolveOptions opts)
{
    if (!(target_eps >= 0.0)) throw InvalidArgument("target accuracy must be nonnegative");
    if (target_eps == 0.0 && has_closed_form(sub)) return solve_block_closed_form(sub);
    if (!(sub.tau > 0)) throw InvalidArgument("inner solver needs tau > 0 for its distance certificate");

    const auto& m = sub.model;
    const Vector& x = m.anchor();
    const double L_model = m.lipschitz();
    if (!std::isfinite(L_model)) throw InvalidArgument("inner solver needs a finite model Lipschitz constant");
    const double L = L_model + sub.tau;
    // tau-strong convexity: ||u - xhat|| <= ||u - T(u)|| * (L_model / tau + 1).
    const double factor = L_model / sub.tau + 1.0;

    Vector u = sub.feas.project(x);
    double best = kInf;
    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        const Vector grad = m.gradient(u) + sub.tau * (u - x);
        Vector next = prox_block(sub.reg, sub.feas, u - grad / L, 1.0 / L);
        const double cert = (u - next).norm() * factor;
        best = std::min(best, cert);
        if (cert <= target_eps) return {std::move(next), cert, it};
        u = std::move(next);
    }
    throw AccuracyNotMet("inner solver hit " + std::to_string(opts.max_iterations) +
                             " iterations before certifying accuracy " + std::to_string(target_eps),
                         best, opts.max_iterations);
}

BlockSolution solve_block(const BlockSubproblem& sub, double target_eps, double exact_tolerance)
{
    if (target_eps > 0.0) return inexact_inner_solve(sub, target_eps);
    if (has_closed_form(sub)) return solve_block_closed_form(sub);
    return inexact_inner_solve(sub, exact_tolerance);
}

}  // namespace fpa
