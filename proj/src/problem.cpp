#include <fpa/errors.hpp>
#include <fpa/problem.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace fpa {

// ---------------------------------------------------------------------------
// BlockPartition
// ---------------------------------------------------------------------------

BlockPartition BlockPartition::from_sizes(std::vector<Index> sizes)
{
    if (sizes.empty()) throw InvalidArgument("block partition needs at least one block");
    BlockPartition bp;
    bp.offsets_.reserve(sizes.size() + 1);
    bp.offsets_.push_back(0);
    for (auto s : sizes) {
        if (s < 1) throw InvalidArgument("block sizes must be positive, got " + std::to_string(s));
        bp.offsets_.push_back(bp.offsets_.back() + s);
    }
    bp.sizes_ = std::move(sizes);
    return bp;
}

BlockPartition BlockPartition::scalar(Index n)
{
    if (n < 1) throw InvalidArgument("dimension must be positive");
    return from_sizes(std::vector<Index>(static_cast<std::size_t>(n), 1));
}

BlockPartition BlockPartition::uniform(Index n, Index block_size)
{
    if (n < 1 || block_size < 1) throw InvalidArgument("dimension and block size must be positive");
    std::vector<Index> sizes;
    for (Index start = 0; start < n; start += block_size) sizes.push_back(std::min(block_size, n - start));
    return from_sizes(std::move(sizes));
}

void BlockPartition::check_index(Index i) const
{
    if (i < 0 || i >= num_blocks()) {
        throw InvalidArgument("block index " + std::to_string(i) + " out of range [0, " +
                              std::to_string(num_blocks()) + ")");
    }
}

// ---------------------------------------------------------------------------
// SmoothOracle
// ---------------------------------------------------------------------------

namespace {

void check_shapes(const Matrix& A, const Vector& t, const char* what)
{
    if (A.rows() != t.size()) {
        throw InvalidArgument(std::string(what) + ": matrix has " + std::to_string(A.rows()) +
                              " rows but target vector has length " + std::to_string(t.size()));
    }
    if (A.cols() < 1 || A.rows() < 1) throw InvalidArgument(std::string(what) + ": empty matrix");
}

// log(1 + exp(-t)) without overflow.
double log1p_exp_neg(double t)
{
    return t > 0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
}

double sigmoid(double z)
{
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

SmoothOracle SmoothOracle::least_squares(Matrix A, Vector b)
{
    check_shapes(A, b, "least squares");
    SmoothOracle o;
    o.kind_ = SmoothKind::LeastSquares;
    o.A_ = std::move(A);
    o.target_ = std::move(b);
    return o;
}

SmoothOracle SmoothOracle::logistic(Matrix features, Vector labels)
{
    check_shapes(features, labels, "logistic");
    SmoothOracle o;
    o.kind_ = SmoothKind::Logistic;
    o.A_ = std::move(features);
    o.target_ = std::move(labels);
    return o;
}

SmoothOracle SmoothOracle::double_well(Matrix A, Vector b)
{
    check_shapes(A, b, "double well");
    SmoothOracle o;
    o.kind_ = SmoothKind::DoubleWell;
    o.A_ = std::move(A);
    o.target_ = std::move(b);
    return o;
}

double SmoothOracle::value_from_predictor(const Vector& u) const
{
    switch (kind_) {
    case SmoothKind::LeastSquares:
        return (u - target_).squaredNorm();
    case SmoothKind::Logistic: {
        double s = 0.0;
        for (Index j = 0; j < u.size(); ++j) s += log1p_exp_neg(target_[j] * u[j]);
        return s;
    }
    case SmoothKind::DoubleWell: {
        double s = 0.0;
        for (Index j = 0; j < u.size(); ++j) {
            const double r = u[j] - target_[j];
            s += 0.25 * (r * r - 1.0) * (r * r - 1.0);
        }
        return s;
    }
    }
    return 0.0;
}

Vector SmoothOracle::loss_gradient(const Vector& u) const
{
    Vector w(u.size());
    switch (kind_) {
    case SmoothKind::LeastSquares:
        w = 2.0 * (u - target_);
        break;
    case SmoothKind::Logistic:
        for (Index j = 0; j < u.size(); ++j) w[j] = -target_[j] * sigmoid(-target_[j] * u[j]);
        break;
    case SmoothKind::DoubleWell:
        for (Index j = 0; j < u.size(); ++j) {
            const double r = u[j] - target_[j];
            w[j] = r * (r * r - 1.0);
        }
        break;
    }
    return w;
}

Vector SmoothOracle::loss_curvature(const Vector& u) const
{
    Vector d(u.size());
    switch (kind_) {
    case SmoothKind::LeastSquares:
        d.setConstant(2.0);
        break;
    case SmoothKind::Logistic:
        for (Index j = 0; j < u.size(); ++j) {
            const double s = sigmoid(target_[j] * u[j]);
            d[j] = target_[j] * target_[j] * s * (1.0 - s);
        }
        break;
    case SmoothKind::DoubleWell:
        for (Index j = 0; j < u.size(); ++j) {
            const double r = u[j] - target_[j];
            d[j] = 3.0 * r * r - 1.0;
        }
        break;
    }
    return d;
}

Vector SmoothOracle::curvature_bound() const
{
    switch (kind_) {
    case SmoothKind::LeastSquares:
        return Vector::Constant(rows(), 2.0);
    case SmoothKind::Logistic:
        return 0.25 * target_.array().square().matrix();
    case SmoothKind::DoubleWell:
        return Vector::Constant(rows(), std::numeric_limits<double>::infinity());
    }
    return {};
}

// ---------------------------------------------------------------------------
// SeparableRegularizer
// ---------------------------------------------------------------------------

SeparableRegularizer SeparableRegularizer::l1(double c)
{
    if (!(c > 0) || !std::isfinite(c)) throw InvalidArgument("l1 weight must be positive and finite");
    SeparableRegularizer r;
    r.kind_ = RegularizerKind::L1;
    r.c_ = c;
    return r;
}

SeparableRegularizer SeparableRegularizer::group_l2(double c)
{
    if (!(c > 0) || !std::isfinite(c)) throw InvalidArgument("group weight must be positive and finite");
    SeparableRegularizer r;
    r.kind_ = RegularizerKind::GroupL2;
    r.c_ = c;
    return r;
}

double SeparableRegularizer::block_value(const Eigen::Ref<const Vector>& xi) const
{
    switch (kind_) {
    case RegularizerKind::Zero: return 0.0;
    case RegularizerKind::L1: return c_ * xi.lpNorm<1>();
    case RegularizerKind::GroupL2: return c_ * xi.norm();
    }
    return 0.0;
}

double SeparableRegularizer::value(const Vector& x, const BlockPartition& partition) const
{
    double s = 0.0;
    for (Index i = 0; i < partition.num_blocks(); ++i) s += block_value(partition.block(x, i));
    return s;
}

double SeparableRegularizer::lipschitz(const BlockPartition& partition) const
{
    switch (kind_) {
    case RegularizerKind::Zero: return 0.0;
    // |c||x||_1 - c||y||_1| <= c ||x - y||_1 <= c sqrt(n) ||x - y||_2
    case RegularizerKind::L1: return c_ * std::sqrt(static_cast<double>(partition.dim()));
    // sum_i |‖x_i‖ - ‖y_i‖| <= sum_i ‖x_i - y_i‖ <= sqrt(N) ‖x - y‖
    case RegularizerKind::GroupL2: return c_ * std::sqrt(static_cast<double>(partition.num_blocks()));
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// FeasibleBlock
// ---------------------------------------------------------------------------

FeasibleBlock FeasibleBlock::box(Vector lower, Vector upper)
{
    if (lower.size() != upper.size()) throw InvalidArgument("box bounds differ in length");
    for (Index j = 0; j < lower.size(); ++j) {
        if (!(lower[j] <= upper[j])) {
            throw InvalidArgument("box lower bound exceeds upper bound at entry " + std::to_string(j));
        }
    }
    FeasibleBlock fb;
    fb.kind_ = FeasibleKind::Box;
    fb.lower_ = std::move(lower);
    fb.upper_ = std::move(upper);
    return fb;
}

Vector FeasibleBlock::project(const Eigen::Ref<const Vector>& v) const
{
    if (kind_ == FeasibleKind::AllSpace) return v;
    if (v.size() != lower_.size()) throw InvalidArgument("projection: dimension mismatch");
    return v.cwiseMax(lower_).cwiseMin(upper_);
}

bool FeasibleBlock::contains(const Eigen::Ref<const Vector>& v, double slack) const
{
    if (kind_ == FeasibleKind::AllSpace) return true;
    return ((v - lower_).array() >= -slack).all() && ((upper_ - v).array() >= -slack).all();
}

Vector project_block(const FeasibleBlock& fb, const Eigen::Ref<const Vector>& v)
{
    return fb.project(v);
}

// ---------------------------------------------------------------------------
// CompositeProblem
// ---------------------------------------------------------------------------

CompositeProblem::CompositeProblem(BlockPartition partition_, SmoothOracle smooth_, SeparableRegularizer reg_,
                                   std::vector<FeasibleBlock> feas_)
    : partition(std::move(partition_)), smooth(std::move(smooth_)), reg(reg_), feas(std::move(feas_))
{
    if (feas.empty()) feas.assign(static_cast<std::size_t>(partition.num_blocks()), FeasibleBlock::all_space());
    validate();
}

bool CompositeProblem::unconstrained() const
{
    for (const auto& f : feas)
        if (!f.is_all_space()) return false;
    return true;
}

void CompositeProblem::validate() const
{
    if (smooth.cols() != partition.dim()) {
        throw InvalidArgument("smooth oracle has " + std::to_string(smooth.cols()) +
                              " columns but the partition covers " + std::to_string(partition.dim()) +
                              " variables");
    }
    if (static_cast<Index>(feas.size()) != partition.num_blocks())
        throw InvalidArgument("need exactly one feasible block per partition block");
    for (Index i = 0; i < partition.num_blocks(); ++i) {
        const auto& f = feasible(i);
        if (!f.is_all_space() && f.lower().size() != partition.size(i))
            throw InvalidArgument("feasible block " + std::to_string(i) + " has wrong dimension");
    }
}

CompositeProblem make_lasso(Matrix A, Vector b, double c)
{
    const Index n = A.cols();
    return {BlockPartition::scalar(n), SmoothOracle::least_squares(std::move(A), std::move(b)),
            SeparableRegularizer::l1(c)};
}

CompositeProblem make_group_lasso(Matrix A, Vector b, double c, Index block_size)
{
    const Index n = A.cols();
    return {BlockPartition::uniform(n, block_size), SmoothOracle::least_squares(std::move(A), std::move(b)),
            SeparableRegularizer::group_l2(c)};
}

CompositeProblem make_sparse_logistic(Matrix features, Vector labels, double c)
{
    const Index n = features.cols();
    return {BlockPartition::scalar(n), SmoothOracle::logistic(std::move(features), std::move(labels)),
            SeparableRegularizer::l1(c)};
}

double eval_objective(const CompositeProblem& p, const Vector& x)
{
    if (x.size() != p.dim()) {
        throw InvalidArgument("point has dimension " + std::to_string(x.size()) + ", expected " +
                              std::to_string(p.dim()));
    }
    return p.smooth.value(x) + p.reg.value(x, p.partition);
}

Vector eval_block_gradient(const CompositeProblem& p, const Vector& x, Index i)
{
    if (x.size() != p.dim()) throw InvalidArgument("point dimension mismatch");
    p.partition.check_index(i);
    const Vector w = p.smooth.loss_gradient(p.smooth.predictor(x));
    return p.smooth.matrix().middleCols(p.partition.offset(i), p.partition.size(i)).transpose() * w;
}

double weighted_gram_spectral_norm(const Matrix& A, const Vector& weights, int max_iter, double rel_tol)
{
    const Index n = A.cols();
    Vector v(n);
    // Deterministic start that is not orthogonal to any coordinate axis.
    for (Index j = 0; j < n; ++j) v[j] = 1.0 + 0.5 * std::sin(static_cast<double>(j) + 1.0);
    v.normalize();

    double lambda = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        const Vector y = weights.cwiseProduct(A * v);
        Vector z = A.transpose() * y;
        const double next = v.dot(z);
        const double nz = z.norm();
        if (nz == 0.0) return 0.0;
        v = z / nz;
        if (it > 0 && std::abs(next - lambda) <= rel_tol * std::abs(next)) return next;
        lambda = next;
    }
    throw NumericFailure("power iteration did not converge in " + std::to_string(max_iter) + " iterations",
                         lambda);
}

double estimate_lipschitz_gradient(const CompositeProblem& p)
{
    if (auto cached = p.smooth.lipschitz_grad()) return *cached;
    switch (p.smooth.kind()) {
    case SmoothKind::LeastSquares:
        return 2.0 * weighted_gram_spectral_norm(p.smooth.matrix(), Vector::Ones(p.smooth.rows()));
    case SmoothKind::Logistic:
        return weighted_gram_spectral_norm(p.smooth.matrix(), p.smooth.curvature_bound());
    case SmoothKind::DoubleWell:
        break;
    }
    throw InvalidArgument("gradient of the double-well oracle has no global Lipschitz constant");
}

double estimate_lipschitz_gradient(CompositeProblem& p)
{
    const double L = estimate_lipschitz_gradient(static_cast<const CompositeProblem&>(p));
    p.smooth.set_lipschitz_grad(L);
    return L;
}

}  // namespace fpa
