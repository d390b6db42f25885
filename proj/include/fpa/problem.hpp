#pragma once

#include <fpa/types.hpp>

#include <optional>
#include <vector>

namespace fpa {

// ---------------------------------------------------------------------------
// Block partition x = (x_1, ..., x_N), x_i in R^{n_i}.
// ---------------------------------------------------------------------------
class BlockPartition {
public:
    BlockPartition() = default;

    static BlockPartition from_sizes(std::vector<Index> sizes);
    /// All blocks scalar (n_i = 1).
    static BlockPartition scalar(Index n);
    /// Blocks of `block_size` variables; the last block takes the remainder.
    static BlockPartition uniform(Index n, Index block_size);

    Index num_blocks() const noexcept { return static_cast<Index>(sizes_.size()); }
    Index dim() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }
    Index size(Index i) const { return sizes_.at(static_cast<std::size_t>(i)); }
    Index offset(Index i) const { return offsets_.at(static_cast<std::size_t>(i)); }
    bool is_scalar() const noexcept { return dim() == num_blocks(); }
    const std::vector<Index>& sizes() const noexcept { return sizes_; }
    /// N + 1 entries; offsets()[N] == dim().
    const std::vector<Index>& offsets() const noexcept { return offsets_; }

    auto block(Vector& x, Index i) const { return x.segment(offset(i), size(i)); }
    auto block(const Vector& x, Index i) const { return x.segment(offset(i), size(i)); }

    void check_index(Index i) const;

private:
    std::vector<Index> sizes_;
    std::vector<Index> offsets_;
};

// ---------------------------------------------------------------------------
// Smooth part F. Every supported F depends on x only through the linear
// predictor u = A x, so F(x) = loss(u), grad F = A^T loss'(u) and
// hess F = A^T diag(loss''(u)) A.
// ---------------------------------------------------------------------------
enum class SmoothKind {
    LeastSquares,  // ||A x - b||^2
    Logistic,      // sum_j log(1 + exp(-a_j y_j^T x)), rows of A are y_j^T
    DoubleWell,    // (1/4) sum_j ((A x - b)_j^2 - 1)^2, nonconvex test oracle
};

class SmoothOracle {
public:
    SmoothOracle() = default;

    static SmoothOracle least_squares(Matrix A, Vector b);
    static SmoothOracle logistic(Matrix features, Vector labels);
    static SmoothOracle double_well(Matrix A, Vector b);

    SmoothKind kind() const noexcept { return kind_; }
    const Matrix& matrix() const noexcept { return A_; }
    /// b for least squares / double well, labels for logistic.
    const Vector& target() const noexcept { return target_; }
    Index rows() const noexcept { return A_.rows(); }
    Index cols() const noexcept { return A_.cols(); }
    bool is_convex() const noexcept { return kind_ != SmoothKind::DoubleWell; }

    Vector predictor(const Vector& x) const { return A_ * x; }
    double value_from_predictor(const Vector& u) const;
    /// w with grad F = A^T w.
    Vector loss_gradient(const Vector& u) const;
    /// d with hess F = A^T diag(d) A.
    Vector loss_curvature(const Vector& u) const;
    /// Pointwise upper bound on loss_curvature over all u (infinite for DoubleWell).
    Vector curvature_bound() const;

    double value(const Vector& x) const { return value_from_predictor(predictor(x)); }
    Vector gradient(const Vector& x) const { return A_.transpose() * loss_gradient(predictor(x)); }

    std::optional<double> lipschitz_grad() const noexcept { return lipschitz_grad_; }
    void set_lipschitz_grad(double L) { lipschitz_grad_ = L; }

private:
    SmoothKind kind_ = SmoothKind::LeastSquares;
    Matrix A_;
    Vector target_;
    std::optional<double> lipschitz_grad_;
};

// ---------------------------------------------------------------------------
// Separable regularizer G(x) = sum_i g_i(x_i).
// ---------------------------------------------------------------------------
enum class RegularizerKind { Zero, L1, GroupL2 };

class SeparableRegularizer {
public:
    SeparableRegularizer() = default;

    static SeparableRegularizer zero() { return {}; }
    static SeparableRegularizer l1(double c);
    static SeparableRegularizer group_l2(double c);

    RegularizerKind kind() const noexcept { return kind_; }
    double weight() const noexcept { return c_; }

    /// g_i evaluated on one block.
    double block_value(const Eigen::Ref<const Vector>& xi) const;
    double value(const Vector& x, const BlockPartition& partition) const;
    /// Global Lipschitz constant of G in the Euclidean norm.
    double lipschitz(const BlockPartition& partition) const;

private:
    RegularizerKind kind_ = RegularizerKind::Zero;
    double c_ = 0.0;
};

// ---------------------------------------------------------------------------
// Feasible block X_i.
// ---------------------------------------------------------------------------
enum class FeasibleKind { AllSpace, Box };

class FeasibleBlock {
public:
    FeasibleBlock() = default;

    static FeasibleBlock all_space() { return {}; }
    static FeasibleBlock box(Vector lower, Vector upper);

    FeasibleKind kind() const noexcept { return kind_; }
    bool is_all_space() const noexcept { return kind_ == FeasibleKind::AllSpace; }
    const Vector& lower() const noexcept { return lower_; }
    const Vector& upper() const noexcept { return upper_; }

    Vector project(const Eigen::Ref<const Vector>& v) const;
    bool contains(const Eigen::Ref<const Vector>& v, double slack = 0.0) const;

private:
    FeasibleKind kind_ = FeasibleKind::AllSpace;
    Vector lower_;
    Vector upper_;
};

// ---------------------------------------------------------------------------
// V(x) = F(x) + G(x) over X = X_1 x ... x X_N.
// ---------------------------------------------------------------------------
struct CompositeProblem {
    BlockPartition partition;
    SmoothOracle smooth;
    SeparableRegularizer reg;
    std::vector<FeasibleBlock> feas;

    CompositeProblem() = default;
    CompositeProblem(BlockPartition partition, SmoothOracle smooth, SeparableRegularizer reg,
                     std::vector<FeasibleBlock> feas = {});

    Index dim() const noexcept { return partition.dim(); }
    Index num_blocks() const noexcept { return partition.num_blocks(); }
    const FeasibleBlock& feasible(Index i) const { return feas.at(static_cast<std::size_t>(i)); }
    bool unconstrained() const;

    /// Throws InvalidArgument when the pieces disagree on dimensions.
    void validate() const;
};

CompositeProblem make_lasso(Matrix A, Vector b, double c);
CompositeProblem make_group_lasso(Matrix A, Vector b, double c, Index block_size);
CompositeProblem make_sparse_logistic(Matrix features, Vector labels, double c);

double eval_objective(const CompositeProblem& p, const Vector& x);
Vector eval_block_gradient(const CompositeProblem& p, const Vector& x, Index i);

/// lambda_max(A^T D A) by power iteration, D = diag(weights) >= 0.
double weighted_gram_spectral_norm(const Matrix& A, const Vector& weights, int max_iter = 20000,
                                   double rel_tol = 1e-12);

/// Lipschitz constant of grad F: 2 lambda_max(A^T A) for least squares,
/// lambda_max(Y^T diag(a^2) Y) / 4 for logistic. Caches the result on p.
double estimate_lipschitz_gradient(CompositeProblem& p);
double estimate_lipschitz_gradient(const CompositeProblem& p);

Vector project_block(const FeasibleBlock& fb, const Eigen::Ref<const Vector>& v);

}  // namespace fpa
