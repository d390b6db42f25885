#pragma once

#include <fpa/problem.hpp>
#include <fpa/types.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace fpa {

struct GeneratorParams {
    Index m = 200;
    Index n = 1000;
    /// Fraction of nonzeros in x*, in (0, 1].
    double density = 0.05;
    double c = 1.0;
    std::uint64_t seed = 0;
    /// x*_j magnitudes are scale * w_j with w_j uniform on (0, 1].
    double scale = 1.0;

    /// ceil(density * n), guarded against representation noise in density.
    Index support_size() const;
    void validate() const;
};

struct LassoInstance {
    Matrix A;
    Vector b;
    double c = 1.0;
    std::optional<Vector> x_star;
    std::optional<double> v_star;
    /// Present for generated instances.
    std::optional<GeneratorParams> params;

    CompositeProblem problem() const { return make_lasso(A, b, c); }
};

/// Lasso instance with a certified optimum for min ||A x - b||^2 + c ||x||_1:
///  1. A_ij ~ U[-1, 1], drawn column by column;
///  2. y* = g / ||g||, g_i ~ N(0, 1);
///  3. v = A^T y*;
///  4. S = indices of the ceil(density n) largest |v_j| (ties: lower index);
///  5. j in S: a_j *= (c/2) / |v_j|. j not in S, in index order: draw
///     u_j ~ U[0, 1); if |v_j| > (c/2) u_j then a_j *= (c/2) u_j / |v_j|;
///  6. j in S, in index order: x*_j = scale sign(v_j) (1 - U[0, 1));
///  7. b = A x* + y*.
/// Then grad F(x*) = -2 A^T y* meets the l1 optimality conditions at x*, and
/// V* = ||y*||^2 + c ||x*||_1.
LassoInstance generate_nesterov_lasso(const GeneratorParams& params);

/// Profiles low / medium / high / large and their desk-* counterparts
/// (m = 200, n = 1000).
GeneratorParams profile_params(const std::string& profile, std::uint64_t seed = 0);

/// Largest violation of the l1 optimality conditions at x, in the gradient
/// scale of ||A x - b||^2.
double lasso_kkt_residual(const Matrix& A, const Vector& b, double c, const Vector& x);
/// Same, at the instance's x_star (which must be present).
double lasso_kkt_residual(const LassoInstance& inst);

/// Writes A.mtx, b.txt, x_star.txt (when known) and meta.json into `dir`.
void save_instance(const LassoInstance& inst, const std::string& dir);
/// Inverse of save_instance. Raises ParseError for malformed files and
/// ValidationError for inconsistent dimensions.
LassoInstance load_instance(const std::string& dir);

/// Small fixed logistic-regression data set: features U[-1, 1], labels
/// sign(features w + noise) for a sparse w.
struct LogisticFixture {
    Matrix features;
    Vector labels;
};
LogisticFixture logistic_fixture(Index m = 60, Index n = 20, std::uint64_t seed = 1);

/// Dense text file, one sample per row: label then features.
LogisticFixture load_logistic_text(const std::string& path);

}  // namespace fpa
