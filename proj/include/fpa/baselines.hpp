#pragma once

#include <fpa/problem.hpp>
#include <fpa/solver.hpp>
#include <fpa/surrogate.hpp>
#include <fpa/types.hpp>

#include <cstddef>
#include <limits>

namespace fpa {

struct FistaOptions {
    std::size_t max_iterations = 100000;
    /// Stop when ||x^{k+1} - y^k|| (proximal-gradient residual at y) <= tolerance.
    double tolerance = 1e-8;
    double time_budget_s = std::numeric_limits<double>::infinity();
    /// Workers for the A^T w product.
    std::size_t workers = 1;
};

/// Accelerated proximal gradient with t_1 = 1 and
/// t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2; no restarts.
/// Trace rows: objective V(x^k), stationarity the proximal-gradient residual,
/// gamma the momentum weight, tau_min = tau_max = L.
SolveResult run_fista(const CompositeProblem& p, const Vector& x0, const FistaOptions& opts = {});

struct GaussSeidelOptions {
    std::size_t max_sweeps = 1000;
    /// Stop when the largest block change within a sweep is <= tolerance.
    double tolerance = 1e-8;
    double time_budget_s = std::numeric_limits<double>::infinity();
    SurrogateKind surrogate = SurrogateKind::ExactBlock;
    /// Empty: tr(A^T A) / (2 n). Otherwise one value or one per block.
    Vector tau;
    double exact_tolerance = 1e-12;
};

/// Cyclic sweeps, each block replaced by xhat_i at the current (partially
/// updated) point with unit step. One trace row per sweep; objective is the
/// value at the start of the sweep, stationarity the largest block change.
SolveResult run_gauss_seidel(const CompositeProblem& p, const Vector& x0, const GaussSeidelOptions& opts = {});

/// FISTA momentum sequence t_1..t_count.
std::vector<double> fista_momentum_sequence(std::size_t count);

}  // namespace fpa
