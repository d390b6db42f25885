#pragma once

#include <fpa/instances.hpp>
#include <fpa/solver.hpp>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fpa::bench {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitRefused = 3,
    kExitCapHit = 4,
};

struct GenerateOptions {
    std::string profile = "desk-high";
    std::uint64_t seed = 0;
    std::optional<double> c;
    std::optional<double> scale;
    std::string out;
    bool force = false;
};

/// Settings for one run of fpa, fista or gs. Unset optionals take the
/// algorithm's own default.
struct RunOptions {
    std::string algo = "fpa";
    std::string surrogate = "exact";
    std::string selection = "threshold";  // threshold | jacobi | greedy
    double rho = 0.5;
    double gamma0 = 0.9;
    double theta = 1e-3;
    double alpha1 = 0.0;
    double alpha2 = 1.0;
    std::string tau_init = "trace";  // trace | value
    std::optional<double> tau;
    std::optional<double> tol;
    std::optional<std::size_t> max_iters;
    std::optional<std::size_t> max_sweeps;
    double time_budget_s = std::numeric_limits<double>::infinity();
    std::size_t workers = 1;
};

struct SolveOptions {
    std::string instance;
    RunOptions run;
    /// Trace CSV path; empty means "<algo>_trace.csv".
    std::string out;
    bool force = false;
};

struct CompareOptions {
    std::string spec;
    /// Overrides the spec's output directory when set.
    std::string out;
    bool force = false;
};

struct VerifyOptions {
    std::uint64_t seed = 0;
    std::size_t workers = 2;
};

/// Throws InvalidArgument for unknown names or out-of-range values.
SolverConfig make_solver_config(const RunOptions& o);
/// Applies a JSON object whose keys are the command-line flag names
/// ("rho", "max-iters", ...). Unknown keys are rejected.
void apply_run_json(RunOptions& o, const std::string& json_object_text);

struct RunOutcome {
    SolveResult result;
    bool converged = false;
};

/// Runs one algorithm on a Lasso instance.
RunOutcome run_algorithm(const LassoInstance& inst, const RunOptions& o);

int cmd_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err);
int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err);

/// Relative error (V - V*) / max(|V*|, 1).
double relative_error(double value, double v_star);

/// First time the error curve reaches `threshold`, interpolating linearly
/// between the bracketing rows; nullopt if it never does.
std::optional<double> crossing_time(const std::vector<double>& time, const std::vector<double>& rel_error,
                                    double threshold);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Invariant checks run by `verify`.
std::vector<CheckResult> run_invariant_checks(const VerifyOptions& o);

}  // namespace fpa::bench
