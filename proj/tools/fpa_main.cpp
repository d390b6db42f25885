#include <fpa/bench.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_run_flags(CLI::App& cmd, fpa::bench::RunOptions& r)
{
    cmd.add_option("--algo", r.algo, "fpa, fista or gs")->check(CLI::IsMember({"fpa", "fista", "gs"}));
    cmd.add_option("--surrogate", r.surrogate, "linear, exact or newton")
        ->check(CLI::IsMember({"linear", "exact", "newton"}));
    cmd.add_option("--selection", r.selection, "threshold, jacobi or greedy")
        ->check(CLI::IsMember({"threshold", "jacobi", "greedy"}));
    cmd.add_option("--rho", r.rho);
    cmd.add_option("--gamma0", r.gamma0);
    cmd.add_option("--theta", r.theta);
    cmd.add_option("--alpha1", r.alpha1);
    cmd.add_option("--alpha2", r.alpha2);
    cmd.add_option("--tau-init", r.tau_init, "trace or value")->check(CLI::IsMember({"trace", "value"}));
    cmd.add_option("--tau", r.tau, "tau for --tau-init value");
    cmd.add_option("--tol", r.tol);
    cmd.add_option("--max-iters", r.max_iters);
    cmd.add_option("--max-sweeps", r.max_sweeps, "gs only");
    cmd.add_option("--time-budget-s", r.time_budget_s);
    cmd.add_option("--workers", r.workers)->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace fpa::bench;
    CLI::App app{"Parallel block solver for composite problems: instances, runs, comparisons"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option values");

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "Generate a Lasso instance with a certified optimum");
    g->add_option("--profile", gen.profile, "low, medium, high, large, desk-low, desk-medium, desk-high");
    g->add_option("--seed", gen.seed);
    g->add_option("--c", gen.c, "regularization weight");
    g->add_option("--scale", gen.scale, "magnitude scale of x*");
    g->add_option("--out", gen.out)->required();
    g->add_flag("--force", gen.force);

    SolveOptions sol;
    auto* s = app.add_subcommand("solve", "Run one algorithm on an instance directory");
    s->add_option("instance", sol.instance)->required();
    add_run_flags(*s, sol.run);
    s->add_option("--out", sol.out, "trace CSV path");
    s->add_flag("--force", sol.force);

    CompareOptions cmp;
    auto* c = app.add_subcommand("compare", "Run a JSON run spec and tabulate relative error against time");
    c->add_option("spec", cmp.spec)->required();
    c->add_option("--out", cmp.out);
    c->add_flag("--force", cmp.force);

    VerifyOptions ver;
    auto* v = app.add_subcommand("verify", "Run invariant checks and print PASS/FAIL");
    v->add_option("--seed", ver.seed);
    v->add_option("--workers", ver.workers)->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*g) return cmd_generate(gen, std::cout, std::cerr);
        if (*s) return cmd_solve(sol, std::cout, std::cerr);
        if (*c) return cmd_compare(cmp, std::cout, std::cerr);
        return cmd_verify(ver, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}
