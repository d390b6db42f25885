#include <fpa/baselines.hpp>
#include <fpa/bench.hpp>
#include <fpa/errors.hpp>
#include <fpa/rng.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace fpa::bench {

namespace {

std::string short_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

bool non_empty_dir(const fs::path& p)
{
    return fs::exists(p) && (!fs::is_directory(p) || !fs::is_empty(p));
}

SurrogateKind parse_surrogate(const std::string& s)
{
    if (s == "linear") return SurrogateKind::Linearized;
    if (s == "exact") return SurrogateKind::ExactBlock;
    if (s == "newton") return SurrogateKind::NewtonBlock;
    throw InvalidArgument("unknown surrogate '" + s + "' (expected linear, exact, newton)");
}

SelectionMode parse_selection(const std::string& s)
{
    if (s == "threshold") return SelectionMode::ThresholdAll;
    if (s == "jacobi") return SelectionMode::FullJacobi;
    if (s == "greedy") return SelectionMode::SingleGreedy;
    throw InvalidArgument("unknown selection '" + s + "' (expected threshold, jacobi, greedy)");
}

void check_algo(const std::string& a)
{
    if (a != "fpa" && a != "fista" && a != "gs")
        throw InvalidArgument("unknown algorithm '" + a + "' (expected fpa, fista, gs)");
}

Vector explicit_tau(const RunOptions& o)
{
    if (o.tau_init == "trace") return {};
    if (o.tau_init != "value") throw InvalidArgument("--tau-init must be trace or value");
    if (!o.tau) throw InvalidArgument("--tau-init value needs --tau");
    return Vector::Constant(1, *o.tau);
}

void write_summary(std::ostream& out, const std::string& algo, const SolveResult& r)
{
    out << "algo,iters,final_objective,final_stationarity,elapsed_s\n"
        << algo << ',' << r.iterations << ',' << format_real(r.final_objective) << ','
        << format_real(r.final_stationarity) << ',' << format_real(r.elapsed_s) << '\n';
}

}  // namespace

SolverConfig make_solver_config(const RunOptions& o)
{
    SolverConfig cfg;
    cfg.surrogate = parse_surrogate(o.surrogate);
    cfg.selection.mode = parse_selection(o.selection);
    cfg.selection.rho = o.rho;
    cfg.gamma0 = o.gamma0;
    cfg.theta = o.theta;
    cfg.eps.alpha1 = o.alpha1;
    cfg.eps.alpha2 = o.alpha2;
    cfg.tau_values = explicit_tau(o);
    cfg.tau_init = cfg.tau_values.size() == 0 ? TauInit::LassoTrace : TauInit::Explicit;
    if (o.tol) cfg.tolerance = *o.tol;
    if (o.max_iters) cfg.max_iterations = *o.max_iters;
    cfg.time_budget_s = o.time_budget_s;
    cfg.workers = o.workers;
    cfg.validate();
    return cfg;
}

void apply_run_json(RunOptions& o, const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("bad run configuration: ") + e.what());
    }
    if (!j.is_object()) throw InvalidArgument("run configuration must be an object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "algo") o.algo = v.get<std::string>();
            else if (key == "surrogate") o.surrogate = v.get<std::string>();
            else if (key == "selection") o.selection = v.get<std::string>();
            else if (key == "rho") o.rho = v.get<double>();
            else if (key == "gamma0") o.gamma0 = v.get<double>();
            else if (key == "theta") o.theta = v.get<double>();
            else if (key == "alpha1") o.alpha1 = v.get<double>();
            else if (key == "alpha2") o.alpha2 = v.get<double>();
            else if (key == "tau-init") o.tau_init = v.get<std::string>();
            else if (key == "tau") o.tau = v.get<double>();
            else if (key == "tol") o.tol = v.get<double>();
            else if (key == "max-iters") o.max_iters = v.get<std::size_t>();
            else if (key == "max-sweeps") o.max_sweeps = v.get<std::size_t>();
            else if (key == "time-budget-s") o.time_budget_s = v.get<double>();
            else if (key == "workers") o.workers = v.get<std::size_t>();
            else throw InvalidArgument("unknown run option '" + key + "'");
        }
    } catch (const json::type_error& e) {
        throw InvalidArgument(std::string("bad run option value: ") + e.what());
    }
}

RunOutcome run_algorithm(const LassoInstance& inst, const RunOptions& o)
{
    check_algo(o.algo);
    const CompositeProblem p = inst.problem();
    const Vector x0 = Vector::Zero(p.dim());
    RunOutcome out;
    if (o.algo == "fpa") {
        out.result = run_algorithm1(p, make_solver_config(o), x0);
    } else if (o.algo == "fista") {
        FistaOptions f;
        if (o.tol) f.tolerance = *o.tol;
        if (o.max_iters) f.max_iterations = *o.max_iters;
        f.time_budget_s = o.time_budget_s;
        f.workers = o.workers;
        out.result = run_fista(p, x0, f);
    } else {
        GaussSeidelOptions g;
        if (o.tol) g.tolerance = *o.tol;
        if (o.max_sweeps) g.max_sweeps = *o.max_sweeps;
        else if (o.max_iters) g.max_sweeps = *o.max_iters;
        g.time_budget_s = o.time_budget_s;
        g.surrogate = parse_surrogate(o.surrogate);
        g.tau = explicit_tau(o);
        out.result = run_gauss_seidel(p, x0, g);
    }
    out.converged = out.result.reason == TerminationReason::Converged;
    return out;
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

int cmd_generate(const GenerateOptions& o, std::ostream& out, std::ostream& err)
{
    GeneratorParams params;
    try {
        params = profile_params(o.profile, o.seed);
        if (o.c) params.c = *o.c;
        if (o.scale) params.scale = *o.scale;
        params.validate();
    } catch (const InvalidArgument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (o.out.empty()) {
        err << "usage error: --out is required\n";
        return kExitUsage;
    }
    if (non_empty_dir(o.out) && !o.force) {
        err << "refusing to overwrite non-empty " << o.out << " (use --force)\n";
        return kExitRefused;
    }
    const LassoInstance inst = generate_nesterov_lasso(params);
    save_instance(inst, o.out);
    out << "generated " << o.profile << " m=" << params.m << " n=" << params.n << " nnz=" << params.support_size()
        << " seed=" << params.seed << " into " << o.out << '\n'
        << "kkt_residual " << format_real(lasso_kkt_residual(inst)) << '\n'
        << "v_star " << format_real(*inst.v_star) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

int cmd_solve(const SolveOptions& o, std::ostream& out, std::ostream& err)
{
    LassoInstance inst;
    try {
        check_algo(o.run.algo);
        if (o.run.algo == "fpa") (void)make_solver_config(o.run);
        inst = load_instance(o.instance);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const std::string trace_path = o.out.empty() ? o.run.algo + "_trace.csv" : o.out;
    if (fs::exists(trace_path) && !o.force) {
        err << "refusing to overwrite " << trace_path << " (use --force)\n";
        return kExitRefused;
    }

    RunOutcome run;
    try {
        run = run_algorithm(inst, o.run);
    } catch (const IterationFailure& e) {
        write_trace_csv(trace_path, e.trace());
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const InvalidArgument& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    write_trace_csv(trace_path, run.result.trace);
    write_summary(out, o.run.algo, run.result);
    if (!run.converged) {
        err << o.run.algo << ": stopped by " << to_string(run.result.reason) << '\n';
        return kExitCapHit;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

double relative_error(double value, double v_star)
{
    return (value - v_star) / std::max(std::abs(v_star), 1.0);
}

std::optional<double> crossing_time(const std::vector<double>& t, const std::vector<double>& e, double threshold)
{
    for (std::size_t k = 0; k < e.size() && k < t.size(); ++k) {
        if (e[k] > threshold) continue;
        if (k == 0) return t[0];
        const double de = e[k - 1] - e[k];
        const double w = de > 0.0 ? (e[k - 1] - threshold) / de : 1.0;
        return t[k - 1] + w * (t[k] - t[k - 1]);
    }
    return std::nullopt;
}

namespace {

struct NamedRun {
    std::string name;
    RunOptions options;
};

struct RunSpec {
    std::optional<GeneratorParams> generate;
    std::string path;
    std::vector<NamedRun> runs;
    int repetitions = 1;
    std::string out;
};

RunSpec parse_run_spec(const std::string& file)
{
    std::ifstream is(file);
    if (!is) throw InvalidArgument("cannot open run spec " + file);
    json j;
    try {
        j = json::parse(is);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(file + ": " + e.what());
    }
    RunSpec spec;
    try {
        const auto& src = j.at("instance");
        if (src.contains("path")) {
            spec.path = src["path"].get<std::string>();
            if (fs::path(spec.path).is_relative()) spec.path = (fs::path(file).parent_path() / spec.path).string();
        } else {
            GeneratorParams gp = profile_params(src.value("profile", std::string("desk-high")),
                                                    src.value("seed", std::uint64_t{0}));
            if (src.contains("c")) gp.c = src["c"].get<double>();
            if (src.contains("scale")) gp.scale = src["scale"].get<double>();
            gp.validate();
            spec.generate = gp;
        }
        spec.repetitions = j.value("repetitions", 1);
        spec.out = j.value("out", std::string("compare_out"));
        const double budget = j.value("time_budget_s", std::numeric_limits<double>::infinity());
        std::set<std::string> names;
        for (const auto& r : j.at("algorithms")) {
            NamedRun nr;
            if (r.is_string()) {
                nr.options.algo = r.get<std::string>();
            } else {
                if (r.contains("config")) apply_run_json(nr.options, r["config"].dump());
                nr.options.algo = r.value("algo", nr.options.algo);
                nr.name = r.value("name", std::string());
            }
            if (nr.name.empty()) nr.name = nr.options.algo;
            if (!std::isfinite(nr.options.time_budget_s)) nr.options.time_budget_s = budget;
            check_algo(nr.options.algo);
            if (!names.insert(nr.name).second) throw InvalidArgument("duplicate algorithm name '" + nr.name + "'");
            spec.runs.push_back(std::move(nr));
        }
    } catch (const json::exception& e) {
        throw InvalidArgument(file + ": " + e.what());
    }
    if (spec.runs.empty()) throw InvalidArgument("run spec lists no algorithms");
    if (spec.repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
    return spec;
}

}  // namespace

int cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream& err)
{
    RunSpec spec;
    try {
        spec = parse_run_spec(o.spec);
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    const fs::path dir = o.out.empty() ? fs::path(spec.out) : fs::path(o.out);
    if (non_empty_dir(dir) && !o.force) {
        err << "refusing to overwrite non-empty " << dir.string() << " (use --force)\n";
        return kExitRefused;
    }

    std::optional<LassoInstance> file_instance;
    if (!spec.generate) {
        try {
            file_instance = load_instance(spec.path);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kExitUsage;
        }
    }
    fs::create_directories(dir);

    struct Finished {
        std::string name;
        int rep;
        Trace trace;
    };
    std::vector<Finished> finished;
    std::vector<std::optional<double>> v_star(static_cast<std::size_t>(spec.repetitions));
    bool all_converged = true;

    for (int rep = 0; rep < spec.repetitions; ++rep) {
        LassoInstance inst;
        if (spec.generate) {
            GeneratorParams gp = *spec.generate;
            gp.seed += static_cast<std::uint64_t>(rep);
            inst = generate_nesterov_lasso(gp);
        } else {
            inst = *file_instance;
        }
        v_star[static_cast<std::size_t>(rep)] = inst.v_star;
        for (const auto& nr : spec.runs) {
            RunOutcome run;
            try {
                run = run_algorithm(inst, nr.options);
            } catch (const IterationFailure& e) {
                err << nr.name << " rep " << rep << ": " << e.what() << '\n';
                return kExitFailure;
            } catch (const InvalidArgument& e) {
                err << "usage error: " << nr.name << ": " << e.what() << '\n';
                return kExitUsage;
            }
            all_converged = all_converged && run.converged;
            const auto file = dir / (nr.name + "_rep" + std::to_string(rep) + ".csv");
            write_trace_csv(file.string(), run.result.trace);
            out << nr.name << " rep " << rep << ": " << to_string(run.result.reason) << " after "
                << run.result.iterations << " iterations, V = " << format_real(run.result.final_objective) << '\n';
            finished.push_back({nr.name, rep, std::move(run.result.trace)});
        }
    }

    // Without a certified optimum, the reference is the best value any run
    // reached.
    bool estimated = false;
    double best_seen = std::numeric_limits<double>::infinity();
    for (const auto& f : finished)
        for (const auto& r : f.trace) best_seen = std::min(best_seen, r.objective);
    for (auto& v : v_star) {
        if (!v) {
            v = best_seen;
            estimated = true;
        }
    }
    if (estimated) err << "warning: no certified optimum; relative errors use the best value found\n";

    const std::vector<double> thresholds{1e-2, 1e-4, 1e-6};
    std::map<std::string, std::vector<std::vector<std::optional<double>>>> crossings;
    {
        std::ofstream merged(dir / "merged.csv");
        merged << "algo,rep,k,elapsed_s,rel_error" << (estimated ? ",v_star_estimated" : "") << '\n';
        for (const auto& f : finished) {
            const double vs = *v_star[static_cast<std::size_t>(f.rep)];
            std::vector<double> t;
            std::vector<double> e;
            for (const auto& r : f.trace) {
                t.push_back(r.elapsed_s);
                e.push_back(relative_error(r.objective, vs));
                merged << f.name << ',' << f.rep << ',' << r.k << ',' << format_real(r.elapsed_s) << ','
                       << format_real(e.back()) << (estimated ? ",1" : "") << '\n';
            }
            std::vector<std::optional<double>> row;
            for (double th : thresholds) row.push_back(crossing_time(t, e, th));
            crossings[f.name].push_back(std::move(row));
        }
    }

    std::ofstream table(dir / "thresholds.csv");
    table << "algo,threshold,reps_reached,mean_time_s\n";
    out << "time to reach relative error (mean over reps that reached it):\n";
    std::map<std::string, std::optional<double>> at_1e4;
    for (const auto& nr : spec.runs) {
        for (std::size_t t = 0; t < thresholds.size(); ++t) {
            double sum = 0.0;
            int reached = 0;
            for (const auto& row : crossings[nr.name]) {
                if (row[t]) {
                    sum += *row[t];
                    ++reached;
                }
            }
            const double mean = reached > 0 ? sum / reached : std::numeric_limits<double>::quiet_NaN();
            if (thresholds[t] == 1e-4 && reached == spec.repetitions) at_1e4[nr.name] = mean;
            table << nr.name << ',' << short_real(thresholds[t]) << ',' << reached << ',' << format_real(mean) << '\n';
            out << "  " << nr.name << " " << short_real(thresholds[t]) << ": "
                << (reached > 0 ? format_real(mean) + " s" : std::string("not reached")) << " (" << reached << "/"
                << spec.repetitions << ")\n";
        }
    }
    if (at_1e4.count("fpa") && at_1e4.count("gs")) {
        out << "note: fpa reached 1e-4 " << (*at_1e4["fpa"] < *at_1e4["gs"] ? "before" : "after") << " gs\n";
    }

    std::ofstream gp(dir / "plot.gp");
    gp << "set datafile separator ','\n"
          "set logscale x\n"
          "set logscale y\n"
          "set xlabel 'time (s)'\n"
          "set ylabel 'relative error'\n"
          "set key top right\n"
          "plot";
    for (std::size_t i = 0; i < spec.runs.size(); ++i) {
        const auto& name = spec.runs[i].name;
        gp << (i ? ", \\\n    " : " ") << "'merged.csv' every ::1 using (strcol(1) eq '" << name
           << "' && $2 == 0 ? $4 : 1/0):5 with lines title '" << name << "'";
    }
    gp << '\n';

    return all_converged ? kExitOk : kExitCapHit;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

namespace {

Vector random_vector(Xoshiro256& rng, Index n, double scale)
{
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
    return v;
}

IndexList random_subset(Xoshiro256& rng, Index N)
{
    IndexList S;
    for (Index i = 0; i < N; ++i)
        if (rng.uniform01() < 0.4) S.push_back(i);
    if (S.empty()) S.push_back(static_cast<Index>(rng.uniform01() * static_cast<double>(N)));
    return S;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

}  // namespace

std::vector<CheckResult> run_invariant_checks(const VerifyOptions& o)
{
    std::vector<CheckResult> out;

    {
        double worst_kkt = 0.0;
        double worst_v = 0.0;
        for (const char* prof : {"desk-low", "desk-medium", "desk-high"}) {
            const auto inst = generate_nesterov_lasso(profile_params(prof, o.seed));
            worst_kkt = std::max(worst_kkt, lasso_kkt_residual(inst));
            const double v = eval_objective(inst.problem(), *inst.x_star);
            worst_v = std::max(worst_v, std::abs(v - *inst.v_star) / std::abs(*inst.v_star));
        }
        out.push_back({"instances: generated optimum satisfies KKT", worst_kkt <= 1e-9, "max residual " + fmt(worst_kkt)});
        out.push_back({"instances: V(x*) matches v_star", worst_v <= 1e-9, "max rel diff " + fmt(worst_v)});
    }

    GeneratorParams small;
    small.m = 40;
    small.n = 60;
    small.density = 0.1;
    small.seed = o.seed + 11;
    const auto inst = generate_nesterov_lasso(small);
    const CompositeProblem lasso = inst.problem();
    const Vector tau = lasso_trace_tau(lasso);

    {
        const double r = stationarity_residual(lasso, *inst.x_star, tau, SurrogateKind::ExactBlock);
        out.push_back({"solver: stationarity residual vanishes at x*", r <= 1e-8, "residual " + fmt(r)});
    }

    {
        Xoshiro256 rng(o.seed + 101);
        const CompositeProblem group = make_group_lasso(inst.A, inst.b, inst.c, 5);
        const Vector gtau = lasso_trace_tau(group);
        int failures = 0;
        int total = 0;
        for (int t = 0; t < 10; ++t) {
            for (const auto kind : {SurrogateKind::Linearized, SurrogateKind::ExactBlock, SurrogateKind::NewtonBlock}) {
                const Vector y = random_vector(rng, lasso.dim(), 0.5);
                const auto d1 = verify_descent_inequality(lasso, y, tau, random_subset(rng, lasso.num_blocks()), kind);
                const auto d2 = verify_descent_inequality(group, y, gtau, random_subset(rng, group.num_blocks()), kind);
                failures += !d1.holds + !d2.holds;
                total += 2;
            }
        }
        out.push_back({"solver: descent inequality", failures == 0,
                       std::to_string(total - failures) + "/" + std::to_string(total) + " hold"});
    }

    {
        Xoshiro256 rng(o.seed + 202);
        int failures = 0;
        for (int t = 0; t < 20; ++t) {
            const Vector x = random_vector(rng, lasso.dim(), 0.5);
            const auto xh = compute_xhat_parallel(lasso, x, tau, SurrogateKind::ExactBlock,
                                                  Vector::Zero(lasso.num_blocks()));
            const auto eb = exact_distance_bounds(lasso.partition, x, xh.z);
            const SelectionPolicy pol{0.5, SelectionMode::ThresholdAll};
            const auto S = select_blocks(pol, eb.E, eb.M);
            double best = 0.0;
            for (auto i : S) best = std::max(best, eb.E[i]);
            failures += !(best >= pol.rho * eb.M) || !verify_selection_bound(lasso.partition, eb.E, pol.rho, xh.z, x, S);
        }
        out.push_back({"selection: selected set meets the threshold and distance bound", failures == 0,
                       std::to_string(20 - failures) + "/20"});
    }

    {
        auto s = StepsizeState::start(0.9, 1e-3);
        bool ok = true;
        double prev = s.gamma;
        for (int k = 0; k < 100000; ++k) {
            const double g = gamma_next(s);
            ok = ok && g > 0.0 && g < prev;
            prev = g;
        }
        const double asym = 100000.0 * 1e-3 * prev;
        ok = ok && asym >= 0.9 && asym <= 1.1;
        out.push_back({"selection: stepsize positive, decreasing, ~1/(theta k)", ok, "k theta gamma_k = " + fmt(asym)});
    }

    {
        const Vector x = Vector::Constant(lasso.dim(), 0.1);
        const auto z1 = compute_xhat_parallel(lasso, x, tau, SurrogateKind::ExactBlock, Vector::Zero(lasso.num_blocks()), 1).z;
        const auto zw = compute_xhat_parallel(lasso, x, tau, SurrogateKind::ExactBlock, Vector::Zero(lasso.num_blocks()),
                                              std::max<std::size_t>(o.workers, 2))
                            .z;
        out.push_back({"solver: block step independent of worker count", z1 == zw, ""});
    }

    {
        SolverConfig cfg;
        cfg.workers = o.workers;
        const auto r = run_algorithm1(lasso, cfg);
        const double kkt = lasso_kkt_residual(inst.A, inst.b, inst.c, r.x);
        const double gap = relative_error(r.final_objective, *inst.v_star);
        out.push_back({"solver: converges to the certified optimum",
                       r.reason == TerminationReason::Converged && kkt <= 1e-6 && gap <= 1e-6,
                       std::string(to_string(r.reason)) + " in " + std::to_string(r.iterations) + " iterations, kkt " +
                           fmt(kkt) + ", rel gap " + fmt(gap)});
    }
    return out;
}

int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err)
{
    std::vector<CheckResult> checks;
    try {
        checks = run_invariant_checks(o);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    bool all = true;
    for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) out << " (" << c.detail << ')';
        out << '\n';
        all = all && c.passed;
    }
    return all ? kExitOk : kExitFailure;
}

}  // namespace fpa::bench
