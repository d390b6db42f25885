#include <doctest.h>

#include <fpa/bench.hpp>
#include <fpa/errors.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fpa;
using namespace fpa::bench;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("fpa_bench_" + name))
    {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& leaf = "") const { return (path / leaf).string(); }
};

std::vector<std::string> lines_of(const std::string& path)
{
    std::ifstream is(path);
    std::vector<std::string> out;
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

int generate(const std::string& dir, std::uint64_t seed = 7, bool force = false)
{
    GenerateOptions g;
    g.profile = "desk-high";
    g.seed = seed;
    g.out = dir;
    g.force = force;
    std::ostringstream out, err;
    return cmd_generate(g, out, err);
}

}  // namespace

TEST_CASE("generate")
{
    TempDir d("gen");
    std::ostringstream out, err;
    GenerateOptions g;
    g.seed = 7;
    g.out = d.str("inst");
    CHECK(cmd_generate(g, out, err) == kExitOk);
    for (const char* f : {"A.mtx", "b.txt", "x_star.txt", "meta.json"}) CHECK(fs::exists(d.path / "inst" / f));
    CHECK(out.str().find("kkt_residual") != std::string::npos);

    std::ostringstream o2, e2;
    CHECK(cmd_generate(g, o2, e2) == kExitRefused);
    g.force = true;
    CHECK(cmd_generate(g, o2, e2) == kExitOk);

    GenerateOptions bad;
    bad.profile = "enormous";
    bad.out = d.str("x");
    std::ostringstream o3, e3;
    CHECK(cmd_generate(bad, o3, e3) == kExitUsage);
    CHECK(e3.str().find("usage") != std::string::npos);
    CHECK_FALSE(fs::exists(d.path / "x"));
}

TEST_CASE("solve")
{
    TempDir d("solve");
    REQUIRE(generate(d.str("inst")) == kExitOk);

    SolveOptions s;
    s.instance = d.str("inst");
    s.run.rho = 0.5;
    s.run.gamma0 = 0.9;
    s.run.theta = 1e-3;
    s.out = d.str("fpa.csv");
    std::ostringstream out, err;
    CHECK(cmd_solve(s, out, err) == kExitOk);
    const auto fpa_rows = lines_of(s.out);
    REQUIRE(fpa_rows.size() > 2);
    CHECK(fpa_rows[0] == kTraceHeader);
    CHECK(out.str().rfind("algo,iters,final_objective,final_stationarity,elapsed_s\nfpa,", 0) == 0);

    std::ostringstream o1, e1;
    CHECK(cmd_solve(s, o1, e1) == kExitRefused);

    SolveOptions f = s;
    f.run.algo = "fista";
    f.out = d.str("fista.csv");
    std::ostringstream o2, e2;
    CHECK(cmd_solve(f, o2, e2) == kExitOk);
    CHECK(lines_of(f.out)[0] == fpa_rows[0]);

    SolveOptions g = s;
    g.run.algo = "gs";
    g.run.max_sweeps = 3;
    g.out = d.str("gs.csv");
    std::ostringstream o3, e3;
    CHECK(cmd_solve(g, o3, e3) == kExitCapHit);
    CHECK(lines_of(g.out).size() == 4);

    SolveOptions missing = s;
    missing.instance = d.str("nothing");
    missing.out = d.str("m.csv");
    std::ostringstream o4, e4;
    CHECK(cmd_solve(missing, o4, e4) == kExitUsage);

    SolveOptions bad = s;
    bad.run.surrogate = "cubic";
    bad.out = d.str("b.csv");
    std::ostringstream o5, e5;
    CHECK(cmd_solve(bad, o5, e5) == kExitUsage);
}

TEST_CASE("run options from json")
{
    RunOptions o;
    apply_run_json(o, R"({"rho": 0.25, "max-iters": 12, "surrogate": "newton", "tau-init": "value", "tau": 3})");
    CHECK(o.rho == 0.25);
    CHECK(*o.max_iters == 12);
    const auto cfg = make_solver_config(o);
    CHECK(cfg.surrogate == SurrogateKind::NewtonBlock);
    CHECK(cfg.tau_init == TauInit::Explicit);
    CHECK(cfg.tau_values[0] == 3.0);
    CHECK_THROWS_AS(apply_run_json(o, R"({"speed": 1})"), InvalidArgument);
    CHECK_THROWS_AS(apply_run_json(o, R"({"rho": "high"})"), InvalidArgument);
    RunOptions v;
    v.tau_init = "value";
    CHECK_THROWS_AS(make_solver_config(v), InvalidArgument);
}

TEST_CASE("relative error and threshold crossings")
{
    CHECK(relative_error(3.0, 2.0) == 0.5);
    CHECK(relative_error(0.75, 0.5) == 0.25);
    const std::vector<double> t{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> e{1.0, 0.1, 0.01, 0.001};
    CHECK(*crossing_time(t, e, 1.0) == 0.0);
    CHECK(*crossing_time(t, e, 0.55) == doctest::Approx(0.5));
    CHECK(*crossing_time(t, e, 0.01) == 2.0);
    CHECK_FALSE(crossing_time(t, e, 1e-4));
}

TEST_CASE("compare")
{
    TempDir d("compare");
    {
        std::ofstream spec(d.str("spec.json"));
        spec << R"({"instance": {"profile": "desk-high", "seed": 11},
                    "algorithms": ["fpa", "fista", "gs"],
                    "repetitions": 3, "out": "results"})";
    }
    CompareOptions c;
    c.spec = d.str("spec.json");
    c.out = d.str("results");
    std::ostringstream out, err;
    REQUIRE(cmd_compare(c, out, err) == kExitOk);

    int traces = 0;
    for (const auto& e : fs::directory_iterator(d.path / "results"))
        traces += e.path().filename().string().find("_rep") != std::string::npos;
    CHECK(traces == 9);
    const auto merged = lines_of(d.str("results/merged.csv"));
    REQUIRE(!merged.empty());
    CHECK(merged[0] == "algo,rep,k,elapsed_s,rel_error");

    // k = 0 row: x0 = 0, so V = ||b||^2.
    const auto inst = generate_nesterov_lasso(profile_params("desk-high", 11));
    const std::string expect = format_real(relative_error(inst.b.squaredNorm(), *inst.v_star));
    const std::string& first = merged[1];
    CHECK(first.rfind("fpa,0,0,", 0) == 0);
    CHECK(first.substr(first.rfind(',') + 1) == expect);

    const auto table = lines_of(d.str("results/thresholds.csv"));
    CHECK(table[0] == "algo,threshold,reps_reached,mean_time_s");
    CHECK(table.size() == 1 + 3 * 3);
    CHECK(fs::exists(d.path / "results" / "plot.gp"));

    std::ostringstream o2, e2;
    CHECK(cmd_compare(c, o2, e2) == kExitRefused);
}

TEST_CASE("compare without a certified optimum")
{
    TempDir d("compare_nov");
    REQUIRE(generate(d.str("inst"), 2) == kExitOk);
    fs::remove(d.path / "inst" / "x_star.txt");
    {
        std::ofstream(d.str("inst/meta.json")) << R"({"m": 200, "n": 1000, "c": 1.0})";
        std::ofstream(d.str("spec.json")) << R"({"instance": {"path": "inst"}, "algorithms": ["fpa"], "out": "r"})";
    }
    CompareOptions c;
    c.spec = d.str("spec.json");
    c.out = d.str("r");
    std::ostringstream out, err;
    CHECK(cmd_compare(c, out, err) == kExitOk);
    CHECK(err.str().find("warning") != std::string::npos);
    const auto merged = lines_of(d.str("r/merged.csv"));
    CHECK(merged[0] == "algo,rep,k,elapsed_s,rel_error,v_star_estimated");
}

TEST_CASE("compare rejects malformed run files")
{
    TempDir d("compare_bad");
    auto run = [&](const std::string& text) {
        std::ofstream(d.str("s.json")) << text;
        CompareOptions c;
        c.spec = d.str("s.json");
        c.out = d.str("o");
        std::ostringstream out, err;
        return cmd_compare(c, out, err);
    };
    CHECK(run(R"({"instance": {}, "algorithms": ["fpa", "fpa"]})") == kExitUsage);
    CHECK(run(R"({"instance": {}, "algorithms": ["admm"]})") == kExitUsage);
    CHECK(run(R"({"instance": {}, "algorithms": ["fpa"], "repetitions": 0})") == kExitUsage);
    CHECK(run(R"({"instance": {"profile": "nope"}, "algorithms": ["fpa"]})") == kExitUsage);
    CHECK(run("not json") == kExitUsage);
}

TEST_CASE("verify")
{
    VerifyOptions v;
    std::ostringstream out, err;
    CHECK(cmd_verify(v, out, err) == kExitOk);
    CHECK(out.str().find("FAIL") == std::string::npos);
    CHECK(out.str().find("PASS") != std::string::npos);
}
