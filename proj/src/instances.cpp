#include <fpa/errors.hpp>
#include <fpa/instances.hpp>
#include <fpa/matrix_market.hpp>
#include <fpa/rng.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

namespace fs = std::filesystem;

namespace fpa {

Index GeneratorParams::support_size() const
{
    return static_cast<Index>(std::ceil(density * static_cast<double>(n) - 1e-9));
}

void GeneratorParams::validate() const
{
    if (m < 1 || n < 1) throw InvalidArgument("generator needs m >= 1 and n >= 1");
    if (!(density > 0.0 && density <= 1.0)) throw InvalidArgument("density must lie in (0, 1]");
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("c must be positive");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("scale must be positive");
    const Index k = support_size();
    if (k < 1 || k > n) throw InvalidArgument("density * n rounds outside [1, n]");
}

LassoInstance generate_nesterov_lasso(const GeneratorParams& params)
{
    params.validate();
    const Index m = params.m;
    const Index n = params.n;
    const double half_c = 0.5 * params.c;
    Xoshiro256 rng(params.seed);

    Matrix A(m, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i) A(i, j) = rng.uniform(-1.0, 1.0);

    Vector y(m);
    for (Index i = 0; i < m; ++i) y[i] = rng.normal();
    y /= y.norm();

    const Vector v = A.transpose() * y;
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(v[a]) > std::abs(v[b]); });
    std::vector<bool> in_support(static_cast<std::size_t>(n), false);
    for (Index r = 0; r < params.support_size(); ++r) in_support[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = true;

    for (Index j = 0; j < n; ++j) {
        const double av = std::abs(v[j]);
        if (in_support[static_cast<std::size_t>(j)]) {
            if (av == 0.0) throw NumericFailure("generator: support column orthogonal to y*", 0.0);
            A.col(j) *= half_c / av;
        }
    }
    for (Index j = 0; j < n; ++j) {
        if (in_support[static_cast<std::size_t>(j)]) continue;
        const double u = rng.uniform01();
        const double av = std::abs(v[j]);
        if (av > half_c * u) A.col(j) *= half_c * u / av;
    }

    Vector x = Vector::Zero(n);
    for (Index j = 0; j < n; ++j) {
        if (!in_support[static_cast<std::size_t>(j)]) continue;
        const double w = 1.0 - rng.uniform01();
        x[j] = params.scale * (v[j] > 0 ? w : -w);
    }

    LassoInstance inst;
    inst.b = A * x + y;
    inst.A = std::move(A);
    inst.c = params.c;
    inst.v_star = y.squaredNorm() + params.c * x.lpNorm<1>();
    inst.x_star = std::move(x);
    inst.params = params;
    return inst;
}

GeneratorParams profile_params(const std::string& profile, std::uint64_t seed)
{
    GeneratorParams p;
    p.seed = seed;
    std::string base = profile;
    bool desk = false;
    if (base.rfind("desk-", 0) == 0) {
        desk = true;
        base = base.substr(5);
    }
    if (base == "low") {
        p.density = 0.20;
    } else if (base == "medium") {
        p.density = 0.10;
    } else if (base == "high") {
        p.density = 0.05;
    } else if (base == "large" && !desk) {
        p.m = 5000;
        p.n = 100000;
        p.density = 0.05;
        return p;
    } else {
        throw InvalidArgument("unknown profile '" + profile +
                              "' (expected low, medium, high, large, desk-low, desk-medium, desk-high)");
    }
    p.m = desk ? 200 : 2000;
    p.n = desk ? 1000 : 10000;
    return p;
}

double lasso_kkt_residual(const Matrix& A, const Vector& b, double c, const Vector& x)
{
    const Vector grad = 2.0 * A.transpose() * (A * x - b);
    double worst = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        const double viol = x[j] != 0.0 ? std::abs(grad[j] + c * (x[j] > 0 ? 1.0 : -1.0))
                                        : std::max(0.0, std::abs(grad[j]) - c);
        worst = std::max(worst, viol);
    }
    return worst;
}

double lasso_kkt_residual(const LassoInstance& inst)
{
    if (!inst.x_star) throw InvalidArgument("instance has no known optimum");
    return lasso_kkt_residual(inst.A, inst.b, inst.c, *inst.x_star);
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

void save_instance(const LassoInstance& inst, const std::string& dir)
{
    fs::create_directories(dir);
    const fs::path root(dir);
    mm::write_matrix((root / "A.mtx").string(), inst.A);
    mm::write_vector((root / "b.txt").string(), inst.b);
    if (inst.x_star) mm::write_vector((root / "x_star.txt").string(), *inst.x_star);

    nlohmann::json meta;
    meta["m"] = inst.A.rows();
    meta["n"] = inst.A.cols();
    meta["c"] = inst.c;
    if (inst.params) {
        meta["density"] = inst.params->density;
        meta["seed"] = inst.params->seed;
        meta["scale"] = inst.params->scale;
    }
    if (inst.v_star) meta["v_star"] = *inst.v_star;
    std::ofstream os(root / "meta.json");
    if (!os) throw std::runtime_error("cannot write " + (root / "meta.json").string());
    os << meta.dump(2) << '\n';
}

LassoInstance load_instance(const std::string& dir)
{
    const fs::path root(dir);
    const auto meta_path = (root / "meta.json").string();
    std::ifstream is(meta_path);
    if (!is) throw std::runtime_error("cannot open " + meta_path);
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(meta_path, 1, e.what());
    }

    LassoInstance inst;
    inst.A = mm::read_matrix((root / "A.mtx").string());
    inst.b = mm::read_vector((root / "b.txt").string());
    if (fs::exists(root / "x_star.txt")) inst.x_star = mm::read_vector((root / "x_star.txt").string());

    try {
        inst.c = meta.at("c").get<double>();
        const auto m = meta.at("m").get<Index>();
        const auto n = meta.at("n").get<Index>();
        if (inst.A.rows() != m || inst.A.cols() != n)
            throw ValidationError("A is " + std::to_string(inst.A.rows()) + "x" + std::to_string(inst.A.cols()) +
                                  " but metadata says " + std::to_string(m) + "x" + std::to_string(n));
        if (meta.contains("v_star")) inst.v_star = meta["v_star"].get<double>();
        else if (meta.contains("optimal_value")) inst.v_star = meta["optimal_value"].get<double>();
        const char* density_key = meta.contains("density") ? "density" : meta.contains("sparsity") ? "sparsity" : nullptr;
        if (density_key && meta.contains("seed")) {
            GeneratorParams gp;
            gp.m = m;
            gp.n = n;
            gp.c = inst.c;
            gp.density = meta[density_key].get<double>();
            gp.seed = meta["seed"].get<std::uint64_t>();
            gp.scale = meta.value("scale", 1.0);
            inst.params = gp;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(meta_path, 1, std::string("bad metadata: ") + e.what());
    }
    if (inst.b.size() != inst.A.rows())
        throw ValidationError("b has length " + std::to_string(inst.b.size()) + ", expected " +
                              std::to_string(inst.A.rows()));
    if (inst.x_star && inst.x_star->size() != inst.A.cols())
        throw ValidationError("x_star has length " + std::to_string(inst.x_star->size()) + ", expected " +
                              std::to_string(inst.A.cols()));
    if (!(inst.c > 0.0)) throw ValidationError("c must be positive");
    return inst;
}

// ---------------------------------------------------------------------------
// Logistic fixtures
// ---------------------------------------------------------------------------

LogisticFixture logistic_fixture(Index m, Index n, std::uint64_t seed)
{
    Xoshiro256 rng(seed);
    LogisticFixture f;
    f.features.resize(m, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i) f.features(i, j) = rng.uniform(-1.0, 1.0);
    Vector w = Vector::Zero(n);
    for (Index j = 0; j < n; j += 3) w[j] = rng.uniform(-2.0, 2.0);
    f.labels.resize(m);
    for (Index i = 0; i < m; ++i) {
        const double s = f.features.row(i).dot(w) + 0.3 * rng.normal();
        f.labels[i] = s >= 0 ? 1.0 : -1.0;
    }
    return f;
}

LogisticFixture load_logistic_text(const std::string& path)
{
    const Matrix data = mm::read_dense_text(path);
    if (data.cols() < 2) throw ValidationError(path + ": need a label column and at least one feature");
    return {data.rightCols(data.cols() - 1), data.col(0)};
}

}  // namespace fpa
