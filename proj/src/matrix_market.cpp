#include <fpa/errors.hpp>
#include <fpa/matrix_market.hpp>
#include <fpa/trace.hpp>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace fpa::mm {

namespace {

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

bool blank(const std::string& line)
{
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

/// Splits a line into tokens and parses them as doubles.
std::vector<double> parse_reals(const std::string& line, const std::string& name, std::size_t lineno)
{
    std::vector<double> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) {
        errno = 0;
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0' || errno == ERANGE)
            throw ParseError(name, lineno, "not a number: '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

long long as_index(double v, const std::string& name, std::size_t lineno)
{
    if (v != static_cast<double>(static_cast<long long>(v)) || v < 0)
        throw ParseError(name, lineno, "expected a nonnegative integer");
    return static_cast<long long>(v);
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return is;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    return os;
}

}  // namespace

Matrix read_matrix(std::istream& is, const std::string& name)
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line)) throw ParseError(name, 1, "empty file, expected a %%MatrixMarket banner");
    ++lineno;
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (tag != "%%MatrixMarket") throw ParseError(name, lineno, "missing %%MatrixMarket banner");
    object = lower(object);
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (object != "matrix") throw ParseError(name, lineno, "unsupported object '" + object + "'");
    if (format != "array" && format != "coordinate") throw ParseError(name, lineno, "unknown format '" + format + "'");
    if (field != "real" && field != "integer" && field != "double")
        throw ParseError(name, lineno, "unsupported field '" + field + "'");
    const bool symmetric = symmetry == "symmetric";
    const bool skew = symmetry == "skew-symmetric";
    if (!symmetric && !skew && symmetry != "general")
        throw ParseError(name, lineno, "unsupported symmetry '" + symmetry + "'");

    // Size line, skipping comments.
    std::vector<double> header;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || blank(line)) continue;
        header = parse_reals(line, name, lineno);
        break;
    }
    const bool coord = format == "coordinate";
    if (header.size() != (coord ? 3u : 2u))
        throw ParseError(name, lineno, coord ? "expected 'rows cols nnz'" : "expected 'rows cols'");
    const auto m = static_cast<Index>(as_index(header[0], name, lineno));
    const auto n = static_cast<Index>(as_index(header[1], name, lineno));
    if ((symmetric || skew) && m != n) throw ParseError(name, lineno, "symmetric matrix must be square");

    Matrix A = Matrix::Zero(m, n);
    if (!coord) {
        // Column-major; symmetric files list the lower triangle only.
        std::vector<std::pair<Index, Index>> slots;
        for (Index j = 0; j < n; ++j)
            for (Index i = (symmetric ? j : skew ? j + 1 : 0); i < m; ++i) slots.emplace_back(i, j);
        std::size_t filled = 0;
        while (filled < slots.size() && std::getline(is, line)) {
            ++lineno;
            if (line.empty() || line[0] == '%' || blank(line)) continue;
            for (double v : parse_reals(line, name, lineno)) {
                if (filled == slots.size()) throw ParseError(name, lineno, "more entries than the header declares");
                const auto [i, j] = slots[filled++];
                A(i, j) = v;
                if (symmetric) A(j, i) = v;
                if (skew) A(j, i) = -v;
            }
        }
        if (filled < slots.size()) {
            throw ParseError(name, lineno,
                             "short read: expected " + std::to_string(slots.size()) + " entries, found " +
                                 std::to_string(filled));
        }
        return A;
    }

    const auto nnz = static_cast<std::size_t>(as_index(header[2], name, lineno));
    std::size_t read = 0;
    while (read < nnz && std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%' || blank(line)) continue;
        const auto vals = parse_reals(line, name, lineno);
        if (vals.size() != 3) throw ParseError(name, lineno, "expected 'row col value'");
        const auto i = as_index(vals[0], name, lineno) - 1;
        const auto j = as_index(vals[1], name, lineno) - 1;
        if (i < 0 || j < 0 || i >= m || j >= n) throw ParseError(name, lineno, "entry index out of range");
        A(i, j) += vals[2];
        if (i != j && symmetric) A(j, i) += vals[2];
        if (i != j && skew) A(j, i) -= vals[2];
        ++read;
    }
    if (read < nnz) {
        throw ParseError(name, lineno,
                         "short read: expected " + std::to_string(nnz) + " entries, found " + std::to_string(read));
    }
    return A;
}

Matrix read_matrix(const std::string& path)
{
    auto is = open_in(path);
    return read_matrix(is, path);
}

void write_matrix(std::ostream& os, const Matrix& A)
{
    os << "%%MatrixMarket matrix array real general\n";
    os << A.rows() << ' ' << A.cols() << '\n';
    for (Index j = 0; j < A.cols(); ++j)
        for (Index i = 0; i < A.rows(); ++i) os << format_real(A(i, j)) << '\n';
}

void write_matrix(const std::string& path, const Matrix& A)
{
    auto os = open_out(path);
    write_matrix(os, A);
}

Vector read_vector(const std::string& path)
{
    auto is = open_in(path);
    std::vector<double> vals;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || line[0] == '%') continue;
        const auto row = parse_reals(line, path, lineno);
        vals.insert(vals.end(), row.begin(), row.end());
    }
    return Eigen::Map<const Vector>(vals.data(), static_cast<Index>(vals.size()));
}

void write_vector(const std::string& path, const Vector& v)
{
    auto os = open_out(path);
    for (Index i = 0; i < v.size(); ++i) os << format_real(v[i]) << '\n';
}

Matrix read_dense_text(const std::string& path)
{
    auto is = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#' || blank(line)) continue;
        rows.push_back(parse_reals(line, path, lineno));
        if (rows.back().size() != rows.front().size())
            throw ParseError(path, lineno, "row has " + std::to_string(rows.back().size()) + " entries, expected " +
                                               std::to_string(rows.front().size()));
    }
    if (rows.empty()) throw ParseError(path, lineno, "no data rows");
    Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j) M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return M;
}

}  // namespace fpa::mm
