#include <fpa/errors.hpp>
#include <fpa/trace.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace fpa {

std::string format_real(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_trace_csv(std::ostream& os, const Trace& trace, bool include_elapsed)
{
    if (include_elapsed) {
        os << kTraceHeader << '\n';
    } else {
        os << "k,objective,stationarity,selected,gamma,tau_min,tau_max,eps_total\n";
    }
    for (const auto& r : trace) {
        os << r.k << ',' << format_real(r.objective) << ',' << format_real(r.stationarity) << ',' << r.selected
           << ',' << format_real(r.gamma) << ',' << format_real(r.tau_min) << ',' << format_real(r.tau_max) << ',';
        if (include_elapsed) os << format_real(r.elapsed_s) << ',';
        os << format_real(r.eps_total) << '\n';
    }
}

void write_trace_csv(const std::string& path, const Trace& trace, bool include_elapsed)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_trace_csv(os, trace, include_elapsed);
}

std::string trace_to_csv(const Trace& trace, bool include_elapsed)
{
    std::ostringstream os;
    write_trace_csv(os, trace, include_elapsed);
    return os.str();
}

Trace read_trace_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(is, line);
    if (line != kTraceHeader) throw ParseError(path, 1, "unexpected trace header");
    Trace trace;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        IterationRecord r;
        unsigned long long k = 0, sel = 0;
        const int got = std::sscanf(line.c_str(), "%llu,%lf,%lf,%llu,%lf,%lf,%lf,%lf,%lf", &k, &r.objective,
                                    &r.stationarity, &sel, &r.gamma, &r.tau_min, &r.tau_max, &r.elapsed_s,
                                    &r.eps_total);
        if (got != 9) throw ParseError(path, lineno, "expected 9 fields");
        r.k = k;
        r.selected = sel;
        trace.push_back(r);
    }
    return trace;
}

double TraceClock::elapsed()
{
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    last_ = t > last_ ? t : std::nextafter(last_, std::numeric_limits<double>::infinity());
    return last_;
}

}  // namespace fpa
