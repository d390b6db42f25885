#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace fpa {

struct IterationRecord {
    std::size_t k = 0;
    double objective = 0.0;
    double stationarity = 0.0;
    std::size_t selected = 0;
    double gamma = 0.0;
    double tau_min = 0.0;
    double tau_max = 0.0;
    double elapsed_s = 0.0;
    double eps_total = 0.0;
};

using Trace = std::vector<IterationRecord>;

inline constexpr const char* kTraceHeader = "k,objective,stationarity,selected,gamma,tau_min,tau_max,elapsed_s,eps_total";

/// One header line plus one row per record; reals as %.17g. With
/// `include_elapsed == false` the elapsed_s column is dropped, which makes
/// runs comparable byte-for-byte.
void write_trace_csv(std::ostream& os, const Trace& trace, bool include_elapsed = true);
void write_trace_csv(const std::string& path, const Trace& trace, bool include_elapsed = true);
std::string trace_to_csv(const Trace& trace, bool include_elapsed = true);
Trace read_trace_csv(const std::string& path);

std::string format_real(double v);

/// Wall clock for traces; successive reads are strictly increasing.
class TraceClock {
public:
    TraceClock() : start_(std::chrono::steady_clock::now()) {}
    double elapsed();

private:
    std::chrono::steady_clock::time_point start_;
    double last_ = -1.0;
};

}  // namespace fpa
