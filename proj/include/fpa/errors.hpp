#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpa {

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative numeric kernel (power iteration, root bracketing) gave up.
/// `best_estimate` carries the last usable value.
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(const std::string& what, double best_estimate)
        : std::runtime_error(what), best_estimate_(best_estimate) {}
    double best_estimate() const noexcept { return best_estimate_; }

private:
    double best_estimate_;
};

class DegenerateSubproblem : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The inner block solver hit its iteration cap before certifying the
/// requested distance to the exact block minimizer.
class AccuracyNotMet : public std::runtime_error {
public:
    AccuracyNotMet(const std::string& what, double best_certificate, std::size_t iterations)
        : std::runtime_error(what), best_certificate_(best_certificate), iterations_(iterations) {}
    double best_certificate() const noexcept { return best_certificate_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double best_certificate_;
    std::size_t iterations_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& msg)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg), file_(file), line_(line) {}
    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace fpa
