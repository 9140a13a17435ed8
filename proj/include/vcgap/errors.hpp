#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vcgap {

/// Malformed input text. Carries the 1-based line number that failed.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A caller passed something outside an operation's precondition.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An internal postcondition failed. Treated as a finding, not a crash.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Numerical breakdown inside a solver.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, std::size_t iterations)
        : std::runtime_error(what + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}
    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
};

/// A file could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An LP coordinate that is not within tolerance of {0, 1/2, 1}.
class HalfIntegralityViolation : public std::runtime_error {
public:
    /// (variable index, value)
    using Offender = std::pair<std::size_t, double>;

    explicit HalfIntegralityViolation(std::vector<Offender> offenders)
        : std::runtime_error(describe(offenders)), offenders_(std::move(offenders)) {}

    const std::vector<Offender>& offenders() const noexcept { return offenders_; }

private:
    static std::string describe(const std::vector<Offender>& offenders) {
        std::string s = "non-half-integral coordinates:";
        for (const auto& [index, value] : offenders) {
            s += " x[" + std::to_string(index) + "]=" + std::to_string(value);
        }
        return s;
    }

    std::vector<Offender> offenders_;
};

} // namespace vcgap
