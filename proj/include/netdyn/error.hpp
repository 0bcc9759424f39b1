#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace netdyn {

/// Failure category. The CLI maps these onto its exit codes.
enum class ErrorKind {
    InvalidArgument, ///< caller violated a precondition
    InputFormat,     ///< malformed file or record
    Numerical,       ///< non-convergence, singularity, divergent series
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

/// Malformed input. `source` is a file name or "<memory>", `line` is 1-based (0 when unknown).
class InputFormatError : public Error {
public:
    InputFormatError(std::string source, std::size_t line, const std::string& what)
        : Error(ErrorKind::InputFormat,
                source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
          source_(std::move(source)), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/**
 * An iterative solver ran out of iterations or stalled. Carries the best
 * iterate seen so the caller can inspect or fall back.
 */
class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what, std::vector<double> best, double best_value,
                   double best_residual, std::size_t iterations)
        : NumericalError(what), best_(std::move(best)), best_value_(best_value),
          best_residual_(best_residual), iterations_(iterations) {}

    const std::vector<double>& best() const noexcept { return best_; }
    double best_value() const noexcept { return best_value_; }
    double best_residual() const noexcept { return best_residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::vector<double> best_;
    double best_value_;
    double best_residual_;
    std::size_t iterations_;
};

} // namespace netdyn
