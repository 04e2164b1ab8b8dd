#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wsv {

/// Failure categories shared by every module. The CLI maps them onto exit codes.
enum class ErrorKind {
    Domain,      // window or argument outside the represented interval
    Parameter,   // exponent or count outside its admissible range
    Structural,  // mismatched grids, dimensions or lengths
    Hypothesis,  // a standing hypothesis of an estimate is violated
    Divergence,  // an iteration or series failed to converge
    Evaluation,  // a user callable produced a non-finite value
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised when a Picard or series iteration does not settle. Carries the
/// sup-norm increments seen so far so callers can inspect the stall.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::vector<double> increments, int window = -1)
        : Error(ErrorKind::Divergence, what),
          increments_(std::move(increments)),
          window_(window) {}

    const std::vector<double>& increments() const noexcept { return increments_; }
    /// Window index for windowed solves, -1 otherwise.
    int window() const noexcept { return window_; }

private:
    std::vector<double> increments_;
    int window_;
};

class EvaluationError : public Error {
public:
    EvaluationError(const std::string& what, double t, double s)
        : Error(ErrorKind::Evaluation, what), t_(t), s_(s) {}

    double t() const noexcept { return t_; }
    double s() const noexcept { return s_; }

private:
    double t_;
    double s_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace wsv
