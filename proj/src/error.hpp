#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace twistlab {

enum class ErrorCode {
    InvalidArgument,
    UnsupportedForm,
    Coverage,    // a table does not reach far enough for the requested sum
    Budget,      // an enumeration exceeded its configured node budget
    Quadrature,  // adaptive integration could not reach the requested tolerance
    Invariant,   // an unconditional mathematical identity failed (a bug)
    Io,
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string msg)
        : std::runtime_error(std::move(msg)), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Quadrature failure still carries the best estimate reached.
class QuadratureError : public Error {
public:
    QuadratureError(std::string msg, double best_re, double best_im, double err_estimate)
        : Error(ErrorCode::Quadrature, std::move(msg)),
          best_re(best_re), best_im(best_im), err_estimate(err_estimate) {}
    double best_re, best_im, err_estimate;
};

// Enumeration budget exhaustion carries partial-count telemetry.
class BudgetError : public Error {
public:
    BudgetError(std::string msg, std::uint64_t nodes_visited, std::uint64_t tuples_found)
        : Error(ErrorCode::Budget, std::move(msg)),
          nodes_visited(nodes_visited), tuples_found(tuples_found) {}
    std::uint64_t nodes_visited, tuples_found;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

}  // namespace twistlab
