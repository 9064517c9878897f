#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace conefpp {

// Thrown when a caller breaks a documented precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class ErrorKind {
    Unreachable,
    BudgetExceeded,
    EmptySlice,
    NoDetours,
    WitnessNotFound,
    IsolatedSite,
    DegenerateShape,
    Validation,
    NoPlot,
};

const char* to_string(ErrorKind kind);

// Recoverable runtime failure with a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// The exploration cap was hit before the query was certified. `lower_bound`
// is the smallest tentative cost left on the frontier, which bounds the true
// answer from below.
class BudgetExceeded : public Error {
public:
    BudgetExceeded(double lower_bound, std::size_t explored)
        : Error(ErrorKind::BudgetExceeded,
                "site budget exceeded after " + std::to_string(explored) +
                    " sites (lower bound " + std::to_string(lower_bound) + ")"),
          lower_bound_(lower_bound),
          explored_(explored) {}

    double lower_bound() const noexcept { return lower_bound_; }
    std::size_t explored() const noexcept { return explored_; }

private:
    double lower_bound_;
    std::size_t explored_;
};

#define CONEFPP_REQUIRE(cond, msg)                                     \
    do {                                                               \
        if (!(cond)) throw ::conefpp::ContractViolation(msg);          \
    } while (0)

}  // namespace conefpp
