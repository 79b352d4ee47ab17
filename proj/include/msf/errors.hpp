#ifndef MSF_ERRORS_HPP
#define MSF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace msf {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Evaluation at a pole or other singular point.
class SingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Misuse of the API: mismatched grids, malformed input.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An infinite sum did not reach its tolerance within the term budget.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, long terms, double tail_estimate)
        : std::runtime_error(what), terms_(terms), tail_(tail_estimate) {}

    long terms() const noexcept { return terms_; }
    double tail_estimate() const noexcept { return tail_; }

private:
    long terms_;
    double tail_;
};

/// A grid-based operation whose self-reported residual exceeded its tolerance.
class ResidualError : public std::runtime_error {
public:
    ResidualError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace msf

#endif
