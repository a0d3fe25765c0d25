#ifndef HILMOD_COMMON_HPP
#define HILMOD_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hilmod {

using Complex = std::complex<double>;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Multi-index arity does not match the space's variable count.
class ArityError : public Error {
public:
    using Error::Error;
};

/// A point violates the domain margin (too close to the boundary).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A truncated series could not be certified below tolerance.
/// Carries the computed tail bound.
class TruncationError : public Error {
public:
    TruncationError(const std::string& msg, double bound)
        : Error(msg + " (tail bound " + std::to_string(bound) + ")"), tail_bound(bound) {}
    double tail_bound;
};

/// The requested evaluation method is unavailable or unstable here.
class MethodError : public Error {
public:
    using Error::Error;
};

/// A frame Grammian is singular or otherwise degenerate.
class FrameError : public Error {
public:
    using Error::Error;
};

/// A rank decision fell inside the ambiguity band of the SVD cutoff.
class PrecisionError : public Error {
public:
    using Error::Error;
};

/// Finite-difference / fit data did not stabilize within the budget.
class FitError : public Error {
public:
    using Error::Error;
};

/// Operator norm exceeds 1 beyond tolerance.
class ContractionError : public Error {
public:
    using Error::Error;
};

/// Requested membership predicate is not supported.
class PredicateError : public Error {
public:
    using Error::Error;
};

/// Compensated (Kahan) accumulator; summation order is the caller's.
class KahanSum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Complex compensated accumulator (independent real/imag compensation).
class KahanSumC {
public:
    void add(Complex x) {
        re_.add(x.real());
        im_.add(x.imag());
    }
    Complex value() const { return {re_.value(), im_.value()}; }

private:
    KahanSum re_, im_;
};

/// Default margin keeping evaluation points strictly inside the domain.
inline constexpr double kDefaultMargin = 1e-3;

/// Default truncation length for moment series.
inline constexpr int kDefaultTerms = 200;

}  // namespace hilmod

#endif
