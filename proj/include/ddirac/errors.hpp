#ifndef DDIRAC_ERRORS_HPP
#define DDIRAC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ddirac {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatches, rank-deficient bases, bad options.
class InvalidInput : public Error
{
public:
    using Error::Error;
};

/// A constraint matrix lost full row rank at the point where it was evaluated.
class DegenerateConstraint : public Error
{
public:
    using Error::Error;
};

/// A user-supplied function threw or produced non-finite values.
class EvaluationError : public Error
{
public:
    using Error::Error;
};

class UnsupportedOperation : public Error
{
public:
    using Error::Error;
};

/// Newton iteration ran out of iterations.
class ConvergenceError : public Error
{
public:
    ConvergenceError(const std::string& what, double last_residual)
        : Error(what), last_residual_(last_residual)
    {
    }
    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// The Newton matrix is numerically singular.
class SingularityError : public Error
{
public:
    SingularityError(const std::string& what, double condition)
        : Error(what), condition_(condition)
    {
    }
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

/// A converged step failed the Dirac inclusion check.
class CertificationError : public Error
{
public:
    using Error::Error;
};

} // namespace ddirac

#endif // DDIRAC_ERRORS_HPP
