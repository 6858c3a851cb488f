#pragma once

#include <stdexcept>
#include <string>

namespace superosc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Index or parameter outside its documented range.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Gram-Schmidt lost positive-definiteness at some order.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, int order) : Error(what), order_(order) {}
    int order() const noexcept { return order_; }

private:
    int order_;
};

/// Density or spectrum that does not integrate to one.
class NormalizationError : public Error {
public:
    using Error::Error;
};

/// Asymmetric or complex transfer functions.
class UnsupportedOtfError : public Error {
public:
    using Error::Error;
};

/// Two independent numerical routes disagree, or a probability went negative.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Estimator requested on a trial with zero detected photons.
class NoDataError : public Error {
public:
    using Error::Error;
};

/// Too few grid points for a log-log fit.
class InsufficientGridError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace superosc
