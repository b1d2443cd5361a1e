#pragma once

#include <stdexcept>
#include <string>

namespace catastrank {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input table (missing file, non-numeric cell, bad shape, ...).
class CsvError : public Error {
public:
    using Error::Error;
};

/// Invalid argument to a library operation (bad ids, out-of-range counts).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Quadrature failed to converge; carries the offending control parameters.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& msg, double alpha, double beta)
        : Error(msg), alpha(alpha), beta(beta) {}
    double alpha;
    double beta;
};

/// Every optimizer start produced a non-finite objective.
class FitError : public Error {
public:
    using Error::Error;
};

/// File could not be written or read back.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace catastrank
