#pragma once

#include <stdexcept>
#include <string>

namespace cmbo {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed files, inconsistent shapes, invalid configuration.
class DataError : public Error {
public:
    using Error::Error;
};

/// Failure inside a numerical routine (factorization, eigensolver, iteration).
class NumericalError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public DataError {
public:
    using DataError::DataError;
};

class InvalidArgument : public DataError {
public:
    using DataError::DataError;
};

class NotPositiveDefinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class EigenFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Fixed-point iteration ran out of iterations; carries the last residual.
class NoConvergence : public NumericalError {
public:
    NoConvergence(const std::string& what, double last_residual)
        : NumericalError(what), last_residual_(last_residual) {}
    double last_residual() const { return last_residual_; }

private:
    double last_residual_ = 0.0;
};

class DegenerateMember : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonFiniteDistance : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class OracleFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RowNotOnGrid : public DataError {
public:
    using DataError::DataError;
};

class InsufficientData : public DataError {
public:
    using DataError::DataError;
};

class InvalidC : public DataError {
public:
    using DataError::DataError;
};

class SingleCluster : public DataError {
public:
    using DataError::DataError;
};

class EmptyCluster : public DataError {
public:
    using DataError::DataError;
};

class AllCandidatesExhausted : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    using DataError::DataError;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class DimMismatch : public DataError {
public:
    using DataError::DataError;
};

class TooFewTasks : public DataError {
public:
    using DataError::DataError;
};

class MismatchedTraceLengths : public DataError {
public:
    using DataError::DataError;
};

}  // namespace cmbo
