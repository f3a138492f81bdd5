#pragma once

#include <stdexcept>
#include <string>

namespace csit {

/// Matrix or vector shapes do not match the operation.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Contradictory or out-of-range scenario parameters.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Frobenius normalization of an all-zero matrix.
class ZeroMatrixError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed feedback payload: wrong byte length or a non-sign symbol.
class EncodingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rank-deficient least-squares system on the requested support.
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Recovery terminated with an all-zero or non-finite estimate.
class DegenerateResultError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precoder was requested for an all-zero channel.
class DegenerateChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output file could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace csit
