#pragma once

#include <stdexcept>
#include <string>

namespace randutv {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input values are not admissible (non-finite entries, parameters out of range).
class InputError : public Error {
public:
    using Error::Error;
};

/// Problem exceeds the desk-scale cap of an exact routine.
class SizeError : public Error {
public:
    using Error::Error;
};

/// Experiment or evaluation configuration is incomplete or invalid.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Matrix shape not handled by the requested routine.
class UnsupportedShapeError : public Error {
public:
    using Error::Error;
};

/// File could not be read, parsed or written.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace randutv
