#pragma once

#include <stdexcept>
#include <string>

namespace ctrwlab {

// Every library failure carries a short machine-readable tag; the CLI maps
// the error class to an exit code and prints the tag on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string tag, const std::string& what)
        : std::runtime_error(what), tag_(std::move(tag)) {}
    const std::string& tag() const noexcept { return tag_; }

private:
    std::string tag_;
};

// Invalid parameters or configuration (exit code 2).
class ParamError : public Error {
public:
    using Error::Error;
};

// t outside [0, T] and similar.
class RangeError : public ParamError {
public:
    using ParamError::ParamError;
};

// Paths or grids that do not line up.
class ShapeError : public ParamError {
public:
    using ParamError::ParamError;
};

// Hypothesis of an operation not met by its input.
class PreconditionError : public ParamError {
public:
    using ParamError::ParamError;
};

// Malformed or missing data at run time (exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

class UnsupportedDecomposition : public DataError {
public:
    using DataError::DataError;
};

class AdaptednessViolation : public DataError {
public:
    using DataError::DataError;
};

class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {
inline void require(bool ok, const char* tag, const std::string& msg) {
    if (!ok) throw ParamError(tag, msg);
}
}  // namespace detail

}  // namespace ctrwlab
