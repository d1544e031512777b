#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mslln {

// Base for every error raised by the library. The C API maps each subclass
// onto a status code (see mslln.h).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter violates a model hypothesis or a precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

class MomentDoesNotExist : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class CapExceeded : public ValidationError {
public:
    CapExceeded(const std::string& what, std::size_t cap)
        : ValidationError(what), cap_(cap) {}
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

// Input data carries no information for the requested statistic
// (constant sample, all-zero block maxima, ...).
class DegenerateError : public Error {
public:
    using Error::Error;
};

class IllPosedTarget : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace mslln
