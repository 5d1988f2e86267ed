#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gak {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape or length disagreement between arguments.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Caller passed a value outside the documented domain.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Solver failure, degenerate data, or a non-finite result.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what, std::size_t iterations = 0)
        : Error(what), iterations_(iterations) {}
    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
};

class FormatError : public Error {
public:
    enum class Kind { io, bad_magic, version_mismatch, truncated, malformed };
    FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

}  // namespace gak
