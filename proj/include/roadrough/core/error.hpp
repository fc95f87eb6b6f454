#pragma once

#include <stdexcept>
#include <string>

namespace roadrough {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap or diverged.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Map matching could not produce a consistent path.
class MatchError : public Error {
public:
    using Error::Error;
};

/// File read/write or schema failure.
class IoError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& msg)
{
    if (!cond) throw InvalidInput(msg);
}

} // namespace detail
} // namespace roadrough
