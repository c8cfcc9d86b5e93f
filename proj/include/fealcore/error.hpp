#pragma once

#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fealcore {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument (shape, range, value) was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A value operation was requested on a pattern-only sparse matrix.
class PatternOnlyError : public Error {
public:
    using Error::Error;
};

/// Degenerate or non-manifold geometry/topology.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown (singular matrix, non-positive diagonal, non-finite values).
class NumericalError : public Error {
public:
    using Error::Error;
};

namespace detail {

template <class... Args>
std::string concat(const Args&... args)
{
    std::ostringstream os;
    (os << ... << args);
    return os.str();
}

} // namespace detail

/// Sink for warn-level diagnostics. Defaults to stderr; tests install their own.
using DiagnosticHandler = std::function<void(const std::string&)>;

inline DiagnosticHandler& diagnostic_handler()
{
    static DiagnosticHandler handler = [](const std::string& msg) { std::cerr << "fealcore warning: " << msg << '\n'; };
    return handler;
}

inline void warn(const std::string& msg)
{
    if (diagnostic_handler()) diagnostic_handler()(msg);
}

#define FEALCORE_THROW_IF(cond, Exception, ...)                                  \
    do {                                                                         \
        if (cond) throw Exception(::fealcore::detail::concat(__VA_ARGS__));      \
    } while (false)

} // namespace fealcore
