#pragma once

#include <stdexcept>
#include <string>

namespace wgeit {

/// Bad input: wrong sizes, out-of-range parameters, malformed files.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Bad or missing user configuration (CLI flags, config keys).
class UsageError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace wgeit
