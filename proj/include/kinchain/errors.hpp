#pragma once

#include <stdexcept>
#include <string>

namespace kinchain {

// Base class for everything this library throws.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-facing configuration: schema violations, invalid grid specs,
// unknown keys, out-of-range parameters.  CLI exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

// Violated operation precondition (index set mismatch, grid mismatch, ...).
struct DomainError : Error {
    using Error::Error;
};

// A numerical guard tripped at run time (displacement guard, undefined H).
// CLI exit code 3.
struct NumericalGuardError : Error {
    using Error::Error;
};

// File I/O and format problems, reported with path context.
struct IoError : Error {
    using Error::Error;
};

} // namespace kinchain
