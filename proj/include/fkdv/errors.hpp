#pragma once

#include <stdexcept>
#include <string>

namespace fkdv {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad parameters: odd grid sizes, alpha outside (0,1), b < 5*epsilon, ...
struct ConfigError : Error {
    using Error::Error;
};

// Two fields (or a field and a multiplier) living on different grids.
struct GridMismatchError : Error {
    using Error::Error;
};

// NaN/Inf detected in field samples.
struct FieldError : Error {
    using Error::Error;
};

// Sampling points too coarse to resolve a mollifier scale.
struct ResolutionError : Error {
    using Error::Error;
};

// Weight-family construction violated one of its own guarantees.
struct ConstructionError : Error {
    using Error::Error;
};

// Operation outside the supported parameter range (e.g. negative Riesz exponent).
struct UnsupportedError : Error {
    using Error::Error;
};

// Non-monotone time samples fed to an accumulator.
struct SequencingError : Error {
    using Error::Error;
};

// Corrupt or truncated snapshot / malformed config text.
struct FormatError : Error {
    using Error::Error;
};

// Name not found in a registry (weight member, probe kind, ...).
struct LookupError : Error {
    using Error::Error;
};

// Solution left the floating-point range during time stepping.
struct BlowUpError : Error {
    BlowUpError(const std::string& msg, double t_blowup) : Error(msg), t(t_blowup) {}
    double t;
};

} // namespace fkdv
