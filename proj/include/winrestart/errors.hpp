#pragma once

#include <stdexcept>
#include <string>

namespace winrestart {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// User-supplied configuration is invalid; the message names the offending field.
struct ConfigError : Error {
    using Error::Error;
};

// An argument lies outside the mathematical domain of the requested quantity.
struct DomainError : Error {
    using Error::Error;
};

// The ODE state left the finite floating-point range (step too large or
// parameters badly scaled).
struct NonFiniteState : Error {
    using Error::Error;
};

// The trajectory never picked up speed although the gradient at the start
// was not negligible; the integration is numerically stuck.
struct ZeroSpeedStall : Error {
    using Error::Error;
};

// Consecutive restart cycles stopped making measurable progress.
struct NoProgress : Error {
    using Error::Error;
};

// A root could not be bracketed within the search range.
struct BracketFailure : Error {
    using Error::Error;
};

// The computed per-cycle contraction factor is not in (0,1).
struct InvalidContraction : Error {
    using Error::Error;
};

// Too few usable samples for the requested statistic or fit.
struct InsufficientData : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

// An iterate of the discrete algorithm became non-finite at iteration k.
struct NonFiniteIterate : Error {
    NonFiniteIterate(int k_, const std::string& msg) : Error(msg), k(k_) {}
    int k;
};

}  // namespace winrestart
