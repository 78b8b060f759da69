#pragma once

#include <stdexcept>
#include <string>

namespace gqfpe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid arguments or parameter combinations (negative frequencies, bad grids, ...).
struct DomainError : Error {
    using Error::Error;
};

// A numerical procedure failed or could not reach its tolerance.
struct NumericalError : Error {
    NumericalError(const std::string& what, double estimate = 0.0)
        : Error(what), error_estimate(estimate) {}
    double error_estimate;
};

// Series cap exceeded before the requested tolerance was met.
struct TruncationError : NumericalError {
    using NumericalError::NumericalError;
};

// beta_s sits on a cot pole without the removable-singularity path.
struct SingularityError : NumericalError {
    using NumericalError::NumericalError;
};

// m_e(t) = m - K_I^(2)(t) reached zero or became negative.
struct EffectiveMassError : NumericalError {
    EffectiveMassError(const std::string& what, double t, double critical)
        : NumericalError(what), t_s(t), critical_gamma_s(critical) {}
    double t_s;
    double critical_gamma_s;
};

// Propagation blew up (trace drift or non-finite entries).
struct InstabilityError : NumericalError {
    using NumericalError::NumericalError;
};

// Requested combination is not supported (e.g. oracle with anharmonic V_e).
struct UnsupportedError : Error {
    using Error::Error;
};

// Configuration parsing/validation failure; line is 0 when not applicable.
struct ConfigError : Error {
    ConfigError(const std::string& what, int line_no = 0)
        : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + what : what), line(line_no) {}
    int line;
};

}  // namespace gqfpe
