// error.hpp: error type shared by every quadblock module

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace quadblock {

enum class ErrorCode {
    invalid_dimension,
    index_out_of_range,
    dimension_mismatch,
    space_mismatch,
    degenerate_tunneling,
    singular_pump,
    invalid_frequency,
    invalid_parameter,
    configuration,
    negative_rate,
    degenerate_steady_state,
    invalid_state,
    integration_failure,
    convergence_failure,
    undefined_transmission,
    undefined_correlation,
    config_parse,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::index_out_of_range: return "index-out-of-range";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::space_mismatch: return "space-mismatch";
    case ErrorCode::degenerate_tunneling: return "degenerate-tunneling";
    case ErrorCode::singular_pump: return "singular-pump";
    case ErrorCode::invalid_frequency: return "invalid-frequency";
    case ErrorCode::invalid_parameter: return "invalid-parameter";
    case ErrorCode::configuration: return "configuration";
    case ErrorCode::negative_rate: return "negative-rate";
    case ErrorCode::degenerate_steady_state: return "degenerate-steady-state";
    case ErrorCode::invalid_state: return "invalid-state";
    case ErrorCode::integration_failure: return "integration-failure";
    case ErrorCode::convergence_failure: return "convergence-failure";
    case ErrorCode::undefined_transmission: return "undefined-transmission";
    case ErrorCode::undefined_correlation: return "undefined-correlation";
    case ErrorCode::config_parse: return "config-parse";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Raised when the trace-constrained Liouvillian cannot be solved uniquely.
// Carries the second-smallest singular value of the Liouvillian when it was
// affordable to compute (small spaces only).
class DegenerateSteadyStateError : public Error {
public:
    DegenerateSteadyStateError(const std::string& what, std::optional<double> second_singular)
        : Error(ErrorCode::degenerate_steady_state, what), second_singular_(second_singular) {}

    std::optional<double> second_smallest_singular_value() const noexcept { return second_singular_; }

private:
    std::optional<double> second_singular_;
};

class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double achieved_tolerance)
        : Error(ErrorCode::integration_failure, what), achieved_(achieved_tolerance) {}

    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

} // namespace quadblock
