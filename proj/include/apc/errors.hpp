#pragma once

#include <stdexcept>
#include <string>

namespace apc {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rotor speed fell below the guard value; aerodynamic torque is undefined.
struct RotorStopped : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CalibrationOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonMonotonicCurve : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NegativeReference : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnknownCase : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct WindowTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Wraps a model/controller error with the simulation step it occurred at.
struct ModelError : std::runtime_error {
    ModelError(std::size_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step(step) {}
    std::size_t step;
};

}  // namespace apc
