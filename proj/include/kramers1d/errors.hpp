#pragma once

#include <stdexcept>
#include <string>

namespace kramers1d {

/// Configuration / input-document problems (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failures: degeneracy, divergence, disconnection (CLI exit code 3).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A stationary point with a Hessian eigenvalue too close to zero.
struct DegenerateLandscapeError : NumericalError {
    explicit DegenerateLandscapeError(const std::string& what) : NumericalError(what) {}
};

/// Gradient-flow descent did not reach any minimum within the time budget.
struct ConnectionFailureError : NumericalError {
    explicit ConnectionFailureError(const std::string& what) : NumericalError(what) {}
};

/// Source and targets are not joined by the edge set.
struct DisconnectedGraphError : NumericalError {
    explicit DisconnectedGraphError(const std::string& what) : NumericalError(what) {}
};

/// Trajectory left the finite / bounded region.
struct BlowUpError : NumericalError {
    explicit BlowUpError(const std::string& what) : NumericalError(what) {}
};

/// Too many capped trajectories to trust the sample mean.
struct UnreliableEstimateError : NumericalError {
    explicit UnreliableEstimateError(const std::string& what) : NumericalError(what) {}
};

} // namespace kramers1d
