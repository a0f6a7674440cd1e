#pragma once

#include <stdexcept>
#include <string>

namespace microgrid {

/// Base class for every error raised by the simulator library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver failed to converge.
class SolverError : public Error {
public:
    using Error::Error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A parameter set violates one of its invariants.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A timestep of the simulation engine failed.
class SimulationError : public Error {
public:
    SimulationError(const std::string& what, long long step, std::string component)
        : Error(what), step_(step), component_(std::move(component)) {}

    long long step() const noexcept { return step_; }
    const std::string& component() const noexcept { return component_; }

private:
    long long step_;
    std::string component_;
};

/// Reading or writing a file failed.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace microgrid
