#pragma once

#include <stdexcept>
#include <string>

namespace vevans {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (wrong dimension, not an equilibrium, ...).
struct ContractViolation : Error {
    using Error::Error;
};

// Input lies outside the region where a quantity is defined (a3 <= 0, s = 0, C not PD).
struct DomainError : Error {
    using Error::Error;
};

struct ConnectionNotFound : Error {
    ConnectionNotFound(const std::string& what, double miss)
        : Error(what), miss_distance(miss) {}
    double miss_distance;
};

struct SplittingDegenerate : Error {
    using Error::Error;
};

struct ProjectorFailure : Error {
    using Error::Error;
};

struct StiffFailure : Error {
    StiffFailure(const std::string& what, double z_at) : Error(what), z(z_at) {}
    double z;
};

struct InternalConsistencyError : Error {
    using Error::Error;
};

}  // namespace vevans
