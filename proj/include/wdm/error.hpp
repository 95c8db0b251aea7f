#pragma once

#include <stdexcept>
#include <string>

namespace wdm {

/// Input rejected before any simulation work starts (topology, matrix, config).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An invariant audit found the network state inconsistent.
class AuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Average packet delay was requested with zero offered traffic.
class NoTrafficError : public std::runtime_error {
public:
    NoTrafficError() : std::runtime_error("no traffic") {}
};

} // namespace wdm
