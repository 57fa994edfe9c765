#pragma once

#include <stdexcept>
#include <string>

namespace fourfold {

// Violated operation precondition (bad field, far-field mismatch, wrong grid, ...).
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent user-facing configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fourfold
