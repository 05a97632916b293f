#pragma once

#include <stdexcept>
#include <string>

namespace h2pt {

enum class ErrorKind {
    parse,             // malformed input data
    invariant,         // data violates a physical invariant
    unsupported_level, // (v,N) not present in the coefficient table
    domain,            // argument outside the validated range
    config,            // bad run configuration
    numerical,         // solver failure (non-convergence etc.)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace h2pt
