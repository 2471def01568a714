#pragma once

#include <stdexcept>
#include <string>

namespace nocbuf {

// Bad user-supplied parameters (rates, capacities, weights, ports).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Arguments outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Internal inconsistency of the simulation model. Never expected in a correct run.
class ModelError : public std::logic_error {
public:
    explicit ModelError(const std::string& what) : std::logic_error(what) {}
};

} // namespace nocbuf
