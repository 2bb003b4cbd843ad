#pragma once

#include <stdexcept>
#include <string>

namespace qga {

/// Invalid user configuration: property file, gate set, sizes out of range.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A circuit grid that violates its structural invariants.
class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input (circuit documents, statevector files, datasets).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qga
