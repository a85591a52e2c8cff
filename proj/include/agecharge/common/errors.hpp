#pragma once

#include <stdexcept>
#include <string>

namespace agecharge {

/// Malformed or inconsistent configuration. `key()` names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)), detail_(what) {}
    const std::string& key() const noexcept { return key_; }
    /// Message without the key prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string key_;
    std::string detail_;
};

/// Simulation left its admissible region (NaN, concentration out of bounds).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Function evaluated outside its domain (log of a non-positive value, table lookup out of range).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A controller cannot meet its goal within the allowed current range.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace agecharge
