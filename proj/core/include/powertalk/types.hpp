#pragma once

#include <random>
#include <stdexcept>
#include <string>

namespace powertalk {

/// Single seedable generator handle; every stochastic operation takes one
/// explicitly so that runs replay exactly from a seed.
using Rng = std::mt19937_64;

enum class Mode { tdma, fd };

inline const char* to_string(Mode m) { return m == Mode::tdma ? "tdma" : "fd"; }

/// Droop-control parameter pair (reference voltage, virtual resistance)
/// used as a channel input symbol.
struct Symbol {
    double v = 0.0;    // reference voltage [V]
    double r_d = 0.0;  // virtual resistance [ohm], must be > 0

    friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Requested power-deviation budget cannot be met anywhere inside the
/// feasible signaling region.
class BudgetUnreachable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration file problem; `key()` names the offending entry when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::string key = {})
        : std::runtime_error(message), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

}  // namespace powertalk
