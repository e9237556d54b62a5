#pragma once

#include <span>
#include <vector>

#include "powertalk/types.hpp"

namespace powertalk {

/// Electrical and measurement parameters of a single-bus DC microgrid with
/// K droop-controlled voltage-source converters supplying one resistive load.
///
/// Feeder-line resistances are taken as exactly zero; slot-level modeling
/// only, so the slot duration and sampling frequency are carried for
/// documentation and do not enter the steady-state equations.
struct GridConfig {
    int units = 0;                 // K
    std::vector<Symbol> nominal;   // per-unit nominal droop parameters
    double v_min = 0.0;            // lowest allowed bus voltage [V]
    double v_max = 0.0;            // highest allowed bus voltage [V]
    double i_max = 0.0;            // per-unit current rating [A]; lower limit is 0
    double r_load_min = 0.0;       // load resistance range [ohm]
    double r_load_max = 0.0;
    double sigma_v = 0.0;          // bus-voltage observation noise std dev [V]
    double sigma_i = 0.0;          // output-current observation noise std dev [A]
    double slot_seconds = 0.0;     // slot duration T_s [s]
    double sampling_hz = 0.0;      // measurement sampling frequency f_o [Hz]

    /// Stock low-voltage bench configuration used throughout the test suite:
    /// 390-400 V bus, 5 A rating, (400 V, 2 ohm) nominal droop for every
    /// unit, 50-250 ohm load range, 1 mV / 1 mA observation noise.
    static GridConfig reference(int units = 2);

    /// All units share the same nominal droop parameters.
    bool homogeneous() const;

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;
};

/// Bus voltage plus per-unit currents and powers for one slot.
struct SteadyState {
    double v_star = 0.0;           // bus voltage [V]
    std::vector<double> current;   // per-unit output current [A]
    std::vector<double> power;     // per-unit output power [W]
    double load = 0.0;             // load resistance the state was solved at [ohm]
};

/// Closed-form steady state of the bus: the parallel combination of all
/// droop sources against the load fixes the bus voltage, which fixes every
/// output current. inputs must have one symbol per unit.
SteadyState solve_steady_state(const GridConfig& config, std::span<const Symbol> inputs,
                               double r);

/// Noisy local measurement (bus voltage, own output current) at one unit.
struct Observation {
    double v = 0.0;
    double i = 0.0;
};

/// Adds independent zero-mean Gaussian noise with the configured standard
/// deviations. Draw order is voltage then current.
Observation observe(const SteadyState& state, int unit, const GridConfig& config,
                    Rng& rng);

/// Memoryless load process: each slot the load changes with probability
/// p = 1 - exp(-lambda); a changed slot draws the new resistance uniformly
/// on [r_min, r_max].
struct LoadProcess {
    double lambda = 0.0;  // expected changes per slot
    double r_min = 0.0;
    double r_max = 0.0;

    static LoadProcess from_config(const GridConfig& config, double lambda);

    double change_probability() const;
    double draw(Rng& rng) const;  // new load value
};

struct LoadChange {
    long slot = 0;
    double r = 0.0;
};

/// Slots where the load changed, with the new value; slots are 0-based.
std::vector<LoadChange> sample_load_slots(const LoadProcess& process, long n_slots,
                                          Rng& rng);

/// Copy of `base` with the unit count changed; added units replicate the
/// first nominal droop pair.
GridConfig with_unit_count(const GridConfig& base, int units);

}  // namespace powertalk
