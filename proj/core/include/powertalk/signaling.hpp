#pragma once

#include <span>
#include <vector>

#include "powertalk/grid.hpp"
#include "powertalk/types.hpp"

namespace powertalk {

/// Operating limits a signaling symbol must respect for every admissible load.
struct ConstraintSet {
    double v_min = 0.0, v_max = 0.0;  // bus voltage band
    double i_min = 0.0, i_max = 0.0;  // per-unit output current band
    double r_min = 0.0, r_max = 0.0;  // load range the limits are enforced over

    static ConstraintSet from(const GridConfig& config);
};

/// Shared binary constellation: all units signal with the same symbol pair.
struct Constellation {
    Symbol zero;          // symbol for bit value 0
    Symbol one;           // symbol for bit value 1
    double p_one = 0.5;   // source probability of transmitting a 1
};

/// Per-unit average relative power deviation against a budget.
struct DeviationReport {
    std::vector<double> per_unit;  // delta_k
    double mean = 0.0;             // average over units
    double budget = 0.0;           // gamma the report was evaluated against

    bool within_budget() const { return mean <= budget; }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool empty() const { return lo > hi; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Voltage interval a fixed-slope symbol may occupy in TDMA operation:
/// the bus-voltage chain evaluated at the load extremes (lower bound at
/// R_min against V_min, upper bound at R_max against V_max) intersected
/// with the current chain (zero-current floor at R_max, rating ceiling at
/// R_min), for every possible signaling unit with the rest nominal.
Interval tdma_feasible_v(double r_d, const GridConfig& config);

/// True iff the symbol stays inside both TDMA chains for every unit.
/// Boundary equality counts as feasible (closed constraint set).
bool tdma_symbol_feasible(const Symbol& sym, const GridConfig& config);

/// Voltage interval either symbol of a full-duplex pair must occupy when
/// all units signal simultaneously (bus-voltage constraint only).
Interval fd_voltage_interval(double r_d, const GridConfig& config);

/// Interval for the high symbol's voltage given the low symbol, combining
/// the full-duplex voltage constraint with both current chains.
Interval fd_v1_interval(const Symbol& zero, double r_d1, const GridConfig& config);

/// True iff the pair jointly satisfies the full-duplex voltage and current
/// chains. Boundary equality counts as feasible.
bool fd_pair_feasible(const Symbol& zero, const Symbol& one, const GridConfig& config);

/// delta_k for a fixed input combination: RMS deviation of unit k's output
/// power from its all-nominal power, normalized by the mean nominal power,
/// with the load uniform on the configured range (64-node quadrature).
std::vector<double> relative_power_deviation(const GridConfig& config,
                                             std::span<const Symbol> inputs);

/// Average of delta_k over input-symbol combinations. TDMA: one active unit
/// (uniform over units, matching fair scheduling) sends zero/one with
/// weights (1-p_one, p_one) while the rest hold nominal parameters. FD: all
/// 2^K bit vectors with Bernoulli(p_one) weights; homogeneous grids reduce
/// this to the (own bit, others' Hamming weight) classes.
DeviationReport average_deviation(const Constellation& constellation, Mode mode,
                                  const GridConfig& config, double budget);

/// Fixed-slope pair (v0, r_d^n), (v1, r_d^n) with v1 >= v0 chosen by
/// bisection so that the average deviation meets the budget to 1e-6; the
/// deviation is strictly increasing in v1 on the feasible interval. Throws
/// BudgetUnreachable when no feasible v1 attains the budget and
/// std::invalid_argument when the anchor itself is infeasible.
Constellation design_fixed_rd_constellation(double budget, Mode mode,
                                            const GridConfig& config, double anchor_v0,
                                            double p_one = 0.5);

}  // namespace powertalk
