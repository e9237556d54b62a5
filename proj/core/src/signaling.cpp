#include "powertalk/signaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "powertalk/numeric.hpp"

namespace powertalk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Interval intersect(const Interval& a, const Interval& b) {
    return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
}

/// Bounds for a symbol of slope r_d at unit k, all other units nominal.
Interval tdma_unit_interval(double r_d, int k, const GridConfig& cfg) {
    double source_sum = 0.0;   // sum over i != k of v_i^n / r_di^n
    double conductance = 0.0;  // sum over i != k of 1 / r_di^n
    for (int i = 0; i < cfg.units; ++i) {
        if (i == k) continue;
        source_sum += cfg.nominal[i].v / cfg.nominal[i].r_d;
        conductance += 1.0 / cfg.nominal[i].r_d;
    }
    const double h_min = 1.0 / cfg.r_load_min + conductance;
    const double h_max = 1.0 / cfg.r_load_max + conductance;
    const double a_min = source_sum / h_min;
    const double a_max = source_sum / h_max;

    Interval voltage{r_d * (cfg.v_min - a_min) * h_min + cfg.v_min,
                     r_d * (cfg.v_max - a_max) * h_max + cfg.v_max};
    Interval current{a_max, r_d * cfg.i_max + (cfg.i_max + source_sum) / h_min};
    return intersect(voltage, current);
}

/// delta_k summed over a weighted set of input combinations.
class DeviationAccumulator {
public:
    explicit DeviationAccumulator(const GridConfig& cfg) : cfg_(cfg), acc_(cfg.units) {}

    void add(std::span<const Symbol> inputs, double weight) {
        auto dk = relative_power_deviation(cfg_, inputs);
        for (int k = 0; k < cfg_.units; ++k) acc_[k] += weight * dk[k];
    }

    DeviationReport report(double budget) const {
        DeviationReport r;
        r.per_unit = acc_;
        r.mean = 0.0;
        for (double d : acc_) r.mean += d;
        r.mean /= cfg_.units;
        r.budget = budget;
        return r;
    }

private:
    const GridConfig& cfg_;
    std::vector<double> acc_;
};

}  // namespace

ConstraintSet ConstraintSet::from(const GridConfig& c) {
    return ConstraintSet{c.v_min, c.v_max, 0.0, c.i_max, c.r_load_min, c.r_load_max};
}

Interval tdma_feasible_v(double r_d, const GridConfig& cfg) {
    if (!(r_d > 0.0)) throw std::invalid_argument("signaling: r_d must be > 0");
    cfg.validate();
    Interval out{-kInf, kInf};
    for (int k = 0; k < cfg.units; ++k) out = intersect(out, tdma_unit_interval(r_d, k, cfg));
    return out;
}

bool tdma_symbol_feasible(const Symbol& sym, const GridConfig& cfg) {
    return tdma_feasible_v(sym.r_d, cfg).contains(sym.v);
}

Interval fd_voltage_interval(double r_d, const GridConfig& cfg) {
    if (!(r_d > 0.0)) throw std::invalid_argument("signaling: r_d must be > 0");
    return Interval{r_d * cfg.v_min / (cfg.units * cfg.r_load_min) + cfg.v_min,
                    r_d * cfg.v_max / (cfg.units * cfg.r_load_max) + cfg.v_max};
}

namespace {

/// Current chain for the high symbol, all other units on the low symbol,
/// evaluated at R_min where it binds.
Interval fd_high_current_interval(const Symbol& zero, double r_d1, const GridConfig& cfg) {
    const double others = (cfg.units - 1) * (zero.v / zero.r_d);
    const double h = 1.0 / cfg.r_load_min + (cfg.units - 1) / zero.r_d;
    return Interval{others / h, cfg.i_max * r_d1 + (cfg.i_max + others) / h};
}

/// Current chain for the low symbol, all other units on the high symbol,
/// evaluated at R_max where it binds.
Interval fd_low_current_interval(const Symbol& one, double r_d0, const GridConfig& cfg) {
    const double others = (cfg.units - 1) * (one.v / one.r_d);
    const double h = 1.0 / cfg.r_load_max + (cfg.units - 1) / one.r_d;
    return Interval{others / h, cfg.i_max * r_d0 + (cfg.i_max + others) / h};
}

}  // namespace

Interval fd_v1_interval(const Symbol& zero, double r_d1, const GridConfig& cfg) {
    Interval out = intersect(fd_voltage_interval(r_d1, cfg),
                             fd_high_current_interval(zero, r_d1, cfg));
    if (cfg.units > 1) {
        // Rearranged low-symbol current chain: its lower bound caps v1 from
        // above, its upper bound caps v1 from below.
        const double h = 1.0 / cfg.r_load_max + (cfg.units - 1) / r_d1;
        const double scale = r_d1 * h / (cfg.units - 1);
        out = intersect(out, Interval{(zero.v - cfg.i_max * zero.r_d) * h * r_d1 /
                                              (cfg.units - 1) -
                                          cfg.i_max * r_d1 / (cfg.units - 1),
                                      zero.v * scale});
    }
    return out;
}

bool fd_pair_feasible(const Symbol& zero, const Symbol& one, const GridConfig& cfg) {
    if (!(zero.r_d > 0.0 && one.r_d > 0.0))
        throw std::invalid_argument("signaling: r_d must be > 0");
    cfg.validate();
    return fd_voltage_interval(zero.r_d, cfg).contains(zero.v) &&
           fd_voltage_interval(one.r_d, cfg).contains(one.v) &&
           fd_high_current_interval(zero, one.r_d, cfg).contains(one.v) &&
           fd_low_current_interval(one, zero.r_d, cfg).contains(zero.v);
}

std::vector<double> relative_power_deviation(const GridConfig& cfg,
                                             std::span<const Symbol> inputs) {
    if ((int)inputs.size() != cfg.units)
        throw std::invalid_argument("deviation: one input symbol per unit required");

    std::vector<double> sq_dev(cfg.units, 0.0);   // E[(P_k - P_k^n)^2]
    std::vector<double> nominal_p(cfg.units, 0.0);  // E[P_k^n]
    const double mid = 0.5 * (cfg.r_load_min + cfg.r_load_max);
    const double half = 0.5 * (cfg.r_load_max - cfg.r_load_min);
    for (const auto& node : gauss_legendre(64)) {
        const double r = mid + half * node.x;
        const double w = 0.5 * node.w;
        const auto st = solve_steady_state(cfg, inputs, r);
        const auto st_n = solve_steady_state(cfg, cfg.nominal, r);
        for (int k = 0; k < cfg.units; ++k) {
            const double d = st.power[k] - st_n.power[k];
            sq_dev[k] += w * d * d;
            nominal_p[k] += w * st_n.power[k];
        }
    }
    std::vector<double> delta(cfg.units);
    for (int k = 0; k < cfg.units; ++k) delta[k] = std::sqrt(sq_dev[k]) / nominal_p[k];
    return delta;
}

DeviationReport average_deviation(const Constellation& cons, Mode mode,
                                  const GridConfig& cfg, double budget) {
    cfg.validate();
    if (!(cons.p_one > 0.0 && cons.p_one < 1.0))
        throw std::invalid_argument("deviation: need 0 < p_one < 1");

    DeviationAccumulator acc(cfg);
    const double w_bit[2] = {1.0 - cons.p_one, cons.p_one};
    std::vector<Symbol> inputs = cfg.nominal;

    if (mode == Mode::tdma) {
        for (int active = 0; active < cfg.units; ++active) {
            for (int b = 0; b < 2; ++b) {
                inputs = cfg.nominal;
                inputs[active] = b ? cons.one : cons.zero;
                acc.add(inputs, w_bit[b] / cfg.units);
            }
        }
        return acc.report(budget);
    }

    if (cfg.homogeneous()) {
        // Every unit sees the same statistics, so score unit 0 against the
        // (own bit, others' weight) classes and reuse its value.
        double delta0 = 0.0;
        for (int b = 0; b < 2; ++b) {
            for (int weight = 0; weight < cfg.units; ++weight) {
                inputs.assign(cfg.units, cons.zero);
                inputs[0] = b ? cons.one : cons.zero;
                for (int j = 1; j <= weight; ++j) inputs[j] = cons.one;
                const double w = w_bit[b] * binomial_pmf(cfg.units - 1, weight, cons.p_one);
                delta0 += w * relative_power_deviation(cfg, inputs)[0];
            }
        }
        DeviationReport r;
        r.per_unit.assign(cfg.units, delta0);
        r.mean = delta0;
        r.budget = budget;
        return r;
    }

    if (cfg.units > 20)
        throw std::invalid_argument("deviation: exhaustive FD average limited to K <= 20");
    for (unsigned long bits = 0; bits < (1ul << cfg.units); ++bits) {
        double w = 1.0;
        for (int k = 0; k < cfg.units; ++k) {
            const int b = (bits >> k) & 1;
            inputs[k] = b ? cons.one : cons.zero;
            w *= w_bit[b];
        }
        acc.add(inputs, w);
    }
    return acc.report(budget);
}

Constellation design_fixed_rd_constellation(double budget, Mode mode,
                                            const GridConfig& cfg, double anchor_v0,
                                            double p_one) {
    cfg.validate();
    if (!(budget > 0.0)) throw std::invalid_argument("design: budget must be > 0");
    const double r_d = cfg.nominal.front().r_d;
    const Symbol zero{anchor_v0, r_d};

    Interval v1_range;
    if (mode == Mode::tdma) {
        const Interval range = tdma_feasible_v(r_d, cfg);
        if (!range.contains(anchor_v0))
            throw std::invalid_argument("design: anchor symbol is not feasible");
        v1_range = range;
    } else {
        if (!fd_voltage_interval(r_d, cfg).contains(anchor_v0))
            throw std::invalid_argument("design: anchor symbol is not feasible");
        v1_range = fd_v1_interval(zero, r_d, cfg);
    }
    v1_range.lo = std::max(v1_range.lo, anchor_v0);
    if (v1_range.empty())
        throw BudgetUnreachable("design: no feasible high symbol above the anchor");

    auto deviation = [&](double v1) {
        return average_deviation({zero, Symbol{v1, r_d}, p_one}, mode, cfg, budget).mean;
    };

    constexpr double tol = 1e-6;
    double lo = v1_range.lo, hi = v1_range.hi;
    const double d_lo = deviation(lo);
    const double d_hi = deviation(hi);
    if (d_lo > budget + tol)
        throw BudgetUnreachable("design: anchor already exceeds the deviation budget");
    if (d_hi < budget - tol)
        throw BudgetUnreachable(
            "design: budget exceeds the largest deviation reachable in the signaling space");

    double mid = hi, d_mid = d_hi;
    for (int it = 0; it < 200 && std::abs(d_mid - budget) > tol; ++it) {
        mid = 0.5 * (lo + hi);
        d_mid = deviation(mid);
        (d_mid < budget ? lo : hi) = mid;
    }
    if (std::abs(d_mid - budget) > tol)
        throw BudgetUnreachable("design: bisection failed to meet the budget tolerance");
    return Constellation{zero, Symbol{mid, r_d}, p_one};
}

}  // namespace powertalk
