#include "powertalk/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace powertalk {

GridConfig GridConfig::reference(int units) {
    GridConfig c;
    c.units = units;
    c.nominal.assign(units, Symbol{400.0, 2.0});
    c.v_min = 390.0;
    c.v_max = 400.0;
    c.i_max = 5.0;
    c.r_load_min = 50.0;
    c.r_load_max = 250.0;
    c.sigma_v = 0.001;
    c.sigma_i = 0.001;
    c.slot_seconds = 10e-3;
    c.sampling_hz = 10e3;
    c.validate();
    return c;
}

bool GridConfig::homogeneous() const {
    for (const auto& s : nominal)
        if (!(s == nominal.front())) return false;
    return true;
}

void GridConfig::validate() const {
    if (units < 1) throw std::invalid_argument("grid: need at least one unit");
    if ((int)nominal.size() != units)
        throw std::invalid_argument("grid: one nominal droop pair per unit required");
    if (!(0.0 < v_min && v_min < v_max))
        throw std::invalid_argument("grid: need 0 < V_min < V_max");
    if (!(0.0 < r_load_min && r_load_min <= r_load_max))
        throw std::invalid_argument("grid: need 0 < R_min <= R_max");
    if (!(i_max > 0.0)) throw std::invalid_argument("grid: need I_max > 0");
    for (const auto& s : nominal)
        if (!(s.r_d > 0.0)) throw std::invalid_argument("grid: nominal r_d must be > 0");
    if (sigma_v < 0.0 || sigma_i < 0.0)
        throw std::invalid_argument("grid: noise std devs must be >= 0");
}

SteadyState solve_steady_state(const GridConfig& config, std::span<const Symbol> inputs,
                               double r) {
    if ((int)inputs.size() != config.units)
        throw std::invalid_argument("steady state: one input symbol per unit required");
    if (!(r > 0.0)) throw std::invalid_argument("steady state: load must be > 0");

    double source_sum = 0.0;       // sum of v_k / r_dk
    double conductance = 1.0 / r;  // 1/r + sum of 1 / r_dk
    for (const auto& s : inputs) {
        if (!(s.r_d > 0.0)) throw std::invalid_argument("steady state: r_d must be > 0");
        source_sum += s.v / s.r_d;
        conductance += 1.0 / s.r_d;
    }

    SteadyState st;
    st.load = r;
    st.v_star = source_sum / conductance;
    st.current.resize(config.units);
    st.power.resize(config.units);
    for (int k = 0; k < config.units; ++k) {
        st.current[k] = (inputs[k].v - st.v_star) / inputs[k].r_d;
        st.power[k] = st.v_star * st.current[k];
    }
    return st;
}

Observation observe(const SteadyState& state, int unit, const GridConfig& config,
                    Rng& rng) {
    if (unit < 0 || unit >= (int)state.current.size())
        throw std::invalid_argument("observe: unit index out of range");
    Observation y{state.v_star, state.current[unit]};
    if (config.sigma_v > 0.0)
        y.v += std::normal_distribution<double>(0.0, config.sigma_v)(rng);
    if (config.sigma_i > 0.0)
        y.i += std::normal_distribution<double>(0.0, config.sigma_i)(rng);
    return y;
}

LoadProcess LoadProcess::from_config(const GridConfig& config, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("load process: lambda must be >= 0");
    return LoadProcess{lambda, config.r_load_min, config.r_load_max};
}

double LoadProcess::change_probability() const { return -std::expm1(-lambda); }

double LoadProcess::draw(Rng& rng) const {
    return std::uniform_real_distribution<double>(r_min, r_max)(rng);
}

GridConfig with_unit_count(const GridConfig& base, int units) {
    GridConfig c = base;
    c.units = units;
    c.nominal.assign(units, base.nominal.front());
    c.validate();
    return c;
}

std::vector<LoadChange> sample_load_slots(const LoadProcess& process, long n_slots,
                                          Rng& rng) {
    if (n_slots < 1) throw std::invalid_argument("load process: need n_slots >= 1");
    std::vector<LoadChange> changes;
    const double p = process.change_probability();
    std::bernoulli_distribution changed(p);
    for (long t = 0; t < n_slots; ++t) {
        if (p > 0.0 && changed(rng)) changes.push_back({t, process.draw(rng)});
    }
    return changes;
}

}  // namespace powertalk
