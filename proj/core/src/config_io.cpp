#include "powertalk/config_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace powertalk {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_number(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'",
                          key);
    }
}

}  // namespace

GridConfig parse_grid_config(std::istream& in) {
    std::map<std::string, double> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not of the form key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is missing a key or a value");
        if (kv.count(key)) throw ConfigError("config: duplicate key '" + key + "'", key);
        kv[key] = to_number(key, value);
    }

    GridConfig c = GridConfig::reference();
    auto take = [&](const char* key, double& field) {
        auto it = kv.find(key);
        if (it != kv.end()) {
            field = it->second;
            kv.erase(it);
        }
    };

    double units = c.units;
    double v_n = c.nominal.front().v;
    double r_d_n = c.nominal.front().r_d;
    take("K", units);
    take("v_n", v_n);
    take("r_d_n", r_d_n);
    take("V_min", c.v_min);
    take("V_max", c.v_max);
    take("I_max", c.i_max);
    take("R_min", c.r_load_min);
    take("R_max", c.r_load_max);
    take("sigma_v", c.sigma_v);
    take("sigma_i", c.sigma_i);
    take("T_s", c.slot_seconds);
    take("f_o", c.sampling_hz);

    if (!kv.empty())
        throw ConfigError("config: unknown key '" + kv.begin()->first + "'",
                          kv.begin()->first);
    if (units < 1 || units != (long)units)
        throw ConfigError("config: key 'K' must be a positive integer", "K");

    c.units = (int)units;
    c.nominal.assign(c.units, Symbol{v_n, r_d_n});
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

GridConfig load_grid_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_grid_config(in);
}

void write_grid_config(const GridConfig& config, std::ostream& out) {
    config.validate();
    if (!config.homogeneous())
        throw std::invalid_argument("config: only homogeneous grids serialize to file");
    out << "K = " << config.units << "\n"
        << "v_n = " << config.nominal.front().v << "\n"
        << "r_d_n = " << config.nominal.front().r_d << "\n"
        << "V_min = " << config.v_min << "\n"
        << "V_max = " << config.v_max << "\n"
        << "I_max = " << config.i_max << "\n"
        << "R_min = " << config.r_load_min << "\n"
        << "R_max = " << config.r_load_max << "\n"
        << "sigma_v = " << config.sigma_v << "\n"
        << "sigma_i = " << config.sigma_i << "\n"
        << "T_s = " << config.slot_seconds << "\n"
        << "f_o = " << config.sampling_hz << "\n";
}

}  // namespace powertalk
