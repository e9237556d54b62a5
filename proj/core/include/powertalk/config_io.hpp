#pragma once

#include <iosfwd>
#include <string>

#include "powertalk/grid.hpp"

namespace powertalk {

/// Flat `key = value` grid configuration format. Recognized keys:
///
///   K, v_n, r_d_n, V_min, V_max, I_max, R_min, R_max,
///   sigma_v, sigma_i, T_s, f_o
///
/// `v_n`/`r_d_n` set the shared nominal droop pair for every unit; `#`
/// starts a comment. Unknown keys are hard errors so that parameter drift
/// between runs cannot pass silently.
GridConfig parse_grid_config(std::istream& in);
GridConfig load_grid_config(const std::string& path);
void write_grid_config(const GridConfig& config, std::ostream& out);

}  // namespace powertalk
