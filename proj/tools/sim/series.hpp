#pragma once

#include <array>
#include <ostream>
#include <string>

#include "ivpb/diagnostics.hpp"

namespace ivpb::cli {

inline constexpr int kSeriesVersion = 1;
inline constexpr std::array<const char*, 13> kSeriesColumns = {
    "t",         "triple_norm_sq", "triple_norm_nu_sq", "e_functional",   "y_lyapunov", "mass_res", "momentum_res_1",
    "momentum_res_2", "momentum_res_3", "energy_res", "neutrality_res", "min_F",      "newton_iters"};

// "# ivpb-series v1" then the header line
void write_series_header(std::ostream& out);
// round-trip precision, so identical runs give identical files
void write_series_row(std::ostream& out, const EnergyReport& r);

}  // namespace ivpb::cli
