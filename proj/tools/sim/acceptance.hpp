#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "ivpb/model.hpp"

namespace ivpb::cli {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct AcceptanceOptions {
    std::string cache_dir;       // collision tables; empty keeps them in memory only
    std::uint64_t seed = 1;
    std::ostream* log = nullptr;  // progress lines
};

// Desk problem: 1x3v, N_x = 32, N_v = 16^3, v_max = 6, dt auto, t_end = 1, perturbation mode.
RunConfig desk_config();

CriterionResult criterion_operator(const AcceptanceOptions& o);
CriterionResult criterion_poisson(const AcceptanceOptions& o);
CriterionResult criterion_physical_positivity(const AcceptanceOptions& o);
CriterionResult criterion_macro_identities(const AcceptanceOptions& o);
CriterionResult criterion_plasma_frequencies(const AcceptanceOptions& o);

// 3, 5 and 6 share the desk trajectory and its dt/2 companion.
std::vector<CriterionResult> criteria_desk(const AcceptanceOptions& o);

// All eight, ordered by id.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o);

std::string format_result(const CriterionResult& r);

// Quick invariant table on the configured grid, for `check`.
struct CheckRow {
    std::string name;
    double measured = 0.0;
    std::string limit;
    bool pass = false;
};
std::vector<CheckRow> invariant_suite(const RunConfig& cfg, std::uint64_t seed, std::ostream* log = nullptr);

}  // namespace ivpb::cli
