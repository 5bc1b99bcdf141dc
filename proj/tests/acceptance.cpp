// Runs the eight acceptance criteria and prints one PASS/FAIL line each.
// Usage: ivpb_acceptance [table_cache_dir] [seed]

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "acceptance.hpp"

int main(int argc, char** argv) {
    ivpb::cli::AcceptanceOptions o;
    if (argc > 1) {
        o.cache_dir = argv[1];
        std::filesystem::create_directories(o.cache_dir);
    }
    if (argc > 2) o.seed = std::strtoull(argv[2], nullptr, 10);
    o.log = &std::cerr;
    bool ok = true;
    for (const auto& r : ivpb::cli::run_acceptance(o)) {
        std::cout << ivpb::cli::format_result(r) << std::endl;
        ok = ok && r.pass;
    }
    return ok ? 0 : 1;
}
