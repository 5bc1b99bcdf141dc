#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ivpb/diagnostics.hpp"
#include "ivpb/model.hpp"

namespace ivpb {

struct InitialDataReport {
    double c_mean = 0.0;  // constant added to the c profile to balance the energy law
    int secant_iters = 0;
    double energy_residual = 0.0;
};

// f0 = (a + b.v + c|v|^2) sqrt(mu) + micro v1 v2 sqrt(mu), spatial means of mass and momentum removed,
// energy balanced by a secant iteration on the mean of c.
SimState build_initial_data(const Model& m, const InitialDataSpec& spec, InitialDataReport* report = nullptr);

// Strang splitting: half transport, then field, collision and field again, then half transport.
SimState step_perturbation(const Model& m, const SimState& s, double dt);
SimState step_physical(const Model& m, const SimState& s, double dt);
SimState step(const Model& m, const SimState& s, double dt);

enum class RunStatus { Completed, EarlyAbort };

struct RunResult {
    RunStatus status = RunStatus::Completed;
    std::string message;
    std::vector<EnergyReport> series;
    std::vector<SimState> trajectory;  // states at output cadence when requested
    SimState final_state;
    double dt = 0.0;
    long steps = 0;
};

using OutputObserver = std::function<void(const SimState&, const EnergyReport&)>;

struct RunOptions {
    bool keep_states = false;
    OutputObserver observer;
};

// Advances to t_end, reporting at output cadence; stops early once e_functional exceeds 10 m0.
RunResult run(const Model& m, const SimState& initial, const RunOptions& opt = {});
RunResult run(const Model& m, const RunOptions& opt = {});

}  // namespace ivpb
