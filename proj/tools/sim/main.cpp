#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <omp.h>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "config_io.hpp"
#include "ivpb/diagnostics.hpp"
#include "ivpb/time_stepper.hpp"
#include "series.hpp"
#include "snapshot.hpp"

namespace fs = std::filesystem;
using namespace ivpb;
using namespace ivpb::cli;
using nlohmann::json;

namespace {

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p);
    out << j.dump(2) << '\n';
}

std::string snap_name(long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%08ld.ivpb", step);
    return buf;
}

int cmd_run(const std::string& config, const fs::path& out, const std::string& resume) {
    const RunConfig cfg = parse_config(config);
    fs::create_directories(out);
    write_json(out / "config.json", config_to_json(cfg));

    const Model m(cfg);
    SimState s0;
    if (resume.empty()) {
        InitialDataReport rep;
        s0 = build_initial_data(m, cfg.init, &rep);
        std::cout << "initial data: c_mean " << rep.c_mean << ", secant iterations " << rep.secant_iters
                  << ", energy residual " << rep.energy_residual << '\n';
    } else {
        s0 = restore_state(m, read_snapshot(resume));
        std::cout << "resumed at t = " << s0.time << ", step " << s0.step_index << '\n';
    }

    std::ofstream csv(out / "series.csv");
    write_series_header(csv);
    RunOptions opt;
    opt.observer = [&](const SimState& s, const EnergyReport& r) {
        write_series_row(csv, r);
        csv.flush();
        write_snapshot(make_snapshot(cfg, s), (out / snap_name(s.step_index)).string());
    };
    const RunResult res = run(m, s0, opt);
    write_snapshot(make_snapshot(cfg, res.final_state), (out / "final.ivpb").string());

    const bool done = res.status == RunStatus::Completed;
    write_json(out / "status.json", {{"status", done ? "completed" : "early_abort"},
                                     {"message", res.message},
                                     {"dt", res.dt},
                                     {"steps", res.steps},
                                     {"t_final", res.final_state.time},
                                     {"k_max", cfg.k_max}});
    std::cout << (done ? "completed" : "early abort: " + res.message) << " after " << res.steps << " steps, dt "
              << res.dt << ", " << res.series.size() << " rows in " << (out / "series.csv").string() << '\n';
    return 0;
}

int cmd_check(const std::string& config, const fs::path& out, bool acceptance, std::uint64_t seed) {
    if (acceptance) {
        AcceptanceOptions o;
        o.seed = seed;
        o.log = &std::cout;
        if (!out.empty()) {
            fs::create_directories(out / "tables");
            o.cache_dir = (out / "tables").string();
        }
        bool ok = true;
        for (const auto& r : run_acceptance(o)) {
            std::cout << format_result(r) << '\n';
            ok = ok && r.pass;
        }
        return ok ? 0 : 1;
    }
    const RunConfig cfg = config.empty() ? desk_config() : parse_config(config);
    const auto rows = invariant_suite(cfg, seed);
    bool ok = true;
    json j = json::array();
    std::printf("%-48s %14s  %-10s %s\n", "invariant", "measured", "limit", "result");
    for (const auto& r : rows) {
        std::printf("%-48s %14.6e  %-10s %s\n", r.name.c_str(), r.measured, r.limit.c_str(), r.pass ? "pass" : "FAIL");
        ok = ok && r.pass;
        j.push_back({{"name", r.name}, {"measured", r.measured}, {"limit", r.limit}, {"pass", r.pass}});
    }
    if (!out.empty()) {
        fs::create_directories(out);
        write_json(out / "check.json", j);
    }
    return ok ? 0 : 1;
}

ScalarFieldX read_density(const std::string& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read density file '" + path + "'");
    std::vector<double> v;
    double x;
    while (in >> x) v.push_back(x);
    if (!in.eof()) throw ConfigError("density file '" + path + "' contains a non-numeric token");
    if (v.size() != n)
        throw ConfigError("density file has " + std::to_string(v.size()) + " values, grid needs " + std::to_string(n));
    return Eigen::Map<ScalarFieldX>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int cmd_poisson(const std::string& config, const std::string& density, const fs::path& out) {
    const RunConfig cfg = config.empty() ? desk_config() : parse_config(config);
    const SpatialGrid sg(cfg.nx);
    const Fourier fft(sg);
    const ScalarFieldX rho = read_density(density, sg.size());
    const PotentialState p = solve_poisson_poincare(fft, rho, nullptr, cfg.poisson);

    fs::create_directories(out);
    {
        std::ofstream phi(out / "phi.txt");
        char buf[32];
        for (Eigen::Index i = 0; i < p.phi.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g\n", p.phi[i]);
            phi << buf;
        }
    }
    const double drho = l2_norm(sg, rho - ScalarFieldX::Ones(rho.size()));
    const double h2 = h2_norm(fft, p.phi);
    const double sup = p.phi.cwiseAbs().maxCoeff();
    const json rep = {{"newton_iters", p.newton_iters},
                      {"residual_norm", p.residual_norm},
                      {"residual_history", p.residual_history},
                      {"neutrality", sg.cell_volume() * p.exp_phi.sum() - 1.0},
                      {"mean_defect", p.mean_defect},
                      {"phi_h2", h2},
                      {"rho_minus_1_l2", drho},
                      {"h2_ratio", drho > 0.0 ? h2 / drho : 0.0},
                      {"h2_bound_factor", 3.0 * std::exp(2.0 * sup)}};
    write_json(out / "poisson_report.json", rep);
    std::cout << rep.dump(2) << '\n';
    return 0;
}

int cmd_spectrum(const std::string& config, const fs::path& out, std::uint64_t seed, int trials) {
    const RunConfig cfg = config.empty() ? desk_config() : parse_config(config);
    const VelocityGrid vg(cfg.v_max, cfg.nv);
    const CollisionTables t = load_or_build_tables(vg, cfg.collision, cfg.cache_dir);
    const CoercivityEstimate ce = coercivity_estimate(t, vg, trials, seed);
    const auto nr = null_space_residuals(t, vg);
    const json rep = {{"n", cfg.nv},
                      {"v_max", cfg.v_max},
                      {"sphere_nodes", cfg.collision.sphere_nodes},
                      {"delta_hat", ce.delta_hat},
                      {"lanczos_min", ce.lanczos},
                      {"lanczos_steps", ce.lanczos_steps},
                      {"trial_min", ce.trials},
                      {"null_space_residuals", nr},
                      {"symmetry_defect", symmetry_defect(t, vg)},
                      {"leakage", t.leakage},
                      {"nu_min", t.nu.minCoeff()},
                      {"nu_max", t.nu.maxCoeff()}};
    if (!out.empty()) {
        fs::create_directories(out);
        write_json(out / "spectrum.json", rep);
    }
    std::cout << rep.dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ivpb: Vlasov-Poisson-Boltzmann with the Poincare potential"};
    app.require_subcommand(1);
    int threads = 0;
    std::uint64_t seed = 1;
    std::string config, out, resume, density;
    app.add_option("--threads", threads, "worker threads for the collision kernel (0: runtime default)");
    app.add_option("--seed", seed, "seed for randomized trials");

    auto* run = app.add_subcommand("run", "advance a configured run, writing series.csv and snapshots");
    run->add_option("--config", config, "JSON config")->required();
    run->add_option("--out", out, "output directory")->default_val("out");
    run->add_option("--resume", resume, "continue from an IVPBSNAP snapshot");

    bool acceptance = false;
    auto* check = app.add_subcommand("check", "invariant table; --acceptance runs the eight acceptance criteria");
    check->add_option("--config", config, "JSON config (default: the desk problem)");
    check->add_option("--out", out, "directory for check.json / cached tables");
    check->add_flag("--acceptance", acceptance);

    auto* poisson = app.add_subcommand("poisson", "solve Lap(phi) = exp(phi) - rho for a density file");
    poisson->add_option("--config", config, "JSON config (grid.nx and the poisson section are used)");
    poisson->add_option("--density", density, "whitespace-separated rho values, row-major")->required();
    poisson->add_option("--out", out, "output directory")->default_val("poisson_out");

    int trials = 20;
    auto* spectrum = app.add_subcommand("spectrum", "coercivity, null-space residuals and symmetry of L");
    spectrum->add_option("--config", config, "JSON config (grid and collision sections are used)");
    spectrum->add_option("--out", out, "output directory");
    spectrum->add_option("--trials", trials, "random micro vectors")->default_val(20);

    for (auto* sc : {run, check, poisson, spectrum}) sc->fallthrough();
    CLI11_PARSE(app, argc, argv);
    if (threads > 0) omp_set_num_threads(threads);

    try {
        if (*run) return cmd_run(config, out, resume);
        if (*check) return cmd_check(config, out, acceptance, seed);
        if (*poisson) return cmd_poisson(config, density, out);
        if (*spectrum) return cmd_spectrum(config, out, seed, trials);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
