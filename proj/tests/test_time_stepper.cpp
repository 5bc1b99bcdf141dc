#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ivpb/diagnostics.hpp"
#include "ivpb/time_stepper.hpp"
#include "support.hpp"

using namespace ivpb;
constexpr double pi = std::numbers::pi;

namespace {

SimState advance_to(const Model& m, SimState s, double t_end, double dt) {
    const long n = std::lround(t_end / dt);
    for (long k = 0; k < n; ++k) s = step(m, s, dt);
    return s;
}

}  // namespace

TEST_CASE("zero perturbation is a fixed point") {
    RunConfig cfg = test::small_config(16, 8);
    cfg.init = {};
    const Model m(cfg, test::tables_for(cfg));
    const SimState s0 = build_initial_data(m, cfg.init);
    CHECK(s0.field.values.cwiseAbs().maxCoeff() == 0.0);
    const SimState s = advance_to(m, s0, 0.05, cfg.resolved_dt());
    CHECK(s.field.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.potential.phi.cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.step_index == std::lround(0.05 / cfg.resolved_dt()));
}

TEST_CASE("initial data satisfies the conservation laws") {
    RunConfig cfg = test::small_config(16, 8);
    cfg.init.b[1] = {0.005, 2, 0};
    cfg.init.c = {0.003, 1, 0};
    const Model m(cfg, test::tables_for(cfg));
    InitialDataReport rep;
    const SimState s = build_initial_data(m, cfg.init, &rep);
    const ConservationResiduals c = conservation_residuals(m, s);
    CHECK(std::abs(c.mass) < 1e-14);
    for (double p : c.momentum) CHECK(std::abs(p) < 1e-14);
    CHECK(std::abs(c.energy) < 1e-10);
    CHECK(std::abs(rep.energy_residual) < 1e-10);
    CHECK(rep.secant_iters >= 1);
    CHECK(std::abs(c.neutrality) < 1e-10);
}

TEST_CASE("energy balancing constant is quadratic in the amplitude") {
    RunConfig cfg = test::small_config(16, 8);
    const Model m(cfg, test::tables_for(cfg));
    double c_mean[2];
    for (int k = 0; k < 2; ++k) {
        InitialDataSpec spec;
        spec.a = {0.01 * (k + 1), 1, 0};
        InitialDataReport rep;
        build_initial_data(m, spec, &rep);
        c_mean[k] = rep.c_mean;
    }
    CHECK(c_mean[0] != 0.0);
    CHECK(c_mean[1] / c_mean[0] == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("splitting is second order in dt") {
    RunConfig cfg = test::small_config(16, 8);
    cfg.init.a = {0.1, 1, 0};
    cfg.init.micro = {0.05, 1, 0};
    const Model m(cfg, test::tables_for(cfg));
    const SimState s0 = build_initial_data(m, cfg.init);
    const double T = 0.016, dt = 0.004;
    const Eigen::MatrixXd f1 = advance_to(m, s0, T, dt).field.values;
    const Eigen::MatrixXd f2 = advance_to(m, s0, T, dt / 2).field.values;
    const Eigen::MatrixXd f4 = advance_to(m, s0, T, dt / 4).field.values;
    const double d1 = m.norm(f1 - f2), d2 = m.norm(f2 - f4);
    CHECK(d1 > 0.0);
    CHECK(std::log2(d1 / d2) > 1.8);
}

TEST_CASE("physical maxwellian equilibrium") {
    RunConfig cfg = test::small_config(16, 16);
    cfg.mode = Mode::Physical;
    cfg.init = {};
    const Model m(cfg, test::tables_for(cfg));
    const SimState s0 = build_initial_data(m, cfg.init);
    REQUIRE(s0.field.mode == Mode::Physical);
    const double t = 0.05;
    const SimState s = advance_to(m, s0, t, cfg.resolved_dt());
    const Eigen::MatrixXd mu = m.vgrid().mu().replicate(1, m.sgrid().size());
    // the only motion is the discrete collision defect Q_gain(mu, mu) - nu mu
    const PhysicalTerms pt = physical_collision_terms(mu, mu, m.phys_kernel());
    const double defect = m.norm(pt.q_gain - (pt.loss_rate.array() * mu.array()).matrix());
    CHECK(m.norm(s.field.values - mu) <= 1.05 * t * defect);
    CHECK(s.field.min_value() >= 0.0);
    // uniform density: phi is the constant log(rho), with no field
    const double rho = m.vgrid().weights().dot(m.vgrid().mu());
    CHECK((s0.potential.phi.array() - std::log(rho)).abs().maxCoeff() < 1e-12);
    CHECK(s.potential.e_field[0].cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("physical step keeps a spiked distribution nonnegative") {
    RunConfig cfg = test::small_config(16, 8);
    cfg.mode = Mode::Physical;
    cfg.init = {};
    const Model m(cfg, test::tables_for(cfg));
    SimState s = build_initial_data(m, cfg.init);
    const VelocityGrid& vg = m.vgrid();
    for (std::size_t x = 0; x < m.sgrid().size(); ++x) {
        const double w = 1.0 + 0.9 * std::cos(2 * pi * m.sgrid().coord(x, 0));
        s.field.values.col(x) = w * vg.mu();
    }
    s.field.values(vg.index(6, 1, 4), 3) += 2.0;  // far off-centre spike
    s.field.values(vg.index(0, 0, 0), 9) = 0.0;
    s.potential = solve_potential(m, s.field);
    for (int k = 0; k < 6; ++k) {
        s = step(m, s, cfg.resolved_dt());
        CHECK(s.field.min_value() >= 0.0);
    }
}

TEST_CASE("perturbation and physical modes agree on smooth data") {
    // the physical run is compared after removing its drift from the discrete equilibrium defect
    RunConfig cfg = test::small_config(64, 12);
    cfg.init.a = {0.02, 1, 0};
    const double dt = 0.002;
    auto final_values = [&](Mode mode, bool data) {
        RunConfig c = cfg;
        c.mode = mode;
        if (!data) c.init = {};
        const Model m(c, test::tables_for(c));
        const SimState s = advance_to(m, build_initial_data(m, c.init), 5 * dt, dt);
        return perturbation_values(m, s.field);
    };
    const Model m(cfg, test::tables_for(cfg));
    const Eigen::MatrixXd f0 = build_initial_data(m, cfg.init).field.values;
    const Eigen::MatrixXd pert = final_values(Mode::Perturbation, true);
    const Eigen::MatrixXd phys = final_values(Mode::Physical, true) - final_values(Mode::Physical, false);
    CAPTURE(m.norm(phys - pert));
    CAPTURE(m.norm(pert - f0));
    CHECK(m.norm(phys - pert) < 0.1 * m.norm(pert - f0));
}

TEST_CASE("run reports, t_end = 0 and early abort") {
    RunConfig cfg = test::small_config(16, 8);
    const auto tables = test::tables_for(cfg);
    {
        const RunResult r = run(Model(cfg, tables));
        CHECK(r.status == RunStatus::Completed);
        CHECK(r.final_state.time == doctest::Approx(cfg.t_end));
        CHECK(r.steps == std::lround(std::ceil(cfg.t_end / cfg.resolved_dt() - 1e-9)));
        CHECK(r.series.front().t == 0.0);
        CHECK(r.series.back().t == doctest::Approx(cfg.t_end));
    }
    {
        RunConfig c0 = cfg;
        c0.t_end = 0.0;
        const RunResult r = run(Model(c0, tables));
        CHECK(r.steps == 0);
        CHECK(r.series.size() == 1u);
    }
    {
        RunConfig ca = cfg;
        ca.m0 = 1e-12;
        const RunResult r = run(Model(ca, tables));
        CHECK(r.status == RunStatus::EarlyAbort);
        CHECK(r.series.size() == 1u);
        CHECK(!r.message.empty());
    }
}

TEST_CASE("mode mismatch is rejected") {
    RunConfig cfg = test::small_config(16, 8);
    const Model m(cfg, test::tables_for(cfg));
    SimState s = build_initial_data(m, cfg.init);
    CHECK_THROWS_AS(step_physical(m, s, 0.01), std::invalid_argument);
    s.field = to_physical(s.field, m.vgrid());
    CHECK_THROWS_AS(step_perturbation(m, s, 0.01), std::invalid_argument);
}
