#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "ivpb/diagnostics.hpp"
#include "ivpb/time_stepper.hpp"

namespace ivpb::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

void say(const AcceptanceOptions& o, const std::string& line) {
    if (o.log) *o.log << "  .. " << line << std::endl;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

}  // namespace

RunConfig desk_config() {
    RunConfig c;
    c.nx = {32};
    c.v_max = 6.0;
    c.nv = 16;
    c.t_end = 1.0;
    c.mode = Mode::Perturbation;
    c.conservation_correction = true;
    c.init.a.amp = 0.01;
    c.init.micro.amp = 0.002;
    return c;
}

// ---------------------------------------------------------------- 1

CriterionResult criterion_operator(const AcceptanceOptions& o) {
    CriterionResult r{1, "operator structure", false, ""};
    struct Level {
        int n, sphere;
        double sym = 0.0, delta = 0.0;
        std::array<double, 5> nr{};
    };
    std::array<Level, 2> lv{Level{16, 26}, Level{24, 38}};
    for (auto& l : lv) {
        const auto t0 = Clock::now();
        const VelocityGrid vg(6.0, l.n);
        CollisionParams p;
        p.sphere_nodes = l.sphere;
        const CollisionTables t = load_or_build_tables(vg, p, o.cache_dir);
        l.sym = symmetry_defect(t, vg);
        l.nr = null_space_residuals(t, vg);
        l.delta = coercivity_estimate(t, vg, 20, o.seed).delta_hat;
        say(o, "n=" + std::to_string(l.n) + " sphere=" + std::to_string(l.sphere) + " sym " + sci(l.sym) +
                   " null max " + sci(*std::max_element(l.nr.begin(), l.nr.end())) + " delta " + sci(l.delta) +
                   " (" + fmt("%.0f", seconds_since(t0)) + " s)");
    }
    const bool sym_ok = lv[0].sym <= 1e-10 && lv[1].sym <= 1e-10;
    bool coarse_ok = true, decreasing = true;
    for (int k = 0; k < 5; ++k) {
        coarse_ok = coarse_ok && lv[0].nr[k] <= 1e-2;
        decreasing = decreasing && lv[1].nr[k] < lv[0].nr[k];
    }
    const double drift = lv[0].delta > 0.0 ? std::abs(lv[1].delta / lv[0].delta - 1.0) : 1.0;
    const bool delta_ok = lv[0].delta > 0.0 && lv[1].delta > 0.0 && drift <= 0.2;
    r.pass = sym_ok && coarse_ok && decreasing && delta_ok;
    std::ostringstream d;
    d << "symmetry " << sci(std::max(lv[0].sym, lv[1].sym)) << " (<=1e-10); null residuals n16/s26 [";
    for (int k = 0; k < 5; ++k) d << (k ? " " : "") << sci(lv[0].nr[k]);
    d << "] (<=1e-2) -> n24/s38 [";
    for (int k = 0; k < 5; ++k) d << (k ? " " : "") << sci(lv[1].nr[k]);
    d << "] " << (decreasing ? "decreasing" : "NOT decreasing") << "; delta0 " << sci(lv[0].delta) << " -> "
      << sci(lv[1].delta) << " (change " << fmt("%.1f", 100.0 * drift) << "% <= 20%)";
    r.detail = d.str();
    return r;
}

// ---------------------------------------------------------------- 2

CriterionResult criterion_poisson(const AcceptanceOptions& o) {
    CriterionResult r{2, "Poisson-Poincare solver", false, ""};
    const SpatialGrid sg({64});
    const Fourier fft(sg);
    const double pi = std::numbers::pi;
    const auto n = static_cast<Eigen::Index>(sg.size());
    ScalarFieldX cosx(n);
    for (Eigen::Index i = 0; i < n; ++i) cosx[i] = std::cos(2.0 * pi * sg.coord(i, 0));

    const PotentialState p0 = solve_poisson_poincare(fft, ScalarFieldX::Ones(n));
    const double phi0 = p0.phi.cwiseAbs().maxCoeff();

    const double eps = 1e-3;
    const PotentialState p1 = solve_poisson_poincare(fft, ScalarFieldX::Ones(n) + eps * cosx);
    const ScalarFieldX lin = eps / (1.0 + 4.0 * pi * pi) * cosx;
    const double rel = l2_norm(sg, p1.phi - lin) / l2_norm(sg, lin);
    const double neutral = std::abs(sg.cell_volume() * p1.exp_phi.sum() - 1.0);

    // Newton from the split guess on a larger, multi-mode density
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> nd;
    ScalarFieldX rho = ScalarFieldX::Ones(n);
    for (int k = 1; k <= 4; ++k) {
        const double a = 0.05 * nd(rng) / k, b = 0.05 * nd(rng) / k;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = sg.coord(i, 0);
            rho[i] += a * std::cos(2.0 * pi * k * x) + b * std::sin(2.0 * pi * k * x);
        }
    }
    const PotentialState pn = solve_poisson_poincare(fft, rho);
    const bool newton_ok = pn.newton_iters <= 6 && pn.residual_norm <= 1e-11;
    const double neutral_n = std::abs(sg.cell_volume() * pn.exp_phi.sum() - 1.0);

    // stability ratio on small mean-zero density pairs
    double worst = 0.0;
    for (int trial = 0; trial < 8; ++trial) {
        ScalarFieldX d1 = ScalarFieldX::Zero(n), d2 = ScalarFieldX::Zero(n);
        for (int k = 1; k <= 6; ++k) {
            const double a1 = nd(rng) / k, b1 = nd(rng) / k, a2 = nd(rng) / k, b2 = nd(rng) / k;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double x = 2.0 * pi * k * sg.coord(i, 0);
                d1[i] += a1 * std::cos(x) + b1 * std::sin(x);
                d2[i] += a2 * std::cos(x) + b2 * std::sin(x);
            }
        }
        d1 *= 1e-3 / l2_norm(sg, d1);
        d2 *= 1e-3 / l2_norm(sg, d2);
        const PotentialState q1 = solve_poisson_poincare(fft, ScalarFieldX::Ones(n) + d1);
        const PotentialState q2 = solve_poisson_poincare(fft, ScalarFieldX::Ones(n) + d2);
        worst = std::max(worst, h2_norm(fft, q1.phi - q2.phi) / l2_norm(sg, d1 - d2));
    }

    r.pass = phi0 == 0.0 && rel <= 1e-4 && newton_ok && neutral <= 1e-10 && neutral_n <= 1e-10 && worst <= 4.5;
    r.detail = "rho=1 max|phi| " + sci(phi0) + " (==0); linearized rel err " + sci(rel) + " (<=1e-4); Newton " +
               std::to_string(pn.newton_iters) + " iters to " + sci(pn.residual_norm) + " (<=6, <=1e-11); neutrality " +
               sci(std::max(neutral, neutral_n)) + " (<=1e-10); H2/L2 stability " + fmt("%.3f", worst) + " (<=4.5)";
    return r;
}

// ---------------------------------------------------------------- 3, 5, 6

std::vector<CriterionResult> criteria_desk(const AcceptanceOptions& o) {
    RunConfig base = desk_config();
    base.cache_dir = o.cache_dir;
    const Model m(base);
    const double delta0 = coercivity_estimate(m.tables(), m.vgrid(), 20, o.seed).delta_hat;
    say(o, "desk: dt " + sci(base.resolved_dt()) + ", delta0 " + sci(delta0));

    double ratio_max = 0.0, ratio_min = std::numeric_limits<double>::infinity();
    bool ratio_finite = true;
    double coerc_worst = std::numeric_limits<double>::infinity();
    std::string coerc_where;
    RunOptions opt;
    opt.observer = [&](const SimState& s, const EnergyReport&) {
        const TimeDerivatives td = time_derivatives(m, s, base.k_max);
        const auto d = derivative_fields(m, s, td, base.k_max);
        const MacroBound mb = macro_bound(m, d, base.m0);
        ratio_finite = ratio_finite && std::isfinite(mb.ratio);
        ratio_max = std::max(ratio_max, mb.ratio);
        ratio_min = std::min(ratio_min, mb.ratio);
        for (const auto& c : coercivity_on_fields(m, d)) {
            if (c.micro_nu_sq <= 0.0) continue;
            const double q = c.dissipation / (delta0 * c.micro_nu_sq);
            if (q < coerc_worst) {
                coerc_worst = q;
                coerc_where = "t=" + fmt("%.4f", s.time) + " [" + (c.label.empty() ? "f" : c.label) + "]";
            }
        }
    };
    auto t0 = Clock::now();
    const RunResult a = run(m, opt);
    say(o, "desk baseline: " + std::to_string(a.steps) + " steps in " + fmt("%.0f", seconds_since(t0)) + " s");

    RunConfig half = base;
    half.dt = base.resolved_dt() / 2.0;
    half.output_every = 2 * base.output_every;
    const Model mh(half, m.shared_tables());
    t0 = Clock::now();
    const RunResult b = run(mh);
    say(o, "desk dt/2: " + std::to_string(b.steps) + " steps in " + fmt("%.0f", seconds_since(t0)) + " s");

    auto conservation = [](const RunResult& res, double& mass, double& mom, double& neu, double& drift) {
        mass = mom = neu = drift = 0.0;
        const double e0 = res.series.front().cons.energy, scale = res.series.front().cons.energy_scale;
        for (const auto& r : res.series) {
            mass = std::max(mass, std::abs(r.cons.mass));
            for (double p : r.cons.momentum) mom = std::max(mom, std::abs(p));
            neu = std::max(neu, std::abs(r.cons.neutrality));
            drift = std::max(drift, std::abs(r.cons.energy - e0) / scale);
        }
    };

    std::vector<CriterionResult> out;
    {
        CriterionResult r{3, "conservation (desk run)", false, ""};
        double ma, pa, na, da, mb, pb, nb, db;
        conservation(a, ma, pa, na, da);
        conservation(b, mb, pb, nb, db);
        const double red = db > 0.0 ? da / db : std::numeric_limits<double>::infinity();
        r.pass = a.status == RunStatus::Completed && b.status == RunStatus::Completed && std::max(ma, mb) <= 1e-10 &&
                 std::max(pa, pb) <= 1e-10 && da <= 1e-4 && red >= 3.0 && std::max(na, nb) <= 1e-9;
        r.detail = "mass " + sci(std::max(ma, mb)) + ", momentum " + sci(std::max(pa, pb)) +
                   " (<=1e-10); energy drift " + sci(da) + " (<=1e-4), dt/2 " + sci(db) + ", reduction " +
                   fmt("%.2f", red) + "x (>=3); neutrality " + sci(std::max(na, nb)) + " (<=1e-9)";
        if (a.status != RunStatus::Completed) r.detail += "; " + a.message;
        out.push_back(r);
    }
    {
        CriterionResult r{5, "coercivity and macro bound", false, ""};
        r.pass = ratio_finite && ratio_max > 0.0 && coerc_worst >= 1.0;
        r.detail = "macro ratio in [" + fmt("%.3f", ratio_min) + ", " + fmt("%.3f", ratio_max) +
                   "] over all outputs (finite); min <L d f, d f> / (delta0 |(I-P) d f|_nu^2) = " +
                   fmt("%.4f", coerc_worst) + " (>=1) at " + coerc_where;
        out.push_back(r);
    }
    {
        CriterionResult r{6, "exponential decay", false, ""};
        std::vector<double> t, y, yl, tb, yb;
        for (const auto& e : a.series) {
            t.push_back(e.t);
            y.push_back(e.triple_norm_sq);
            yl.push_back(e.y_lyapunov);
        }
        for (const auto& e : b.series) {
            tb.push_back(e.t);
            yb.push_back(e.triple_norm_sq);
        }
        const double e0 = a.series.front().e_functional;
        const DecayFit fa = decay_rate_fit(t, y, base.transient_fraction, e0);
        const DecayFit fb = decay_rate_fit(tb, yb, base.transient_fraction, e0);
        double worst_rise = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < yl.size(); ++i)
            worst_rise = std::max(worst_rise, (yl[i] - yl[i - 1]) / (yl.front() * (t[i] - t[i - 1])));
        const double change = std::abs(fb.lambda / fa.lambda - 1.0);
        r.pass = fa.lambda > 0.0 && fa.r2 >= 0.95 && worst_rise <= 1e-3 && change <= 0.2;
        r.detail = "lambda " + fmt("%.4f", fa.lambda) + " (>0), R^2 " + fmt("%.4f", fa.r2) + " (>=0.95); max dy/dt / y(0) " +
                   sci(worst_rise) + " (<=1e-3); dt/2 lambda " + fmt("%.4f", fb.lambda) + ", change " +
                   fmt("%.2f", 100.0 * change) + "% (<=20%)";
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------- 4

CriterionResult criterion_physical_positivity(const AcceptanceOptions& o) {
    CriterionResult r{4, "physical-mode positivity", false, ""};
    RunConfig c = desk_config();
    c.mode = Mode::Physical;
    c.cache_dir = o.cache_dir;
    const Model m(c);
    const auto t0 = Clock::now();
    SimState s = build_initial_data(m, c.init);
    double min_f = s.field.min_value();
    const double dt = c.resolved_dt();
    const long steps = static_cast<long>(std::ceil(c.t_end / dt - 1e-9));
    long bad_step = -1;
    std::string err;
    try {
        for (long k = 1; k <= steps; ++k) {
            s = step(m, s, c.t_end / steps);
            const double mn = s.field.min_value();
            min_f = std::min(min_f, mn);
            if (mn < 0.0 && bad_step < 0) bad_step = k;
        }
    } catch (const std::exception& e) {
        err = e.what();
    }
    say(o, "physical run: " + std::to_string(steps) + " steps in " + fmt("%.0f", seconds_since(t0)) + " s");
    r.pass = err.empty() && bad_step < 0 && min_f >= 0.0;
    r.detail = std::to_string(steps) + " steps to t=" + fmt("%.2f", c.t_end) + ", min F over all nodes and steps " +
               sci(min_f) + " (>=0)";
    if (!err.empty()) r.detail += "; aborted: " + err;
    return r;
}

// ---------------------------------------------------------------- 7

CriterionResult criterion_macro_identities(const AcceptanceOptions& o) {
    CriterionResult r{7, "macro identities under refinement", false, ""};
    const double t_end = 0.25;
    const double dt0 = desk_config().resolved_dt();
    const double ratio = 1.5;
    struct Level {
        int nv;
        double dt;
        int every;
        std::array<double, 5> worst{};
    };
    std::array<Level, 2> lv{Level{16, dt0, 8}, Level{24, dt0 / ratio, 12}};
    for (auto& l : lv) {
        const auto t0 = Clock::now();
        RunConfig c = desk_config();
        c.nv = l.nv;
        c.dt = l.dt;
        c.t_end = t_end;
        c.cache_dir = o.cache_dir;
        const Model m(c);
        SimState s = build_initial_data(m, c.init);
        const long steps = std::lround(t_end / l.dt);
        for (long k = 1; k <= steps; ++k) {
            s = step(m, s, l.dt);
            if (k % l.every) continue;
            const MacroIdentityResiduals mr = macro_identity_residuals(m, s, TimeDifference::Midpoint);
            for (int i = 0; i < 5; ++i) l.worst[i] = std::max(l.worst[i], mr.residual[i]);
        }
        say(o, "identities n=" + std::to_string(l.nv) + ": " + std::to_string(steps) + " steps in " +
                   fmt("%.0f", seconds_since(t0)) + " s");
    }
    bool ok = true;
    std::ostringstream d;
    d << "max residual over t<=" << t_end << ", (n, dt) -> (n*1.5, dt/1.5); orders";
    for (int i = 0; i < 5; ++i) {
        const double order = std::log(lv[0].worst[i] / lv[1].worst[i]) / std::log(ratio);
        ok = ok && order >= 1.0;
        d << " " << fmt("%.2f", order) << " (" << sci(lv[0].worst[i]) << "->" << sci(lv[1].worst[i]) << ")";
    }
    d << "; all >= 1";
    r.pass = ok;
    r.detail = d.str();
    return r;
}

// ---------------------------------------------------------------- 8

CriterionResult criterion_plasma_frequencies(const AcceptanceOptions&) {
    CriterionResult r{8, "collision frequency helper", false, ""};
    double worst = 0.0;
    for (double n : {1e18, 1e20, 1e23})
        for (double t : {1e3, 1e4, 1e7}) {
            PlasmaParams p;
            p.n_e = p.n_i = n;
            p.t_e = p.t_i = t;
            p.z_i = 1.0;
            const CollisionFrequencies f = physical_frequencies(p);
            const double expect = std::sqrt(p.m_e / p.m_i);
            worst = std::max(worst, std::abs(f.ii_over_ee / expect - 1.0));
        }
    r.pass = worst <= 1e-12;
    r.detail = "max |f_ii/f_ee / sqrt(m_e/m_i) - 1| " + sci(worst) + " (<=1e-12) over 9 (n, T) pairs";
    return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o) {
    std::vector<CriterionResult> all;
    all.push_back(criterion_operator(o));
    all.push_back(criterion_poisson(o));
    for (auto& c : criteria_desk(o)) all.push_back(c);
    all.push_back(criterion_physical_positivity(o));
    all.push_back(criterion_macro_identities(o));
    all.push_back(criterion_plasma_frequencies(o));
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return all;
}

std::string format_result(const CriterionResult& r) {
    return std::string(r.pass ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.name + ": " + r.detail;
}

// ---------------------------------------------------------------- check

std::vector<CheckRow> invariant_suite(const RunConfig& cfg_in, std::uint64_t seed, std::ostream* log) {
    RunConfig cfg = cfg_in;
    cfg.mode = Mode::Perturbation;
    const Model m(cfg);
    const VelocityGrid& vg = m.vgrid();
    const SpatialGrid& sg = m.sgrid();
    const auto nv = static_cast<Eigen::Index>(vg.size());
    const auto nx = static_cast<Eigen::Index>(sg.size());
    std::vector<CheckRow> rows;
    auto add = [&](std::string name, double v, std::string limit, bool pass) {
        rows.push_back({std::move(name), v, std::move(limit), pass});
        if (log) *log << "  .. " << rows.back().name << std::endl;
    };
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    auto random = [&](Eigen::Index r, Eigen::Index c) {
        Eigen::MatrixXd x(r, c);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = nd(rng);
        return x;
    };

    // grids
    const double w = vg.weight();
    const Eigen::VectorXd v1 = vg.component(0);
    add("odd velocity moment sum v1 mu", std::abs(w * v1.dot(vg.mu())), "<= 1e-15", std::abs(w * v1.dot(vg.mu())) <= 1e-15);
    const double m2 = std::abs(w * vg.speed_sq().dot(vg.mu()) - 3.0);
    add("|sum |v|^2 mu - 3|", m2, "<= 1e-6", m2 <= 1e-6);

    // collision operator
    const double sym = symmetry_defect(m.tables(), vg);
    add("L symmetry defect", sym, "<= 1e-10", sym <= 1e-10);
    const auto nr = null_space_residuals(m.tables(), vg);
    const double nrm = *std::max_element(nr.begin(), nr.end());
    add("null-space residual max", nrm, "<= 1e-2", nrm <= 1e-2);
    const CoercivityEstimate ce = coercivity_estimate(m.tables(), vg, 20, seed);
    add("coercivity delta0", ce.delta_hat, "> 0", ce.delta_hat > 0.0);
    {
        const Eigen::MatrixXd f = 1e-2 * (random(nv, 2).array().colwise() * vg.sqrt_mu().array()).matrix();
        const Eigen::MatrixXd g = gamma(f, f, m.pert_kernel());
        const Eigen::MatrixXd pg = conserve_project(g, vg);
        const double mom = (m.null_basis().vectors().transpose() * pg).cwiseAbs().maxCoeff() * w /
                           std::max(1e-300, g.cwiseAbs().maxCoeff());
        add("collision moments after projection (relative)", mom, "<= 1e-12", mom <= 1e-12);
    }
    {
        double worst = 0.0;
        for (int k = 0; k < 4; ++k) {
            auto smooth = [&]() -> Eigen::MatrixXd {
                return random(nv, nx).array().colwise() * vg.mu().array().pow(0.35);
            };
            worst = std::max(worst, trilinear_ratio(m, smooth(), smooth(), smooth()));
        }
        add("trilinear ratio max", worst, "<= 10", worst <= 10.0);
    }

    // projection
    {
        const Eigen::MatrixXd g = random(nv, 3).array().colwise() * vg.sqrt_mu().array();
        const Eigen::MatrixXd h = random(nv, 3).array().colwise() * vg.sqrt_mu().array();
        const NullBasis& nb = m.null_basis();
        const Eigen::MatrixXd pg = nb.project(g);
        const double idem = (nb.project(pg) - pg).norm() / pg.norm();
        add("P idempotence", idem, "<= 1e-12", idem <= 1e-12);
        const double sa = std::abs((nb.project(g).transpose() * h).trace() - (g.transpose() * nb.project(h)).trace()) /
                          (g.norm() * h.norm());
        add("P self-adjointness", sa, "<= 1e-12", sa <= 1e-12);
        PerturbationField pf(sg, vg);
        pf.values = random(nv, nx).array().colwise() * vg.sqrt_mu().array();
        const MacroFields mf = macro_fields(pf, vg, sg);
        add("Pythagoras defect", mf.pythagoras_defect, "<= 1e-12", mf.pythagoras_defect <= 1e-12);
    }

    // Poisson
    {
        const PotentialState p = solve_poisson_poincare(m.fourier(), ScalarFieldX::Ones(nx));
        const double mx = p.phi.cwiseAbs().maxCoeff();
        add("Poisson rho=1 max|phi|", mx, "== 0", mx == 0.0);
        ScalarFieldX rho(nx);
        for (Eigen::Index i = 0; i < nx; ++i) rho[i] = 1.0 + 0.01 * std::cos(2.0 * std::numbers::pi * sg.coord(i, 0));
        const PotentialState q = solve_poisson_poincare(m.fourier(), rho);
        const double neu = std::abs(sg.cell_volume() * q.exp_phi.sum() - 1.0);
        add("Poisson neutrality", neu, "<= 1e-10", neu <= 1e-10);
        add("Newton iterations", q.newton_iters, "<= 6", q.newton_iters <= 6);
    }

    // initial data and steps
    {
        InitialDataSpec spec;
        spec.a.amp = 1e-3;
        spec.micro.amp = 1e-3;
        const SimState s = build_initial_data(m, spec);
        const ConservationResiduals c = conservation_residuals(m, s);
        const double mom = std::max({std::abs(c.momentum[0]), std::abs(c.momentum[1]), std::abs(c.momentum[2])});
        add("initial mass", std::abs(c.mass), "<= 1e-14", std::abs(c.mass) <= 1e-14);
        add("initial momentum", mom, "<= 1e-14", mom <= 1e-14);
        add("initial energy", std::abs(c.energy), "<= 1e-10", std::abs(c.energy) <= 1e-10);

        SimState z;
        z.field = PerturbationField(sg, vg);
        z.potential = solve_potential(m, z.field);
        const SimState z1 = step(m, z, cfg.resolved_dt());
        const double zmax = z1.field.values.cwiseAbs().maxCoeff();
        add("equilibrium step max|f|", zmax, "== 0", zmax == 0.0);
    }
    {
        RunConfig pc = cfg;
        pc.mode = Mode::Physical;
        const Model mp(pc, m.shared_tables());
        SimState s;
        s.field = PerturbationField(sg, vg, Mode::Physical);
        s.field.values = vg.mu().replicate(1, nx);
        s.field.values(vg.index(cfg.nv / 2, cfg.nv / 2, cfg.nv / 2), 0) += 5.0;
        s.potential = solve_potential(mp, s.field);
        const SimState s1 = step(mp, s, cfg.resolved_dt());
        add("physical step min F after a spike", s1.field.min_value(), ">= 0", s1.field.min_value() >= 0.0);
    }
    {
        const CollisionFrequencies f = physical_frequencies(PlasmaParams{});
        const PlasmaParams p;
        const double e = std::abs(f.ii_over_ee / std::sqrt(p.m_e / p.m_i) - 1.0);
        add("f_ii/f_ee vs sqrt(m_e/m_i)", e, "<= 1e-12", e <= 1e-12);
    }
    return rows;
}

}  // namespace ivpb::cli
