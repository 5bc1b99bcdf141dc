#include "ivpb/time_stepper.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ivpb {

namespace {

Eigen::MatrixXd raw_initial(const Model& m, const InitialDataSpec& spec, double c_mean) {
    const SpatialGrid& sg = m.sgrid();
    const VelocityGrid& vg = m.vgrid();
    const Eigen::MatrixXd& e = m.null_basis().vectors();
    const Eigen::VectorXd v12 = vg.component(0).cwiseProduct(vg.component(1)).cwiseProduct(vg.sqrt_mu());
    Eigen::MatrixXd f(vg.size(), sg.size());
    for (std::size_t x = 0; x < sg.size(); ++x) {
        Eigen::VectorXd col = spec.a(sg, x) * e.col(0) + (spec.c(sg, x) + c_mean) * e.col(4) + spec.micro(sg, x) * v12;
        for (int i = 0; i < 3; ++i) col += spec.b[i](sg, x) * e.col(1 + i);
        f.col(x) = col;
    }
    // remove the spatial mean of mass and momentum
    const Eigen::VectorXd fbar = f.rowwise().mean();
    Eigen::VectorXd shift = (e.col(0).dot(fbar) / e.col(0).squaredNorm()) * e.col(0);
    for (int i = 0; i < 3; ++i) shift += (e.col(1 + i).dot(fbar) / e.col(1 + i).squaredNorm()) * e.col(1 + i);
    f.colwise() -= shift;
    return f;
}

// f(x, v) <- f(x - v t, v) by linear interpolation along each spatial axis
void shift_linear(const Model& m, Eigen::MatrixXd& F, double t) {
    const SpatialGrid& sg = m.sgrid();
    const VelocityGrid& vg = m.vgrid();
    const auto& nodes = vg.nodes();
    std::array<std::size_t, 3> stride{1, 1, 1};
    for (int a = sg.dims() - 2; a >= 0; --a) stride[a] = stride[a + 1] * sg.n_per_dim()[a + 1];
    for (int a = 0; a < sg.dims(); ++a) {
        const int n = sg.n_per_dim()[a];
        Eigen::MatrixXd out(F.rows(), F.cols());
        for (Eigen::Index q = 0; q < F.rows(); ++q) {
            const double s = nodes[q][a] * t * n;
            const double j0 = std::floor(s);
            const double th = s - j0;
            const int sh = static_cast<int>(((static_cast<long>(j0) % n) + n) % n);
            for (std::size_t c = 0; c < sg.size(); ++c) {
                const int i = static_cast<int>((c / stride[a]) % n);
                const std::size_t base = c - static_cast<std::size_t>(i) * stride[a];
                const int i0 = (i - sh + n) % n;
                const int i1 = (i0 - 1 + n) % n;
                out(q, c) = (1.0 - th) * F(q, base + i0 * stride[a]) + th * F(q, base + i1 * stride[a]);
            }
        }
        F = std::move(out);
    }
}

// F(v) <- F(v - E dt) by trilinear interpolation, zero outside the velocity box
void shift_velocity(const Model& m, Eigen::MatrixXd& F, const std::array<ScalarFieldX, 3>& e, double dt) {
    const VelocityGrid& vg = m.vgrid();
    const int n = vg.n();
    Eigen::MatrixXd out(F.rows(), F.cols());
    for (Eigen::Index c = 0; c < F.cols(); ++c) {
        std::array<int, 3> k0{};
        std::array<double, 3> th{};
        for (int a = 0; a < 3; ++a) {
            const double d = -e[a][c] * dt / vg.h();
            k0[a] = static_cast<int>(std::floor(d));
            th[a] = d - k0[a];
        }
        const double* in = F.col(c).data();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double acc = 0.0;
                    for (int corner = 0; corner < 8; ++corner) {
                        const int oi = corner & 1, oj = (corner >> 1) & 1, ok = (corner >> 2) & 1;
                        const int ii = i + k0[0] + oi, jj = j + k0[1] + oj, kk = k + k0[2] + ok;
                        if (ii < 0 || ii >= n || jj < 0 || jj >= n || kk < 0 || kk >= n) continue;
                        const double w = (oi ? th[0] : 1.0 - th[0]) * (oj ? th[1] : 1.0 - th[1]) *
                                         (ok ? th[2] : 1.0 - th[2]);
                        if (w != 0.0) acc += w * in[vg.index(ii, jj, kk)];
                    }
                    out(vg.index(i, j, k), c) = acc;
                }
    }
    F = std::move(out);
}

// df/dt = -E . grad_v f + (v/2) . E f + E . v sqrt(mu) with E frozen, classical RK4
Eigen::MatrixXd field_substep(const Model& m, const Eigen::MatrixXd& f, const std::array<ScalarFieldX, 3>& e,
                              double dt) {
    const Eigen::MatrixXd src = source_term(m, e);
    auto rhs = [&](const Eigen::MatrixXd& g) -> Eigen::MatrixXd { return force_term(m, e, g) + src; };
    const Eigen::MatrixXd k1 = rhs(f);
    const Eigen::MatrixXd k2 = rhs(f + 0.5 * dt * k1);
    const Eigen::MatrixXd k3 = rhs(f + 0.5 * dt * k2);
    const Eigen::MatrixXd k4 = rhs(f + dt * k3);
    return f + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::array<ScalarFieldX, 3> average(const std::array<ScalarFieldX, 3>& a, const std::array<ScalarFieldX, 3>& b) {
    std::array<ScalarFieldX, 3> out;
    for (int i = 0; i < 3; ++i) out[i] = 0.5 * (a[i] + b[i]);
    return out;
}

PerturbationField wrap(const Eigen::MatrixXd& v, Mode mode) {
    PerturbationField p;
    p.mode = mode;
    p.values = v;
    return p;
}

SimState advance(const SimState& s, PerturbationField field, PotentialState pot, double dt) {
    SimState out;
    out.field = std::move(field);
    out.potential = std::move(pot);
    out.time = s.time + dt;
    out.step_index = s.step_index + 1;
    out.prev_field = s.field;
    out.prev_potential = s.potential;
    out.prev_dt = dt;
    return out;
}

}  // namespace

SimState build_initial_data(const Model& m, const InitialDataSpec& spec, InitialDataReport* report) {
    const Mode mode = m.config().mode;
    ScalarFieldX guess;
    auto evaluate = [&](double c_mean, SimState& st) {
        st.field = wrap(raw_initial(m, spec, c_mean), Mode::Perturbation);
        st.potential = solve_potential(m, st.field, guess.size() ? &guess : nullptr);
        guess = st.potential.phi;
        return conservation_residuals(m, st).energy;
    };

    SimState s;
    InitialDataReport rep;
    double c0 = 0.0;
    double e0 = evaluate(c0, s);
    rep.energy_residual = e0;
    if (spec.balance_energy && std::abs(e0) > 1e-10) {
        // d(energy)/d(c_mean) is 3 to leading order; the field part does not see a uniform shift
        double c1 = -e0 / 3.0;
        double e1 = evaluate(c1, s);
        int it = 1;
        while (std::abs(e1) > 1e-10) {
            if (it >= 50 || e1 == e0) throw std::runtime_error("energy balancing secant did not converge");
            const double c2 = c1 - e1 * (c1 - c0) / (e1 - e0);
            c0 = c1;
            e0 = e1;
            c1 = c2;
            e1 = evaluate(c1, s);
            ++it;
        }
        rep.c_mean = c1;
        rep.secant_iters = it;
        rep.energy_residual = e1;
    }

    if (mode == Mode::Physical) {
        s.field = to_physical(s.field, m.vgrid());
        Eigen::Index q, x;
        const double mn = s.field.values.minCoeff(&q, &x);
        if (mn < 0.0)
            throw ConfigError("initial F is negative (" + std::to_string(mn) + ") at velocity node " +
                              std::to_string(q) + ", spatial node " + std::to_string(x));
        // int F dv differs from the perturbation density by the velocity mass defect
        s.potential = solve_potential(m, s.field, &s.potential.phi);
    }
    if (report) *report = rep;
    return s;
}

SimState step_perturbation(const Model& m, const SimState& s, double dt) {
    if (s.field.mode != Mode::Perturbation) throw std::invalid_argument("step_perturbation needs a perturbation field");
    const Fourier& fft = m.fourier();
    const VelocityGrid& vg = m.vgrid();
    const CollisionTables& t = m.tables();
    Eigen::MatrixXd f = s.field.values;

    fft.shift_rows(f, vg.nodes(), 0.5 * dt);

    const ScalarFieldX* guess = s.potential.phi.size() ? &s.potential.phi : nullptr;
    const PotentialState pot = solve_potential(m, wrap(f, Mode::Perturbation), guess);
    auto e = field_components(m, pot.e_field);
    if (m.config().field_solves == 2) {
        const Eigen::MatrixXd f1 = field_substep(m, f, e, dt);  // predictor for the averaged field
        const PotentialState p1 = solve_potential(m, wrap(f1, Mode::Perturbation), &pot.phi);
        e = average(e, field_components(m, p1.e_field));
    }
    f = field_substep(m, f, e, 0.5 * dt);

    // Heun on the collision operator with the loss taken implicitly in both stages
    Eigen::MatrixXd gain, rate;
    m.pert_kernel().gain_and_rate(f, f, gain, rate);
    const Eigen::MatrixXd explicit0 = t.k * f + gain;
    const Eigen::ArrayXXd loss0 = rate.array().colwise() + t.nu.array();
    const Eigen::MatrixXd fs = ((f + dt * explicit0).array() / (1.0 + dt * loss0)).matrix();
    m.pert_kernel().gain_and_rate(fs, fs, gain, rate);
    const Eigen::MatrixXd num =
        f + 0.5 * dt * (explicit0 - (loss0 * f.array()).matrix() + t.k * fs + gain);
    const Eigen::ArrayXXd den = 1.0 + 0.5 * dt * (rate.array().colwise() + t.nu.array());
    Eigen::MatrixXd inc = (num.array() / den).matrix() - f;
    if (m.config().conservation_correction) inc -= m.null_basis().project(inc);
    f += inc;

    f = field_substep(m, f, e, 0.5 * dt);

    fft.shift_rows(f, vg.nodes(), 0.5 * dt);
    if (!f.allFinite()) throw std::runtime_error("non-finite value at step " + std::to_string(s.step_index + 1));

    PerturbationField out = wrap(f, Mode::Perturbation);
    PotentialState fin = solve_potential(m, out, &pot.phi);
    return advance(s, std::move(out), std::move(fin), dt);
}

SimState step_physical(const Model& m, const SimState& s, double dt) {
    if (s.field.mode != Mode::Physical) throw std::invalid_argument("step_physical needs a physical field");
    Eigen::MatrixXd F = s.field.values;

    shift_linear(m, F, 0.5 * dt);

    const ScalarFieldX* guess = s.potential.phi.size() ? &s.potential.phi : nullptr;
    const PotentialState pot = solve_potential(m, wrap(F, Mode::Physical), guess);
    auto e = field_components(m, pot.e_field);
    if (m.config().field_solves == 2) {
        Eigen::MatrixXd F1 = F;
        shift_velocity(m, F1, e, dt);
        const PotentialState p1 = solve_potential(m, wrap(F1, Mode::Physical), &pot.phi);
        e = average(e, field_components(m, p1.e_field));
    }
    shift_velocity(m, F, e, dt);

    const PhysicalTerms ct = physical_collision_terms(F, F, m.phys_kernel());
    F = ((F + dt * ct.q_gain).array() / (1.0 + dt * ct.loss_rate.array())).matrix();

    shift_linear(m, F, 0.5 * dt);
    if (!F.allFinite()) throw std::runtime_error("non-finite value at step " + std::to_string(s.step_index + 1));
    if (F.minCoeff() < 0.0) throw std::logic_error("physical step produced a negative value");

    PerturbationField out = wrap(F, Mode::Physical);
    PotentialState fin = solve_potential(m, out, &pot.phi);
    return advance(s, std::move(out), std::move(fin), dt);
}

SimState step(const Model& m, const SimState& s, double dt) {
    return s.field.mode == Mode::Physical ? step_physical(m, s, dt) : step_perturbation(m, s, dt);
}

RunResult run(const Model& m, const SimState& initial, const RunOptions& opt) {
    const RunConfig& cfg = m.config();
    RunResult res;
    const double span = cfg.t_end - initial.time;
    const double dt_req = cfg.resolved_dt();
    const long nsteps = span > 0.0 ? static_cast<long>(std::ceil(span / dt_req - 1e-9)) : 0;
    res.dt = nsteps ? span / nsteps : dt_req;
    EnergyMonitor mon(cfg.k_max);

    auto record = [&](const SimState& st) {
        EnergyReport r = mon.observe(m, st);
        if (opt.keep_states) res.trajectory.push_back(st);
        if (opt.observer) opt.observer(st, r);
        res.series.push_back(r);
        if (r.e_functional > 10.0 * cfg.m0) {
            res.status = RunStatus::EarlyAbort;
            res.message = "energy functional " + std::to_string(r.e_functional) + " exceeded 10 m0 at t = " +
                          std::to_string(st.time);
            return false;
        }
        return true;
    };

    SimState s = initial;
    bool ok = record(s);
    for (long k = 1; ok && k <= nsteps; ++k) {
        s = step(m, s, res.dt);
        s.time = initial.time + k * res.dt;
        res.steps = k;
        if (k % cfg.output_every == 0 || k == nsteps) ok = record(s);
    }
    res.final_state = std::move(s);
    return res;
}

RunResult run(const Model& m, const RunOptions& opt) {
    return run(m, build_initial_data(m, m.config().init), opt);
}

}  // namespace ivpb
