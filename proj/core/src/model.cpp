#include "ivpb/model.hpp"

#include <cmath>
#include <numbers>

namespace ivpb {

double Profile::operator()(const SpatialGrid& sg, std::size_t node) const {
    if (amp == 0.0 || axis >= sg.dims()) return 0.0;
    return amp * std::cos(2.0 * std::numbers::pi * mode * sg.coord(node, axis));
}

void RunConfig::validate() const {
    if (nx.empty() || nx.size() > 3) throw ConfigError("grid.nx must list 1 to 3 sizes");
    for (int n : nx)
        if (n < 2 || n % 2) throw ConfigError("grid.nx entries must be even and >= 2");
    if (!(v_max > 0.0)) throw ConfigError("grid.v_max must be positive");
    if (nv < 4 || nv % 2) throw ConfigError("grid.nv must be even and >= 4");
    if (dt && !(*dt > 0.0)) throw ConfigError("time.dt must be positive or 'auto'");
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0) throw ConfigError("time.cfl_safety must lie in (0, 1]");
    if (!(t_end >= 0.0)) throw ConfigError("time.t_end must be >= 0");
    if (!(m0 > 0.0 && m0 < 1.0)) throw ConfigError("time.m0 must lie in (0, 1)");
    if (k_max < 0 || k_max > 2) throw ConfigError("output.k_max must be 0, 1 or 2");
    if (field_solves != 1 && field_solves != 2) throw ConfigError("poisson.solves_per_step must be 1 or 2");
    if (output_every < 1) throw ConfigError("output.every must be >= 1");
    if (!(transient_fraction >= 0.0 && transient_fraction < 1.0))
        throw ConfigError("output.transient_fraction must lie in [0, 1)");
    if (!(poisson.tol > 0.0)) throw ConfigError("poisson.tol must be positive");
    if (poisson.max_iters < 1) throw ConfigError("poisson.max_iters must be >= 1");
    if (poisson.max_halvings < 0) throw ConfigError("poisson.max_halvings must be >= 0");
    const int s = collision.sphere_nodes;
    if (s != 6 && s != 14 && s != 26 && s != 38 && s != 50)
        throw ConfigError("collision.sphere_nodes must be one of 6, 14, 26, 38, 50");
    if (collision.kink_order < 0 || collision.kink_order > 5)
        throw ConfigError("collision.kink_order must lie in [0, 5]");
    auto check = [&](const Profile& p, const char* name) {
        if (p.axis < 0 || p.axis > 2) throw ConfigError(std::string("initial_data.") + name + ".axis must be 0, 1 or 2");
        if (!std::isfinite(p.amp)) throw ConfigError(std::string("initial_data.") + name + ".amp must be finite");
    };
    check(init.a, "a");
    check(init.c, "c");
    check(init.micro, "micro");
    for (const auto& b : init.b) check(b, "b");
    if (mode == Mode::Physical) {
        // F = mu (1 + a + b.v + c|v|^2 + micro v1 v2) must stay >= 0 on the box for every x
        const double v = v_max, v2 = v_max * v_max;
        double worst = std::abs(init.a.amp) + 3.0 * v2 * std::abs(init.c.amp) + v2 * std::abs(init.micro.amp);
        for (const auto& b : init.b) worst += v * std::abs(b.amp);
        if (worst >= 1.0)
            throw ConfigError("initial_data: PHYSICAL mode requires |a| + |b| v_max + 3|c| v_max^2 + |micro| v_max^2 < 1");
    }
}

double RunConfig::resolved_dt() const {
    if (dt) return *dt;
    double dx = 1.0;
    for (int n : nx) dx = std::min(dx, 1.0 / n);
    return cfl_safety * dx / v_max;
}

Model::Model(const RunConfig& cfg, std::shared_ptr<const CollisionTables> tables)
    : cfg_(cfg),
      sg_(cfg.nx),
      vg_(cfg.v_max, cfg.nv),
      fft_(std::make_unique<Fourier>(sg_)),
      tables_(tables ? std::move(tables)
                     : std::make_shared<const CollisionTables>(load_or_build_tables(vg_, cfg.collision, cfg.cache_dir))),
      pert_(vg_, lattice_sphere(cfg.collision.sphere_nodes), cfg.collision, Mode::Perturbation),
      phys_(vg_, lattice_sphere(cfg.collision.sphere_nodes), cfg.collision, Mode::Physical),
      nb_(vg_) {
    if (tables_->n != vg_.n() || tables_->v_max != vg_.v_max() || !(tables_->params == cfg.collision))
        throw ConfigError("collision tables do not match the configured grid");
}

double Model::dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const {
    return sg_.cell_volume() * vg_.weight() * (a.array() * b.array()).sum();
}

double Model::norm_nu(const Eigen::MatrixXd& a) const {
    return std::sqrt(sg_.cell_volume() * vg_.weight() *
                     (a.array().square().colwise() * tables_->nu.array()).sum());
}

Eigen::MatrixXd perturbation_values(const Model& m, const PerturbationField& f) {
    if (f.mode == Mode::Perturbation) return f.values;
    return to_perturbation(f, m.vgrid()).values;
}

PotentialState solve_potential(const Model& m, const PerturbationField& f, const ScalarFieldX* guess) {
    return solve_poisson_poincare(m.fourier(), density(f, m.vgrid()), guess, m.config().poisson);
}

std::array<ScalarFieldX, 3> field_components(const Model& m, const std::vector<ScalarFieldX>& e) {
    std::array<ScalarFieldX, 3> out;
    const auto nx = static_cast<Eigen::Index>(m.sgrid().size());
    for (int a = 0; a < 3; ++a) out[a] = a < static_cast<int>(e.size()) ? e[a] : ScalarFieldX::Zero(nx);
    return out;
}

namespace {

// Central difference with zero values outside the velocity box, column-wise.
Eigen::MatrixXd central_dv(const Eigen::MatrixXd& g, const VelocityGrid& vg, int axis) {
    const int n = vg.n();
    const Eigen::Index stride = axis == 0 ? Eigen::Index(n) * n : (axis == 1 ? n : 1);
    const double s = 0.5 / vg.h();
    Eigen::MatrixXd out(g.rows(), g.cols());
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
        const double* in = g.col(c).data();
        double* o = out.col(c).data();
        for (Eigen::Index q = 0; q < g.rows(); ++q) {
            const int i = static_cast<int>((q / stride) % n);
            const double up = i + 1 < n ? in[q + stride] : 0.0;
            const double dn = i > 0 ? in[q - stride] : 0.0;
            o[q] = s * (up - dn);
        }
    }
    return out;
}

}  // namespace

// -E . grad_v g + (v/2) . E g, written as -mu^{-1/2} E . grad_v (mu^{1/2} g)
Eigen::MatrixXd force_term(const Model& m, const std::array<ScalarFieldX, 3>& e, const Eigen::MatrixXd& g) {
    const VelocityGrid& vg = m.vgrid();
    const Eigen::MatrixXd G = g.array().colwise() * vg.sqrt_mu().array();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    for (int a = 0; a < 3; ++a) {
        if (e[a].cwiseAbs().maxCoeff() == 0.0) continue;
        out -= (central_dv(G, vg, a).array().rowwise() * e[a].transpose().array()).matrix();
    }
    return out.array().colwise() / vg.sqrt_mu().array();
}

Eigen::MatrixXd source_term(const Model& m, const std::array<ScalarFieldX, 3>& e) {
    const VelocityGrid& vg = m.vgrid();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(vg.size(), m.sgrid().size());
    for (int a = 0; a < 3; ++a) out += vg.component(a).cwiseProduct(vg.sqrt_mu()) * e[a].transpose();
    return out;
}

Eigen::MatrixXd transport_term(const Model& m, const Eigen::MatrixXd& g) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    for (int a = 0; a < m.sgrid().dims(); ++a)
        out -= (m.fourier().derivative_rows(g, a, 1).array().colwise() * m.vgrid().component(a).array()).matrix();
    return out;
}

Eigen::MatrixXd rhs_perturbation(const Model& m, const Eigen::MatrixXd& f, const std::array<ScalarFieldX, 3>& e) {
    return transport_term(m, f) + force_term(m, e, f) + source_term(m, e) - apply_L(f, m.tables()) +
           gamma(f, f, m.pert_kernel());
}

Eigen::MatrixXd rhs_tangent(const Model& m, const Eigen::MatrixXd& f, const std::array<ScalarFieldX, 3>& e,
                            const Eigen::MatrixXd& f_dot, const std::array<ScalarFieldX, 3>& e_dot) {
    return transport_term(m, f_dot) + force_term(m, e_dot, f) + force_term(m, e, f_dot) + source_term(m, e_dot) -
           apply_L(f_dot, m.tables()) + gamma(f_dot, f, m.pert_kernel()) + gamma(f, f_dot, m.pert_kernel());
}

}  // namespace ivpb
