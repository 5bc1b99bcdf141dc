#include "ivpb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace ivpb {

TimeDerivatives time_derivatives(const Model& m, const SimState& s, int order) {
    TimeDerivatives td;
    const Eigen::MatrixXd f = perturbation_values(m, s.field);
    const VelocityGrid& vg = m.vgrid();
    const Fourier& fft = m.fourier();
    td.e = field_components(m, s.potential.e_field);
    if (order < 1) return td;
    if (s.potential.exp_phi.size() == 0) throw std::logic_error("time derivatives need a solved potential");

    td.f_t = rhs_perturbation(m, f, td.e);
    const ScalarFieldX rho_t = vg.weight() * (vg.sqrt_mu().transpose() * td.f_t).transpose();
    td.phi_t = solve_linearized(fft, s.potential.exp_phi, rho_t);
    td.e_t = field_components(m, electric_field(fft, td.phi_t));
    if (order < 2) return td;

    td.f_tt = rhs_tangent(m, f, td.e, td.f_t, td.e_t);
    const ScalarFieldX rho_tt = vg.weight() * (vg.sqrt_mu().transpose() * td.f_tt).transpose();
    const ScalarFieldX src = rho_tt - s.potential.exp_phi.cwiseProduct(td.phi_t.cwiseAbs2());
    td.phi_tt = solve_linearized(fft, s.potential.exp_phi, src);
    td.e_tt = field_components(m, electric_field(fft, td.phi_tt));
    return td;
}

namespace {

// Nondecreasing index tuples of length <= k over n variables.
std::vector<std::vector<int>> multisets(int n, int k) {
    std::vector<std::vector<int>> out{{}};
    std::vector<std::vector<int>> layer{{}};
    for (int len = 1; len <= k; ++len) {
        std::vector<std::vector<int>> next;
        for (const auto& s : layer)
            for (int v = s.empty() ? 0 : s.back(); v < n; ++v) {
                auto t = s;
                t.push_back(v);
                next.push_back(std::move(t));
            }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
    }
    return out;
}

Eigen::MatrixXd velocity_partial(const Eigen::MatrixXd& g, const VelocityGrid& vg, int axis, int order) {
    Eigen::MatrixXd out(g.rows(), g.cols());
    for (Eigen::Index c = 0; c < g.cols(); ++c) {
        Eigen::VectorXd tmp(g.rows());
        velocity_derivative(g.col(c), vg, axis, order, tmp);
        out.col(c) = tmp;
    }
    return out;
}

}  // namespace

std::vector<DerivativeField> derivative_fields(const Model& m, const SimState& s, const TimeDerivatives& td,
                                               int k_max, bool velocity) {
    const int dims = m.sgrid().dims();
    const int nvar = 1 + dims + (velocity ? 3 : 0);
    const Eigen::MatrixXd f = perturbation_values(m, s.field);
    std::vector<DerivativeField> out;
    for (const auto& idx : multisets(nvar, k_max)) {
        int kt = 0;
        std::array<int, 3> kx{0, 0, 0}, kv{0, 0, 0};
        std::string label;
        for (int v : idx) {
            if (!label.empty()) label += ' ';
            if (v == 0) {
                ++kt;
                label += "t";
            } else if (v <= dims) {
                ++kx[v - 1];
                label += "x" + std::to_string(v - 1);
            } else {
                ++kv[v - 1 - dims];
                label += "v" + std::to_string(v - 1 - dims);
            }
        }
        const Eigen::MatrixXd* base = &f;
        if (kt == 1) base = &td.f_t;
        if (kt == 2) base = &td.f_tt;
        if (base->size() == 0) throw std::logic_error("time derivative of order " + std::to_string(kt) + " not available");
        Eigen::MatrixXd g = *base;
        for (int a = 0; a < dims; ++a)
            if (kx[a]) g = m.fourier().derivative_rows(g, a, kx[a]);
        for (int a = 0; a < 3; ++a)
            if (kv[a]) g = velocity_partial(g, m.vgrid(), a, kv[a]);
        DerivativeField d;
        d.gamma = kt + kx[0] + kx[1] + kx[2];
        d.beta = kv[0] + kv[1] + kv[2];
        d.label = label.empty() ? "f" : label;
        d.values = std::move(g);
        out.push_back(std::move(d));
    }
    return out;
}

TripleNorms triple_norms(const Model& m, const std::vector<DerivativeField>& d) {
    TripleNorms tn;
    for (const auto& x : d) {
        const double a = m.dot(x.values, x.values);
        const double b = std::pow(m.norm_nu(x.values), 2);
        tn.norm_sq += a;
        tn.norm_nu_sq += b;
        tn.table[{x.gamma, x.beta}] += a;
        tn.table_nu[{x.gamma, x.beta}] += b;
    }
    return tn;
}

TripleNorms triple_norms(const Model& m, const SimState& s, int k_max) {
    const TimeDerivatives td = time_derivatives(m, s, k_max);
    return triple_norms(m, derivative_fields(m, s, td, k_max));
}

ConservationResiduals conservation_residuals(const Model& m, const SimState& s) {
    const VelocityGrid& vg = m.vgrid();
    const SpatialGrid& sg = m.sgrid();
    const Eigen::MatrixXd f = perturbation_values(m, s.field);
    const double w = vg.weight() * sg.cell_volume();
    const Eigen::VectorXd fx = f.rowwise().sum();  // summed over space
    ConservationResiduals r;
    r.mass = w * vg.sqrt_mu().dot(fx);
    for (int a = 0; a < 3; ++a) r.momentum[a] = w * vg.component(a).cwiseProduct(vg.sqrt_mu()).dot(fx);
    const double kinetic = 0.5 * w * vg.speed_sq().cwiseProduct(vg.sqrt_mu()).dot(fx);
    const PotentialState& p = s.potential;
    double pe = 0.0, grad = 0.0;
    if (p.phi.size()) {
        pe = sg.cell_volume() * p.phi.dot(p.exp_phi);
        for (const auto& e : p.e_field) grad += 0.5 * sg.cell_volume() * e.squaredNorm();
        r.neutrality = sg.cell_volume() * p.exp_phi.sum() - 1.0;
    }
    r.energy = kinetic + pe + grad;
    r.energy_scale = std::abs(kinetic) + std::abs(pe) + grad;
    return r;
}

double y_lyapunov(const Model& m, const SimState& s, const TimeDerivatives& td, double f_part, int k_max) {
    const Fourier& fft = m.fourier();
    const int dims = m.sgrid().dims();
    const double cv = m.sgrid().cell_volume();
    double y = f_part;
    for (const auto& idx : multisets(1 + dims, k_max)) {
        int kt = 0;
        std::array<int, 3> kx{0, 0, 0};
        for (int v : idx) (v == 0 ? kt : kx[v - 1])++;
        ScalarFieldX p = kt == 0 ? s.potential.phi : (kt == 1 ? td.phi_t : td.phi_tt);
        if (p.size() == 0) throw std::logic_error("potential time derivative not available");
        for (int a = 0; a < dims; ++a)
            if (kx[a]) p = fft.derivative(p, a, kx[a]);
        for (int a = 0; a < dims; ++a) y += cv * fft.derivative(p, a, 1).squaredNorm();
        y += cv * p.cwiseAbs2().dot(s.potential.exp_phi);
    }
    return y;
}

EnergyReport EnergyMonitor::observe(const Model& m, const SimState& s) {
    const TimeDerivatives td = time_derivatives(m, s, k_max_);
    const auto d = derivative_fields(m, s, td, k_max_);
    const TripleNorms tn = triple_norms(m, d);
    EnergyReport r;
    r.t = s.time;
    r.triple_norm_sq = tn.norm_sq;
    r.triple_norm_nu_sq = tn.norm_nu_sq;
    r.table = tn.table;
    if (started_) integral_ += 0.5 * (nu_last_ + tn.norm_nu_sq) * (s.time - t_last_);
    started_ = true;
    t_last_ = s.time;
    nu_last_ = tn.norm_nu_sq;
    r.e_functional = tn.norm_sq + integral_;
    r.y_lyapunov = y_lyapunov(m, s, td, tn.norm_sq, k_max_);
    r.cons = conservation_residuals(m, s);
    const VelocityGrid& vg = m.vgrid();
    if (s.field.mode == Mode::Physical) r.min_F = s.field.min_value();
    else r.min_F = ((s.field.values.array().colwise() * vg.sqrt_mu().array()).colwise() + vg.mu().array()).minCoeff();
    r.newton_iters = s.potential.newton_iters;
    return r;
}

// ---------------------------------------------------------------- operator checks

CoercivityEstimate coercivity_estimate(const CollisionTables& t, const VelocityGrid& vg, int trials, std::uint64_t seed) {
    const Eigen::Index N = t.k.rows();
    if (N != static_cast<Eigen::Index>(vg.size())) throw std::invalid_argument("tables do not match the grid");
    const NullBasis nb(vg);
    const Eigen::VectorXd isn = t.nu.cwiseSqrt().cwiseInverse();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(isn.asDiagonal() * nb.vectors());
    const Eigen::MatrixXd U = qr.householderQ() * Eigen::MatrixXd::Identity(N, 5);
    if ((U.transpose() * U - Eigen::MatrixXd::Identity(5, 5)).norm() > 1e-10 ||
        qr.matrixQR().diagonal().cwiseAbs().minCoeff() < 1e-12 * qr.matrixQR().diagonal().cwiseAbs().maxCoeff())
        throw std::runtime_error("null-space complement is rank deficient");
    auto proj = [&](Eigen::VectorXd& x) { x -= U * (U.transpose() * x); };
    // nu^{-1/2} K nu^{-1/2} on the complement; the Rayleigh quotient of L in the nu norm is 1 minus it
    auto apply = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd y = x;
        proj(y);
        y = isn.cwiseProduct(t.k * isn.cwiseProduct(y));
        proj(y);
        return y;
    };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    CoercivityEstimate est;

    const int max_steps = static_cast<int>(std::min<Eigen::Index>(N - 5, 400));
    std::vector<Eigen::VectorXd> q;
    std::vector<double> alpha, beta;
    Eigen::VectorXd v(N);
    for (Eigen::Index i = 0; i < N; ++i) v[i] = nd(rng);
    proj(v);
    v.normalize();
    double theta = 0.0;
    for (int j = 0; j < max_steps; ++j) {
        q.push_back(v);
        Eigen::VectorXd w = apply(v);
        alpha.push_back(v.dot(w));
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& qi : q) w -= qi.dot(w) * qi;
        const double b = w.norm();
        est.lanczos_steps = j + 1;
        if ((j + 1) % 10 == 0 || b < 1e-12 || j + 1 == max_steps) {
            const int k = j + 1;
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < k; ++i) {
                T(i, i) = alpha[i];
                if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
            const double th = es.eigenvalues().maxCoeff();
            const bool done = std::abs(th - theta) < 1e-12 || b < 1e-12;
            theta = th;
            if (done) break;
        }
        beta.push_back(b);
        v = w / b;
    }
    est.lanczos = 1.0 - theta;

    est.trials = std::numeric_limits<double>::infinity();
    for (int k = 0; k < trials; ++k) {
        Eigen::MatrixXd g(N, 1);
        for (Eigen::Index i = 0; i < N; ++i) g(i, 0) = nd(rng);
        g -= nb.project(g);
        const Eigen::VectorXd gv = g.col(0);
        const double num = gv.dot(apply_L(gv, t));
        const double den = gv.dot(t.nu.cwiseProduct(gv));
        est.trials = std::min(est.trials, num / den);
    }
    est.delta_hat = std::min(est.lanczos, est.trials);
    return est;
}

std::array<double, 5> null_space_residuals(const CollisionTables& t, const VelocityGrid& vg) {
    const NullBasis nb(vg);
    std::array<double, 5> r{};
    for (int k = 0; k < 5; ++k) {
        const Eigen::VectorXd e = nb.vectors().col(k);
        r[k] = apply_L(e, t).norm() / e.norm();
    }
    return r;
}

double symmetry_defect(const CollisionTables& t, const VelocityGrid& vg) {
    const Eigen::Index N = t.k.rows();
    if (N != static_cast<Eigen::Index>(vg.size())) throw std::invalid_argument("tables do not match the grid");
    // uniform quadrature weights: the conjugation is the identity
    double asym = 0.0, total = 0.0;
    for (Eigen::Index j = 0; j < N; ++j)
        for (Eigen::Index i = 0; i < N; ++i) {
            const double lij = (i == j ? t.nu[i] : 0.0) - t.k(i, j);
            total += lij * lij;
            if (i < j) asym += 2.0 * std::pow(t.k(i, j) - t.k(j, i), 2);
        }
    return std::sqrt(asym / total);
}

DecayFit decay_rate_fit(const std::vector<double>& t, const std::vector<double>& y, double transient_fraction,
                        double e0) {
    if (t.size() != y.size() || t.empty()) throw std::invalid_argument("decay fit: series sizes differ or are empty");
    const double t_start = t.front() + transient_fraction * (t.back() - t.front());
    DecayFit fit;
    std::size_t first = 0;
    while (first < t.size() && t[first] < t_start - 1e-12) ++first;
    std::size_t last = first;
    while (last < t.size() && y[last] >= 1e-24) ++last;
    fit.floor_hit = last < t.size();
    if (last - first < 10) throw std::invalid_argument("decay fit needs at least 10 samples past the transient window");
    fit.first = first;
    fit.last = last;
    const double n = static_cast<double>(last - first);
    double st = 0.0, sy = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        st += t[i];
        sy += std::log(y[i]);
    }
    const double tm = st / n, ym = sy / n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double dt = t[i] - tm, dy = std::log(y[i]) - ym;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    const double slope = stt > 0.0 ? sty / stt : 0.0;
    fit.lambda = -slope;
    fit.log_c = ym - slope * tm;
    double ss_res = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double r = std::log(y[i]) - (fit.log_c + slope * t[i]);
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    if (e0 > 0.0)
        for (std::size_t i = 0; i < t.size(); ++i) fit.envelope = std::max(fit.envelope, y[i] * std::exp(fit.lambda * t[i]) / e0);
    return fit;
}

double trilinear_ratio(const Model& m, const Eigen::MatrixXd& f, const Eigen::MatrixXd& g, const Eigen::MatrixXd& h) {
    const Eigen::VectorXd mq = m.vgrid().mu().array().pow(-0.25).matrix();
    const double sup = (h.array().colwise() * mq.array()).abs().maxCoeff();
    const double den = sup * m.norm(f) * m.norm(g);
    const double num = std::abs(m.dot(gamma(f, g, m.pert_kernel()), h));
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    return num / den;
}

MacroBound macro_bound(const Model& m, const std::vector<DerivativeField>& d, double m0) {
    const double cv = m.sgrid().cell_volume();
    MacroBound mb;
    for (const auto& x : d) {
        if (x.beta != 0) continue;
        const Eigen::MatrixXd c = m.null_basis().coefficients(x.values);
        mb.macro += std::sqrt(cv * c.row(0).squaredNorm()) + std::sqrt(cv * c.middleRows(1, 3).squaredNorm()) +
                    std::sqrt(cv * c.row(4).squaredNorm());
        mb.micro += m.norm(x.values - m.null_basis().vectors() * c);
        mb.total += m.norm(x.values);
    }
    const double den = mb.micro + std::sqrt(m0) * mb.total;
    mb.ratio = den > 0.0 ? mb.macro / den : 0.0;
    return mb;
}

std::vector<CoercivityOnField> coercivity_on_fields(const Model& m, const std::vector<DerivativeField>& d) {
    std::vector<CoercivityOnField> out;
    for (const auto& x : d) {
        if (x.beta != 0) continue;
        CoercivityOnField c;
        c.label = x.label;
        c.dissipation = m.dot(apply_L(x.values, m.tables()), x.values);
        c.micro_nu_sq = std::pow(m.norm_nu(x.values - m.null_basis().project(x.values)), 2);
        out.push_back(c);
    }
    return out;
}

CollisionFrequencies physical_frequencies(const PlasmaParams& p) {
    for (double v : {p.n_e, p.n_i, p.t_e, p.t_i, p.z_i, p.m_e, p.m_i, p.ln_lambda})
        if (!(v > 0.0)) throw std::invalid_argument("plasma parameters must be positive");
    constexpr double e = 1.602176634e-19, eps0 = 8.8541878128e-12, kb = 1.380649e-23;
    const double pi = std::numbers::pi;
    const double e4 = std::pow(e, 4);
    CollisionFrequencies f;
    f.ee = p.n_e * e4 * p.ln_lambda / (3.0 * std::sqrt(6.0) * pi * eps0 * eps0 * std::sqrt(p.m_e) * std::pow(kb * p.t_e, 1.5));
    f.ei = p.n_e * p.z_i * p.z_i * e4 * p.ln_lambda /
           (6.0 * std::sqrt(3.0) * pi * eps0 * eps0 * std::sqrt(p.m_e) * std::pow(kb * p.t_e, 1.5));
    f.ii = p.n_i * std::pow(p.z_i, 4) * e4 * p.ln_lambda /
           (3.0 * std::sqrt(6.0) * pi * eps0 * eps0 * std::sqrt(p.m_i) * std::pow(kb * p.t_i, 1.5));
    f.ii_over_ee = f.ii / f.ee;
    return f;
}

}  // namespace ivpb
