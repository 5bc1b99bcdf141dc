#include "ivpb/field_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ivpb {

double l2_norm(const SpatialGrid& sg, const ScalarFieldX& u) { return std::sqrt(sg.cell_volume() * u.squaredNorm()); }

ScalarFieldX solve_linear_poisson(const Fourier& fft, const ScalarFieldX& source, double* mean_removed) {
    if (mean_removed) *mean_removed = source.mean();
    return fft.inverse_laplacian(source);
}

std::vector<ScalarFieldX> electric_field(const Fourier& fft, const ScalarFieldX& phi) {
    std::vector<ScalarFieldX> e;
    for (int a = 0; a < fft.grid().dims(); ++a) e.push_back(-fft.derivative(phi, a, 1));
    return e;
}

double h2_norm(const Fourier& fft, const ScalarFieldX& u) {
    const SpatialGrid& sg = fft.grid();
    double s = u.squaredNorm();
    for (int a = 0; a < sg.dims(); ++a) {
        const ScalarFieldX da = fft.derivative(u, a, 1);
        s += da.squaredNorm();
        s += fft.derivative(u, a, 2).squaredNorm();
        for (int b = a + 1; b < sg.dims(); ++b) s += fft.derivative(da, b, 1).squaredNorm();
    }
    return std::sqrt(sg.cell_volume() * s);
}

ScalarFieldX density(const PerturbationField& f, const VelocityGrid& vg) {
    if (f.mode == Mode::Physical) return vg.weight() * f.values.colwise().sum().transpose();
    return (vg.weight() * (vg.sqrt_mu().transpose() * f.values)).transpose().array() + 1.0;
}

namespace {

// (c - Lap)^{-1}
ScalarFieldX precondition(const Fourier& fft, const ScalarFieldX& r, double c) { return -fft.helmholtz(r, c); }

// Preconditioned CG for (exp(phi) - Lap) d = b.
ScalarFieldX pcg(const Fourier& fft, const ScalarFieldX& ephi, const ScalarFieldX& b, double rtol, int max_it) {
    const double c = ephi.mean();
    auto apply = [&](const ScalarFieldX& x) -> ScalarFieldX {
        return ephi.cwiseProduct(x) - fft.laplacian(x);
    };
    ScalarFieldX x = ScalarFieldX::Zero(b.size());
    ScalarFieldX r = b;
    ScalarFieldX z = precondition(fft, r, c);
    ScalarFieldX p = z;
    double rz = r.dot(z);
    const double bn = b.norm();
    if (bn == 0.0) return x;
    for (int it = 0; it < max_it; ++it) {
        const ScalarFieldX ap = apply(p);
        const double alpha = rz / p.dot(ap);
        x += alpha * p;
        r -= alpha * ap;
        if (r.norm() <= rtol * bn) break;
        z = precondition(fft, r, c);
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
    }
    return x;
}

}  // namespace

ScalarFieldX solve_linearized(const Fourier& fft, const ScalarFieldX& exp_phi, const ScalarFieldX& rhs, double rtol,
                              int max_iters) {
    return pcg(fft, exp_phi, rhs, rtol, max_iters);
}

PotentialState solve_poisson_poincare(const Fourier& fft, const ScalarFieldX& rho, const ScalarFieldX* init_guess,
                                      const PoissonOptions& opt) {
    const SpatialGrid& sg = fft.grid();
    if (rho.size() != static_cast<Eigen::Index>(sg.size())) throw std::invalid_argument("rho has wrong size");
    PotentialState st;
    st.mean_defect = rho.mean() - 1.0;
    ScalarFieldX phi = init_guess ? *init_guess : solve_linear_poisson(fft, ScalarFieldX::Ones(rho.size()) - rho);

    auto residual = [&](const ScalarFieldX& p, ScalarFieldX& ep) -> ScalarFieldX {
        ep = p.array().exp();
        if (!ep.allFinite()) throw PoissonError("exp(phi) overflow in Poisson-Poincare solve", st.residual_history);
        return fft.laplacian(p) - ep + rho;
    };

    ScalarFieldX ephi;
    ScalarFieldX G = residual(phi, ephi);
    double gn = l2_norm(sg, G);
    st.residual_history.push_back(gn);
    int it = 0;
    while (gn > opt.tol) {
        if (it == opt.max_iters)
            throw PoissonError("Poisson-Poincare Newton did not converge, residual " + std::to_string(gn),
                               st.residual_history);
        // J d = -G with J = Lap - exp(phi)  <=>  (exp(phi) - Lap) d = G
        const double rtol = std::max(1e-14, std::min(1e-4, gn));
        const ScalarFieldX d = pcg(fft, ephi, G, rtol, opt.krylov_max);
        double step = 1.0;
        ScalarFieldX trial, etrial, Gt;
        double tn = 0.0;
        for (int h = 0;; ++h) {
            trial = phi + step * d;
            try {
                Gt = residual(trial, etrial);
                tn = l2_norm(sg, Gt);
            } catch (const PoissonError&) {
                tn = std::numeric_limits<double>::infinity();
            }
            if (tn < gn || h == opt.max_halvings) break;
            step *= 0.5;
        }
        if (!std::isfinite(tn)) throw PoissonError("exp(phi) overflow in Poisson-Poincare solve", st.residual_history);
        phi = std::move(trial);
        ephi = std::move(etrial);
        G = std::move(Gt);
        gn = tn;
        st.residual_history.push_back(gn);
        ++it;
    }
    st.newton_iters = it;
    st.residual_norm = gn;
    st.phi = std::move(phi);
    st.exp_phi = std::move(ephi);
    st.e_field = electric_field(fft, st.phi);
    return st;
}

}  // namespace ivpb
