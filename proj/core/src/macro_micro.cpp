#include "ivpb/macro_micro.hpp"

#include <cmath>
#include <stdexcept>

#include "ivpb/model.hpp"

namespace ivpb {

NullBasis::NullBasis(const VelocityGrid& vg) : w_(vg.weight()) {
    const Eigen::Index N = static_cast<Eigen::Index>(vg.size());
    e_.resize(N, 5);
    e_.col(0) = vg.sqrt_mu();
    for (int a = 0; a < 3; ++a) e_.col(1 + a) = vg.component(a).cwiseProduct(vg.sqrt_mu());
    e_.col(4) = vg.speed_sq().cwiseProduct(vg.sqrt_mu());
    gram_ = w_ * (e_.transpose() * e_);
    ldlt_.compute(gram_);
    if (ldlt_.info() != Eigen::Success || ldlt_.vectorD().minCoeff() <= 1e-14 * gram_.norm())
        throw std::runtime_error("null-space Gram matrix is singular on this grid");
}

Eigen::MatrixXd NullBasis::coefficients(const Eigen::MatrixXd& g) const {
    Eigen::MatrixXd rhs = w_ * (e_.transpose() * g);
    return ldlt_.solve(rhs);
}

Eigen::MatrixXd NullBasis::project(const Eigen::MatrixXd& g) const { return e_ * coefficients(g); }

Projection project(const Eigen::Ref<const Eigen::VectorXd>& g, const VelocityGrid& vg) {
    const NullBasis nb(vg);
    Eigen::MatrixXd gm = g;
    const Eigen::MatrixXd c = nb.coefficients(gm);
    Projection p;
    p.abc.a = c(0, 0);
    p.abc.b = {c(1, 0), c(2, 0), c(3, 0)};
    p.abc.c = c(4, 0);
    p.pg = nb.vectors() * c.col(0);
    return p;
}

MacroFields macro_fields(const PerturbationField& f, const VelocityGrid& vg, const SpatialGrid& sg) {
    if (f.mode != Mode::Perturbation) throw std::invalid_argument("macro_fields expects a perturbation field");
    const NullBasis nb(vg);
    const Eigen::MatrixXd c = nb.coefficients(f.values);
    MacroFields m;
    m.a = c.row(0).transpose();
    for (int i = 0; i < 3; ++i) m.b[i] = c.row(1 + i).transpose();
    m.c = c.row(4).transpose();
    const Eigen::MatrixXd pf = nb.vectors() * c;
    const double w = vg.weight() * sg.cell_volume();
    const double nf = w * f.values.squaredNorm();
    const double np = w * pf.squaredNorm();
    const double nm = w * (f.values - pf).squaredNorm();
    m.norm_f = std::sqrt(nf);
    m.norm_p = std::sqrt(np);
    m.norm_micro = std::sqrt(nm);
    m.pythagoras_defect = nf > 0.0 ? std::abs(np + nm - nf) / nf : 0.0;
    return m;
}

ThirteenBasis::ThirteenBasis(const VelocityGrid& vg) : w_(vg.weight()) {
    const Eigen::Index N = static_cast<Eigen::Index>(vg.size());
    e_.resize(N, 13);
    const Eigen::VectorXd& sq = vg.sqrt_mu();
    const Eigen::VectorXd v[3] = {vg.component(0), vg.component(1), vg.component(2)};
    const Eigen::VectorXd& v2 = vg.speed_sq();
    e_.col(0) = sq;
    for (int i = 0; i < 3; ++i) e_.col(1 + i) = v[i].cwiseProduct(sq);
    for (int i = 0; i < 3; ++i) e_.col(4 + i) = v[i].cwiseProduct(v[i]).cwiseProduct(sq);
    e_.col(7) = v[0].cwiseProduct(v[1]).cwiseProduct(sq);
    e_.col(8) = v[0].cwiseProduct(v[2]).cwiseProduct(sq);
    e_.col(9) = v[1].cwiseProduct(v[2]).cwiseProduct(sq);
    for (int i = 0; i < 3; ++i) e_.col(10 + i) = v[i].cwiseProduct(v2).cwiseProduct(sq);
    Eigen::MatrixXd g = w_ * (e_.transpose() * e_);
    ldlt_.compute(g);
    if (ldlt_.info() != Eigen::Success) throw std::runtime_error("13-element Gram matrix is singular");
}

Eigen::MatrixXd ThirteenBasis::coefficients(const Eigen::MatrixXd& g) const {
    Eigen::MatrixXd rhs = w_ * (e_.transpose() * g);
    return ldlt_.solve(rhs);
}

MacroIdentityResiduals macro_identity_residuals(const Model& m, const SimState& s, TimeDifference td) {
    const double dt = s.prev_dt;
    if (!s.prev_field || !s.prev_potential || !(dt > 0.0))
        throw std::logic_error("macro identities need the previous state and dt > 0");
    const SpatialGrid& sg = m.sgrid();
    const Fourier& fft = m.fourier();
    const NullBasis& nb = m.null_basis();
    const ThirteenBasis tb(m.vgrid());
    const Eigen::MatrixXd g1 = perturbation_values(m, s.field);
    const Eigen::MatrixXd g0 = perturbation_values(m, *s.prev_field);
    const double w1 = td == TimeDifference::Midpoint ? 0.5 : 1.0;
    const Eigen::MatrixXd g = w1 * g1 + (1.0 - w1) * g0;
    const Eigen::MatrixXd abc = nb.coefficients(g);
    const Eigen::MatrixXd abc_t = (nb.coefficients(g1) - nb.coefficients(g0)) / dt;
    const Eigen::MatrixXd w = g - nb.vectors() * abc;
    const Eigen::MatrixXd w_t = ((g1 - nb.project(g1)) - (g0 - nb.project(g0))) / dt;
    const auto e1 = field_components(m, s.potential.e_field);
    const auto e0 = field_components(m, s.prev_potential->e_field);
    std::array<ScalarFieldX, 3> e;
    for (int i = 0; i < 3; ++i) e[i] = w1 * e1[i] + (1.0 - w1) * e0[i];

    const Eigen::MatrixXd lh =
        -w_t + transport_term(m, w) - apply_L(w, m.tables()) + force_term(m, e, g) + gamma(g, g, m.pert_kernel());
    const Eigen::MatrixXd rhs = tb.coefficients(lh);

    const Eigen::Index nx = static_cast<Eigen::Index>(sg.size());
    auto dx = [&](int row, int axis) -> Eigen::VectorXd {
        if (axis >= sg.dims()) return Eigen::VectorXd::Zero(nx);
        return fft.derivative(abc.row(row).transpose(), axis, 1);
    };
    Eigen::MatrixXd lhs(13, nx);
    lhs.row(0) = abc_t.row(0);
    for (int i = 0; i < 3; ++i) {
        lhs.row(1 + i) = (abc_t.row(1 + i).transpose() + dx(0, i) - e[i]).transpose();
        lhs.row(4 + i) = (abc_t.row(4).transpose() + dx(1 + i, i)).transpose();
        lhs.row(10 + i) = dx(4, i).transpose();
    }
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (int k = 0; k < 3; ++k) {
        const int i = pairs[k][0], j = pairs[k][1];
        lhs.row(7 + k) = (dx(1 + j, i) + dx(1 + i, j)).transpose();
    }

    const double cv = sg.cell_volume();
    const int first[5] = {10, 4, 7, 1, 0}, count[5] = {3, 3, 3, 3, 1};
    MacroIdentityResiduals r;
    for (int k = 0; k < 5; ++k) {
        r.residual[k] = std::sqrt(cv * (lhs.middleRows(first[k], count[k]) - rhs.middleRows(first[k], count[k])).squaredNorm());
        r.scale[k] = std::sqrt(cv * lhs.middleRows(first[k], count[k]).squaredNorm());
    }
    return r;
}

}  // namespace ivpb
