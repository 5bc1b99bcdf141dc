#include "ivpb/phase_grid.hpp"

#include <cmath>
#include <numbers>

#include "ivpb/fourier.hpp"

namespace ivpb {

SpatialGrid::SpatialGrid(std::vector<int> n_per_dim) : n_(std::move(n_per_dim)) {
    if (n_.empty() || n_.size() > 3) throw ConfigError("spatial dims must be 1, 2 or 3");
    size_ = 1;
    for (int n : n_) {
        if (n < 2 || n % 2) throw ConfigError("grid.nx entries must be even and >= 2");
        size_ *= static_cast<std::size_t>(n);
    }
    cell_volume_ = 1.0 / static_cast<double>(size_);
    for (int n : n_) {
        std::vector<int> k(n);
        for (int i = 0; i < n; ++i) k[i] = (i < n / 2) ? i : i - n;
        k_.push_back(std::move(k));
    }
}

double SpatialGrid::min_spacing() const {
    double h = 1.0;
    for (int n : n_) h = std::min(h, 1.0 / n);
    return h;
}

std::array<int, 3> SpatialGrid::multi_index(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dims() - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % n_[a]);
        flat /= n_[a];
    }
    return idx;
}

double SpatialGrid::coord(std::size_t flat, int axis) const {
    return multi_index(flat)[axis] / static_cast<double>(n_[axis]);
}

double maxwellian(double v2) {
    return std::pow(2.0 * std::numbers::pi, -1.5) * std::exp(-0.5 * v2);
}

VelocityGrid::VelocityGrid(double v_max, int n) : v_max_(v_max), n_(n) {
    if (!(v_max > 0.0)) throw ConfigError("grid.v_max must be positive");
    if (n < 4 || n % 2) throw ConfigError("grid.nv must be even and >= 4");
    h_ = 2.0 * v_max_ / n_;
    const std::size_t N = static_cast<std::size_t>(n_) * n_ * n_;
    nodes_.resize(N);
    w_.setConstant(N, weight());
    mu_.resize(N);
    sqrt_mu_.resize(N);
    v2_.resize(N);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            for (int k = 0; k < n_; ++k) {
                const std::size_t q = index(i, j, k);
                nodes_[q] = {axis_node(i), axis_node(j), axis_node(k)};
                const double s = nodes_[q][0] * nodes_[q][0] + nodes_[q][1] * nodes_[q][1] +
                                 nodes_[q][2] * nodes_[q][2];
                v2_[q] = s;
                mu_[q] = maxwellian(s);
                sqrt_mu_[q] = std::sqrt(mu_[q]);
            }
    mass_defect_ = std::abs(w_.dot(mu_) - 1.0);
}

Eigen::VectorXd VelocityGrid::component(int axis) const {
    Eigen::VectorXd c(size());
    for (std::size_t q = 0; q < size(); ++q) c[q] = nodes_[q][axis];
    return c;
}

VelocityGrid build_velocity_grid(double v_max, int n) { return VelocityGrid(v_max, n); }

double gaussian_moment(int i) {
    switch (i) {
        case 0: return 1.0;
        case 2: return 3.0;
        case 4: return 15.0;
        default: throw std::invalid_argument("gaussian_moment supports i in {0,2,4}");
    }
}

PerturbationField to_physical(const PerturbationField& f, const VelocityGrid& vg) {
    if (f.mode == Mode::Physical) return f;
    PerturbationField F = f;
    F.mode = Mode::Physical;
    F.values = (f.values.array().colwise() * vg.sqrt_mu().array()).colwise() + vg.mu().array();
    return F;
}

PerturbationField to_perturbation(const PerturbationField& F, const VelocityGrid& vg) {
    if (F.mode == Mode::Perturbation) return F;
    PerturbationField f = F;
    f.mode = Mode::Perturbation;
    f.values = (F.values.array().colwise() - vg.mu().array()).colwise() / vg.sqrt_mu().array();
    return f;
}

std::vector<double> moments_v(const Eigen::Ref<const Eigen::VectorXd>& g, const VelocityGrid& vg,
                              const std::vector<Eigen::VectorXd>& psi) {
    std::vector<double> out;
    out.reserve(psi.size());
    for (const auto& p : psi) {
        if (p.size() != g.size()) throw std::invalid_argument("moments_v: shape mismatch");
        out.push_back(vg.weight() * p.dot(g));
    }
    return out;
}

void velocity_derivative(const Eigen::Ref<const Eigen::VectorXd>& g, const VelocityGrid& vg, int axis,
                         int order, Eigen::Ref<Eigen::VectorXd> out) {
    if (order < 1 || order > 2) throw std::invalid_argument("velocity derivative order must be 1 or 2");
    if (axis < 0 || axis > 2) throw std::invalid_argument("velocity axis out of range");
    const int n = vg.n();
    const double h = vg.h();
    const std::size_t stride = axis == 0 ? std::size_t(n) * n : (axis == 1 ? std::size_t(n) : 1);
    for (std::size_t q = 0; q < vg.size(); ++q) {
        const int i = static_cast<int>((q / stride) % n);
        auto at = [&](int off) { return g[q + static_cast<std::ptrdiff_t>(off) * std::ptrdiff_t(stride)]; };
        if (order == 1) {
            if (i == 0) out[q] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
            else if (i == n - 1) out[q] = (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
            else out[q] = (at(1) - at(-1)) / (2.0 * h);
        } else {
            if (i == 0) out[q] = (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / (h * h);
            else if (i == n - 1) out[q] = (2.0 * at(0) - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)) / (h * h);
            else out[q] = (at(1) - 2.0 * at(0) + at(-1)) / (h * h);
        }
    }
}

PerturbationField derivative(const PerturbationField& f, AxisKind kind, int axis, int order,
                             const DerivativeContext& ctx) {
    if (order < 1) throw std::invalid_argument("derivative order must be >= 1");
    PerturbationField out = f;
    switch (kind) {
        case AxisKind::Space:
            if (!ctx.fourier) throw std::invalid_argument("space derivative needs a Fourier context");
            out.values = ctx.fourier->derivative_rows(f.values, axis, order);
            break;
        case AxisKind::Velocity:
            if (!ctx.vgrid) throw std::invalid_argument("velocity derivative needs the velocity grid");
            for (Eigen::Index c = 0; c < f.values.cols(); ++c) {
                Eigen::VectorXd tmp(f.values.rows());
                velocity_derivative(f.values.col(c), *ctx.vgrid, axis, 1, tmp);
                if (order == 2) {
                    Eigen::VectorXd t2(tmp.size());
                    velocity_derivative(f.values.col(c), *ctx.vgrid, axis, 2, t2);
                    tmp = t2;
                } else if (order > 2) {
                    for (int o = 1; o < order; ++o) {
                        Eigen::VectorXd t2(tmp.size());
                        velocity_derivative(tmp, *ctx.vgrid, axis, 1, t2);
                        tmp = t2;
                    }
                }
                out.values.col(c) = tmp;
            }
            break;
        case AxisKind::Time:
            if (!ctx.previous || !(ctx.dt > 0.0))
                throw std::logic_error("time derivative requires a previous state and dt > 0");
            if (order != 1) throw std::invalid_argument("time derivative from history supports order 1");
            out.values = (f.values - ctx.previous->values) / ctx.dt;
            break;
    }
    return out;
}

}  // namespace ivpb
