#include "ivpb/fourier.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include <fftw3.h>

namespace ivpb {

namespace {
constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;
}

struct Fourier::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    // batched plans keyed by row count
    std::map<std::size_t, std::pair<fftw_plan, fftw_plan>> rows;
    std::vector<double> rbuf;
    std::vector<std::complex<double>> cbuf;

    ~Plans() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        for (auto& [_, p] : rows) {
            fftw_destroy_plan(p.first);
            fftw_destroy_plan(p.second);
        }
    }
};

Fourier::Fourier(const SpatialGrid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
    const auto& n = grid_.n_per_dim();
    n_ = grid_.size();
    nc_ = n_ / n.back() * (n.back() / 2 + 1);
    plans_->rbuf.assign(n_, 0.0);
    plans_->cbuf.assign(nc_, {});
    auto* c = reinterpret_cast<fftw_complex*>(plans_->cbuf.data());
    plans_->fwd = fftw_plan_dft_r2c(grid_.dims(), n.data(), plans_->rbuf.data(), c, kFlags);
    plans_->bwd = fftw_plan_dft_c2r(grid_.dims(), n.data(), c, plans_->rbuf.data(), kFlags);
}

Fourier::~Fourier() = default;

void Fourier::forward(const Eigen::Ref<const Eigen::VectorXd>& u,
                      std::vector<std::complex<double>>& uh) const {
    std::copy(u.data(), u.data() + n_, plans_->rbuf.begin());
    uh.resize(nc_);
    fftw_execute_dft_r2c(plans_->fwd, plans_->rbuf.data(), reinterpret_cast<fftw_complex*>(uh.data()));
}

void Fourier::backward(std::vector<std::complex<double>>& uh, Eigen::Ref<Eigen::VectorXd> u) const {
    fftw_execute_dft_c2r(plans_->bwd, reinterpret_cast<fftw_complex*>(uh.data()), plans_->rbuf.data());
    const double s = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) u[i] = plans_->rbuf[i] * s;
}

std::array<int, 3> Fourier::wave_vector(std::size_t m) const {
    const auto& n = grid_.n_per_dim();
    const int d = grid_.dims();
    std::array<int, 3> k{0, 0, 0};
    const int nl = n.back() / 2 + 1;
    std::size_t rem = m;
    k[d - 1] = static_cast<int>(rem % nl);
    rem /= nl;
    for (int a = d - 2; a >= 0; --a) {
        k[a] = grid_.wave_numbers(a)[rem % n[a]];
        rem /= n[a];
    }
    return k;
}

bool Fourier::nyquist(std::size_t m, int axis) const {
    const auto k = wave_vector(m);
    return std::abs(k[axis]) * 2 == grid_.n_per_dim()[axis];
}

Eigen::VectorXd Fourier::derivative(const Eigen::Ref<const Eigen::VectorXd>& u, int axis, int order) const {
    if (order < 1) throw std::invalid_argument("derivative order must be >= 1");
    if (axis < 0 || axis >= grid_.dims()) throw std::invalid_argument("spatial axis out of range");
    std::vector<std::complex<double>> uh;
    forward(u, uh);
    const std::complex<double> I(0.0, 1.0);
    for (std::size_t m = 0; m < nc_; ++m) {
        const auto k = wave_vector(m);
        if ((order % 2) && nyquist(m, axis)) {
            uh[m] = 0.0;
            continue;
        }
        uh[m] *= std::pow(I * (2.0 * std::numbers::pi * k[axis]), order);
    }
    Eigen::VectorXd out(n_);
    backward(uh, out);
    return out;
}

Eigen::VectorXd Fourier::laplacian(const Eigen::Ref<const Eigen::VectorXd>& u) const {
    std::vector<std::complex<double>> uh;
    forward(u, uh);
    for (std::size_t m = 0; m < nc_; ++m) {
        const auto k = wave_vector(m);
        double k2 = 0.0;
        for (int a = 0; a < grid_.dims(); ++a) k2 += double(k[a]) * k[a];
        uh[m] *= -4.0 * std::numbers::pi * std::numbers::pi * k2;
    }
    Eigen::VectorXd out(n_);
    backward(uh, out);
    return out;
}

Eigen::VectorXd Fourier::inverse_laplacian(const Eigen::Ref<const Eigen::VectorXd>& s) const {
    std::vector<std::complex<double>> uh;
    forward(s, uh);
    for (std::size_t m = 0; m < nc_; ++m) {
        const auto k = wave_vector(m);
        double k2 = 0.0;
        for (int a = 0; a < grid_.dims(); ++a) k2 += double(k[a]) * k[a];
        uh[m] = (k2 == 0.0) ? 0.0 : uh[m] / (-4.0 * std::numbers::pi * std::numbers::pi * k2);
    }
    Eigen::VectorXd out(n_);
    backward(uh, out);
    return out;
}

Eigen::VectorXd Fourier::helmholtz(const Eigen::Ref<const Eigen::VectorXd>& s, double c) const {
    std::vector<std::complex<double>> uh;
    forward(s, uh);
    for (std::size_t m = 0; m < nc_; ++m) {
        const auto k = wave_vector(m);
        double k2 = 0.0;
        for (int a = 0; a < grid_.dims(); ++a) k2 += double(k[a]) * k[a];
        uh[m] /= (-4.0 * std::numbers::pi * std::numbers::pi * k2 - c);
    }
    Eigen::VectorXd out(n_);
    backward(uh, out);
    return out;
}

namespace {

std::pair<fftw_plan, fftw_plan> make_row_plans(const SpatialGrid& g, std::size_t rows, double* r,
                                               std::complex<double>* c) {
    const int howmany = static_cast<int>(rows);
    auto* cc = reinterpret_cast<fftw_complex*>(c);
    fftw_plan f = fftw_plan_many_dft_r2c(g.dims(), g.n_per_dim().data(), howmany, r, nullptr, howmany, 1,
                                         cc, nullptr, howmany, 1, kFlags);
    fftw_plan b = fftw_plan_many_dft_c2r(g.dims(), g.n_per_dim().data(), howmany, cc, nullptr, howmany, 1,
                                         r, nullptr, howmany, 1, kFlags);
    return {f, b};
}

}  // namespace

Eigen::MatrixXd Fourier::derivative_rows(const Eigen::MatrixXd& f, int axis, int order) const {
    const std::size_t rows = f.rows();
    std::vector<std::complex<double>> c(rows * nc_);
    Eigen::MatrixXd out = f;
    auto it = plans_->rows.find(rows);
    if (it == plans_->rows.end())
        it = plans_->rows.emplace(rows, make_row_plans(grid_, rows, out.data(), c.data())).first;
    fftw_execute_dft_r2c(it->second.first, out.data(), reinterpret_cast<fftw_complex*>(c.data()));
    const std::complex<double> I(0.0, 1.0);
    for (std::size_t m = 0; m < nc_; ++m) {
        std::complex<double> mult = 0.0;
        if (!((order % 2) && nyquist(m, axis)))
            mult = std::pow(I * (2.0 * std::numbers::pi * wave_vector(m)[axis]), order) / double(n_);
        for (std::size_t r = 0; r < rows; ++r) c[m * rows + r] *= mult;
    }
    fftw_execute_dft_c2r(it->second.second, reinterpret_cast<fftw_complex*>(c.data()), out.data());
    return out;
}

void Fourier::shift_rows(Eigen::MatrixXd& f, const std::vector<std::array<double, 3>>& velocity,
                         double t) const {
    const std::size_t rows = f.rows();
    std::vector<std::complex<double>> c(rows * nc_);
    auto it = plans_->rows.find(rows);
    if (it == plans_->rows.end())
        it = plans_->rows.emplace(rows, make_row_plans(grid_, rows, f.data(), c.data())).first;
    fftw_execute_dft_r2c(it->second.first, f.data(), reinterpret_cast<fftw_complex*>(c.data()));
    const int d = grid_.dims();
    const double inv = 1.0 / double(n_);
    for (std::size_t m = 0; m < nc_; ++m) {
        const auto k = wave_vector(m);
        for (std::size_t r = 0; r < rows; ++r) {
            double ph = 0.0;
            for (int a = 0; a < d; ++a) ph += k[a] * velocity[r][a];
            ph *= -2.0 * std::numbers::pi * t;
            c[m * rows + r] *= std::complex<double>(std::cos(ph), std::sin(ph)) * inv;
        }
    }
    fftw_execute_dft_c2r(it->second.second, reinterpret_cast<fftw_complex*>(c.data()), f.data());
}

}  // namespace ivpb
