#pragma once

#include <complex>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "ivpb/phase_grid.hpp"

namespace ivpb {

// FFTW-backed spectral calculus on a SpatialGrid. Not thread-safe; one instance per thread.
class Fourier {
  public:
    explicit Fourier(const SpatialGrid& grid);
    ~Fourier();
    Fourier(const Fourier&) = delete;
    Fourier& operator=(const Fourier&) = delete;

    const SpatialGrid& grid() const { return grid_; }
    std::size_t spectral_size() const { return nc_; }

    void forward(const Eigen::Ref<const Eigen::VectorXd>& u, std::vector<std::complex<double>>& uh) const;
    void backward(std::vector<std::complex<double>>& uh, Eigen::Ref<Eigen::VectorXd> u) const;

    // Integer wave vector of spectral index m (r2c half layout).
    std::array<int, 3> wave_vector(std::size_t m) const;
    // True when the mode is a Nyquist mode along the axis (odd derivatives vanish there).
    bool nyquist(std::size_t m, int axis) const;

    Eigen::VectorXd derivative(const Eigen::Ref<const Eigen::VectorXd>& u, int axis, int order) const;
    Eigen::VectorXd laplacian(const Eigen::Ref<const Eigen::VectorXd>& u) const;
    // Mean-zero solution of Lap(w) = s - mean(s).
    Eigen::VectorXd inverse_laplacian(const Eigen::Ref<const Eigen::VectorXd>& s) const;
    // Solve (Lap - c) w = s for c > 0.
    Eigen::VectorXd helmholtz(const Eigen::Ref<const Eigen::VectorXd>& s, double c) const;

    // Row-wise derivative of a velocity-by-space matrix along a spatial axis.
    Eigen::MatrixXd derivative_rows(const Eigen::MatrixXd& f, int axis, int order) const;
    // Exact free transport f(x,v) <- f(x - v t, v) for every velocity row.
    void shift_rows(Eigen::MatrixXd& f, const std::vector<std::array<double, 3>>& velocity, double t) const;

  private:
    struct Plans;
    SpatialGrid grid_;
    std::size_t n_ = 0, nc_ = 0;
    std::unique_ptr<Plans> plans_;
};

}  // namespace ivpb
