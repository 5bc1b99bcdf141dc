#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ivpb {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Mode : unsigned char { Perturbation = 0, Physical = 1 };

// Periodic unit torus in 1-3 dimensions, row-major node ordering (last axis fastest).
class SpatialGrid {
  public:
    explicit SpatialGrid(std::vector<int> n_per_dim);

    int dims() const { return static_cast<int>(n_.size()); }
    const std::vector<int>& n_per_dim() const { return n_; }
    std::size_t size() const { return size_; }
    double cell_volume() const { return cell_volume_; }
    double spacing(int axis) const { return 1.0 / n_[axis]; }
    double min_spacing() const;

    // Signed integer frequency of index i on an axis of length n.
    const std::vector<int>& wave_numbers(int axis) const { return k_[axis]; }

    std::array<int, 3> multi_index(std::size_t flat) const;
    double coord(std::size_t flat, int axis) const;

    bool operator==(const SpatialGrid& o) const { return n_ == o.n_; }

  private:
    std::vector<int> n_;
    std::vector<std::vector<int>> k_;
    std::size_t size_ = 0;
    double cell_volume_ = 0.0;
};

// Uniform midpoint lattice on [-v_max, v_max]^3. Node (i,j,k) has flat index (i*n + j)*n + k.
class VelocityGrid {
  public:
    VelocityGrid(double v_max, int n);

    double v_max() const { return v_max_; }
    int n() const { return n_; }
    double h() const { return h_; }
    std::size_t size() const { return nodes_.size(); }

    double axis_node(int i) const { return -v_max_ + h_ * (i + 0.5); }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }

    const std::vector<std::array<double, 3>>& nodes() const { return nodes_; }
    const Eigen::VectorXd& weights() const { return w_; }
    const Eigen::VectorXd& mu() const { return mu_; }
    const Eigen::VectorXd& sqrt_mu() const { return sqrt_mu_; }
    const Eigen::VectorXd& speed_sq() const { return v2_; }
    Eigen::VectorXd component(int axis) const;

    double weight() const { return h_ * h_ * h_; }
    double mass_defect() const { return mass_defect_; }

    bool operator==(const VelocityGrid& o) const { return v_max_ == o.v_max_ && n_ == o.n_; }

  private:
    double v_max_;
    int n_;
    double h_;
    std::vector<std::array<double, 3>> nodes_;
    Eigen::VectorXd w_, mu_, sqrt_mu_, v2_;
    double mass_defect_ = 0.0;
};

VelocityGrid build_velocity_grid(double v_max, int n);

double maxwellian(double v2);
double gaussian_moment(int i);

// Kinetic unknown: column c holds the velocity values at spatial node c.
struct PerturbationField {
    Mode mode = Mode::Perturbation;
    Eigen::MatrixXd values;  // N_v x N_x

    PerturbationField() = default;
    PerturbationField(const SpatialGrid& sg, const VelocityGrid& vg, Mode m = Mode::Perturbation)
        : mode(m), values(Eigen::MatrixXd::Zero(vg.size(), sg.size())) {}

    bool finite() const { return values.allFinite(); }
    double min_value() const { return values.minCoeff(); }
};

using ScalarFieldX = Eigen::VectorXd;

PerturbationField to_physical(const PerturbationField& f, const VelocityGrid& vg);
PerturbationField to_perturbation(const PerturbationField& F, const VelocityGrid& vg);

// Quadrature sums over v of g * psi_k for each weight table psi_k.
std::vector<double> moments_v(const Eigen::Ref<const Eigen::VectorXd>& g, const VelocityGrid& vg,
                              const std::vector<Eigen::VectorXd>& psi);

enum class AxisKind { Space, Velocity, Time };

class Fourier;

struct DerivativeContext {
    const Fourier* fourier = nullptr;
    const VelocityGrid* vgrid = nullptr;
    const PerturbationField* previous = nullptr;  // time history
    double dt = 0.0;
};

// Finite differences along a velocity axis, second order, one-sided at the truncation edge.
void velocity_derivative(const Eigen::Ref<const Eigen::VectorXd>& g, const VelocityGrid& vg, int axis,
                         int order, Eigen::Ref<Eigen::VectorXd> out);

PerturbationField derivative(const PerturbationField& f, AxisKind kind, int axis, int order,
                             const DerivativeContext& ctx);

}  // namespace ivpb
