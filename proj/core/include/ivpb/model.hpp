#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ivpb/collision_ops.hpp"
#include "ivpb/field_solver.hpp"
#include "ivpb/fourier.hpp"
#include "ivpb/macro_micro.hpp"
#include "ivpb/phase_grid.hpp"

namespace ivpb {

// amp * cos(2 pi mode x_axis)
struct Profile {
    double amp = 0.0;
    int mode = 1;
    int axis = 0;

    double operator()(const SpatialGrid& sg, std::size_t node) const;
};

struct InitialDataSpec {
    Profile a, c;
    std::array<Profile, 3> b;
    Profile micro;  // coefficient of v1 v2 sqrt(mu)
    bool balance_energy = true;
};

struct RunConfig {
    std::vector<int> nx{32};
    double v_max = 6.0;
    int nv = 16;
    std::optional<double> dt;  // empty: cfl_safety * dx / v_max
    double cfl_safety = 0.5;
    double t_end = 1.0;
    Mode mode = Mode::Perturbation;
    double m0 = 0.5;
    int k_max = 2;
    bool conservation_correction = true;
    int field_solves = 1;  // Poisson solves per field substep (1 or 2)
    int output_every = 8;
    double transient_fraction = 0.1;
    CollisionParams collision;
    PoissonOptions poisson;
    InitialDataSpec init;
    std::string cache_dir;

    void validate() const;  // throws ConfigError
    double resolved_dt() const;
};

// Grids, spectral plans and collision tables shared by every step of a run.
class Model {
  public:
    explicit Model(const RunConfig& cfg, std::shared_ptr<const CollisionTables> tables = nullptr);

    const RunConfig& config() const { return cfg_; }
    const SpatialGrid& sgrid() const { return sg_; }
    const VelocityGrid& vgrid() const { return vg_; }
    const Fourier& fourier() const { return *fft_; }
    const CollisionTables& tables() const { return *tables_; }
    std::shared_ptr<const CollisionTables> shared_tables() const { return tables_; }
    const CollisionKernel& pert_kernel() const { return pert_; }
    const CollisionKernel& phys_kernel() const { return phys_; }
    const NullBasis& null_basis() const { return nb_; }

    // L2(x, v) inner products with the cell and velocity volumes
    double dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;
    double norm(const Eigen::MatrixXd& a) const { return std::sqrt(dot(a, a)); }
    double norm_nu(const Eigen::MatrixXd& a) const;

  private:
    RunConfig cfg_;
    SpatialGrid sg_;
    VelocityGrid vg_;
    std::unique_ptr<Fourier> fft_;
    std::shared_ptr<const CollisionTables> tables_;
    CollisionKernel pert_, phys_;
    NullBasis nb_;
};

struct SimState {
    PerturbationField field;
    PotentialState potential;
    double time = 0.0;
    long step_index = 0;
    std::optional<PerturbationField> prev_field;
    std::optional<PotentialState> prev_potential;
    double prev_dt = 0.0;
};

// f in perturbation form whatever the stored mode
Eigen::MatrixXd perturbation_values(const Model& m, const PerturbationField& f);

PotentialState solve_potential(const Model& m, const PerturbationField& f, const ScalarFieldX* guess = nullptr);

// E per velocity axis as N_x vectors; axes beyond the spatial dimension are zero.
std::array<ScalarFieldX, 3> field_components(const Model& m, const std::vector<ScalarFieldX>& e);

// -E . grad_v g + (v/2) . E g, per column
Eigen::MatrixXd force_term(const Model& m, const std::array<ScalarFieldX, 3>& e, const Eigen::MatrixXd& g);
// E . v sqrt(mu)
Eigen::MatrixXd source_term(const Model& m, const std::array<ScalarFieldX, 3>& e);
Eigen::MatrixXd transport_term(const Model& m, const Eigen::MatrixXd& g);  // -v . grad_x g

// Right side of the perturbation equation for df/dt.
Eigen::MatrixXd rhs_perturbation(const Model& m, const Eigen::MatrixXd& f, const std::array<ScalarFieldX, 3>& e);
// Its derivative along (f_dot, e_dot).
Eigen::MatrixXd rhs_tangent(const Model& m, const Eigen::MatrixXd& f, const std::array<ScalarFieldX, 3>& e,
                            const Eigen::MatrixXd& f_dot, const std::array<ScalarFieldX, 3>& e_dot);

}  // namespace ivpb
