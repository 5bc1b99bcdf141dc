#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ivpb/phase_grid.hpp"
#include "ivpb/quadrature.hpp"

namespace ivpb {

struct CollisionParams {
    int sphere_nodes = 26;
    int kink_order = 3;  // end correction order of the trapezoid sums across the |r| kink

    bool operator==(const CollisionParams&) const = default;
};

// c_0..c_p such that sum_j H|jH| phi(jH) + H^2 sum_{|j|<=p} c_|j| phi(jH) integrates |r| phi(r)
// exactly for even polynomials phi of degree <= 2p (zeta-function end corrections).
std::vector<double> kink_weights(int order);

// One folded antipodal pair of sphere nodes with its lattice lines and planes.
struct LatticeDirection {
    std::array<int, 3> step{};
    double norm = 0.0;    // |step|
    double weight = 0.0;  // sphere weight of the pair
    Eigen::VectorXd s;    // v . omega per node
    std::vector<int> plane;        // plane index per node, ordered by v . omega
    int planes = 0;
    std::vector<int> chain_nodes;  // nodes grouped by line, ordered along omega
    std::vector<int> chain_start;  // offsets into chain_nodes, size = lines + 1
};

// Hard-sphere gain/loss in perturbation (Gamma) or physical (Q) form.
// For each direction the gain factorises into a line sum through v and a plane sum over the
// plane through v perpendicular to omega; both visit lattice nodes only.
class CollisionKernel {
  public:
    CollisionKernel(const VelocityGrid& vg, const SphereQuadrature& sphere, const CollisionParams& p, Mode mode);

    Mode mode() const { return mode_; }
    const VelocityGrid& vgrid() const { return vg_; }
    const SphereQuadrature& sphere() const { return sphere_; }
    const CollisionParams& params() const { return params_; }
    const std::vector<LatticeDirection>& directions() const { return dirs_; }
    // line and plane-offset weights, H^2 (k + c_k) and dt^2 (k + c_k), for direction d
    const std::vector<double>& line_weights(std::size_t d) const { return line_w_[d]; }
    const std::vector<double>& plane_weights(std::size_t d) const { return plane_w_[d]; }

    // Pert: Gamma_gain(g1, g2). Phys: Q_gain(F1, F2). Column-wise over cells.
    Eigen::MatrixXd gain(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2) const;
    // Pert: int int |(v-u).w| sqrt(mu(u)) g(u). Phys: R(F) = int int |(v-u).w| F(u).
    Eigen::MatrixXd rate(const Eigen::MatrixXd& g) const;
    // gain(g1, g2) and rate(g1) sharing the plane sums of g1
    void gain_and_rate(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2, Eigen::MatrixXd& gain,
                       Eigen::MatrixXd& rate) const;

  private:
    VelocityGrid vg_;
    SphereQuadrature sphere_;
    CollisionParams params_;
    Mode mode_;
    std::vector<LatticeDirection> dirs_;
    std::vector<std::vector<double>> line_w_, plane_w_;
};

struct CollisionTables {
    double v_max = 0.0;
    int n = 0;
    CollisionParams params;
    SphereQuadrature sphere;
    Eigen::VectorXd nu;
    Eigen::MatrixXd k;      // K = K2 - K1, symmetric
    double leakage = 0.0;   // 1 - <K2 sqrt(mu), sqrt(mu)> / <2 nu_exact sqrt(mu), sqrt(mu)>
};

double nu_exact(double speed);

Eigen::VectorXd build_nu_table(const VelocityGrid& vg, const SphereQuadrature& sphere,
                               const CollisionParams& p = {});
CollisionTables build_K_matrix(const VelocityGrid& vg, const SphereQuadrature& sphere,
                               const CollisionParams& p = {});

Eigen::VectorXd apply_L(const Eigen::VectorXd& g, const CollisionTables& t);
Eigen::MatrixXd apply_L(const Eigen::MatrixXd& g, const CollisionTables& t);

// Gamma(g1, g2) = Gamma_gain - Gamma_loss, column-wise.
Eigen::MatrixXd gamma(const Eigen::MatrixXd& g1, const Eigen::MatrixXd& g2, const CollisionKernel& kern);
Eigen::VectorXd gamma(const Eigen::VectorXd& g1, const Eigen::VectorXd& g2, const CollisionKernel& kern);

struct PhysicalTerms {
    Eigen::MatrixXd q_gain, loss_rate;
};
PhysicalTerms physical_collision_terms(const Eigen::MatrixXd& F1, const Eigen::MatrixXd& F2,
                                       const CollisionKernel& kern);

// Remove the L2_v projection onto span{sqrt(mu), v sqrt(mu), |v|^2 sqrt(mu)} column-wise.
Eigen::MatrixXd conserve_project(const Eigen::MatrixXd& out, const VelocityGrid& vg);

// Binary cache of assembled tables.
void write_tables(const CollisionTables& t, const std::string& path);
CollisionTables read_tables(const std::string& path);
CollisionTables load_or_build_tables(const VelocityGrid& vg, const CollisionParams& p,
                                     const std::string& cache_dir);

}  // namespace ivpb
