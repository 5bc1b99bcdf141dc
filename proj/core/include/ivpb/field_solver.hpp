#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ivpb/fourier.hpp"
#include "ivpb/phase_grid.hpp"

namespace ivpb {

struct PoissonOptions {
    double tol = 1e-11;  // on the discrete L2 norm of Lap(phi) - exp(phi) + rho
    int max_iters = 30;
    int max_halvings = 5;
    int krylov_max = 200;
};

struct PotentialState {
    ScalarFieldX phi, exp_phi;
    std::vector<ScalarFieldX> e_field;  // one component per spatial axis
    int newton_iters = 0;
    double residual_norm = 0.0;
    std::vector<double> residual_history;
    double mean_defect = 0.0;  // mean(rho) - 1
};

class PoissonError : public std::runtime_error {
  public:
    PoissonError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

  private:
    std::vector<double> history_;
};

// Mean-zero w with Lap(w) = source - mean(source).
ScalarFieldX solve_linear_poisson(const Fourier& fft, const ScalarFieldX& source, double* mean_removed = nullptr);

// Newton for Lap(phi) = exp(phi) - rho started from the split solve Lap(U) = 1 - rho.
PotentialState solve_poisson_poincare(const Fourier& fft, const ScalarFieldX& rho,
                                      const ScalarFieldX* init_guess = nullptr, const PoissonOptions& opt = {});

// Solve (exp(phi) - Lap) w = rhs, the negated Newton Jacobian, by preconditioned CG.
ScalarFieldX solve_linearized(const Fourier& fft, const ScalarFieldX& exp_phi, const ScalarFieldX& rhs,
                              double rtol = 1e-13, int max_iters = 200);

std::vector<ScalarFieldX> electric_field(const Fourier& fft, const ScalarFieldX& phi);

// Discrete L2 norm on the unit torus.
double l2_norm(const SpatialGrid& sg, const ScalarFieldX& u);
// sqrt of the sum of squared L2 norms of all derivatives of order <= 2, mixed ones included.
double h2_norm(const Fourier& fft, const ScalarFieldX& u);

// rho = 1 + int sqrt(mu) f dv (perturbation) or int F dv (physical), per spatial node.
ScalarFieldX density(const PerturbationField& f, const VelocityGrid& vg);

}  // namespace ivpb
