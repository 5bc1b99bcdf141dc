#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "ivpb/field_solver.hpp"
#include "ivpb/phase_grid.hpp"

namespace ivpb {

// span{sqrt(mu), v sqrt(mu), |v|^2 sqrt(mu)} with its discrete Gram system.
class NullBasis {
  public:
    explicit NullBasis(const VelocityGrid& vg);

    const Eigen::MatrixXd& vectors() const { return e_; }  // N_v x 5
    const Eigen::Matrix<double, 5, 5>& gram() const { return gram_; }

    // (a, b1, b2, b3, c) per column
    Eigen::MatrixXd coefficients(const Eigen::MatrixXd& g) const;
    Eigen::MatrixXd project(const Eigen::MatrixXd& g) const;

  private:
    double w_;
    Eigen::MatrixXd e_;
    Eigen::Matrix<double, 5, 5> gram_;
    Eigen::LDLT<Eigen::Matrix<double, 5, 5>> ldlt_;
};

struct MacroTriple {
    double a = 0.0;
    std::array<double, 3> b{0.0, 0.0, 0.0};
    double c = 0.0;
};

struct Projection {
    MacroTriple abc;
    Eigen::VectorXd pg;
};

Projection project(const Eigen::Ref<const Eigen::VectorXd>& g, const VelocityGrid& vg);

struct MacroFields {
    ScalarFieldX a, c;
    std::array<ScalarFieldX, 3> b;
    double norm_f = 0.0, norm_p = 0.0, norm_micro = 0.0;  // L2(x, v)
    double pythagoras_defect = 0.0;                        // |‖Pf‖² + ‖(I-P)f‖² - ‖f‖²| / ‖f‖²
};

MacroFields macro_fields(const PerturbationField& f, const VelocityGrid& vg, const SpatialGrid& sg);

// Coefficients in the 13-element basis
// [1, v1, v2, v3, v1^2, v2^2, v3^2, v1v2, v1v3, v2v3, v1|v|^2, v2|v|^2, v3|v|^2] sqrt(mu).
class ThirteenBasis {
  public:
    explicit ThirteenBasis(const VelocityGrid& vg);
    Eigen::MatrixXd coefficients(const Eigen::MatrixXd& g) const;  // 13 x cols
    const Eigen::MatrixXd& vectors() const { return e_; }

  private:
    double w_;
    Eigen::MatrixXd e_;
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
};

class Model;
struct SimState;

// L2(x) residuals of the five coefficient identities obtained by expanding
//   (d_t + v.grad_x) Pf - E.v sqrt(mu) = -(d_t + v.grad_x + L)(I-P)f - E.grad_v f + (v/2).E f + Gamma(f, f)
// in the 13-element basis, in the order
//   grad c, d_t c + d_i b_i, d_i b_j + d_j b_i, d_t b_i + d_i a - E_i, d_t a.
// Time derivatives are the difference quotients over the last step. Backward evaluates the rest at
// the new state, Midpoint at the average of the two states.
struct MacroIdentityResiduals {
    std::array<double, 5> residual{};
    std::array<double, 5> scale{};  // L2 norm of the left side of each identity
};
enum class TimeDifference { Backward, Midpoint };
MacroIdentityResiduals macro_identity_residuals(const Model& m, const SimState& s,
                                                TimeDifference td = TimeDifference::Backward);

}  // namespace ivpb
