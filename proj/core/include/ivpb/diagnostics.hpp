#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ivpb/model.hpp"

namespace ivpb {

// f_t, f_tt from the equation itself; phi_t, phi_tt from the differentiated Poisson-Poincare equation.
struct TimeDerivatives {
    Eigen::MatrixXd f_t, f_tt;
    ScalarFieldX phi_t, phi_tt;
    std::array<ScalarFieldX, 3> e, e_t, e_tt;
};
TimeDerivatives time_derivatives(const Model& m, const SimState& s, int order);

// d^gamma_beta f for every multi-index with |gamma| + |beta| <= k_max (beta skipped when !velocity).
struct DerivativeField {
    int gamma = 0, beta = 0;  // orders in (t, x) and v
    std::string label;        // e.g. "t x0 v2"
    Eigen::MatrixXd values;
};
std::vector<DerivativeField> derivative_fields(const Model& m, const SimState& s, const TimeDerivatives& td,
                                               int k_max, bool velocity = true);

struct TripleNorms {
    double norm_sq = 0.0, norm_nu_sq = 0.0;  // sums of squared norms over the multi-indices
    std::map<std::pair<int, int>, double> table, table_nu;  // keyed by (|gamma|, |beta|)
};
TripleNorms triple_norms(const Model& m, const std::vector<DerivativeField>& d);
TripleNorms triple_norms(const Model& m, const SimState& s, int k_max);

struct ConservationResiduals {
    double mass = 0.0;
    std::array<double, 3> momentum{0.0, 0.0, 0.0};
    double energy = 0.0;      // kinetic + int phi e^phi + int |grad phi|^2 / 2
    double energy_scale = 0.0;  // sum of the absolute values of those three terms
    double neutrality = 0.0;  // int e^phi - 1
};
ConservationResiduals conservation_residuals(const Model& m, const SimState& s);

// sum ||d f||^2 + sum_{|gamma| <= k_max} (||d grad phi||^2 + ||d phi e^{phi/2}||^2)
double y_lyapunov(const Model& m, const SimState& s, const TimeDerivatives& td, double f_part, int k_max);

struct EnergyReport {
    double t = 0.0;
    double triple_norm_sq = 0.0, triple_norm_nu_sq = 0.0, e_functional = 0.0, y_lyapunov = 0.0;
    ConservationResiduals cons;
    double min_F = 0.0;
    int newton_iters = 0;
    std::map<std::pair<int, int>, double> table;
};

// Accumulates the time integral of the nu-weighted triple norm by the trapezoid rule.
class EnergyMonitor {
  public:
    explicit EnergyMonitor(int k_max) : k_max_(k_max) {}
    EnergyReport observe(const Model& m, const SimState& s);
    double integral() const { return integral_; }

  private:
    int k_max_;
    bool started_ = false;
    double t_last_ = 0.0, nu_last_ = 0.0, integral_ = 0.0;
};

// ---------------------------------------------------------------- operator checks

struct CoercivityEstimate {
    double delta_hat = 0.0;  // min of the two below
    double lanczos = 0.0;    // min Rayleigh quotient on the complement of the null space
    double trials = 0.0;     // min over random micro vectors
    int lanczos_steps = 0;
};
CoercivityEstimate coercivity_estimate(const CollisionTables& t, const VelocityGrid& vg, int trials,
                                       std::uint64_t seed = 1);

// ||L e_k|| / ||e_k|| for sqrt(mu), v_i sqrt(mu), |v|^2 sqrt(mu)
std::array<double, 5> null_space_residuals(const CollisionTables& t, const VelocityGrid& vg);
// ||L - L^T||_F / ||L||_F of the weight-conjugated matrix
double symmetry_defect(const CollisionTables& t, const VelocityGrid& vg);

struct DecayFit {
    double lambda = 0.0, r2 = 0.0, log_c = 0.0;
    double envelope = 0.0;  // max_t y(t) e^{lambda t} / e0
    std::size_t first = 0, last = 0;
    bool floor_hit = false;
};
// Least squares slope of log y against t past the transient window.
DecayFit decay_rate_fit(const std::vector<double>& t, const std::vector<double>& y, double transient_fraction = 0.1,
                        double e0 = 0.0);

// |<Gamma(f, g), h>| / (sup |mu^{-1/4} h| ||f|| ||g||); NaN when the denominator vanishes
double trilinear_ratio(const Model& m, const Eigen::MatrixXd& f, const Eigen::MatrixXd& g, const Eigen::MatrixXd& h);

// sum_gamma (||d a|| + ||d b|| + ||d c||) against sum ||(I-P) d f|| + sqrt(m0) sum ||d f||
struct MacroBound {
    double macro = 0.0, micro = 0.0, total = 0.0, ratio = 0.0;
};
MacroBound macro_bound(const Model& m, const std::vector<DerivativeField>& d, double m0);

// <L g, g> and ||(I-P) g||_nu^2 per derivative field
struct CoercivityOnField {
    std::string label;
    double dissipation = 0.0, micro_nu_sq = 0.0;
};
std::vector<CoercivityOnField> coercivity_on_fields(const Model& m, const std::vector<DerivativeField>& d);

struct PlasmaParams {
    double n_e = 1e20, n_i = 1e20;   // m^-3
    double t_e = 1e4, t_i = 1e4;     // K
    double z_i = 1.0;
    double m_e = 9.1093837015e-31, m_i = 1.67262192369e-27;  // kg
    double ln_lambda = 10.0;
};
struct CollisionFrequencies {
    double ee = 0.0, ei = 0.0, ii = 0.0, ii_over_ee = 0.0;
};
CollisionFrequencies physical_frequencies(const PlasmaParams& p);

}  // namespace ivpb
