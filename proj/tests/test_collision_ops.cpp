#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "ivpb/collision_ops.hpp"
#include "ivpb/diagnostics.hpp"
#include "ivpb/macro_micro.hpp"
#include "support.hpp"

using namespace ivpb;
constexpr double pi = std::numbers::pi;

namespace {

struct Fixture {
    VelocityGrid vg{6.0, 16};
    CollisionParams p;
    CollisionTables t = build_K_matrix(vg, lattice_sphere(26), p);
    CollisionKernel pert{vg, lattice_sphere(26), p, Mode::Perturbation};
    CollisionKernel phys{vg, lattice_sphere(26), p, Mode::Physical};
};

const Fixture& fx() {
    static const Fixture f;
    return f;
}

Eigen::MatrixXd random_columns(const VelocityGrid& vg, int cols, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd g(vg.size(), cols);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
    // keep the tails tame so the products stay in the resolved range
    return (g.array().colwise() * vg.mu().array().pow(0.25)).matrix();
}

}  // namespace

TEST_CASE("collision frequency closed form") {
    CHECK(nu_exact(0.0) == doctest::Approx(4.0 * std::sqrt(2.0 * pi)).epsilon(1e-14));
    CHECK(nu_exact(0.0) == doctest::Approx(10.0265).epsilon(1e-5));
    for (double v : {20.0, 40.0}) CHECK(nu_exact(v) / (2 * pi * v) == doctest::Approx(1.0).epsilon(1.0 / (v * v)));
    // increasing in |v|
    double last = 0.0;
    for (double v = 0.0; v < 8.0; v += 0.25) {
        CHECK(nu_exact(v) > last);
        last = nu_exact(v);
    }
}

TEST_CASE("kink weights correct the trapezoid sum of |r| phi") {
    // int |r| exp(-r^2) dr = 1
    auto corrected = [](int order, double H) {
        const auto c = kink_weights(order);
        REQUIRE(c.size() == std::size_t(order + 1));
        double s = 0.0;
        for (int j = -200; j <= 200; ++j) s += H * std::abs(j * H) * std::exp(-j * H * j * H);
        s += H * H * c[0];
        for (int k = 1; k <= order; ++k) s += 2.0 * H * H * c[k] * std::exp(-k * H * k * H);
        return s;
    };
    CHECK(kink_weights(0)[0] == doctest::Approx(1.0 / 6.0));
    const double e0 = std::abs(corrected(0, 0.1) - 1.0);
    const double e3a = std::abs(corrected(3, 0.2) - 1.0), e3b = std::abs(corrected(3, 0.1) - 1.0);
    CHECK(e0 < 1e-5);
    CHECK(e3b < 1e-9);
    CHECK(e3a / e3b > 100.0);
    CHECK_THROWS(kink_weights(6));
}

TEST_CASE("nu table against the closed form") {
    const auto& f = fx();
    double num = 0.0, den = 0.0;
    for (std::size_t q = 0; q < f.vg.size(); ++q) {
        const double e = f.t.nu[q] - nu_exact(std::sqrt(f.vg.speed_sq()[q]));
        num += f.vg.mu()[q] * e * e;
        den += f.vg.mu()[q] * f.t.nu[q] * f.t.nu[q];
    }
    CHECK(std::sqrt(num / den) < 1e-3);
    CHECK(f.t.nu.minCoeff() > 0.0);
    CHECK(f.t.leakage < 1e-3);
}

TEST_CASE("linearized operator: symmetry, null space, nonnegativity") {
    const auto& f = fx();
    CHECK(symmetry_defect(f.t, f.vg) < 1e-10);
    for (double r : null_space_residuals(f.t, f.vg)) CHECK(r < 1e-2);
    const Eigen::MatrixXd g = random_columns(f.vg, 4, 7);
    const Eigen::MatrixXd Lg = apply_L(g, f.t);
    for (int c = 0; c < 4; ++c) {
        CHECK(Lg.col(c).dot(g.col(c)) > 0.0);
        CHECK((apply_L(Eigen::VectorXd(g.col(c)), f.t) - Lg.col(c)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("nonlinear term: zero arguments and the global maxwellian") {
    const auto& f = fx();
    const Eigen::MatrixXd g = random_columns(f.vg, 2, 3);
    const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    CHECK(gamma(g, z, f.pert).cwiseAbs().maxCoeff() == 0.0);
    CHECK(gamma(z, g, f.pert).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd s = f.vg.sqrt_mu();
    Eigen::MatrixXd gain, rate;
    f.pert.gain_and_rate(s, s, gain, rate);
    CHECK(gamma(s, s, f.pert).norm() < 1e-3 * gain.norm());
    CHECK((rate.col(0) - f.t.nu).cwiseAbs().maxCoeff() < 1e-12 * f.t.nu.maxCoeff());
}

TEST_CASE("nonlinear term is bilinear") {
    const auto& f = fx();
    const Eigen::MatrixXd g = random_columns(f.vg, 1, 11), h = random_columns(f.vg, 1, 12),
                          k = random_columns(f.vg, 1, 13);
    const Eigen::MatrixXd lhs = gamma(Eigen::MatrixXd(2.0 * g + h), k, f.pert);
    const Eigen::MatrixXd rhs = 2.0 * gamma(g, k, f.pert) + gamma(h, k, f.pert);
    CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
    const Eigen::MatrixXd lhs2 = gamma(k, Eigen::MatrixXd(g - 3.0 * h), f.pert);
    const Eigen::MatrixXd rhs2 = gamma(k, g, f.pert) - 3.0 * gamma(k, h, f.pert);
    CHECK((lhs2 - rhs2).norm() < 1e-12 * rhs2.norm());
}

TEST_CASE("physical gain and loss rate") {
    const auto& f = fx();
    const Eigen::MatrixXd mu = f.vg.mu();
    const PhysicalTerms pt = physical_collision_terms(mu, mu, f.phys);
    CHECK((pt.loss_rate.col(0) - f.t.nu).cwiseAbs().maxCoeff() < 1e-12 * f.t.nu.maxCoeff());
    // Q_gain(mu, mu) = nu mu at equilibrium, up to quadrature error
    CHECK((pt.q_gain.col(0) - mu.col(0).cwiseProduct(f.t.nu)).norm() < 1e-3 * pt.q_gain.norm());
    CHECK(pt.q_gain.minCoeff() >= 0.0);

    const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(f.vg.size(), 1);
    const PhysicalTerms p0 = physical_collision_terms(z, z, f.phys);
    CHECK(p0.q_gain.cwiseAbs().maxCoeff() == 0.0);
    CHECK(p0.loss_rate.cwiseAbs().maxCoeff() == 0.0);

    Eigen::MatrixXd neg = mu;
    neg(5, 0) = -1e-3;
    CHECK_THROWS_AS(physical_collision_terms(neg, mu, f.phys), std::domain_error);
    CHECK_THROWS_AS(physical_collision_terms(mu, mu, f.pert), std::invalid_argument);
    CHECK_THROWS_AS(gamma(mu, mu, f.phys), std::invalid_argument);
}

TEST_CASE("physical gain keeps nonnegative inputs nonnegative") {
    const auto& f = fx();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd F(f.vg.size(), 2);
    for (Eigen::Index i = 0; i < F.size(); ++i) F.data()[i] = u(rng) * f.vg.mu()[i % f.vg.size()];
    const PhysicalTerms pt = physical_collision_terms(F, F, f.phys);
    CHECK(pt.q_gain.minCoeff() >= 0.0);
    CHECK(pt.loss_rate.minCoeff() >= 0.0);
}

TEST_CASE("conservation projection") {
    const auto& f = fx();
    const Eigen::MatrixXd g = random_columns(f.vg, 3, 21);
    const Eigen::MatrixXd p = conserve_project(g, f.vg);
    const NullBasis nb(f.vg);
    const Eigen::MatrixXd moments = nb.vectors().transpose() * (p.array().colwise() * f.vg.weights().array()).matrix();
    CHECK(moments.cwiseAbs().maxCoeff() < 1e-13);
    CHECK((conserve_project(p, f.vg) - p).cwiseAbs().maxCoeff() < 1e-13);
    // null vectors are removed entirely
    CHECK(conserve_project(nb.vectors(), f.vg).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("table cache round trip") {
    const VelocityGrid vg(5.0, 8);
    const CollisionParams p{14, 2};
    const auto dir = std::filesystem::temp_directory_path() / "ivpb_table_test";
    std::filesystem::remove_all(dir);
    const CollisionTables a = load_or_build_tables(vg, p, dir.string());
    REQUIRE(std::filesystem::exists(dir / "ktab_v5_n8_s14_k2.bin"));
    const CollisionTables b = load_or_build_tables(vg, p, dir.string());
    CHECK(b.n == 8);
    CHECK(b.v_max == 5.0);
    CHECK(b.params == p);
    CHECK(b.sphere.size() == 14u);
    CHECK(b.leakage == a.leakage);
    CHECK(b.nu == a.nu);
    CHECK(b.k == a.k);
    {
        std::ofstream bad(dir / "junk.bin", std::ios::binary);
        bad << "not a table";
    }
    CHECK_THROWS(read_tables((dir / "junk.bin").string()));
    std::filesystem::remove_all(dir);
}
