#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ivpb/macro_micro.hpp"
#include "ivpb/time_stepper.hpp"
#include "support.hpp"

using namespace ivpb;
constexpr double pi = std::numbers::pi;

TEST_CASE("projection of a null-space element is itself") {
    const VelocityGrid vg(6.0, 12);
    const Eigen::VectorXd v1 = vg.component(0), v3 = vg.component(2);
    const Eigen::VectorXd g =
        (0.3 - 0.2 * v1.array() + 0.7 * v3.array() - 0.1 * vg.speed_sq().array()).matrix().cwiseProduct(vg.sqrt_mu());
    const Projection p = project(g, vg);
    CHECK(p.abc.a == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(p.abc.b[0] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(std::abs(p.abc.b[1]) < 1e-13);
    CHECK(p.abc.b[2] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(p.abc.c == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK((p.pg - g).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Gram coupling of a and c") {
    // |v|^4 sqrt(mu): [[1, 3], [3, 15]] (a, c) = (15, 105) gives a = -15, c = 10
    // v1 |v|^2 sqrt(mu): b1 = E[v1^2 |v|^2] / E[v1^2] = 5
    const VelocityGrid vg(8.0, 32);
    const Eigen::VectorXd v2 = vg.speed_sq();
    const Projection p = project(v2.cwiseProduct(v2).cwiseProduct(vg.sqrt_mu()), vg);
    CHECK(p.abc.a == doctest::Approx(-15.0).epsilon(1e-3));
    CHECK(p.abc.c == doctest::Approx(10.0).epsilon(1e-3));
    CHECK(std::abs(p.abc.b[0]) < 1e-10);
    const Projection q = project(vg.component(0).cwiseProduct(v2).cwiseProduct(vg.sqrt_mu()), vg);
    CHECK(q.abc.b[0] == doctest::Approx(5.0).epsilon(1e-3));
    CHECK(std::abs(q.abc.a) < 1e-10);
    CHECK(std::abs(q.abc.c) < 1e-10);
}

TEST_CASE("projection is an orthogonal idempotent") {
    const VelocityGrid vg(6.0, 10);
    const NullBasis nb(vg);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd g(vg.size(), 3);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
    const Eigen::MatrixXd pg = nb.project(g);
    CHECK((nb.project(pg) - pg).cwiseAbs().maxCoeff() < 1e-12);
    const Eigen::MatrixXd r = g - pg;
    for (int c = 0; c < 3; ++c) CHECK(std::abs(r.col(c).dot(pg.col(c))) < 1e-10 * g.col(c).squaredNorm());
    // <Pg, h> = <g, Ph>
    const double lhs = pg.col(0).dot(g.col(1)), rhs = g.col(0).dot(pg.col(1));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(nb.gram().isApprox(nb.gram().transpose()));
}

TEST_CASE("macro fields of a cosine c profile and Pythagoras") {
    const SpatialGrid sg({16});
    const VelocityGrid vg(6.0, 12);
    PerturbationField f(sg, vg);
    const Eigen::VectorXd e4 = vg.speed_sq().cwiseProduct(vg.sqrt_mu());
    const Eigen::VectorXd micro = vg.component(0).cwiseProduct(vg.component(1)).cwiseProduct(vg.sqrt_mu());
    for (std::size_t i = 0; i < sg.size(); ++i) {
        const double cx = std::cos(2 * pi * sg.coord(i, 0));
        f.values.col(i) = cx * e4 + 0.3 * std::sin(2 * pi * sg.coord(i, 0)) * micro;
    }
    const MacroFields m = macro_fields(f, vg, sg);
    for (std::size_t i = 0; i < sg.size(); ++i) {
        CHECK(m.c[i] == doctest::Approx(std::cos(2 * pi * sg.coord(i, 0))).scale(1.0).epsilon(1e-12));
        CHECK(std::abs(m.a[i]) < 1e-12);
        CHECK(std::abs(m.b[0][i]) < 1e-12);
    }
    CHECK(m.pythagoras_defect < 1e-12);
    CHECK(m.norm_micro > 0.0);
    CHECK(m.norm_f * m.norm_f == doctest::Approx(m.norm_p * m.norm_p + m.norm_micro * m.norm_micro));
    CHECK_THROWS(macro_fields(to_physical(f, vg), vg, sg));
}

TEST_CASE("thirteen-element coefficients") {
    const VelocityGrid vg(6.0, 12);
    const ThirteenBasis tb(vg);
    Eigen::VectorXd coef = Eigen::VectorXd::LinSpaced(13, -1.0, 1.0);
    const Eigen::MatrixXd g = tb.vectors() * coef;
    CHECK((tb.coefficients(g).col(0) - coef).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("macro identity residuals vanish at equilibrium") {
    const RunConfig cfg = test::small_config(16, 8);
    const Model m(cfg, test::tables_for(cfg));
    SimState s;
    s.field = PerturbationField(m.sgrid(), m.vgrid());
    s.potential = solve_potential(m, s.field);
    CHECK_THROWS_AS(macro_identity_residuals(m, s), std::logic_error);
    s.prev_field = s.field;
    s.prev_potential = s.potential;
    s.prev_dt = 0.01;
    for (auto td : {TimeDifference::Backward, TimeDifference::Midpoint}) {
        const auto r = macro_identity_residuals(m, s, td);
        for (double x : r.residual) CHECK(x < 1e-14);
    }
}

TEST_CASE("macro identity residuals after one step are finite") {
    const RunConfig cfg = test::small_config(16, 8);
    const Model m(cfg, test::tables_for(cfg));
    const SimState s0 = build_initial_data(m, cfg.init);
    const SimState s1 = step(m, s0, cfg.resolved_dt());
    REQUIRE(s1.prev_field);
    const auto r = macro_identity_residuals(m, s1, TimeDifference::Midpoint);
    for (int k = 0; k < 5; ++k) {
        CHECK(std::isfinite(r.residual[k]));
        CHECK(r.scale[k] > 0.0);
    }
}
