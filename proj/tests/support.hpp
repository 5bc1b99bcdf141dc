#pragma once

#include <cmath>
#include <memory>
#include <numbers>

#include "ivpb/collision_ops.hpp"
#include "ivpb/model.hpp"

namespace ivpb::test {

// Small perturbation-mode config; tables are shared per (v_max, nv).
inline RunConfig small_config(int nx = 16, int nv = 8, double v_max = 6.0) {
    RunConfig c;
    c.nx = {nx};
    c.nv = nv;
    c.v_max = v_max;
    c.t_end = 0.05;
    c.init.a = {0.01, 1, 0};
    c.init.micro = {0.002, 1, 0};
    return c;
}

inline std::shared_ptr<const CollisionTables> tables_for(const RunConfig& c) {
    static std::shared_ptr<const CollisionTables> cached;
    if (!cached || cached->n != c.nv || cached->v_max != c.v_max || !(cached->params == c.collision))
        cached = std::make_shared<const CollisionTables>(
            build_K_matrix(VelocityGrid(c.v_max, c.nv), lattice_sphere(c.collision.sphere_nodes), c.collision));
    return cached;
}

inline double gauss1(double v) { return std::exp(-0.5 * v * v) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace ivpb::test
