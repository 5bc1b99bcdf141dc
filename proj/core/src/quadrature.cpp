#include "ivpb/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ivpb {

double sphere_monomial(int a, int b, int c) {
    if (a % 2 || b % 2 || c % 2) return 0.0;
    const double ga = std::tgamma(0.5 * (a + 1)), gb = std::tgamma(0.5 * (b + 1)),
                 gc = std::tgamma(0.5 * (c + 1));
    return 2.0 * ga * gb * gc / std::tgamma(0.5 * (a + b + c + 3));
}

namespace {

std::vector<std::array<int, 3>> orbit(std::array<int, 3> base) {
    std::set<std::array<int, 3>> out;
    std::sort(base.begin(), base.end());
    do {
        for (int s = 0; s < 8; ++s)
            out.insert({(s & 1 ? -1 : 1) * base[0], (s & 2 ? -1 : 1) * base[1], (s & 4 ? -1 : 1) * base[2]});
    } while (std::next_permutation(base.begin(), base.end()));
    return {out.begin(), out.end()};
}

}  // namespace

SphereQuadrature lattice_sphere(int n_nodes) {
    std::vector<std::array<int, 3>> classes;
    int degree = 0;
    switch (n_nodes) {
        case 6: classes = {{0, 0, 1}}; degree = 3; break;
        case 14: classes = {{0, 0, 1}, {1, 1, 1}}; degree = 5; break;
        case 26: classes = {{0, 0, 1}, {0, 1, 1}, {1, 1, 1}}; degree = 7; break;
        case 38: classes = {{0, 0, 1}, {1, 1, 1}, {0, 1, 2}}; degree = 7; break;
        case 50: classes = {{0, 0, 1}, {0, 1, 1}, {1, 1, 1}, {0, 1, 2}}; degree = 9; break;
        default: throw std::invalid_argument("sphere rule must have 6, 14, 26, 38 or 50 nodes");
    }
    std::vector<std::vector<std::array<int, 3>>> orbits;
    for (const auto& c : classes) orbits.push_back(orbit(c));

    // One weight per orbit from the even monomials up to the degree.
    std::vector<std::array<int, 3>> mons;
    for (int d = 0; d < degree; d += 2)
        for (int a = 0; a <= d; a += 2)
            for (int b = 0; a + b <= d; b += 2) mons.push_back({a, b, d - a - b});
    Eigen::MatrixXd A(mons.size(), orbits.size());
    Eigen::VectorXd rhs(mons.size());
    for (std::size_t r = 0; r < mons.size(); ++r) {
        rhs[r] = sphere_monomial(mons[r][0], mons[r][1], mons[r][2]);
        for (std::size_t k = 0; k < orbits.size(); ++k) {
            double s = 0.0;
            for (const auto& m : orbits[k]) {
                const double nm = std::sqrt(double(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]));
                s += std::pow(m[0] / nm, mons[r][0]) * std::pow(m[1] / nm, mons[r][1]) *
                     std::pow(m[2] / nm, mons[r][2]);
            }
            A(r, k) = s;
        }
    }
    const Eigen::VectorXd w = A.colPivHouseholderQr().solve(rhs);
    if ((A * w - rhs).norm() > 1e-12 * rhs.norm())
        throw std::logic_error("sphere rule moment system is inconsistent");

    SphereQuadrature q;
    q.degree = degree;
    for (std::size_t k = 0; k < orbits.size(); ++k)
        for (const auto& m : orbits[k]) {
            const double nm = std::sqrt(double(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]));
            q.steps.push_back(m);
            q.nodes.push_back({m[0] / nm, m[1] / nm, m[2] / nm});
            q.weights.push_back(w[k]);
        }
    if (static_cast<int>(q.size()) != n_nodes) throw std::logic_error("sphere rule size mismatch");
    return q;
}

}  // namespace ivpb
