#pragma once

#include <array>
#include <vector>

namespace ivpb {

// Octahedral sphere rule whose nodes are primitive lattice directions m/|m|, m in Z^3.
// A velocity node shifted by any integer multiple of m lands on another node, so line and plane
// sums along a direction need no interpolation.
struct SphereQuadrature {
    std::vector<std::array<double, 3>> nodes;
    std::vector<std::array<int, 3>> steps;
    std::vector<double> weights;  // sum to 4*pi
    int degree = 0;               // exact for spherical polynomials up to this degree

    std::size_t size() const { return nodes.size(); }
};

// 6:  <100>                    degree 3
// 14: <100> <111>              degree 5
// 26: <100> <110> <111>        degree 7
// 38: <100> <111> <210>        degree 7
// 50: <100> <110> <111> <210>  degree 9
SphereQuadrature lattice_sphere(int n_nodes);

// Exact integral over S^2 of x^a y^b z^c.
double sphere_monomial(int a, int b, int c);

}  // namespace ivpb
