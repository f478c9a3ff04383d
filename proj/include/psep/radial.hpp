#pragma once

#include <vector>

#include "psep/grid.hpp"

namespace psep::num {

// Three-point coefficients per node: (op u)_i = lo[i] u[i-1] + di[i] u[i] + up[i] u[i+1].
struct Stencil3 {
    std::vector<double> lo, di, up;
};

// Nonuniform second-order first and second derivative stencils at interior nodes.
// Rows 0 and n-1 are left zero.
Stencil3 first_derivative_stencil(const Grid& g);
Stencil3 second_derivative_stencil(const Grid& g);

// d2/drho2 + (dim-1)/rho d/drho. For dim >= 2 and a node at rho = 0 row 0 is the
// regularity limit 2*dim*(u1 - u0)/h^2; otherwise row 0 stays zero. Row n-1 is zero.
Stencil3 radial_laplacian_stencil(const Grid& g);

// Interior (and regularity) values of the radial Laplacian; boundary entries are 0.
std::vector<double> apply_radial_laplacian(const std::vector<double>& field, const Grid& g);

// Mean curvature of the parallel sphere at signed distance r from rho = r0,
// with principal curvatures -1/r0 for the outward normal.
double fermi_curvature(double r, double r0, int dim);

// Same discrete derivatives combined as d2/dr2 - H(r) d/dr. Agrees with
// apply_radial_laplacian to rounding at interior nodes.
std::vector<double> apply_fermi_laplacian(const std::vector<double>& field, const Grid& g);

// Convenience: apply a Stencil3 to a field (rows with zero coefficients give 0).
std::vector<double> apply_stencil(const Stencil3& s, const std::vector<double>& u);

}  // namespace psep::num
