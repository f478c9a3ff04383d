#pragma once

#include <string>
#include <vector>

#include "psep/grid.hpp"
#include "psep/newton.hpp"
#include "psep/spline.hpp"

// Scalar limit problem -Lap w = f(w) in the ball/interval, w = 0 on the outer boundary,
// with a single sign change at rho = r0 (w > 0 outside, w < 0 inside).
namespace psep::limit {

// f(u) = sum_k coeffs[k] u^(2k+1)
struct Nonlinearity {
    std::vector<double> coeffs;
    std::string name = "odd-polynomial";

    double f(double u) const;
    double fu(double u) const;

    static Nonlinearity cubic(double mu_f);   // mu_f u - u^3
};

struct SeedSpec {
    // Empty values: scaled second radial Dirichlet eigenfunction with sup-norm amplitude,
    // oriented positive near the outer boundary. Otherwise nodal values on the grid.
    std::vector<double> values;
    double amplitude = 0.0;   // 0 -> sqrt(f'(0)) when positive, else 1
};

struct ScalarLimitSolution {
    num::Grid grid;
    std::vector<double> w;
    double r0 = 0.0;
    double mu = 0.0;
    double r0_linear = 0.0;          // inverse linear interpolation between bracketing nodes
    int sign_changes = 0;
    double residual = 0.0;
    num::NewtonReport newton;
    Nonlinearity f;
    std::vector<double> spectrum_inner;    // (0, r0)
    std::vector<double> spectrum_outer;    // (r0, R)
    std::vector<double> spectrum_full;

    num::CubicSpline interpolant() const;
    // w'(rho) from the spline (used for Hopf checks and outer fields)
};

// Solves on grid, locates r0, re-centres the grid map on r0 and solves once more.
// Throws ValidationError if the converged w does not have exactly one sign change.
ScalarLimitSolution solve_limit_scalar(const Nonlinearity& f, const num::Grid& grid, const SeedSpec& seed = {},
                                       double tol = 1e-9);

// Newton solve on a fixed grid without the interface pass (no separation check).
ScalarLimitSolution solve_on_grid(const Nonlinearity& f, const num::Grid& grid, std::vector<double> w0,
                                  double tol = 1e-9);

struct SeparationReport {
    int sign_changes = 0;
    double r0 = 0.0;
    double mu = 0.0;
    bool pass = false;
    std::string reason;
};

SeparationReport check_separation(const ScalarLimitSolution& sol);

// Counts strict sign changes, ignoring entries with |w| <= floor * max|w|.
int count_sign_changes(const std::vector<double>& w, double floor = 1e-10);

// Interface location (cubic through the 4 nodes around the sign change) and |w'| there.
struct Interface {
    double r0 = 0.0;
    double mu = 0.0;
    double r0_linear = 0.0;
};
Interface locate_interface(const num::Grid& g, const std::vector<double>& w);

// Interface data from w on the solution grid and on its refinement (h/2, old nodes kept),
// combined by Richardson extrapolation for the second-order scheme.
struct ExtrapolatedInterface {
    double r0_h = 0.0, mu_h = 0.0;
    double r0_h2 = 0.0, mu_h2 = 0.0;
    double r0 = 0.0, mu = 0.0;
};
ExtrapolatedInterface extrapolated_interface(const ScalarLimitSolution& sol, double tol = 1e-9);

struct NondegeneracyReport {
    std::vector<double> inner, outer, full;   // k eigenvalues nearest 0 each
    double min_abs = 0.0;
    double max_residual = 0.0;
};

// k eigenvalues nearest 0 of -Lap - f_u(w) on (0, r0), (r0, R) (r0 inserted as a node,
// Dirichlet there) and on the whole domain.
NondegeneracyReport nondegeneracy_spectrum(const ScalarLimitSolution& sol, int k = 3);

// Eigenvalues nearest 0 of -Lap - potential on the grid with Dirichlet at the outer end
// (and at rho = 0 when dim == 1 or the first node is positive).
std::vector<double> radial_schrodinger_eigs(const num::Grid& g, const std::vector<double>& potential, int k,
                                            double* max_residual = nullptr);

// The second Dirichlet eigenfunction of the radial Laplacian, sup-norm 1, positive at
// the last interior node.
std::vector<double> second_radial_mode(const num::Grid& g);

// Discrete residual -Lap w - f(w) (zero rows at Dirichlet nodes).
std::vector<double> limit_residual(const Nonlinearity& f, const num::Grid& g, const std::vector<double>& w);

}  // namespace psep::limit
