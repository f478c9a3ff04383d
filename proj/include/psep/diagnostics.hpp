#pragma once

#include <functional>
#include <string>
#include <vector>

#include "psep/ansatz.hpp"
#include "psep/common.hpp"
#include "psep/fit.hpp"
#include "psep/grid.hpp"
#include "psep/limit.hpp"

// Checks of the qualitative behaviour the a-priori estimate rests on: exponential
// decay of the wrong component, collapse onto the translation mode in the layer,
// transmission across the interface, and the boundary-collar Schroedinger bounds.
namespace psep::lin {

// C^3 bump (1 - t^2)^4 on |t| < 1, t = (rho - center) / half_width.
double compact_bump(double rho, double center, double half_width);

struct DecayReport {
    num::LinearFit fit;        // log|phi_i| against dist/eps
    double rate = 0.0;         // -slope
    double window_lo = 0.0;    // dist range actually used
    double window_hi = 0.0;
    int nodes = 0;
    bool rejected = false;     // slope not clearly negative
    std::string reason;
};

// Fit of log|phi_component| on dist/eps in [window_start eps, d/2] inside Omega_side (side 1:
// rho > r0, side 2: rho < r0), using nodes above `floor`. Throws ValidationError with fewer
// than 10.
DecayReport decay_diagnostic(const num::Grid& g, const Field2& phi, int component, int side, double eps, double d,
                             double floor = 1e-13, double window_start = 2.0);

struct BlowupReport {
    double c_p = 0.0;          // argmin ||phi - c V'||_2 on |z| <= K
    double residual = 0.0;     // ||phi - c_p V'||_2 / ||phi||_2
    double c_p_c1 = 0.0;       // same for d/dz phi against V''
    double residual_c1 = 0.0;
    int nodes = 0;
};

BlowupReport blowup_profile(const num::Grid& g, const Field2& phi, const ansatz::LayerParams& lp,
                            const ansatz::ProfileEvaluator& prof, double K);

struct ReflectionRow {
    double delta1 = 0.0, delta2 = 0.0;
    double residual1 = 0.0;    // |J(-d2) phi_r(-d2) + J(d1) phi_r(d1)|
    double residual2 = 0.0;    // |J(-d2)(phi - d2 phi_r)(-d2) + J(d1)(phi - d1 phi_r)(d1)|
    double scaled1 = 0.0;      // residual / (d1 + d2)
    double scaled2 = 0.0;
};

struct ReflectionReport {
    double eps = 0.0;
    std::vector<ReflectionRow> rows;   // in the order given
    double growth1 = 0.0;              // scaled at the last pair over the first (floored)
    double growth2 = 0.0;
    bool bounded1 = false;             // growth <= 2
    bool bounded2 = false;
    std::string note;
};

// phi at one eps stands in for the limit object: component 1 on rho > r0, component 2 on
// rho < r0. J(r) = ((r0 + r)/r0)^(dim-1). Throws ValidationError for deltas outside (0, 2 d0).
ReflectionReport reflection_check(const num::Grid& g, const Field2& phi, double eps, double d0,
                                  const std::vector<std::pair<double, double>>& deltas);

// Jacobian factor of the parallel-surface map.
double fermi_jacobian(double r, double r0, int dim);

struct SchrodingerRow {
    double eps = 0.0;
    double ratio1 = 0.0;       // ||phi||_inf / ||g||_inf for -eps^4 Lap phi + w^2 phi = g
    double ratio2 = 0.0;       // same with right-hand side dist^2 g
    double scaled1 = 0.0;      // ratio1 * eps^2
};

struct SchrodingerReport {
    double collar = 0.0;       // width d1 of the boundary collar
    std::vector<SchrodingerRow> rows;
    double spread1 = 0.0;      // max/min of scaled1 over the list
    double spread2 = 0.0;
    bool pass = false;         // both spreads below 2
};

// Dirichlet solve of -eps^4 (phi'' + (dim-1)/rho phi') + potential * phi = rhs on the
// nodes `rho` (phi = 0 at both ends).
std::vector<double> solve_collar_problem(const std::vector<double>& rho, int dim, double eps,
                                         const std::vector<double>& potential, const std::vector<double>& rhs);

// Runs both variants on {R - d1 < rho < R} with w from the limit solution; d1 = 0 picks
// 0.25 (R - r0). g(rho) defaults to 1.
SchrodingerReport schrodinger_estimate_check(const limit::ScalarLimitSolution& sol, const std::vector<double>& eps_list,
                                             const std::function<double(double)>& g = {}, double d1 = 0.0,
                                             int nodes = 4001);

}  // namespace psep::lin
