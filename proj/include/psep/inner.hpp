#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "psep/common.hpp"
#include "psep/newton.hpp"

// Layer profiles on a uniform mesh over [-L, L]:
//   -V1'' + V1 V2^2 = 0, -V2'' + V2 V1^2 = 0, V1(0) = V2(0) = 1,
// V1 ~ A z + B as z -> +inf, V1 -> 0 as z -> -inf, V2(z) = V1(-z).
namespace psep::inner {

enum class Scheme {
    Numerov,   // fourth order, used for everything downstream
    Central,   // second order, used by the kernel check
};

struct ProfilePair {
    std::vector<double> z;
    std::vector<double> V1, V2;
    std::vector<double> dV1, dV2;   // derivative on the nodes (same order as the scheme)
    double A = 0.0;
    double B = 0.0;
    double L = 0.0;
    double h = 0.0;
    double residual = 0.0;          // sup-norm of the discrete system at the solution
    double symmetry = 0.0;          // max |V1(z) - V2(-z)|
    double far_slope = 0.0;         // imposed far-field slope that yields V1(0) = 1
    double fit_residual = 0.0;
    int newton_iterations = 0;
    int secant_iterations = 0;
    Scheme scheme = Scheme::Numerov;

    std::size_t size() const { return z.size(); }
    std::size_t center() const { return z.size() / 2; }
};

// n = number of mesh intervals (even), so h = 2L/n.
ProfilePair solve_inner_profile(double L, int n, double tol = 1e-10, Scheme scheme = Scheme::Numerov);

struct Asymptotics {
    double A = 0.0;
    double B = 0.0;
    double fit_residual = 0.0;
    std::size_t count = 0;
};

// [0.6 L, min(0.9 L, L - 1)]
std::pair<double, double> default_fit_window(double L);

// Affine fit of V1 on the window; the window must lie in [L/2, L-1] and hold >= 20 nodes.
Asymptotics extract_asymptotics(const ProfilePair& p, double z_lo, double z_hi);
Asymptotics extract_asymptotics(const ProfilePair& p);

// Linearization applied with second-order differences; boundary entries are 0.
Field2 apply_M(const ProfilePair& p, const Field2& u);

// Same operator in the fourth-order compact form:
//   -(u[i+1] - 2u[i] + u[i-1])/h^2 + (Pu[i-1] + 10 Pu[i] + Pu[i+1])/12.
// extra (optional) is added to the potential matrix.
struct Coupling {
    std::vector<double> p11, p12, p22;
};
Field2 apply_M_compact(const ProfilePair& p, const Field2& u, const Coupling* extra = nullptr);
// Compact average (r[i-1] + 10 r[i] + r[i+1])/12 at interior nodes, 0 at the ends.
std::vector<double> compact_average(const std::vector<double>& r);

struct CorrectionProfile {
    std::vector<double> z;
    std::vector<double> W1, W2;
    double residual = 0.0;          // compact-form residual of M W = V' (solver residual)
    double antisymmetry = 0.0;      // max |W1(z) + W2(-z)|
    double drift = 0.0;             // fitted slope of W1 + z^2 V1'/2 on the fit window
    double intercept = 0.0;         // fitted intercept (gauge drives it to 0)
    double far_field_deviation = 0.0;        // max |W1 + z^2 V1'/2| for z >= z_far
    double corrected_deviation = 0.0;        // max |W1 + z^2 V1'/2 - drift z| for z >= z_far
    double z_far = 0.0;
    double far_value = 0.0;         // imposed W1(L)
};

// Solves M W = V' with W1(-L) = 0, W2(L) = 0, W2(-L) = -W1(L), and W1(L) chosen so the
// far-field intercept of W1 + z^2 V1'/2 vanishes. Does not throw on far-field deviations;
// they are reported.
CorrectionProfile solve_W(const ProfilePair& p, double tol = 1e-9, double z_far = 8.0);

// N(W) = [[V2 W2, V1 W2 + V2 W1], [V1 W2 + V2 W1, V1 W1]]
Coupling correction_coupling(const ProfilePair& p, const CorrectionProfile& w);

struct HatProfiles {
    std::vector<double> z;
    std::vector<double> Phi1, Phi2, Psi1, Psi2;
    double a = 0.0;                 // far-field constant of Phi1
    double b_const = 0.0;           // far-field slope of Psi1
    double residual = 0.0;
    double phi_symmetry = 0.0;      // max |Phi1(-z) - Phi2(z)|
    double psi_antisymmetry = 0.0;  // max |Psi1(-z) + Psi2(z)|
    double phi_far_deviation = 0.0; // max over z in [L/3, 0.9 L] of |Phi1 - a| + |Phi2|
    double psi_far_deviation = 0.0; // same with Psi1 - b z
};

HatProfiles solve_kernel_corrections(const ProfilePair& p, const CorrectionProfile& w, double tol = 1e-9);

struct RefinedKernel {
    Field2 Phi, Psi;
    double eps = 0.0;
    double coefficient = 0.0;       // 2 eps H0 / b
};

RefinedKernel build_refined_kernel(const ProfilePair& p, const CorrectionProfile& w, const HatProfiles& hats,
                                   double eps, double b_geom, double H0);

// Residual of the perturbed operator M + 2 eps H0/b N(W) applied to u, compact form.
Field2 apply_M_tilde(const ProfilePair& p, const CorrectionProfile& w, double eps, double b_geom, double H0,
                     const Field2& u);

struct KernelCheck {
    std::vector<double> eigenvalues;    // nearest to 0, sorted by magnitude
    int near_zero = 0;                  // count with |lambda| <= threshold
    double correlation = 0.0;           // |<v, V'>| / (|v||V'|) for the smallest one
    double gap = 0.0;                   // |lambda_2|
    double threshold = 1e-6;
};

// Second-order linearization about a second-order profile. Dirichlet on the decaying
// component and a half-cell Neumann closure on the growing one at each end.
KernelCheck kernel_check(double L, int n, int k = 3, double threshold = 1e-6);

// Fourth-order derivative of a compact-scheme profile at the nodes.
std::vector<double> profile_derivative(const std::vector<double>& U, const std::vector<double>& F, double h);

}  // namespace psep::inner
