#pragma once

#include <string>
#include <vector>

#include "psep/grid.hpp"
#include "psep/inner.hpp"
#include "psep/limit.hpp"
#include "psep/spline.hpp"

// Two-component approximate solution at a given eps: layer profiles near the
// interface, the limit field away from it, quintic blend in between.
namespace psep::ansatz {

struct LayerParams {
    double eps = 0.0;
    double b0 = 0.0;        // sqrt(mu / A)
    double b_tilde = 0.0;
    double zeta = 0.0;
    double H0 = 0.0;        // layer curvature coefficient (dim-1)/r0
    double r0 = 0.0;
    double d0 = 0.0;        // collar widths, fractions of min(r0, R - r0)
    double d = 0.0;
    double bound = 10.0;    // allowed |b_tilde|, |zeta|

    double b() const { return b0 + eps * b_tilde; }
    double inner_radius() const;   // eps |ln eps|
};

// d0 = 0.5 min(r0, R-r0), d = 0.5 d0. Validates eps in (0, 0.2] and that the
// blend collar 2 eps |ln eps| fits inside 2 d0.
LayerParams make_layer_params(const limit::ScalarLimitSolution& sol, const inner::ProfilePair& p, double eps,
                              double b_tilde = 0.0, double zeta = 0.0);
void validate(const LayerParams& lp);

double stretched_coordinate(double r, const LayerParams& lp);
double unstretch(double z, const LayerParams& lp);

// Profiles off the stored mesh (cubic splines) with asymptotic tails beyond [-L, L].
// V2(z) = V1(-z) and W2(z) = -W1(-z) hold exactly.
class ProfileEvaluator {
public:
    ProfileEvaluator() = default;
    ProfileEvaluator(const inner::ProfilePair& p, const inner::CorrectionProfile& w);

    double V1(double z) const;
    double V2(double z) const { return V1(-z); }
    double dV1(double z) const;
    double dV2(double z) const { return -dV1(-z); }
    double W1(double z) const;
    double W2(double z) const { return -W1(-z); }

    double A() const { return A_; }
    double B() const { return B_; }
    double L() const { return L_; }

private:
    num::CubicSpline v1_, w1_;
    double A_ = 0.0, B_ = 0.0, L_ = 0.0, drift_ = 0.0;
};

enum class Region { Inner, Blend, Outer1, Outer2 };
std::string region_name(Region r);

struct AnsatzPoint {
    double U1 = 0.0, U2 = 0.0;
    double inner1 = 0.0, inner2 = 0.0;   // eps b V + eps^2 H0 W
    double z = 0.0;
    Region tag = Region::Inner;
};

// Evaluates the composite at any radius. The eps^2 H0 W term of each component is
// switched off smoothly deep in its decaying tail, where it would overtake eps b V.
class Ansatz {
public:
    Ansatz(const limit::ScalarLimitSolution& sol, const inner::ProfilePair& p, const inner::CorrectionProfile& w,
           const LayerParams& lp);

    AnsatzPoint at(double rho) const;
    const LayerParams& params() const { return lp_; }
    const ProfileEvaluator& profiles() const { return prof_; }
    double outer_w(double rho) const { return w_.value(rho); }
    double R() const { return R_; }
    double taper() const { return taper_; }
    double curvature_weight(double z) const;   // for component 1; component 2 uses -z

private:
    num::CubicSpline w_;
    ProfileEvaluator prof_;
    LayerParams lp_;
    double R_ = 0.0;
    double taper_ = 0.0;
};

struct AnsatzField {
    num::Grid grid;
    std::vector<double> U1, U2;
    std::vector<Region> tags;
    LayerParams params;
    int clamped = 0;               // entries in [-1e-14, 0) set to 0
    double min_before_clamp = 0.0;
};

// Throws ValidationError if b0 != sqrt(mu/A) to 1e-10, the collar does not fit, or a
// value below -1e-14 appears.
AnsatzField assemble_ansatz(const limit::ScalarLimitSolution& sol, const inner::ProfilePair& p,
                            const inner::CorrectionProfile& w, const LayerParams& lp, const num::Grid& grid);

// Max over blend seams of |one-sided second difference (left) - (right)|.
struct SeamReport {
    double max_jump = 0.0;
    double spacing = 0.0;          // local spacing at the worst seam
};
SeamReport seam_smoothness(const AnsatzField& U);

// sup of |-Lap U_i - f(U_i) + eps^-4 U_i U_j^2| over interior nodes, per component.
struct NonlinearResidual {
    double sup1 = 0.0, sup2 = 0.0;
};
NonlinearResidual nonlinear_residual(const AnsatzField& U, const limit::Nonlinearity& f);

struct BoundFamily {
    std::string name;
    std::vector<double> eps;
    std::vector<double> constant;  // smallest C realizing the bound at each eps
    bool grows = false;            // C(smallest eps) > 1.5 C(largest eps), ignoring C < 1e-8
};

struct RemainderReport {
    std::vector<BoundFamily> families;
    bool all_bounded() const;
};

// Q_i = U_i - (eps b V_i + eps^2 H0 W_i) on the collar |r| < 2 eps|ln eps| for each eps.
RemainderReport verify_remainders(const limit::ScalarLimitSolution& sol, const inner::ProfilePair& p,
                                  const inner::CorrectionProfile& w, const std::vector<double>& eps_list,
                                  double b_tilde = 0.0, double zeta = 0.0);

}  // namespace psep::ansatz
