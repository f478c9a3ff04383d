#pragma once

#include <string>
#include <vector>

#include "psep/ansatz.hpp"
#include "psep/common.hpp"
#include "psep/grid.hpp"
#include "psep/limit.hpp"
#include "psep/newton.hpp"

// The coupled nonlinear system
//   -Lap u1 = f(u1) - beta u1 u2^2,  -Lap u2 = f(u2) - beta u2 u1^2,
// u = 0 on the outer boundary, solved by Newton continuation in beta.
namespace psep::full {

struct BetaSolve {
    Field2 u;
    num::NewtonReport newton;
    double residual = 0.0;     // ||F||_inf / (||J||_inf max(1, ||u||_inf)) at the solution
};

// Residual scale is fixed from the initial guess so Newton sees one consistent norm.
BetaSolve solve_at_beta(const num::Grid& g, const limit::Nonlinearity& f, double beta, const Field2& guess,
                        double tol = 1e-12, int max_iter = 30);

// Unscaled residual F(u) on the grid; boundary rows hold u itself.
Field2 system_residual(const num::Grid& g, const limit::Nonlinearity& f, double beta, const Field2& u);

struct BranchPoint {
    double beta = 0.0;
    double eps = 0.0;          // beta^(-1/4)
    num::Grid grid;
    Field2 u;
    int iterations = 0;
    double residual = 0.0;
    double min_value = 0.0;    // before clamping
    int clamped = 0;           // entries in [-1e-12, 0) set to 0
};

struct SolutionBranch {
    std::vector<BranchPoint> points;   // beta strictly increasing
    bool truncated = false;
    std::string diagnostic;            // why the branch stopped early
    std::vector<std::string> warnings;
    int bisections = 0;                // intermediate betas inserted
};

struct ContinuationOptions {
    double tol = 1e-12;
    int max_iter = 30;
    int max_bisection_levels = 3;
};

// schedule[0] must match the seed eps through beta = eps^-4 within 10%. The grid is
// re-clustered (same node count) whenever the interface spacing exceeds eps/10.
SolutionBranch continue_in_beta(const ansatz::AnsatzField& seed, const limit::Nonlinearity& f,
                                const std::vector<double>& schedule, const ContinuationOptions& opt = {});

struct AnsatzDiscrepancy {
    double sup1 = 0.0, sup2 = 0.0;
    double sup = 0.0;
    double outer = 0.0;        // |r| >= d
    double collar = 0.0;       // |r| < d, divided by eps
    double difference_vs_limit = 0.0;   // ||(u1 - u2) - w||_inf
};

// U is interpolated onto the branch grid when the grids differ.
AnsatzDiscrepancy compare_to_ansatz(const BranchPoint& p, const ansatz::AnsatzField& U,
                                    const limit::ScalarLimitSolution& sol);

struct SegregationMetrics {
    double overlap = 0.0;          // int u1^2 u2^2 rho^(dim-1) drho
    double interface = 0.0;        // crossing u1 = u2 (the one with the most mass)
    double width = 0.0;            // span of u1 u2 >= 0.1 max(u1 u2) around its peak
    double width_over_eps = 0.0;
};

SegregationMetrics segregation_metrics(const BranchPoint& p);

}  // namespace psep::full
