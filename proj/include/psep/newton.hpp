#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "psep/banded.hpp"

namespace psep::num {

struct NewtonReport {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> damping;    // accepted step fraction per iteration
    std::vector<double> history;    // residual sup-norm, starting with x0
    std::string status;
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
    int max_halvings = 30;
    bool check_jacobian = false;    // finite-difference probe at x0
    double probe_tol = 1e-4;
};

using ResidualFn = std::function<void(const std::vector<double>& x, std::vector<double>& r)>;
using JacobianFn = std::function<BandedMatrix(const std::vector<double>& x)>;

// Damped Newton: halve the step until the residual sup-norm decreases.
// A singular Jacobian at x0 throws SingularMatrixError; later it ends the run
// with converged = false.
std::pair<std::vector<double>, NewtonReport> newton_solve(const ResidualFn& residual,
                                                          const JacobianFn& jacobian,
                                                          std::vector<double> x0,
                                                          const NewtonOptions& opt = {});

// Largest relative mismatch between J v and a centred difference quotient.
double jacobian_probe(const ResidualFn& residual, const BandedMatrix& J,
                      const std::vector<double>& x, unsigned seed = 7);

}  // namespace psep::num
