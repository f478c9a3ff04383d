#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "psep/ansatz.hpp"
#include "psep/banded.hpp"
#include "psep/common.hpp"
#include "psep/grid.hpp"
#include "psep/limit.hpp"

// Linearization of the coupled system about the ansatz, one angular mode at a time:
//   -Lap_m phi1 + eps^-4 U2^2 phi1 + 2 eps^-4 U1 U2 phi2 - f'(U1) phi1 = g1
//   -Lap_m phi2 + eps^-4 U1^2 phi2 + 2 eps^-4 U1 U2 phi1 - f'(U2) phi2 = g2
namespace psep::lin {

// Eigenvalue of -Lap on the unit sphere for mode m: m^2 (dim 2), m(m+1) (dim 3).
// dim 1 only admits m = 0.
double angular_eigenvalue(int dim, int m);

struct ModeOperator {
    int m = 0;
    double eps = 0.0;
    double lambda = 0.0;             // angular eigenvalue
    num::Grid grid;
    num::BandedMatrix matrix;        // interleaved (phi1, phi2), kl = ku = 2
    std::vector<double> pot1, pot2;  // eps^-4 U2^2, eps^-4 U1^2
    std::vector<double> cross;       // 2 eps^-4 U1 U2
    std::vector<double> fu1, fu2;    // f'(U1), f'(U2)
    std::vector<char> dirichlet;     // per node

    std::size_t nodes() const { return grid.size(); }
};

// Raised when the system is numerically singular; carries the smallest singular value
// estimate (or the smallest pivot when the factorization itself broke down).
class NearKernelError : public ConvergenceError {
public:
    NearKernelError(const std::string& what, double sigma_min, double eps, int m)
        : ConvergenceError(what), sigma_min_(sigma_min), eps_(eps), m_(m) {}
    double sigma_min() const { return sigma_min_; }
    double eps() const { return eps_; }
    int mode() const { return m_; }

private:
    double sigma_min_, eps_;
    int m_;
};

// Throws ValidationError when the layer has fewer than 10 nodes per eps near the
// interface (the message names the node count needed) or m is invalid for dim.
ModeOperator assemble_linearized(const ansatz::AnsatzField& U, const limit::Nonlinearity& f, int m);

// Continuous-operator action on a nodal field; Dirichlet rows return phi itself.
Field2 apply_operator(const ModeOperator& L, const Field2& phi);

struct SolveReport {
    double residual = 0.0;       // ||L phi - g||_inf / (||L|| ||phi|| + ||g||)
    double sigma_min = -1.0;     // only when requested
    double min_pivot = 0.0;
    int refinement_steps = 0;
};

// g is sampled on the operator grid; entries at Dirichlet nodes are ignored (phi = 0 there).
Field2 solve_linearized(const ModeOperator& L, const Field2& g, SolveReport* report = nullptr,
                        bool estimate_sigma = false);

double smallest_singular_value(const ModeOperator& L);

// Residual budget below which a solve is accepted.
inline constexpr double solve_tolerance = 1e-9;

}  // namespace psep::lin
