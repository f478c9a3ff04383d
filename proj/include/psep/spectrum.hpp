#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "psep/banded.hpp"

namespace psep::num {

struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;   // sup-norm 1, largest entry positive
    double residual = 0.0;        // ||A v - lambda v|| / ||v|| (2-norms)
};

struct EigenOptions {
    double tol = 1e-8;
    int max_iter = 400;
    int restarts = 3;
};

class EigenConvergenceError : public std::runtime_error {
public:
    EigenConvergenceError(int index, const std::string& what)
        : std::runtime_error(what), index_(index) {}
    int stagnant_index() const { return index_; }

private:
    int index_;
};

// k eigenpairs of A nearest to shift, sorted by |lambda - shift|.
// A must be symmetric, or tridiagonal with positive products a(i,i+1)a(i+1,i)
// (diagonally symmetrizable). With mass, solves A v = lambda diag(mass) v for
// symmetric A and positive mass.
std::vector<EigenPair> smallest_eigenpairs(const BandedMatrix& A, int k, double shift,
                                           const std::vector<double>* mass = nullptr,
                                           const EigenOptions& opt = {});

// Cyclic Jacobi on a dense symmetric n x n matrix (row-major). Eigenvalues
// ascending, eigenvectors stored column-wise in vecs.
void jacobi_eigen(std::vector<double> a, int n, std::vector<double>& vals, std::vector<double>& vecs);

}  // namespace psep::num
