#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace psep::num {

class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(std::size_t pivot, const std::string& what)
        : std::runtime_error(what), pivot_(pivot) {}
    std::size_t pivot() const { return pivot_; }

private:
    std::size_t pivot_;
};

// Row-wise band storage: row i keeps columns [i-kl, i+ku].
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t n, int kl, int ku);

    std::size_t size() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }

    bool in_band(std::size_t i, std::size_t j) const
    {
        return i < n_ && j < n_ && long(j) >= long(i) - kl_ && long(j) <= long(i) + ku_;
    }
    double get(std::size_t i, std::size_t j) const
    {
        return in_band(i, j) ? ab_[i * width() + (j + kl_ - i)] : 0.0;
    }
    double& at(std::size_t i, std::size_t j);
    void add(std::size_t i, std::size_t j, double v) { at(i, j) += v; }
    void clear_row(std::size_t i);
    void set_identity_row(std::size_t i);

    void matvec(const double* x, double* y) const;
    std::vector<double> operator*(const std::vector<double>& x) const;
    // y = A^T x
    std::vector<double> transpose_mul(const std::vector<double>& x) const;
    double norm_inf() const;
    bool is_symmetric(double rel_tol) const;

    const double* row_data(std::size_t i) const { return &ab_[i * width()]; }
    int width() const { return kl_ + ku_ + 1; }

private:
    std::size_t n_ = 0;
    int kl_ = 0;
    int ku_ = 0;
    std::vector<double> ab_;
};

// Partial-pivoting LU inside the band (upper factor widened by kl).
class BandedLU {
public:
    // Throws SingularMatrixError when a pivot falls below pivot_tol * ||A||_inf.
    explicit BandedLU(const BandedMatrix& A, double pivot_tol = 1e-14);

    std::size_t size() const { return n_; }
    void solve_in_place(std::vector<double>& b) const;
    void solve_transpose_in_place(std::vector<double>& b) const;
    std::vector<double> solve(std::vector<double> b) const
    {
        solve_in_place(b);
        return b;
    }
    double min_abs_pivot() const { return min_pivot_; }

private:
    double& a(std::size_t i, std::size_t j) { return lu_[i * w_ + (j + kl_ - i)]; }
    double a(std::size_t i, std::size_t j) const { return lu_[i * w_ + (j + kl_ - i)]; }

    std::size_t n_;
    int kl_;
    int ku_;
    int w_;
    std::vector<double> lu_;
    std::vector<std::size_t> piv_;
    double min_pivot_ = 0.0;
};

struct SolveInfo {
    double residual = 0.0;       // ||Ax - b||_inf
    double scale = 0.0;          // ||A||_inf ||x||_inf + ||b||_inf
    int refinement_steps = 0;
};

// Factor, solve, refine with extended-precision residuals. Post: residual <= 1e-10 * scale.
std::vector<double> banded_solve(const BandedMatrix& A, const std::vector<double>& rhs,
                                 SolveInfo* info = nullptr);

// Solve with an existing factorization plus iterative refinement against A.
std::vector<double> refined_solve(const BandedMatrix& A, const BandedLU& lu,
                                  const std::vector<double>& rhs, int steps = 2,
                                  SolveInfo* info = nullptr);

// r = b - A x accumulated in long double.
std::vector<double> residual_ld(const BandedMatrix& A, const std::vector<double>& x,
                                const std::vector<double>& b);

// Smallest singular value estimate by inverse iteration on A^T A.
double smallest_singular_value(const BandedMatrix& A, const BandedLU& lu, int iters = 40);

}  // namespace psep::num
