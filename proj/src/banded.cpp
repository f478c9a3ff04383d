#include "psep/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace psep::num {

BandedMatrix::BandedMatrix(std::size_t n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ab_(n * std::size_t(kl + ku + 1), 0.0)
{
    if (kl < 0 || ku < 0) throw std::invalid_argument("bandwidths must be non-negative");
}

double& BandedMatrix::at(std::size_t i, std::size_t j)
{
    if (!in_band(i, j)) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << ") outside band kl=" << kl_ << " ku=" << ku_;
        throw std::out_of_range(os.str());
    }
    return ab_[i * width() + (j + kl_ - i)];
}

void BandedMatrix::clear_row(std::size_t i)
{
    std::fill(ab_.begin() + i * width(), ab_.begin() + (i + 1) * width(), 0.0);
}

void BandedMatrix::set_identity_row(std::size_t i)
{
    clear_row(i);
    at(i, i) = 1.0;
}

void BandedMatrix::matvec(const double* x, double* y) const
{
    const int w = width();
    for (std::size_t i = 0; i < n_; ++i) {
        long j0 = long(i) - kl_;
        const double* row = &ab_[i * w];
        double s = 0.0;
        for (int k = 0; k < w; ++k) {
            long j = j0 + k;
            if (j < 0 || j >= long(n_)) continue;
            s += row[k] * x[j];
        }
        y[i] = s;
    }
}

std::vector<double> BandedMatrix::operator*(const std::vector<double>& x) const
{
    if (x.size() != n_) throw std::invalid_argument("matvec size mismatch");
    std::vector<double> y(n_);
    matvec(x.data(), y.data());
    return y;
}

std::vector<double> BandedMatrix::transpose_mul(const std::vector<double>& x) const
{
    std::vector<double> y(n_, 0.0);
    const int w = width();
    for (std::size_t i = 0; i < n_; ++i) {
        long j0 = long(i) - kl_;
        for (int k = 0; k < w; ++k) {
            long j = j0 + k;
            if (j < 0 || j >= long(n_)) continue;
            y[j] += ab_[i * w + k] * x[i];
        }
    }
    return y;
}

double BandedMatrix::norm_inf() const
{
    double m = 0.0;
    const int w = width();
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (int k = 0; k < w; ++k) s += std::abs(ab_[i * w + k]);
        m = std::max(m, s);
    }
    return m;
}

bool BandedMatrix::is_symmetric(double rel_tol) const
{
    double scale = std::max(norm_inf(), 1e-300);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = i + 1; j < n_ && long(j) <= long(i) + std::max(kl_, ku_); ++j)
            if (std::abs(get(i, j) - get(j, i)) > rel_tol * scale) return false;
    return true;
}

BandedLU::BandedLU(const BandedMatrix& A, double pivot_tol)
    : n_(A.size()), kl_(A.kl()), ku_(A.ku()), w_(2 * A.kl() + A.ku() + 1),
      lu_(A.size() * std::size_t(2 * A.kl() + A.ku() + 1), 0.0), piv_(A.size())
{
    for (std::size_t i = 0; i < n_; ++i)
        for (long j = std::max(0L, long(i) - kl_); j <= std::min(long(n_) - 1, long(i) + ku_); ++j)
            a(i, j) = A.get(i, j);

    const double anorm = A.norm_inf();
    const double thresh = pivot_tol * anorm;
    min_pivot_ = std::numeric_limits<double>::infinity();
    const int upper = ku_ + kl_;
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t last = std::min(n_ - 1, k + std::size_t(kl_));
        std::size_t p = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i <= last; ++i)
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                p = i;
            }
        if (!(best > thresh) || best == 0.0) {
            std::ostringstream os;
            os << "matrix singular to tolerance at pivot " << k << " (|pivot|=" << best << ", ||A||=" << anorm << ")";
            throw SingularMatrixError(k, os.str());
        }
        min_pivot_ = std::min(min_pivot_, best);
        piv_[k] = p;
        std::size_t jend = std::min(n_ - 1, k + std::size_t(upper));
        if (p != k)
            for (std::size_t j = k; j <= jend; ++j) std::swap(a(k, j), a(p, j));
        const double inv = 1.0 / a(k, k);
        for (std::size_t i = k + 1; i <= last; ++i) {
            double l = a(i, k) * inv;
            a(i, k) = l;
            if (l == 0.0) continue;
            for (std::size_t j = k + 1; j <= jend; ++j) a(i, j) -= l * a(k, j);
        }
    }
}

void BandedLU::solve_in_place(std::vector<double>& b) const
{
    if (b.size() != n_) throw std::invalid_argument("rhs size mismatch");
    for (std::size_t k = 0; k < n_; ++k) {
        if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
        std::size_t last = std::min(n_ - 1, k + std::size_t(kl_));
        for (std::size_t i = k + 1; i <= last; ++i) b[i] -= a(i, k) * b[k];
    }
    const std::size_t upper = std::size_t(ku_ + kl_);
    for (std::size_t ii = n_; ii-- > 0;) {
        double s = b[ii];
        std::size_t jend = std::min(n_ - 1, ii + upper);
        for (std::size_t j = ii + 1; j <= jend; ++j) s -= a(ii, j) * b[j];
        b[ii] = s / a(ii, ii);
    }
}

void BandedLU::solve_transpose_in_place(std::vector<double>& b) const
{
    if (b.size() != n_) throw std::invalid_argument("rhs size mismatch");
    const std::size_t upper = std::size_t(ku_ + kl_);
    // U^T y = b
    for (std::size_t i = 0; i < n_; ++i) {
        double s = b[i];
        std::size_t j0 = i > upper ? i - upper : 0;
        for (std::size_t j = j0; j < i; ++j) s -= a(j, i) * b[j];
        b[i] = s / a(i, i);
    }
    // L^T and the row interchanges, in reverse
    for (std::size_t kk = n_; kk-- > 0;) {
        std::size_t last = std::min(n_ - 1, kk + std::size_t(kl_));
        double s = b[kk];
        for (std::size_t i = kk + 1; i <= last; ++i) s -= a(i, kk) * b[i];
        b[kk] = s;
        if (piv_[kk] != kk) std::swap(b[kk], b[piv_[kk]]);
    }
}

std::vector<double> residual_ld(const BandedMatrix& A, const std::vector<double>& x,
                                const std::vector<double>& b)
{
    const std::size_t n = A.size();
    std::vector<double> r(n);
    const int w = A.width();
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = A.row_data(i);
        long j0 = long(i) - A.kl();
        long double s = b[i];
        for (int k = 0; k < w; ++k) {
            long j = j0 + k;
            if (j < 0 || j >= long(n)) continue;
            s -= (long double)row[k] * (long double)x[j];
        }
        r[i] = double(s);
    }
    return r;
}

namespace {
double sup(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}
}  // namespace

std::vector<double> refined_solve(const BandedMatrix& A, const BandedLU& lu,
                                  const std::vector<double>& rhs, int steps, SolveInfo* info)
{
    std::vector<double> x = lu.solve(rhs);
    int used = 0;
    double res = sup(residual_ld(A, x, rhs));
    for (int s = 0; s < steps; ++s) {
        std::vector<double> r = residual_ld(A, x, rhs);
        lu.solve_in_place(r);
        std::vector<double> xn(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) xn[i] = x[i] + r[i];
        double resn = sup(residual_ld(A, xn, rhs));
        if (!(resn < res)) break;
        x.swap(xn);
        res = resn;
        ++used;
    }
    if (info) {
        info->residual = res;
        info->scale = A.norm_inf() * sup(x) + sup(rhs);
        info->refinement_steps = used;
    }
    return x;
}

std::vector<double> banded_solve(const BandedMatrix& A, const std::vector<double>& rhs, SolveInfo* info)
{
    if (rhs.size() != A.size()) throw std::invalid_argument("rhs size mismatch");
    BandedLU lu(A);
    SolveInfo local;
    std::vector<double> x = refined_solve(A, lu, rhs, 2, &local);
    if (local.residual > 1e-10 * local.scale) {
        std::ostringstream os;
        os << "banded solve residual " << local.residual << " exceeds 1e-10 * " << local.scale;
        throw std::runtime_error(os.str());
    }
    if (info) *info = local;
    return x;
}

double smallest_singular_value(const BandedMatrix& A, const BandedLU& lu, int iters)
{
    const std::size_t n = A.size();
    std::vector<double> v(n);
    // deterministic start with all modes present
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * std::sin(0.7 * double(i) + 0.3);
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        double nv = 0.0;
        for (double x : v) nv += x * x;
        nv = std::sqrt(nv);
        for (double& x : v) x /= nv;
        std::vector<double> y = v;
        lu.solve_transpose_in_place(y);   // (A^T)^{-1} v
        lu.solve_in_place(y);             // A^{-1} (A^T)^{-1} v = (A^T A)^{-1} v
        double ny = 0.0;
        for (double x : y) ny += x * x;
        lambda = std::sqrt(ny);
        v.swap(y);
    }
    // lambda approximates 1/sigma_min^2
    return lambda > 0.0 ? 1.0 / std::sqrt(lambda) : 0.0;
}

}  // namespace psep::num
