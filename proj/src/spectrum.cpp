#include "psep/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "psep/kernels.hpp"

namespace psep::num {

void jacobi_eigen(std::vector<double> a, int n, std::vector<double>& vals, std::vector<double>& vecs)
{
    vecs.assign(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) vecs[i * n + i] = 1.0;
    auto A = [&](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) (i == j ? diag : off) += A(i, j) * A(i, j);
        if (off <= 1e-30 * std::max(diag, 1e-300)) break;
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = A(p, q);
                if (apq == 0.0) continue;
                double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = vecs[k * n + p], vkq = vecs[k * n + q];
                    vecs[k * n + p] = c * vkp - s * vkq;
                    vecs[k * n + q] = s * vkp + c * vkq;
                }
            }
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int x, int y) { return A(x, x) < A(y, y); });
    vals.resize(n);
    std::vector<double> sorted(std::size_t(n) * n);
    for (int c = 0; c < n; ++c) {
        vals[c] = A(idx[c], idx[c]);
        for (int k = 0; k < n; ++k) sorted[k * n + c] = vecs[k * n + idx[c]];
    }
    vecs.swap(sorted);
}

namespace {

struct Symmetrized {
    BandedMatrix S;
    std::vector<double> d;   // y = d .* v
};

Symmetrized symmetrize(const BandedMatrix& A, const std::vector<double>* mass)
{
    const std::size_t n = A.size();
    Symmetrized out;
    out.d.assign(n, 1.0);
    if (mass) {
        if (mass->size() != n) throw std::invalid_argument("mass size mismatch");
        if (!A.is_symmetric(1e-12)) throw std::invalid_argument("generalized eigenproblem needs symmetric A");
        for (std::size_t i = 0; i < n; ++i) {
            if (!((*mass)[i] > 0.0)) throw std::invalid_argument("mass must be positive");
            out.d[i] = std::sqrt((*mass)[i]);
        }
    } else if (!A.is_symmetric(1e-13)) {
        if (A.kl() > 1 || A.ku() > 1)
            throw std::invalid_argument("non-symmetric matrix with bandwidth > 1 is not diagonally symmetrizable here");
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double up = A.get(i, i + 1), lo = A.get(i + 1, i);
            if (up == 0.0 && lo == 0.0) {
                out.d[i + 1] = 1.0;
                continue;
            }
            if (!(up * lo > 0.0)) throw std::invalid_argument("tridiagonal matrix not symmetrizable (off-diagonal product <= 0)");
            out.d[i + 1] = out.d[i] * std::sqrt(lo / up);
        }
    }
    out.S = BandedMatrix(n, A.kl(), A.ku());
    for (std::size_t i = 0; i < n; ++i)
        for (long j = std::max(0L, long(i) - A.kl()); j <= std::min(long(n) - 1, long(i) + A.ku()); ++j) {
            double v = A.get(i, j);
            if (v == 0.0) continue;
            out.S.at(i, j) = mass ? v / (out.d[i] * out.d[j]) : out.d[i] * v / out.d[j];
        }
    if (!mass && A.kl() <= 1 && A.ku() <= 1) {
        // exact symmetry for the tridiagonal transform
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double s = 0.5 * (out.S.get(i, i + 1) + out.S.get(i + 1, i));
            if (out.S.in_band(i, i + 1)) out.S.at(i, i + 1) = s;
            if (out.S.in_band(i + 1, i)) out.S.at(i + 1, i) = s;
        }
    }
    return out;
}

double norm2(const std::vector<double>& v) { return std::sqrt(kern::dot(v.data(), v.data(), v.size())); }

double original_residual(const BandedMatrix& A, const std::vector<double>* mass,
                         const std::vector<double>& v, double lambda)
{
    std::vector<double> av = A * v;
    std::vector<double> mv = v;
    if (mass)
        for (std::size_t i = 0; i < v.size(); ++i) mv[i] *= (*mass)[i];
    double num = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double r = av[i] - lambda * mv[i];
        num += r * r;
    }
    return std::sqrt(num) / std::max(norm2(mv), 1e-300);
}

void normalize_sup(std::vector<double>& v)
{
    double big = 0.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > big) {
            big = std::abs(v[i]);
            at = i;
        }
    if (big == 0.0) return;
    double s = v[at] > 0 ? 1.0 / big : -1.0 / big;
    for (double& x : v) x *= s;
}

// modified Gram-Schmidt, applied twice; columns stored as separate vectors
void orthonormalize(std::vector<std::vector<double>>& Y)
{
    const std::size_t n = Y.empty() ? 0 : Y[0].size();
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < Y.size(); ++j) {
            for (std::size_t i = 0; i < j; ++i) {
                double c = kern::dot(Y[i].data(), Y[j].data(), n);
                for (std::size_t k = 0; k < n; ++k) Y[j][k] -= c * Y[i][k];
            }
            double nr = norm2(Y[j]);
            if (nr == 0.0) {
                // replace a collapsed column by a fresh deterministic vector
                for (std::size_t k = 0; k < n; ++k) Y[j][k] = std::sin(double(k + 1) * (0.37 + 0.11 * double(j)));
                --j;
                continue;
            }
            for (double& x : Y[j]) x /= nr;
        }
}

}  // namespace

std::vector<EigenPair> smallest_eigenpairs(const BandedMatrix& A, int k, double shift,
                                           const std::vector<double>* mass, const EigenOptions& opt)
{
    const std::size_t n = A.size();
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (std::size_t(k) > n) throw std::invalid_argument("k exceeds matrix size");
    Symmetrized sym = symmetrize(A, mass);
    const BandedMatrix& S = sym.S;

    auto finish = [&](std::vector<std::pair<double, std::vector<double>>>& ritz) {
        std::vector<EigenPair> out;
        for (int j = 0; j < k; ++j) {
            EigenPair p;
            p.value = ritz[j].first;
            p.vector = ritz[j].second;
            for (std::size_t i = 0; i < n; ++i) p.vector[i] /= sym.d[i];
            normalize_sup(p.vector);
            p.residual = original_residual(A, mass, p.vector, p.value);
            out.push_back(std::move(p));
        }
        return out;
    };

    const int p = int(std::min<std::size_t>(n, std::size_t(k) + 3));

    if (n <= std::size_t(2 * p + 4)) {
        std::vector<double> dense(n * n, 0.0), vals, vecs;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dense[i * n + j] = S.get(i, j);
        jacobi_eigen(dense, int(n), vals, vecs);
        std::vector<std::pair<double, std::vector<double>>> ritz;
        for (std::size_t c = 0; c < n; ++c) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = vecs[i * n + c];
            ritz.emplace_back(vals[c], std::move(v));
        }
        std::stable_sort(ritz.begin(), ritz.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.first - shift) < std::abs(b.first - shift);
        });
        return finish(ritz);
    }

    // shift-invert factor; nudge the shift if it hits the spectrum exactly
    double sigma = shift;
    std::unique_ptr<BandedLU> lu;
    for (int attempt = 0; attempt < 4 && !lu; ++attempt) {
        BandedMatrix Ss = S;
        for (std::size_t i = 0; i < n; ++i) Ss.add(i, i, -sigma);
        try {
            lu = std::make_unique<BandedLU>(Ss, 1e-15);
        } catch (const SingularMatrixError&) {
            sigma += 1e-9 * std::max(1.0, S.norm_inf()) * double(attempt + 1);
        }
    }
    if (!lu) throw std::runtime_error("shift-invert factorization failed near shift");

    const double Snorm = std::max(S.norm_inf(), 1e-300);
    int stagnant = 0;
    for (int restart = 0; restart < opt.restarts; ++restart) {
        std::vector<std::vector<double>> Y(p, std::vector<double>(n));
        for (int j = 0; j < p; ++j)
            for (std::size_t i = 0; i < n; ++i)
                Y[j][i] = std::sin(double(i + 1) * (0.7 + 0.31 * j + 0.173 * restart)) + 0.01 * double(j + 1);
        orthonormalize(Y);
        std::vector<std::pair<double, std::vector<double>>> ritz;
        for (int it = 0; it < opt.max_iter; ++it) {
            for (auto& y : Y) lu->solve_in_place(y);
            orthonormalize(Y);
            std::vector<std::vector<double>> SY(p);
            for (int j = 0; j < p; ++j) SY[j] = S * Y[j];
            std::vector<double> T(std::size_t(p) * p), vals, vecs;
            for (int a = 0; a < p; ++a)
                for (int b = 0; b < p; ++b) T[a * p + b] = kern::dot(Y[a].data(), SY[b].data(), n);
            for (int a = 0; a < p; ++a)
                for (int b = a + 1; b < p; ++b) T[a * p + b] = T[b * p + a] = 0.5 * (T[a * p + b] + T[b * p + a]);
            jacobi_eigen(T, p, vals, vecs);
            ritz.clear();
            for (int c = 0; c < p; ++c) {
                std::vector<double> v(n, 0.0);
                for (int a = 0; a < p; ++a) {
                    double q = vecs[a * p + c];
                    for (std::size_t i = 0; i < n; ++i) v[i] += q * Y[a][i];
                }
                ritz.emplace_back(vals[c], std::move(v));
            }
            std::stable_sort(ritz.begin(), ritz.end(), [&](const auto& a, const auto& b) {
                return std::abs(a.first - shift) < std::abs(b.first - shift);
            });
            for (int j = 0; j < p; ++j) Y[j] = ritz[j].second;
            bool all = true;
            for (int j = 0; j < k; ++j) {
                std::vector<double> r = S * ritz[j].second;
                double num = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double e = r[i] - ritz[j].first * ritz[j].second[i];
                    num += e * e;
                }
                double res = std::sqrt(num);
                if (res > 0.05 * opt.tol && res > 64 * 2.2e-16 * Snorm) {
                    all = false;
                    stagnant = j;
                    break;
                }
            }
            if (all) {
                std::vector<EigenPair> out = finish(ritz);
                bool ok = true;
                // the residual cannot drop below rounding in S v
                const double accept = std::max(opt.tol, 64 * 2.2e-16 * Snorm);
                for (int j = 0; j < k; ++j)
                    if (out[j].residual > accept) {
                        ok = false;
                        stagnant = j;
                    }
                if (ok) return out;
            }
        }
    }
    std::ostringstream os;
    os << "eigensolver did not converge: pair " << stagnant << " stagnated near shift " << shift;
    throw EigenConvergenceError(stagnant, os.str());
}

}  // namespace psep::num
