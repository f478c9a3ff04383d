#include <atomic>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "psep/banded.hpp"
#include "psep/common.hpp"
#include "psep/fit.hpp"
#include "psep/grid.hpp"
#include "psep/newton.hpp"
#include "psep/radial.hpp"
#include "psep/spectrum.hpp"
#include "psep/spline.hpp"

#ifdef PSEP_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace psep;
using num::BandedMatrix;

namespace {

BandedMatrix random_banded(std::size_t n, int kl, int ku, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    BandedMatrix A(n, kl, ku);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (A.in_band(i, j)) A.at(i, j) = u(rng) + (i == j ? 4.0 : 0.0);
    return A;
}

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(const BandedMatrix& A, std::vector<double> b)
{
    const std::size_t n = A.size();
    std::vector<double> M(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) M[i * n + j] = A.get(i, j);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(M[i * n + k]) > std::fabs(M[p * n + k])) p = i;
        for (std::size_t j = 0; j < n; ++j) std::swap(M[k * n + j], M[p * n + j]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = M[i * n + k] / M[k * n + k];
            for (std::size_t j = k; j < n; ++j) M[i * n + j] -= f * M[k * n + j];
            b[i] -= f * b[k];
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = k + 1; j < n; ++j) b[k] -= M[k * n + j] * b[j];
        b[k] /= M[k * n + k];
    }
    return b;
}

// 1D Dirichlet Laplacian on (0, pi) with n interior nodes.
BandedMatrix laplacian_1d(std::size_t n, double h)
{
    BandedMatrix A(n, 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        A.at(i, i) = 2.0 / (h * h);
        if (i > 0) A.at(i, i - 1) = -1.0 / (h * h);
        if (i + 1 < n) A.at(i, i + 1) = -1.0 / (h * h);
    }
    return A;
}

}  // namespace

TEST_CASE("banded LU matches dense elimination")
{
    for (auto [kl, ku] : {std::pair{1, 1}, std::pair{2, 2}, std::pair{3, 1}, std::pair{0, 2}}) {
        const std::size_t n = 37;
        const BandedMatrix A = random_banded(n, kl, ku, unsigned(7 * kl + ku));
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) b[i] = std::sin(double(i) + 0.3);
        const std::vector<double> x = num::BandedLU(A).solve(b);
        const std::vector<double> y = dense_solve(A, b);
        for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-12));
    }
}

TEST_CASE("banded transpose solve and matvec round trip")
{
    const BandedMatrix A = random_banded(25, 2, 1, 3);
    std::vector<double> x(25);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 + 0.1 * double(i);
    const num::BandedLU lu(A);
    std::vector<double> b = A * x;
    CHECK(sup_norm(num::residual_ld(A, lu.solve(b), b)) < 1e-12);
    std::vector<double> bt = A.transpose_mul(x);
    lu.solve_transpose_in_place(bt);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(bt[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("singular banded matrix raises with the pivot index")
{
    BandedMatrix A(4, 1, 1);
    A.at(0, 0) = 1.0;
    A.at(1, 1) = 1.0;
    A.at(3, 3) = 1.0;
    CHECK_THROWS_AS(num::BandedLU{A}, num::SingularMatrixError);
}

#ifdef PSEP_HAVE_EIGEN
TEST_CASE("banded LU agrees with a dense Eigen factorization")
{
    const std::size_t n = 50;
    const BandedMatrix A = random_banded(n, 2, 2, 11);
    Eigen::MatrixXd D(n, n);
    Eigen::VectorXd b(n);
    std::vector<double> bv(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) D(i, j) = A.get(i, j);
        bv[i] = b(i) = std::cos(0.7 * double(i));
    }
    const Eigen::VectorXd y = D.partialPivLu().solve(b);
    const std::vector<double> x = num::BandedLU(A).solve(bv);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(y(i)).epsilon(1e-12));
}

TEST_CASE("smallest eigenpairs agree with a dense Eigen solve")
{
    const std::size_t n = 60;
    BandedMatrix A(n, 1, 1);
    for (std::size_t i = 0; i < n; ++i) {
        A.at(i, i) = 3.0 + 0.5 * std::sin(double(i));
        if (i > 0) A.at(i, i - 1) = A.at(i - 1, i) = -1.0;
    }
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) D(i, j) = A.get(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    const auto eig = num::smallest_eigenpairs(A, 3, 0.0);
    std::vector<double> got;
    for (const auto& e : eig) got.push_back(e.value);
    std::sort(got.begin(), got.end());
    for (int k = 0; k < 3; ++k) CHECK(got[k] == doctest::Approx(es.eigenvalues()(k)).epsilon(1e-8));
}
#endif

TEST_CASE("Dirichlet Laplacian spectrum matches the discrete sine modes")
{
    const std::size_t n = 199;
    const double h = std::numbers::pi / double(n + 1);
    const auto eig = num::smallest_eigenpairs(laplacian_1d(n, h), 3, 0.0);
    std::vector<double> got;
    for (const auto& e : eig) got.push_back(e.value);
    std::sort(got.begin(), got.end());
    for (int k = 1; k <= 3; ++k) {
        const double exact_discrete = 4.0 / (h * h) * std::pow(std::sin(k * h / 2.0), 2);
        CHECK(got[k - 1] == doctest::Approx(exact_discrete).epsilon(1e-9));
        CHECK(got[k - 1] == doctest::Approx(double(k * k)).epsilon(1e-3));
    }
    // first eigenvector is sin(x) up to scale
    const auto& v = eig.front().value <= eig.back().value ? eig.front() : eig.back();
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::fabs(std::fabs(v.vector[i]) - std::sin(h * double(i + 1))));
    CHECK(err < 1e-3);
}

TEST_CASE("Jacobi eigen on a 2x2 symmetric matrix")
{
    std::vector<double> vals, vecs;
    num::jacobi_eigen({2.0, 1.0, 1.0, 2.0}, 2, vals, vecs);
    std::sort(vals.begin(), vals.end());
    CHECK(vals[0] == doctest::Approx(1.0));
    CHECK(vals[1] == doctest::Approx(3.0));
}

TEST_CASE("damped Newton solves a banded cubic system")
{
    const std::size_t n = 20;
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = 1.0 + double(i);
    // x_i^3 + 0.1 (x_{i-1} + x_{i+1}) - a_i = 0
    auto res = [&](const std::vector<double>& x, std::vector<double>& r) {
        r.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = x[i] * x[i] * x[i] + 0.1 * ((i > 0 ? x[i - 1] : 0.0) + (i + 1 < n ? x[i + 1] : 0.0)) - a[i];
    };
    auto jac = [&](const std::vector<double>& x) {
        BandedMatrix J(n, 1, 1);
        for (std::size_t i = 0; i < n; ++i) {
            J.at(i, i) = 3.0 * x[i] * x[i];
            if (i > 0) J.at(i, i - 1) = 0.1;
            if (i + 1 < n) J.at(i, i + 1) = 0.1;
        }
        return J;
    };
    num::NewtonOptions opt;
    opt.check_jacobian = true;
    opt.tol = 1e-13;
    auto [x, rep] = num::newton_solve(res, jac, std::vector<double>(n, 1.0), opt);
    CHECK(rep.converged);
    std::vector<double> r;
    res(x, r);
    CHECK(sup_norm(r) <= 1e-13);
    CHECK(jacobian_probe(res, jac(x), x) < 1e-6);
}

TEST_CASE("radial Laplacian is exact on quadratics")
{
    for (int dim = 1; dim <= 3; ++dim) {
        const num::Grid g = num::build_grid(1.0, 0.5, 301, dim, 0.05);
        std::vector<double> u(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) u[i] = g.nodes[i] * g.nodes[i];
        const auto lap = num::apply_radial_laplacian(u, g);
        for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(lap[i] == doctest::Approx(2.0 * dim).epsilon(1e-7));
        const auto fermi = num::apply_fermi_laplacian(u, g);
        for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(fermi[i] == doctest::Approx(lap[i]).epsilon(1e-9));
    }
}

TEST_CASE("radial Laplacian converges at second order on a smooth field")
{
    // u = cos(rho) in dim 3: Lap u = -cos(rho) - 2 sin(rho)/rho
    double err[2];
    int k = 0;
    for (int n : {201, 401}) {
        const num::Grid g = num::build_grid(1.0, 0.5, n, 3);
        std::vector<double> u(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) u[i] = std::cos(g.nodes[i]);
        const auto lap = num::apply_radial_laplacian(u, g);
        double e = 0.0;
        for (std::size_t i = 1; i + 1 < g.size(); ++i) {
            const double r = g.nodes[i];
            e = std::max(e, std::fabs(lap[i] - (-std::cos(r) - 2.0 * std::sin(r) / r)));
        }
        err[k++] = e;
    }
    CHECK(err[0] / err[1] > 3.5);
}

TEST_CASE("grid construction")
{
    const num::Grid g = num::build_grid(2.0, 1.0, 2001, 1, 0.01);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 2.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.nodes[i] > g.nodes[i - 1]);
    CHECK(g.max_spacing_near(1.0, 0.01) <= 0.001 + 1e-15);
    const num::Grid f = num::refine(g);
    REQUIRE(f.size() == 2 * g.size() - 1);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(f.nodes[2 * i] == doctest::Approx(g.nodes[i]).epsilon(1e-14));
    CHECK_THROWS(num::grid_from_nodes({0.0, 0.5, 0.4, 1.0}, 0.5, 1));
}

TEST_CASE("clamped cubic spline reproduces a cubic")
{
    std::vector<double> x, y;
    for (int i = 0; i <= 20; ++i) {
        const double t = -1.0 + 0.1 * i + 0.01 * std::sin(double(i));
        x.push_back(t);
        y.push_back(t * t * t - 2.0 * t + 0.5);
    }
    x.back() = 1.0;
    y.back() = -0.5;
    const num::CubicSpline s(x, y, 3.0 * x.front() * x.front() - 2.0, 1.0);
    for (double t : {-0.95, -0.3, 0.0, 0.41, 0.99}) {
        CHECK(s.value(t) == doctest::Approx(t * t * t - 2.0 * t + 0.5).epsilon(1e-12));
        CHECK(s.d1(t) == doctest::Approx(3.0 * t * t - 2.0).epsilon(1e-11));
        CHECK(s.d2(t) == doctest::Approx(6.0 * t).epsilon(1e-10));
    }
}

TEST_CASE("linear fit recovers an exact line")
{
    std::vector<double> x{1, 2, 3, 4, 5}, y;
    for (double t : x) y.push_back(3.0 - 2.0 * t);
    const num::LinearFit f = num::linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(-2.0));
    CHECK(f.intercept == doctest::Approx(3.0));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("random streams are reproducible and parallel_for covers every index")
{
    UniformStream a(42, 1, 7), b(42, 1, 7), c(42, 1, 8);
    const double x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
}
