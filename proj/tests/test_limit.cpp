#include <cmath>

#include "doctest.h"
#include "psep/limit.hpp"
#include "psep/verify.hpp"

using namespace psep;

namespace {

limit::ScalarLimitSolution solve(int dim, int n = 2001)
{
    const double R = dim == 1 ? 2.0 : 1.0;
    const double mu_f = dim == 1 ? 20.0 : (dim == 2 ? 40.0 : 60.0);
    return limit::solve_limit_scalar(limit::Nonlinearity::cubic(mu_f), num::build_grid(R, 0.5 * R, n, dim));
}

}  // namespace

TEST_CASE("nonlinearity evaluation")
{
    const auto f = limit::Nonlinearity::cubic(20.0);
    CHECK(f.f(2.0) == doctest::Approx(32.0));
    CHECK(f.fu(2.0) == doctest::Approx(8.0));
}

TEST_CASE("sign change counting ignores values below the floor")
{
    CHECK(limit::count_sign_changes({1, 2, -1, -2, 3}) == 2);
    CHECK(limit::count_sign_changes({0, 1, 1e-14, -1e-14, 1, 0}) == 0);
    CHECK(limit::count_sign_changes({0, 0, 0}) == 0);
}

TEST_CASE("dim 1 limit solution is odd about the midpoint")
{
    const auto sol = solve(1);
    CHECK(sol.sign_changes == 1);
    CHECK(sol.r0 == doctest::Approx(1.0).epsilon(1e-8));
    const auto& w = sol.w;
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; i += 50) CHECK(std::fabs(w[i] + w[n - 1 - i]) < 1e-8);
    CHECK(sup_norm(limit::limit_residual(sol.f, sol.grid, sol.w)) < 1e-8);
    CHECK(limit::check_separation(sol).pass);
}

TEST_CASE("interface slope agrees with independent RK4 shooting in every dimension")
{
    for (int dim = 1; dim <= 3; ++dim) {
        INFO("dim " << dim);
        const auto sol = solve(dim);
        const auto& g = sol.grid;
        const double guess = dim == 1 ? (sol.w[1] - sol.w[0]) / (g.nodes[1] - g.nodes[0]) : sol.w[0];
        const auto sh = verify::shoot_limit(sol.f, dim, g.R, guess);
        CHECK(sh.sign_changes == 1);
        CHECK(std::fabs(sh.end_value) < 1e-9);
        CHECK(std::fabs(sol.mu - sh.mu) < 1e-3 * sh.mu);
        CHECK(std::fabs(sol.r0 - sh.r0) < 1e-4);
        const auto ex = limit::extrapolated_interface(sol);
        CHECK(std::fabs(ex.mu - sh.mu) < 1e-6);
        CHECK(std::fabs(ex.mu - sh.mu) < std::fabs(sol.mu - sh.mu));
    }
}

TEST_CASE("finite-difference mu converges at second order")
{
    const auto a = solve(2, 501), b = solve(2, 1001), c = solve(2, 2001);
    const double e1 = std::fabs(a.mu - b.mu), e2 = std::fabs(b.mu - c.mu);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("nondegeneracy spectrum stays away from zero")
{
    const auto sol = solve(1);
    const auto nd = limit::nondegeneracy_spectrum(sol, 3);
    CHECK(nd.min_abs > 1e-3);
    CHECK(nd.full.size() == 3);
}

TEST_CASE("second radial mode has one sign change and is positive at the boundary")
{
    const auto g = num::build_grid(1.0, 0.5, 801, 2);
    const auto v = limit::second_radial_mode(g);
    CHECK(limit::count_sign_changes(v) == 1);
    CHECK(v[v.size() - 2] > 0.0);
}

TEST_CASE("a seed without exactly one sign change is rejected")
{
    const auto g = num::build_grid(2.0, 1.0, 801, 1);
    limit::SeedSpec seed;
    for (double r : g.nodes) seed.values.push_back(4.0 * std::sin(0.5 * 3.141592653589793 * r));
    CHECK_THROWS_WITH(limit::solve_limit_scalar(limit::Nonlinearity::cubic(20.0), g, seed),
                      doctest::Contains("sign exactly once"));
}
