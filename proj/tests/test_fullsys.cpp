#include <cmath>

#include "doctest.h"
#include "psep/estimate.hpp"
#include "psep/fullsys.hpp"

using namespace psep;

namespace {

struct Setup {
    inner::ProfilePair p = inner::solve_inner_profile(12.0, 2400);
    inner::CorrectionProfile w = inner::solve_W(p);
    limit::ScalarLimitSolution sol =
        limit::solve_limit_scalar(limit::Nonlinearity::cubic(20.0), num::build_grid(2.0, 1.0, 2001, 1));
    lin::LayerBackground bg{sol, p, w};
    ansatz::AnsatzField seed = lin::ansatz_field(bg, 0.1, 3000);
    full::SolutionBranch branch = full::continue_in_beta(seed, sol.f, {1e4, 1e5, 1e6});
};

const Setup& setup()
{
    static const Setup s;
    return s;
}

}  // namespace

TEST_CASE("at beta = 0 the system residual is the scalar residual per component")
{
    const auto& s = setup();
    const auto& g = s.sol.grid;
    Field2 u(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        u.u1[i] = std::sin(1.3 * g.nodes[i]);
        u.u2[i] = g.nodes[i] * (2.0 - g.nodes[i]);
    }
    const Field2 r = full::system_residual(g, s.sol.f, 0.0, u);
    const auto r1 = limit::limit_residual(s.sol.f, g, u.u1), r2 = limit::limit_residual(s.sol.f, g, u.u2);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        CHECK(r.u1[i] == doctest::Approx(r1[i]).epsilon(1e-9));
        CHECK(r.u2[i] == doctest::Approx(r2[i]).epsilon(1e-9));
    }
    const Field2 rb = full::system_residual(g, s.sol.f, 10.0, u);
    for (std::size_t i = 1; i + 1 < g.size(); i += 97)
        CHECK(rb.u1[i] - r.u1[i] == doctest::Approx(10.0 * u.u1[i] * u.u2[i] * u.u2[i]).epsilon(1e-9));
}

TEST_CASE("continuation reaches every scheduled beta with nonnegative components")
{
    const auto& s = setup();
    const auto& br = s.branch;
    CHECK_FALSE(br.truncated);
    REQUIRE(br.points.size() == 3);
    for (std::size_t k = 0; k < br.points.size(); ++k) {
        const auto& p = br.points[k];
        CHECK(p.eps == doctest::Approx(std::pow(p.beta, -0.25)));
        CHECK(p.residual <= 1e-12);
        for (std::size_t i = 0; i < p.u.size(); ++i) CHECK((p.u.u1[i] >= 0.0 && p.u.u2[i] >= 0.0));
        const auto m = full::segregation_metrics(p);
        CHECK(m.interface == doctest::Approx(1.0).epsilon(1e-6));
        if (k > 0) CHECK(m.overlap < full::segregation_metrics(br.points[k - 1]).overlap);
    }
}

TEST_CASE("a converged branch point is a fixed point of the solver")
{
    const auto& s = setup();
    const auto& p = s.branch.points.back();
    const auto again = full::solve_at_beta(p.grid, s.sol.f, p.beta, p.u);
    CHECK(again.newton.iterations == 0);
    CHECK(again.residual <= 1e-12);
}

TEST_CASE("comparison with itself and overlap of a single component")
{
    const auto& s = setup();
    full::BranchPoint p;
    p.beta = 1e4;
    p.eps = 0.1;
    p.grid = s.seed.grid;
    p.u = Field2(s.seed.U1, s.seed.U2);
    const auto d = full::compare_to_ansatz(p, s.seed, s.sol);
    CHECK(d.sup == 0.0);
    p.u.u2.assign(p.u.size(), 0.0);
    CHECK(full::segregation_metrics(p).overlap == 0.0);
}

TEST_CASE("schedule validation")
{
    const auto& s = setup();
    CHECK_THROWS_AS(full::continue_in_beta(s.seed, s.sol.f, {1e6, 1e7}), ValidationError);
    CHECK_THROWS_AS(full::continue_in_beta(s.seed, s.sol.f, {1e4, 1e3}), ValidationError);
    CHECK_THROWS_AS(full::continue_in_beta(s.seed, s.sol.f, {}), ValidationError);
}
