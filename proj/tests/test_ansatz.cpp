#include <cmath>

#include "doctest.h"
#include "psep/ansatz.hpp"
#include "psep/estimate.hpp"

using namespace psep;

namespace {

struct Setup {
    inner::ProfilePair p = inner::solve_inner_profile(12.0, 2400);
    inner::CorrectionProfile w = inner::solve_W(p);
    limit::ScalarLimitSolution sol1 =
        limit::solve_limit_scalar(limit::Nonlinearity::cubic(20.0), num::build_grid(2.0, 1.0, 2001, 1));
    limit::ScalarLimitSolution sol2 =
        limit::solve_limit_scalar(limit::Nonlinearity::cubic(40.0), num::build_grid(1.0, 0.5, 2001, 2));
};

const Setup& setup()
{
    static const Setup s;
    return s;
}

}  // namespace

TEST_CASE("layer parameters follow from the limit slope and the profile")
{
    const auto& s = setup();
    const auto lp = ansatz::make_layer_params(s.sol2, s.p, 0.05);
    CHECK(lp.b0 == doctest::Approx(std::sqrt(s.sol2.mu / s.p.A)).epsilon(1e-12));
    CHECK(lp.H0 == doctest::Approx(1.0 / s.sol2.r0).epsilon(1e-12));
    CHECK(lp.d0 == doctest::Approx(0.5 * std::min(s.sol2.r0, 1.0 - s.sol2.r0)).epsilon(1e-12));
    CHECK(lp.d == doctest::Approx(0.5 * lp.d0));
    for (double r : {-0.1, -0.003, 0.0, 0.02}) CHECK(ansatz::unstretch(ansatz::stretched_coordinate(r, lp), lp) == doctest::Approx(r));
    CHECK_THROWS_AS(ansatz::make_layer_params(s.sol2, s.p, 0.3), ValidationError);
    CHECK_THROWS_AS(ansatz::make_layer_params(s.sol2, s.p, 0.0), ValidationError);
}

TEST_CASE("profile evaluator parity and smooth tail continuation")
{
    const auto& s = setup();
    const ansatz::ProfileEvaluator e(s.p, s.w);
    for (double z : {-20.0, -5.0, 0.3, 7.0, 15.0}) {
        CHECK(e.V2(z) == e.V1(-z));
        CHECK(e.W2(z) == -e.W1(-z));
    }
    const double L = e.L();
    CHECK(e.V1(L - 1e-9) == doctest::Approx(e.V1(L + 1e-9)).epsilon(1e-7));
    CHECK(e.V1(30.0) == doctest::Approx(e.A() * 30.0 + e.B()).epsilon(1e-6));
}

TEST_CASE("ansatz equals the limit field away from the interface")
{
    const auto& s = setup();
    const lin::LayerBackground bg{s.sol1, s.p, s.w};
    const auto U = lin::ansatz_field(bg, 0.05, 4000);
    const auto wsp = s.sol1.interpolant();
    int outer = 0;
    for (std::size_t i = 0; i < U.grid.size(); ++i) {
        CHECK(U.U1[i] >= 0.0);
        CHECK(U.U2[i] >= 0.0);
        if (U.tags[i] == ansatz::Region::Outer1) {
            ++outer;
            CHECK(U.U1[i] == doctest::Approx(wsp.value(U.grid.nodes[i])).epsilon(1e-9));
            CHECK(U.U2[i] == 0.0);
        }
    }
    CHECK(outer > 0);
}

TEST_CASE("seam jumps shrink at first order under mesh refinement")
{
    const auto& s = setup();
    const lin::LayerBackground bg{s.sol1, s.p, s.w};
    const auto a = ansatz::seam_smoothness(lin::ansatz_field(bg, 0.05, 4000));
    const auto b = ansatz::seam_smoothness(lin::ansatz_field(bg, 0.05, 8000));
    CHECK(a.max_jump / b.max_jump > 1.8);
}

TEST_CASE("the nonlinear residual shrinks relative to the layer scale")
{
    const auto& s = setup();
    const lin::LayerBackground bg{s.sol1, s.p, s.w};
    const auto U = lin::ansatz_field(bg, 0.05, 4000);
    const auto r = ansatz::nonlinear_residual(U, s.sol1.f);
    // the pure layer terms are O(eps^-1); the composite cancels them to O(1) size
    CHECK(r.sup1 < 1e3);
    CHECK(std::isfinite(r.sup2));
}

TEST_CASE("exponentially small remainder families stay bounded")
{
    const auto& s = setup();
    const auto rep = ansatz::verify_remainders(s.sol1, s.p, s.w, {0.1, 0.05, 0.025});
    int checked = 0;
    for (const auto& f : rep.families)
        if (f.name.find("exp") != std::string::npos || f.name.rfind("Q_other", 0) == 0) {
            ++checked;
            CHECK_MESSAGE(!f.grows, f.name);
        }
    CHECK(checked >= 4);
}

TEST_CASE("dim 2 ansatz stays nonnegative with the curvature term")
{
    const auto& s = setup();
    const lin::LayerBackground bg{s.sol2, s.p, s.w};
    for (double eps : {0.1, 0.05}) {
        const auto U = lin::ansatz_field(bg, eps, 4000);
        for (std::size_t i = 0; i < U.grid.size(); ++i) CHECK((U.U1[i] >= 0.0 && U.U2[i] >= 0.0));
    }
}
