#include <cmath>

#include "doctest.h"
#include "psep/diagnostics.hpp"
#include "psep/estimate.hpp"
#include "psep/linop.hpp"
#include "psep/norms.hpp"
#include "psep/verify.hpp"

using namespace psep;

namespace {

struct Setup {
    inner::ProfilePair p = inner::solve_inner_profile(12.0, 2400);
    inner::CorrectionProfile w = inner::solve_W(p);
    limit::ScalarLimitSolution sol =
        limit::solve_limit_scalar(limit::Nonlinearity::cubic(20.0), num::build_grid(2.0, 1.0, 2001, 1));
    lin::LayerBackground bg{sol, p, w};
    ansatz::AnsatzField U = lin::ansatz_field(bg, 0.05, 4000);
    lin::ModeOperator L = lin::assemble_linearized(U, sol.f, 0);
};

const Setup& setup()
{
    static const Setup s;
    return s;
}

Field2 bump_data(const num::Grid& g, double c1, double c2)
{
    Field2 f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        f.u1[i] = lin::compact_bump(g.nodes[i], c1, 0.2);
        f.u2[i] = 0.5 * lin::compact_bump(g.nodes[i], c2, 0.15);
    }
    return f;
}

}  // namespace

TEST_CASE("compact bump")
{
    CHECK(lin::compact_bump(1.0, 1.0, 0.5) == 1.0);
    CHECK(lin::compact_bump(1.6, 1.0, 0.5) == 0.0);
    CHECK(lin::compact_bump(1.25, 1.0, 0.5) == doctest::Approx(std::pow(0.75, 4)));
}

TEST_CASE("zero data gives the zero solution")
{
    const auto& s = setup();
    const Field2 phi = lin::solve_linearized(s.L, Field2(s.L.nodes()));
    CHECK(sup_norm(phi.u1) == 0.0);
    CHECK(sup_norm(phi.u2) == 0.0);
}

TEST_CASE("solutions are linear in the data and satisfy the operator")
{
    const auto& s = setup();
    const auto& g = s.L.grid;
    const Field2 a = bump_data(g, 1.5, 0.4), b = bump_data(g, 1.2, 0.7);
    Field2 ab(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        ab.u1[i] = a.u1[i] + 2.0 * b.u1[i];
        ab.u2[i] = a.u2[i] + 2.0 * b.u2[i];
    }
    lin::SolveReport rep;
    const Field2 pa = lin::solve_linearized(s.L, a), pb = lin::solve_linearized(s.L, b);
    const Field2 pab = lin::solve_linearized(s.L, ab, &rep);
    CHECK(rep.residual <= lin::solve_tolerance);
    const double scale = std::max(sup_norm(pab.u1), sup_norm(pab.u2));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::fabs(pab.u1[i] - pa.u1[i] - 2.0 * pb.u1[i]) <= 1e-9 * scale);
        CHECK(std::fabs(pab.u2[i] - pa.u2[i] - 2.0 * pb.u2[i]) <= 1e-9 * scale);
    }
    const Field2 back = lin::apply_operator(s.L, pa);
    double err = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (s.L.dirichlet[i]) continue;
        err = std::max({err, std::fabs(back.u1[i] - a.u1[i]), std::fabs(back.u2[i] - a.u2[i])});
        mag = std::max({mag, std::fabs(a.u1[i]), std::fabs(a.u2[i])});
    }
    CHECK(err <= 1e-7 * mag);
}

TEST_CASE("mirror symmetry of the 1D problem swaps the components")
{
    const auto& s = setup();
    const auto& g = s.L.grid;
    const std::size_t n = g.size();
    bool symmetric_grid = true;
    for (std::size_t i = 0; i < n; ++i) symmetric_grid = symmetric_grid && std::fabs(g.nodes[i] + g.nodes[n - 1 - i] - 2.0) < 1e-9;
    REQUIRE(symmetric_grid);
    const Field2 a = bump_data(g, 1.5, 0.4);
    Field2 m(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.u1[i] = a.u2[n - 1 - i];
        m.u2[i] = a.u1[n - 1 - i];
    }
    const Field2 pa = lin::solve_linearized(s.L, a), pm = lin::solve_linearized(s.L, m);
    const double scale = std::max(sup_norm(pa.u1), sup_norm(pa.u2));
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        err = std::max({err, std::fabs(pm.u1[i] - pa.u2[n - 1 - i]), std::fabs(pm.u2[i] - pa.u1[n - 1 - i])});
    CHECK(err <= 1e-6 * scale);
}

TEST_CASE("weighted norms are positively homogeneous")
{
    const auto& s = setup();
    const auto& g = s.L.grid;
    const Field2 a = bump_data(g, 1.5, 0.4);
    Field2 a3 = a;
    for (auto& x : a3.u1) x *= 3.0;
    for (auto& x : a3.u2) x *= 3.0;
    const double d = lin::collar_width(s.sol);
    const auto n0 = lin::norm0(lin::ModalField::single(g, 0, a), 0.05, d);
    const auto n0s = lin::norm0(lin::ModalField::single(g, 0, a3), 0.05, d);
    CHECK(n0s.log_total() - n0.log_total() == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    const auto n1 = lin::norm1(lin::ModalField::single(g, 0, a), 0.05, d, 0.5);
    const auto n1s = lin::norm1(lin::ModalField::single(g, 0, a3), 0.05, d, 0.5);
    CHECK(n1s.log_total() - n1.log_total() == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    CHECK(lin::weight(0.3, 0.05, 0.5) > 0.0);
    CHECK(std::log(lin::weight(0.3, 0.05, 0.5)) == doctest::Approx(lin::log_weight(0.3, 0.05, 0.5)));
}

TEST_CASE("estimate ensemble: deterministic, thread independent, monotone in size")
{
    const auto& s = setup();
    lin::EstimateConfig c;
    c.eps_list = {0.1, 0.05, 0.025};
    c.ensemble = 6;
    c.nodes = 3000;
    const auto a = lin::measure_estimate(s.bg, s.sol.f, c);
    c.threads = 3;
    const auto b = lin::measure_estimate(s.bg, s.sol.f, c);
    c.threads = 1;
    c.ensemble = 12;
    const auto big = lin::measure_estimate(s.bg, s.sol.f, c);
    REQUIRE(a.levels.size() == 3);
    for (std::size_t k = 0; k < a.levels.size(); ++k) {
        CHECK(a.levels[k].max_ratio == b.levels[k].max_ratio);
        for (std::size_t j = 0; j < a.levels[k].samples.size(); ++j)
            CHECK(a.levels[k].samples[j].ratio == b.levels[k].samples[j].ratio);
        CHECK(big.levels[k].max_ratio >= a.levels[k].max_ratio);
    }
    CHECK(a.slope == b.slope);
    c.eps_list = {0.1, 0.09};
    CHECK_THROWS_AS(lin::measure_estimate(s.bg, s.sol.f, c), ValidationError);
}

TEST_CASE("collar Schroedinger solve obeys the maximum principle")
{
    std::vector<double> rho, pot, rhs;
    for (int i = 0; i <= 400; ++i) {
        rho.push_back(0.5 + 0.5 * i / 400.0);
        pot.push_back(2.0);
        rhs.push_back(1.0 + 0.5 * std::sin(10.0 * rho.back()));
    }
    const auto phi = lin::solve_collar_problem(rho, 2, 0.1, pot, rhs);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        CHECK(phi[i] >= -1e-14);
        CHECK(phi[i] <= 1.5 / 2.0 + 1e-12);
    }
    CHECK(std::fabs(phi.front()) <= 1e-20);
    CHECK(std::fabs(phi.back()) <= 1e-20);
}

TEST_CASE("decay fit refuses empty windows")
{
    const auto& s = setup();
    const Field2 zero(s.L.nodes());
    CHECK_THROWS_AS(lin::decay_diagnostic(s.L.grid, zero, 2, 1, 0.05, 0.25), ValidationError);
    CHECK_THROWS_AS(lin::decay_diagnostic(s.L.grid, zero, 2, 1, 0.05, 0.25, 1e-13, -1.0), ValidationError);
}

TEST_CASE("reflection of odd-symmetric data is exact")
{
    const auto& s = setup();
    const auto& g = s.L.grid;
    Field2 f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        f.u1[i] = lin::compact_bump(g.nodes[i], 1.7, 0.2);
        f.u2[i] = lin::compact_bump(g.nodes[i], 0.3, 0.2);
    }
    const Field2 phi = lin::solve_linearized(s.L, f);
    const double d0 = s.U.params.d0;
    const auto rep = lin::reflection_check(g, phi, 0.05, d0, {{0.2 * d0, 0.2 * d0}, {0.1 * d0, 0.1 * d0}});
    for (const auto& r : rep.rows) CHECK(r.residual1 <= 1e-8 * std::max(sup_norm(phi.u1), sup_norm(phi.u2)));
    CHECK_THROWS_AS(lin::reflection_check(g, phi, 0.05, d0, {{3.0 * d0, 0.1}}), ValidationError);
}

TEST_CASE("shared far-field data places the bumps on the intended sides")
{
    const auto& s = setup();
    const Field2 f = verify::far_field_data(s.L.grid, 1.0, 2.0, true);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = s.L.grid.nodes[i];
        if (f.u1[i] != 0.0) CHECK(r > 1.0);
        if (f.u2[i] != 0.0) CHECK(r < 1.0);
    }
}
