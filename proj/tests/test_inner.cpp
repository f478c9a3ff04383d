#include <cmath>

#include "doctest.h"
#include "psep/inner.hpp"

using namespace psep;

namespace {

const inner::ProfilePair& profile()
{
    static const inner::ProfilePair p = inner::solve_inner_profile(12.0, 2400);
    return p;
}

const inner::CorrectionProfile& correction()
{
    static const inner::CorrectionProfile w = inner::solve_W(profile());
    return w;
}

}  // namespace

TEST_CASE("layer profile normalization, symmetry and monotonicity")
{
    const auto& p = profile();
    CHECK(std::fabs(p.V1[p.center()] - 1.0) <= 1e-9);
    CHECK(std::fabs(p.V2[p.center()] - 1.0) <= 1e-9);
    CHECK(p.symmetry <= 1e-8);
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p.V1[i] > 1e-10) CHECK(p.V1[i] > p.V1[i - 1]);
        CHECK(p.V1[i] > -1e-13);
    }
    CHECK(p.A > 0.0);
    CHECK(p.B > 0.0);
}

TEST_CASE("profile satisfies the layer equations under an independent second difference")
{
    // -V1'' + V1 V2^2 = 0 checked with plain central differences
    const auto& p = profile();
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        const double d2 = (p.V1[i + 1] - 2.0 * p.V1[i] + p.V1[i - 1]) / (p.h * p.h);
        worst = std::max(worst, std::fabs(-d2 + p.V1[i] * p.V2[i] * p.V2[i]));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("asymptotic constants converge under refinement and match the tail fit")
{
    const auto& p = profile();
    const auto q = inner::solve_inner_profile(12.0, 4800);
    CHECK(std::fabs(p.A - q.A) < 1e-8);
    CHECK(std::fabs(p.B - q.B) < 1e-8);
    const auto fit = inner::extract_asymptotics(p);
    CHECK(fit.A == doctest::Approx(p.A).epsilon(1e-8));
    CHECK(fit.B == doctest::Approx(p.B).epsilon(1e-7));
    CHECK_THROWS(inner::extract_asymptotics(p, 1.0, 2.0));
}

TEST_CASE("translation mode V' is annihilated by the linearization")
{
    const auto& p = profile();
    const Field2 r = inner::apply_M_compact(p, Field2(p.dV1, p.dV2));
    CHECK(sup_norm(r.u1) < 1e-6);
    CHECK(sup_norm(r.u2) < 1e-6);
    const Field2 r2 = inner::apply_M(p, Field2(p.dV1, p.dV2));
    CHECK(sup_norm(r2.u1) < 1e-3);
}

TEST_CASE("kernel check finds exactly the translation mode")
{
    const auto k = inner::kernel_check(12.0, 2400, 3, 1e-6);
    CHECK(k.near_zero == 1);
    CHECK(k.correlation >= 0.999);
    CHECK(k.gap > 1e-3);
}

TEST_CASE("correction W: antisymmetry and far-field slope from the integral identity")
{
    const auto& p = profile();
    const auto& w = correction();
    CHECK(w.residual <= 1e-9);
    CHECK(w.antisymmetry <= 1e-8);
    // alpha = -(1/2A) int (V1'^2 + V2'^2 - A^2) dz
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        auto g = [&](std::size_t k) { return p.dV1[k] * p.dV1[k] + p.dV2[k] * p.dV2[k] - p.A * p.A; };
        integral += 0.5 * p.h * (g(i) + g(i + 1));
    }
    const double alpha = -integral / (2.0 * p.A);
    CHECK(w.drift == doctest::Approx(alpha).epsilon(1e-5));
    CHECK(w.corrected_deviation < 1e-3);
}

TEST_CASE("hat profiles have the stated parity")
{
    const auto hats = inner::solve_kernel_corrections(profile(), correction());
    CHECK(hats.phi_symmetry <= 1e-7);
    CHECK(hats.psi_antisymmetry <= 1e-7);
    CHECK(std::isfinite(hats.a));
    CHECK(std::isfinite(hats.b_const));
}

TEST_CASE("profile solver rejects unusable meshes")
{
    CHECK_THROWS_AS(inner::solve_inner_profile(4.0, 2400), std::invalid_argument);
    CHECK_THROWS_AS(inner::solve_inner_profile(12.0, 2401), std::invalid_argument);
}
