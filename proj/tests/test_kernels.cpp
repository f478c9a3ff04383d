#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "psep/kernels.hpp"

using namespace psep::kern;

namespace {

std::vector<const KernelTable*> variants()
{
    std::vector<const KernelTable*> v;
    if (avx2_table()) v.push_back(avx2_table());
    if (neon_table()) v.push_back(neon_table());
    return v;
}

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("scalar kernels against direct loops")
{
    const KernelTable& s = scalar_table();
    std::vector<double> lo{0, 1, 2, 3, 0}, di{1, 1, 1, 1, 1}, up{0, 2, 2, 2, 0}, x{1, 2, 3, 4, 5}, y(5, -7.0);
    s.stencil3(lo.data(), di.data(), up.data(), x.data(), y.data(), 5);
    CHECK(y[1] == 1 * 1 + 1 * 2 + 2 * 3);
    CHECK(y[3] == 3 * 3 + 1 * 4 + 2 * 5);
    CHECK(s.weighted_absmax(di.data(), x.data(), 0) == 0.0);
    std::vector<double> w{1, 0.5, 2, 1, 0.1}, z{-1, 8, -3, 2, 30};
    CHECK(s.weighted_absmax(w.data(), z.data(), 5) == 6.0);
    CHECK(s.dot(x.data(), x.data(), 5) == 55.0);
}

TEST_CASE("SIMD variants agree with the scalar reference")
{
    std::mt19937_64 rng(2024);
    const KernelTable& s = scalar_table();
    for (const KernelTable* t : variants()) {
        INFO("variant " << isa_name(t->isa));
        for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 13u, 64u, 101u, 1000u}) {
            auto lo = random_vec(n, rng), di = random_vec(n, rng), up = random_vec(n, rng), x = random_vec(n, rng);
            std::vector<double> ya(n, 0.0), yb(n, 0.0);
            s.stencil3(lo.data(), di.data(), up.data(), x.data(), ya.data(), n);
            t->stencil3(lo.data(), di.data(), up.data(), x.data(), yb.data(), n);
            CHECK(std::memcmp(ya.data(), yb.data(), n * sizeof(double)) == 0);
            CHECK(s.weighted_absmax(lo.data(), x.data(), n) == t->weighted_absmax(lo.data(), x.data(), n));
            const double ds = s.dot(x.data(), up.data(), n), dv = t->dot(x.data(), up.data(), n);
            double mag = 0.0;
            for (std::size_t i = 0; i < n; ++i) mag += std::fabs(x[i] * up[i]);
            CHECK(std::fabs(ds - dv) <= 1e-14 * mag);
        }
    }
}

TEST_CASE("active table is one of the compiled variants")
{
    const Isa isa = active().isa;
    CHECK((isa == Isa::Scalar || (isa == Isa::Avx2 && avx2_table()) || (isa == Isa::Neon && neon_table())));
    CHECK(!isa_name(isa).empty());
}
