#include "psep/kernels.hpp"

#include <cmath>
#include <cstdlib>

namespace psep::kern {

namespace {

void stencil3_scalar(const double* lo, const double* di, const double* up, const double* x, double* y,
                     std::size_t n)
{
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double a = lo[i] * x[i - 1];
        double b = di[i] * x[i];
        double c = up[i] * x[i + 1];
        y[i] = (a + b) + c;
    }
}

double weighted_absmax_scalar(const double* w, const double* x, std::size_t n)
{
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = w[i] * std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

double dot_scalar(const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

const KernelTable kScalar{Isa::Scalar, stencil3_scalar, weighted_absmax_scalar, dot_scalar};

const KernelTable& select()
{
    const char* force = std::getenv("PSEP_FORCE_SCALAR");
    if (force && *force && *force != '0') return kScalar;
    if (const KernelTable* t = avx2_table()) return *t;
    if (const KernelTable* t = neon_table()) return *t;
    return kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable& active()
{
    static const KernelTable& table = select();
    return table;
}

std::string isa_name(Isa isa)
{
    switch (isa) {
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    default: return "scalar";
    }
}

}  // namespace psep::kern
