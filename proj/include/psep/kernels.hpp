#pragma once

#include <cstddef>
#include <string>

// Hot loops with a scalar reference and vector variants picked at runtime.
// stencil3 and weighted_absmax are bitwise identical across variants;
// dot differs only in summation order.
namespace psep::kern {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
    Isa isa;
    // y[i] = lo[i]*x[i-1] + di[i]*x[i] + up[i]*x[i+1] for 1 <= i < n-1
    void (*stencil3)(const double* lo, const double* di, const double* up, const double* x, double* y,
                     std::size_t n);
    // max_i w[i]*|x[i]| (0 for n == 0)
    double (*weighted_absmax)(const double* w, const double* x, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the variant is not compiled in or not supported by this CPU
const KernelTable* avx2_table();
const KernelTable* neon_table();

// Selected once: best supported variant unless PSEP_FORCE_SCALAR is set.
const KernelTable& active();
std::string isa_name(Isa isa);

inline void stencil3(const double* lo, const double* di, const double* up, const double* x, double* y,
                     std::size_t n)
{
    active().stencil3(lo, di, up, x, y, n);
}
inline double weighted_absmax(const double* w, const double* x, std::size_t n)
{
    return active().weighted_absmax(w, x, n);
}
inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }

}  // namespace psep::kern
