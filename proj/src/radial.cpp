#include "psep/radial.hpp"

#include <stdexcept>
#include <string>

#include "psep/kernels.hpp"

namespace psep::num {

namespace {

Stencil3 zeros(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }

void check_len(const std::vector<double>& f, const Grid& g)
{
    if (f.size() != g.size())
        throw std::invalid_argument("field length " + std::to_string(f.size()) + " does not match grid size " +
                                    std::to_string(g.size()));
}

}  // namespace

Stencil3 first_derivative_stencil(const Grid& g)
{
    const auto& x = g.nodes;
    Stencil3 s = zeros(x.size());
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
        s.lo[i] = -h2 / (h1 * (h1 + h2));
        s.di[i] = (h2 - h1) / (h1 * h2);
        s.up[i] = h1 / (h2 * (h1 + h2));
    }
    return s;
}

Stencil3 second_derivative_stencil(const Grid& g)
{
    const auto& x = g.nodes;
    Stencil3 s = zeros(x.size());
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
        s.lo[i] = 2.0 / (h1 * (h1 + h2));
        s.di[i] = -2.0 / (h1 * h2);
        s.up[i] = 2.0 / (h2 * (h1 + h2));
    }
    return s;
}

Stencil3 radial_laplacian_stencil(const Grid& g)
{
    Stencil3 s = second_derivative_stencil(g);
    if (g.dim > 1) {
        Stencil3 d = first_derivative_stencil(g);
        const double k = g.dim - 1;
        for (std::size_t i = 1; i + 1 < g.size(); ++i) {
            double c = k / g.nodes[i];
            s.lo[i] += c * d.lo[i];
            s.di[i] += c * d.di[i];
            s.up[i] += c * d.up[i];
        }
        if (g.nodes[0] == 0.0) {
            double h = g.nodes[1];
            s.di[0] = -2.0 * g.dim / (h * h);
            s.up[0] = 2.0 * g.dim / (h * h);
        }
    }
    return s;
}

std::vector<double> apply_stencil(const Stencil3& s, const std::vector<double>& u)
{
    const std::size_t n = u.size();
    std::vector<double> y(n, 0.0);
    if (n < 3) return y;
    kern::stencil3(s.lo.data(), s.di.data(), s.up.data(), u.data(), y.data(), n);
    y[0] = s.di[0] * u[0] + s.up[0] * u[1];
    y[n - 1] = s.lo[n - 1] * u[n - 2] + s.di[n - 1] * u[n - 1];
    return y;
}

std::vector<double> apply_radial_laplacian(const std::vector<double>& field, const Grid& g)
{
    check_len(field, g);
    return apply_stencil(radial_laplacian_stencil(g), field);
}

double fermi_curvature(double r, double r0, int dim)
{
    const double kappa = -1.0 / r0;
    return (dim - 1) * kappa / (1.0 - r * kappa);
}

std::vector<double> apply_fermi_laplacian(const std::vector<double>& field, const Grid& g)
{
    check_len(field, g);
    std::vector<double> d2 = apply_stencil(second_derivative_stencil(g), field);
    std::vector<double> d1 = apply_stencil(first_derivative_stencil(g), field);
    std::vector<double> out(field.size(), 0.0);
    for (std::size_t i = 1; i + 1 < field.size(); ++i)
        out[i] = d2[i] - fermi_curvature(g.r(i), g.r0, g.dim) * d1[i];
    if (g.dim > 1 && g.nodes[0] == 0.0) {
        double h = g.nodes[1];
        out[0] = 2.0 * g.dim * (field[1] - field[0]) / (h * h);
    }
    return out;
}

}  // namespace psep::num
