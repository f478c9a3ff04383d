#include "psep/linop.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "psep/radial.hpp"

namespace psep::lin {

double angular_eigenvalue(int dim, int m)
{
    if (m < 0) throw ValidationError("angular mode must be nonnegative");
    if (dim == 1) {
        if (m != 0) throw ValidationError("dim 1 admits only mode 0");
        return 0.0;
    }
    if (dim == 2) return double(m) * double(m);
    return double(m) * double(m + 1);
}

ModeOperator assemble_linearized(const ansatz::AnsatzField& U, const limit::Nonlinearity& f, int m)
{
    const num::Grid& g = U.grid;
    const double eps = U.params.eps;
    const std::size_t n = g.size();
    if (n < 5) throw ValidationError("linearized operator needs at least 5 nodes");

    const double h = g.max_spacing_near(U.params.r0, eps);
    if (h > eps / 10.0) {
        long need = long(std::ceil(double(n) * h / (eps / 10.0)));
        std::ostringstream os;
        os << "layer under-resolved: spacing " << h << " near the interface exceeds eps/10 = " << eps / 10.0
           << "; about " << need << " nodes are required";
        throw ValidationError(os.str());
    }

    ModeOperator L;
    L.m = m;
    L.eps = eps;
    L.lambda = angular_eigenvalue(g.dim, m);
    L.grid = g;
    L.pot1.resize(n);
    L.pot2.resize(n);
    L.cross.resize(n);
    L.fu1.resize(n);
    L.fu2.resize(n);
    L.dirichlet.assign(n, 0);

    const double e4 = 1.0 / (eps * eps * eps * eps);
    for (std::size_t i = 0; i < n; ++i) {
        const double u1 = U.U1[i], u2 = U.U2[i];
        L.pot1[i] = e4 * u2 * u2;
        L.pot2[i] = e4 * u1 * u1;
        L.cross[i] = 2.0 * e4 * u1 * u2;
        L.fu1[i] = f.fu(u1);
        L.fu2[i] = f.fu(u2);
    }

    L.dirichlet[n - 1] = 1;
    const bool origin = g.nodes[0] == 0.0;
    if (g.dim == 1 || !origin || m > 0) L.dirichlet[0] = 1;

    num::Stencil3 lap = num::radial_laplacian_stencil(g);
    L.matrix = num::BandedMatrix(2 * n, 2, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r1 = 2 * i, r2 = 2 * i + 1;
        if (L.dirichlet[i]) {
            L.matrix.set_identity_row(r1);
            L.matrix.set_identity_row(r2);
            continue;
        }
        const double ang = g.nodes[i] > 0.0 ? L.lambda / (g.nodes[i] * g.nodes[i]) : 0.0;
        for (int c = 0; c < 2; ++c) {
            const std::size_t row = 2 * i + c;
            if (i > 0) L.matrix.add(row, row - 2, -lap.lo[i]);
            L.matrix.add(row, row + 2, -lap.up[i]);
            L.matrix.add(row, row, -lap.di[i] + ang);
        }
        L.matrix.add(r1, r1, L.pot1[i] - L.fu1[i]);
        L.matrix.add(r2, r2, L.pot2[i] - L.fu2[i]);
        L.matrix.add(r1, r2, L.cross[i]);
        L.matrix.add(r2, r1, L.cross[i]);
    }
    return L;
}

Field2 apply_operator(const ModeOperator& L, const Field2& phi)
{
    if (phi.size() != L.nodes()) throw std::invalid_argument("field size does not match operator grid");
    return deinterleave(L.matrix * interleave(phi));
}

namespace {

std::vector<double> masked_rhs(const ModeOperator& L, const Field2& g)
{
    if (g.size() != L.nodes()) throw std::invalid_argument("rhs size does not match operator grid");
    std::vector<double> b = interleave(g);
    for (std::size_t i = 0; i < L.nodes(); ++i)
        if (L.dirichlet[i]) b[2 * i] = b[2 * i + 1] = 0.0;
    return b;
}

}  // namespace

Field2 solve_linearized(const ModeOperator& L, const Field2& g, SolveReport* report, bool estimate_sigma)
{
    std::vector<double> b = masked_rhs(L, g);
    std::optional<num::BandedLU> lu;
    try {
        lu.emplace(L.matrix);
    } catch (const num::SingularMatrixError& e) {
        std::ostringstream os;
        os << "linearized operator (eps " << L.eps << ", mode " << L.m << ") is numerically singular: " << e.what();
        throw NearKernelError(os.str(), 0.0, L.eps, L.m);
    }
    num::SolveInfo info;
    std::vector<double> x = num::refined_solve(L.matrix, *lu, b, 3, &info);
    const double rel = info.scale > 0.0 ? info.residual / info.scale : 0.0;
    double sigma = -1.0;
    if (estimate_sigma || rel > solve_tolerance) sigma = num::smallest_singular_value(L.matrix, *lu);
    if (rel > solve_tolerance) {
        std::ostringstream os;
        os << "linearized solve (eps " << L.eps << ", mode " << L.m << ") left relative residual " << rel
           << "; smallest singular value estimate " << sigma;
        throw NearKernelError(os.str(), sigma, L.eps, L.m);
    }
    for (std::size_t i = 0; i < L.nodes(); ++i)
        if (L.dirichlet[i]) x[2 * i] = x[2 * i + 1] = 0.0;
    if (report) {
        report->residual = rel;
        report->sigma_min = sigma;
        report->min_pivot = lu->min_abs_pivot();
        report->refinement_steps = info.refinement_steps;
    }
    return deinterleave(x);
}

double smallest_singular_value(const ModeOperator& L)
{
    try {
        num::BandedLU lu(L.matrix);
        return num::smallest_singular_value(L.matrix, lu);
    } catch (const num::SingularMatrixError&) {
        return 0.0;
    }
}

}  // namespace psep::lin
