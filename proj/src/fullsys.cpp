#include "psep/fullsys.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "psep/radial.hpp"
#include "psep/spline.hpp"

namespace psep::full {

namespace {

bool boundary_row(const num::Grid& g, std::size_t i)
{
    if (i + 1 == g.size()) return true;
    return i == 0 && (g.dim == 1 || g.nodes[0] > 0.0);
}

num::BandedMatrix jacobian(const num::Grid& g, const num::Stencil3& lap, const limit::Nonlinearity& f,
                           double beta, const std::vector<double>& x)
{
    const std::size_t n = g.size();
    num::BandedMatrix J(2 * n, 2, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r1 = 2 * i, r2 = 2 * i + 1;
        if (boundary_row(g, i)) {
            J.set_identity_row(r1);
            J.set_identity_row(r2);
            continue;
        }
        const double u1 = x[r1], u2 = x[r2];
        for (int c = 0; c < 2; ++c) {
            const std::size_t row = 2 * i + c;
            if (i > 0) J.add(row, row - 2, -lap.lo[i]);
            J.add(row, row + 2, -lap.up[i]);
            J.add(row, row, -lap.di[i]);
        }
        J.add(r1, r1, beta * u2 * u2 - f.fu(u1));
        J.add(r2, r2, beta * u1 * u1 - f.fu(u2));
        J.add(r1, r2, 2.0 * beta * u1 * u2);
        J.add(r2, r1, 2.0 * beta * u1 * u2);
    }
    return J;
}

void residual_into(const num::Grid& g, const num::Stencil3& lap, const limit::Nonlinearity& f, double beta,
                   const std::vector<double>& x, std::vector<double>& r)
{
    const std::size_t n = g.size();
    r.assign(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r1 = 2 * i, r2 = 2 * i + 1;
        if (boundary_row(g, i)) {
            r[r1] = x[r1];
            r[r2] = x[r2];
            continue;
        }
        const double u1 = x[r1], u2 = x[r2];
        for (int c = 0; c < 2; ++c) {
            const std::size_t row = 2 * i + c;
            double lapu = lap.di[i] * x[row] + lap.up[i] * x[row + 2];
            if (i > 0) lapu += lap.lo[i] * x[row - 2];
            r[row] = -lapu;
        }
        r[r1] += -f.f(u1) + beta * u1 * u2 * u2;
        r[r2] += -f.f(u2) + beta * u2 * u1 * u1;
    }
}

Field2 resample(const num::Grid& from, const Field2& u, const num::Grid& to)
{
    if (from.nodes == to.nodes) return u;
    num::CubicSpline s1(from.nodes, u.u1), s2(from.nodes, u.u2);
    Field2 out(to.size());
    for (std::size_t i = 0; i < to.size(); ++i) {
        out.u1[i] = s1.value(to.nodes[i]);
        out.u2[i] = s2.value(to.nodes[i]);
    }
    return out;
}

// sign change of u1 - u2 carrying the most mass (rounding-level flips in the tails are
// ignored), linearly interpolated
double crossing(const num::Grid& g, const Field2& u)
{
    double prev = 0.0, best = g.r0, mass = -1.0;
    std::size_t ip = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double d = u.u1[i] - u.u2[i];
        if (d == 0.0) continue;
        if (prev != 0.0 && (d > 0.0) != (prev > 0.0)) {
            const double m = u.u1[ip] + u.u2[ip] + u.u1[i] + u.u2[i];
            if (m > mass) {
                mass = m;
                const double t = prev / (prev - d);
                best = g.nodes[ip] + t * (g.nodes[i] - g.nodes[ip]);
            }
        }
        prev = d;
        ip = i;
    }
    return best;
}

}  // namespace

Field2 system_residual(const num::Grid& g, const limit::Nonlinearity& f, double beta, const Field2& u)
{
    std::vector<double> r;
    residual_into(g, num::radial_laplacian_stencil(g), f, beta, interleave(u), r);
    return deinterleave(r);
}

BetaSolve solve_at_beta(const num::Grid& g, const limit::Nonlinearity& f, double beta, const Field2& guess,
                        double tol, int max_iter)
{
    if (guess.size() != g.size()) throw std::invalid_argument("initial guess does not match the grid");
    if (!(beta >= 0.0)) throw ValidationError("beta must be nonnegative");
    const num::Stencil3 lap = num::radial_laplacian_stencil(g);
    const std::vector<double> x0 = interleave(guess);
    const double scale = jacobian(g, lap, f, beta, x0).norm_inf() * std::max(1.0, sup_norm(x0));

    num::ResidualFn res = [&](const std::vector<double>& x, std::vector<double>& r) {
        residual_into(g, lap, f, beta, x, r);
        for (double& v : r) v /= scale;
    };
    num::JacobianFn jac = [&](const std::vector<double>& x) {
        num::BandedMatrix J = jacobian(g, lap, f, beta, x);
        for (std::size_t i = 0; i < J.size(); ++i)
            for (std::size_t j = i >= 2 ? i - 2 : 0; j <= std::min(J.size() - 1, i + 2); ++j)
                J.at(i, j) /= scale;
        return J;
    };
    num::NewtonOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    BetaSolve out;
    try {
        auto [x, rep] = num::newton_solve(res, jac, x0, opt);
        out.u = deinterleave(x);
        out.newton = rep;
    } catch (const num::SingularMatrixError& e) {
        out.u = guess;
        out.newton.status = std::string("singular jacobian at the initial guess: ") + e.what();
        out.newton.residual = INFINITY;
    }
    const std::vector<double> xs = interleave(out.u);
    std::vector<double> r;
    residual_into(g, lap, f, beta, xs, r);
    out.residual = sup_norm(r) / (jacobian(g, lap, f, beta, xs).norm_inf() * std::max(1.0, sup_norm(xs)));
    return out;
}

SolutionBranch continue_in_beta(const ansatz::AnsatzField& seed, const limit::Nonlinearity& f,
                                const std::vector<double>& schedule, const ContinuationOptions& opt)
{
    if (schedule.empty()) throw ValidationError("beta schedule is empty");
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        if (!(schedule[k] > 0.0)) throw ValidationError("beta schedule must be positive");
        if (k > 0 && !(schedule[k] > schedule[k - 1])) throw ValidationError("beta schedule must be increasing");
    }
    const double seed_beta = std::pow(seed.params.eps, -4.0);
    if (std::fabs(schedule[0] / seed_beta - 1.0) > 0.1) {
        std::ostringstream os;
        os << "first beta " << schedule[0] << " does not match the seed eps " << seed.params.eps
           << " (eps^-4 = " << seed_beta << ")";
        throw ValidationError(os.str());
    }

    SolutionBranch br;
    num::Grid grid = seed.grid;
    Field2 u(seed.U1, seed.U2);
    const int n = int(grid.size());

    // Solves at beta from the current state; on success appends the point.
    auto attempt = [&](double beta) -> bool {
        const double eps = std::pow(beta, -0.25);
        const double iface = crossing(grid, u);
        if (grid.max_spacing_near(iface, eps) > eps / 10.0) {
            try {
                num::Grid ng = num::build_grid(grid.R, iface, n, grid.dim, eps);
                u = resample(grid, u, ng);
                grid = std::move(ng);
            } catch (const std::exception& e) {
                std::ostringstream os;
                os << "cannot re-cluster for beta " << beta << ": " << e.what();
                br.diagnostic = os.str();
                return false;
            }
        }
        BetaSolve s = solve_at_beta(grid, f, beta, u, opt.tol, opt.max_iter);
        if (!s.newton.converged) {
            std::ostringstream os;
            os << "Newton failed at beta " << beta << " (" << s.newton.status << ", residual " << s.residual << ")";
            br.diagnostic = os.str();
            return false;
        }
        BranchPoint p;
        p.beta = beta;
        p.eps = eps;
        p.iterations = s.newton.iterations;
        p.residual = s.residual;
        p.min_value = std::min(*std::min_element(s.u.u1.begin(), s.u.u1.end()),
                               *std::min_element(s.u.u2.begin(), s.u.u2.end()));
        for (auto* c : {&s.u.u1, &s.u.u2})
            for (double& v : *c)
                if (v < 0.0 && v >= -1e-12) {
                    v = 0.0;
                    ++p.clamped;
                }
        if (p.min_value < -1e-12) {
            std::ostringstream os;
            os << "negative values down to " << p.min_value << " at beta " << beta;
            br.warnings.push_back(os.str());
        }
        u = s.u;
        p.grid = grid;
        p.u = s.u;
        br.points.push_back(std::move(p));
        return true;
    };

    std::function<bool(double, double, int)> reach = [&](double from, double to, int level) -> bool {
        const num::Grid g0 = grid;
        const Field2 u0 = u;
        if (attempt(to)) return true;
        grid = g0;
        u = u0;
        if (level >= opt.max_bisection_levels) return false;
        const double mid = std::sqrt(from * to);
        ++br.bisections;
        if (!reach(from, mid, level + 1)) return false;
        return reach(mid, to, level + 1);
    };

    if (!attempt(schedule[0])) {
        br.truncated = true;
        return br;
    }
    for (std::size_t k = 1; k < schedule.size(); ++k) {
        if (!reach(schedule[k - 1], schedule[k], 0)) {
            br.truncated = true;
            return br;
        }
        br.diagnostic.clear();
    }
    return br;
}

AnsatzDiscrepancy compare_to_ansatz(const BranchPoint& p, const ansatz::AnsatzField& U,
                                    const limit::ScalarLimitSolution& sol)
{
    const Field2 ua = resample(U.grid, Field2(U.U1, U.U2), p.grid);
    num::CubicSpline w = sol.interpolant();
    const double d = U.params.d, eps = U.params.eps;
    AnsatzDiscrepancy out;
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        const double e1 = std::fabs(p.u.u1[i] - ua.u1[i]), e2 = std::fabs(p.u.u2[i] - ua.u2[i]);
        out.sup1 = std::max(out.sup1, e1);
        out.sup2 = std::max(out.sup2, e2);
        const double e = std::max(e1, e2);
        if (std::fabs(p.grid.nodes[i] - U.params.r0) >= d)
            out.outer = std::max(out.outer, e);
        else
            out.collar = std::max(out.collar, e / eps);
        const double rho = std::min(p.grid.nodes[i], sol.grid.R);
        out.difference_vs_limit = std::max(out.difference_vs_limit, std::fabs(p.u.u1[i] - p.u.u2[i] - w.value(rho)));
    }
    out.sup = std::max(out.sup1, out.sup2);
    return out;
}

SegregationMetrics segregation_metrics(const BranchPoint& p)
{
    const num::Grid& g = p.grid;
    const std::size_t n = g.size();
    SegregationMetrics m;
    std::vector<double> prod(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = p.u.u1[i] * p.u.u2[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        auto integrand = [&](std::size_t k) {
            return prod[k] * prod[k] * std::pow(g.nodes[k], double(g.dim - 1));
        };
        m.overlap += 0.5 * (g.nodes[i + 1] - g.nodes[i]) * (integrand(i) + integrand(i + 1));
    }
    m.interface = crossing(g, p.u);
    const std::size_t peak = std::size_t(std::max_element(prod.begin(), prod.end()) - prod.begin());
    const double top = prod[peak];
    if (top > 0.0) {
        const double level = 0.1 * top;
        std::size_t lo = peak, hi = peak;
        while (lo > 0 && prod[lo - 1] >= level) --lo;
        while (hi + 1 < n && prod[hi + 1] >= level) ++hi;
        auto cut = [&](std::size_t inside, std::size_t outside) {
            const double t = (prod[inside] - level) / (prod[inside] - prod[outside]);
            return g.nodes[inside] + t * (g.nodes[outside] - g.nodes[inside]);
        };
        const double left = lo > 0 ? cut(lo, lo - 1) : g.nodes[lo];
        const double right = hi + 1 < n ? cut(hi, hi + 1) : g.nodes[hi];
        m.width = right - left;
    }
    m.width_over_eps = p.beta > 0.0 ? m.width / std::pow(p.beta, -0.25) : 0.0;
    return m;
}

}  // namespace psep::full
