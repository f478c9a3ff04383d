#include "psep/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psep/banded.hpp"
#include "psep/norms.hpp"
#include "psep/spline.hpp"

namespace psep::lin {

double compact_bump(double rho, double center, double half_width)
{
    const double t = (rho - center) / half_width;
    if (std::fabs(t) >= 1.0) return 0.0;
    const double s = 1.0 - t * t;
    return s * s * s * s;
}

DecayReport decay_diagnostic(const num::Grid& g, const Field2& phi, int component, int side, double eps, double d,
                             double floor, double window_start)
{
    if (!(window_start >= 0.0)) throw ValidationError("decay window start must be nonnegative");
    if (component != 1 && component != 2) throw ValidationError("component must be 1 or 2");
    if (side != 1 && side != 2) throw ValidationError("side must be 1 or 2");
    const auto& u = component == 1 ? phi.u1 : phi.u2;
    const double sign = side == 1 ? 1.0 : -1.0;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double dist = sign * g.r(i);
        if (dist < window_start * eps || dist > 0.5 * d) continue;
        if (!(std::fabs(u[i]) > floor)) continue;
        x.push_back(dist / eps);
        y.push_back(std::log(std::fabs(u[i])));
    }
    if (x.size() < 10) {
        std::ostringstream os;
        os << "decay fit has insufficient data: " << x.size() << " nodes above " << floor << " in [" << window_start
           << " eps, d/2]";
        throw ValidationError(os.str());
    }
    DecayReport rep;
    rep.fit = num::linear_fit(x, y);
    rep.rate = -rep.fit.slope;
    rep.nodes = int(x.size());
    rep.window_lo = eps * *std::min_element(x.begin(), x.end());
    rep.window_hi = eps * *std::max_element(x.begin(), x.end());
    if (!(rep.fit.slope < -1e-3)) {
        rep.rejected = true;
        rep.reason = "no decay: fitted slope is not negative";
    }
    return rep;
}

BlowupReport blowup_profile(const num::Grid& g, const Field2& phi, const ansatz::LayerParams& lp,
                            const ansatz::ProfileEvaluator& prof, double K)
{
    std::vector<double> d1a, d2a, d1b, d2b;
    radial_derivatives(g, phi.u1, d1a, d2a);
    radial_derivatives(g, phi.u2, d1b, d2b);
    const double dz_dr = lp.b() / lp.eps;

    // trapezoid weights in z so the fit does not depend on node clustering
    std::vector<std::size_t> idx;
    std::vector<double> z;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double zi = ansatz::stretched_coordinate(g.r(i), lp);
        if (std::fabs(zi) <= K) {
            idx.push_back(i);
            z.push_back(zi);
        }
    }
    BlowupReport rep;
    rep.nodes = int(idx.size());
    if (idx.size() < 3) throw ValidationError("blow-up window holds fewer than 3 nodes");
    std::vector<double> wgt(idx.size(), 0.0);
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
        double h = z[k + 1] - z[k];
        wgt[k] += 0.5 * h;
        wgt[k + 1] += 0.5 * h;
    }

    auto fit = [&](auto field, auto model, double& c, double& res) {
        double fm = 0.0, mm = 0.0, ff = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            auto [f1, f2] = field(idx[k]);
            auto [m1, m2] = model(z[k]);
            fm += wgt[k] * (f1 * m1 + f2 * m2);
            mm += wgt[k] * (m1 * m1 + m2 * m2);
            ff += wgt[k] * (f1 * f1 + f2 * f2);
        }
        c = mm > 0.0 ? fm / mm : 0.0;
        double rr = 0.0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            auto [f1, f2] = field(idx[k]);
            auto [m1, m2] = model(z[k]);
            rr += wgt[k] * ((f1 - c * m1) * (f1 - c * m1) + (f2 - c * m2) * (f2 - c * m2));
        }
        res = ff > 0.0 ? std::sqrt(rr / ff) : 0.0;
    };

    fit([&](std::size_t i) { return std::pair{phi.u1[i], phi.u2[i]}; },
        [&](double zz) { return std::pair{prof.dV1(zz), prof.dV2(zz)}; }, rep.c_p, rep.residual);
    // V1'' = V1 V2^2, V2'' = V2 V1^2
    fit([&](std::size_t i) { return std::pair{d1a[i] / dz_dr, d1b[i] / dz_dr}; },
        [&](double zz) {
            double v1 = prof.V1(zz), v2 = prof.V2(zz);
            return std::pair{v1 * v2 * v2, v2 * v1 * v1};
        },
        rep.c_p_c1, rep.residual_c1);
    return rep;
}

double fermi_jacobian(double r, double r0, int dim) { return std::pow((r0 + r) / r0, double(dim - 1)); }

ReflectionReport reflection_check(const num::Grid& g, const Field2& phi, double eps, double d0,
                                  const std::vector<std::pair<double, double>>& deltas)
{
    const double r0 = g.r0;
    for (auto [a, b] : deltas)
        if (!(a > 0.0 && a < 2.0 * d0 && b > 0.0 && b < 2.0 * d0))
            throw ValidationError("reflection offsets must lie in (0, 2 d0)");
    num::CubicSpline s1(g.nodes, phi.u1), s2(g.nodes, phi.u2);
    ReflectionReport rep;
    rep.eps = eps;
    rep.note = "finite-eps solve used as a proxy for the limit; bound holds up to an o(1) term in eps";
    double scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) scale = std::max({scale, std::fabs(phi.u1[i]), std::fabs(phi.u2[i])});
    for (auto [d1, d2] : deltas) {
        const double jl = fermi_jacobian(-d2, r0, g.dim), jr = fermi_jacobian(d1, r0, g.dim);
        const double pl = s2.value(r0 - d2), ql = s2.d1(r0 - d2);
        const double pr = s1.value(r0 + d1), qr = s1.d1(r0 + d1);
        ReflectionRow row;
        row.delta1 = d1;
        row.delta2 = d2;
        row.residual1 = std::fabs(jl * ql + jr * qr);
        row.residual2 = std::fabs(jl * (pl - ql * d2) + jr * (pr - qr * d1));
        row.scaled1 = row.residual1 / (d1 + d2);
        row.scaled2 = row.residual2 / (d1 + d2);
        rep.rows.push_back(row);
    }
    if (!rep.rows.empty()) {
        // residuals at rounding level carry no trend
        const double fl = 1e-8 * std::max(scale, 1e-300);
        auto growth = [&](double first, double last) { return std::max(last, fl) / std::max(first, fl); };
        rep.growth1 = growth(rep.rows.front().scaled1, rep.rows.back().scaled1);
        rep.growth2 = growth(rep.rows.front().scaled2, rep.rows.back().scaled2);
        rep.bounded1 = rep.growth1 <= 2.0;
        rep.bounded2 = rep.growth2 <= 2.0;
    }
    return rep;
}

std::vector<double> solve_collar_problem(const std::vector<double>& rho, int dim, double eps,
                                         const std::vector<double>& potential, const std::vector<double>& rhs)
{
    const std::size_t n = rho.size();
    if (n < 3 || potential.size() != n || rhs.size() != n) throw ValidationError("collar problem size mismatch");
    const double e4 = eps * eps * eps * eps;
    num::BandedMatrix A(n, 1, 1);
    std::vector<double> b(n, 0.0);
    A.set_identity_row(0);
    A.set_identity_row(n - 1);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = rho[i] - rho[i - 1], h2 = rho[i + 1] - rho[i];
        double lo = 2.0 / (h1 * (h1 + h2)), di = -2.0 / (h1 * h2), up = 2.0 / (h2 * (h1 + h2));
        if (dim > 1) {
            const double c = double(dim - 1) / rho[i];
            lo += c * (-h2 / (h1 * (h1 + h2)));
            di += c * ((h2 - h1) / (h1 * h2));
            up += c * (h1 / (h2 * (h1 + h2)));
        }
        A.at(i, i - 1) = -e4 * lo;
        A.at(i, i) = -e4 * di + potential[i];
        A.at(i, i + 1) = -e4 * up;
        b[i] = rhs[i];
    }
    try {
        return num::banded_solve(A, b);
    } catch (const std::exception& e) {
        throw ConvergenceError(std::string("collar Schroedinger solve failed: ") + e.what());
    }
}

SchrodingerReport schrodinger_estimate_check(const limit::ScalarLimitSolution& sol, const std::vector<double>& eps_list,
                                             const std::function<double(double)>& g, double d1, int nodes)
{
    const double R = sol.grid.R;
    SchrodingerReport rep;
    rep.collar = d1 > 0.0 ? d1 : 0.25 * (R - sol.r0);
    if (nodes < 3) throw ValidationError("collar problem needs at least 3 nodes");
    num::CubicSpline w = sol.interpolant();
    const std::size_t m = std::size_t(nodes);
    std::vector<double> rho(m), pot(m), f1(m), f2(m);
    for (std::size_t i = 0; i < rho.size(); ++i) {
        rho[i] = R - rep.collar + rep.collar * double(i) / double(nodes - 1);
        const double wi = rho[i] >= R ? 0.0 : w.value(rho[i]);
        pot[i] = wi * wi;
        const double gi = g ? g(rho[i]) : 1.0;
        const double dist = R - rho[i];
        f1[i] = gi;
        f2[i] = dist * dist * gi;
    }
    rho.back() = R;
    double gmax = 0.0;
    for (std::size_t i = 1; i + 1 < f1.size(); ++i) gmax = std::max(gmax, std::fabs(f1[i]));
    double lo1 = INFINITY, hi1 = 0.0, lo2 = INFINITY, hi2 = 0.0;
    for (double eps : eps_list) {
        SchrodingerRow row;
        row.eps = eps;
        if (gmax > 0.0) {
            row.ratio1 = sup_norm(solve_collar_problem(rho, sol.grid.dim, eps, pot, f1)) / gmax;
            row.ratio2 = sup_norm(solve_collar_problem(rho, sol.grid.dim, eps, pot, f2)) / gmax;
        }
        row.scaled1 = row.ratio1 * eps * eps;
        lo1 = std::min(lo1, row.scaled1);
        hi1 = std::max(hi1, row.scaled1);
        lo2 = std::min(lo2, row.ratio2);
        hi2 = std::max(hi2, row.ratio2);
        rep.rows.push_back(row);
    }
    rep.spread1 = lo1 > 0.0 ? hi1 / lo1 : INFINITY;
    rep.spread2 = lo2 > 0.0 ? hi2 / lo2 : INFINITY;
    rep.pass = rep.spread1 < 2.0 && rep.spread2 < 2.0;
    return rep;
}

}  // namespace psep::lin
