#include "psep/limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "psep/banded.hpp"
#include "psep/common.hpp"
#include "psep/radial.hpp"
#include "psep/spectrum.hpp"

namespace psep::limit {

using num::BandedMatrix;
using num::Grid;

double Nonlinearity::f(double u) const
{
    double u2 = u * u, p = u, s = 0.0;
    for (double c : coeffs) {
        s += c * p;
        p *= u2;
    }
    return s;
}

double Nonlinearity::fu(double u) const
{
    double u2 = u * u, p = 1.0, s = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        s += double(2 * k + 1) * coeffs[k] * p;
        p *= u2;
    }
    return s;
}

Nonlinearity Nonlinearity::cubic(double mu_f)
{
    Nonlinearity n;
    n.coeffs = {mu_f, -1.0};
    n.name = "cubic";
    return n;
}

namespace {

bool dirichlet_at_origin(const Grid& g) { return g.dim == 1 || g.nodes.front() > 0.0; }

// Conservative symmetric form: -div(rho^(d-1) grad u) + V q u = lambda V u on interior unknowns.
// Returns the matrix on the unknown set and fills mass; unknowns are the nodes in [first, last].
BandedMatrix conservative_operator(const Grid& g, const std::vector<double>& q, std::size_t first,
                                   std::size_t last, std::vector<double>& mass)
{
    const auto& x = g.nodes;
    const int d = g.dim;
    const std::size_t m = last - first + 1;
    BandedMatrix A(m, 1, 1);
    mass.assign(m, 0.0);
    auto face = [&](std::size_t i) { return 0.5 * (x[i] + x[i + 1]); };   // between i and i+1
    auto pw = [&](double r) { return std::pow(r, d - 1); };
    for (std::size_t i = first; i <= last; ++i) {
        const std::size_t row = i - first;
        double left = i == 0 ? 0.0 : face(i - 1);
        double right = face(i);
        double vol = (std::pow(right, d) - std::pow(left, d)) / d;
        mass[row] = vol;
        double fr = pw(right) / (x[i + 1] - x[i]);
        A.add(row, row, fr + vol * q[i]);
        if (i + 1 <= last) A.add(row, row + 1, -fr);
        if (i > 0) {
            double fl = pw(left) / (x[i] - x[i - 1]);
            A.add(row, row, fl);
            if (i - 1 >= first) A.add(row, row - 1, -fl);
        }
    }
    return A;
}

double cubic_root_and_slope(const double* x, const double* y, double guess, double& slope)
{
    // Newton on the Lagrange cubic through 4 points
    auto eval = [&](double t, double& p, double& dp) {
        p = 0.0;
        dp = 0.0;
        for (int j = 0; j < 4; ++j) {
            double l = 1.0, dl = 0.0;
            for (int k = 0; k < 4; ++k) {
                if (k == j) continue;
                double inv = 1.0 / (x[j] - x[k]);
                dl = dl * (t - x[k]) * inv + l * inv;
                l *= (t - x[k]) * inv;
            }
            p += y[j] * l;
            dp += y[j] * dl;
        }
    };
    double t = guess;
    for (int it = 0; it < 50; ++it) {
        double p, dp;
        eval(t, p, dp);
        double step = p / dp;
        t -= step;
        if (std::fabs(step) <= 1e-15 * std::max(1.0, std::fabs(t))) break;
    }
    double p, dp;
    eval(t, p, dp);
    slope = dp;
    return t;
}

}  // namespace

num::CubicSpline ScalarLimitSolution::interpolant() const { return num::CubicSpline(grid.nodes, w); }

std::vector<double> limit_residual(const Nonlinearity& f, const Grid& g, const std::vector<double>& w)
{
    std::vector<double> lap = num::apply_radial_laplacian(w, g);
    std::vector<double> r(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) r[i] = -lap[i] - f.f(w[i]);
    r.back() = w.back();
    if (dirichlet_at_origin(g)) r.front() = w.front();
    return r;
}

int count_sign_changes(const std::vector<double>& w, double floor)
{
    double m = sup_norm(w);
    if (m == 0.0) return 0;
    int count = 0, last = 0;
    for (double v : w) {
        if (std::fabs(v) <= floor * m) continue;
        int s = v > 0 ? 1 : -1;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

Interface locate_interface(const Grid& g, const std::vector<double>& w)
{
    const std::size_t n = w.size();
    double wmax = 0.0;
    for (double v : w) wmax = std::max(wmax, std::fabs(v));
    // Dirichlet values are zero up to solver rounding
    const double zero = 1e-12 * wmax;
    std::size_t k = n;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if ((w[i] <= 0.0 && w[i + 1] > 0.0) || (w[i] >= 0.0 && w[i + 1] < 0.0)) {
            if (i == 0 && dirichlet_at_origin(g) && std::fabs(w[0]) <= zero) continue;
            if (i + 1 == n - 1 && std::fabs(w[n - 1]) <= zero) continue;
            k = i;
            break;
        }
    }
    if (k == n) throw ValidationError("no interior sign change in w");
    Interface out;
    const auto& x = g.nodes;
    out.r0_linear = x[k] - w[k] * (x[k + 1] - x[k]) / (w[k + 1] - w[k]);
    std::size_t s = k >= 1 ? k - 1 : 0;
    if (s + 3 >= n) s = n - 4;
    double slope = 0.0;
    out.r0 = cubic_root_and_slope(&x[s], &w[s], out.r0_linear, slope);
    if (!(out.r0 > x[s] && out.r0 < x[s + 3])) {
        out.r0 = out.r0_linear;
        slope = (w[k + 1] - w[k]) / (x[k + 1] - x[k]);
    }
    out.mu = std::fabs(slope);
    return out;
}

std::vector<double> radial_schrodinger_eigs(const Grid& g, const std::vector<double>& potential, int k,
                                            double* max_residual)
{
    const std::size_t n = g.size();
    std::size_t first = dirichlet_at_origin(g) ? 1 : 0;
    std::size_t last = n - 2;
    std::vector<double> mass;
    BandedMatrix A = conservative_operator(g, potential, first, last, mass);
    int kk = std::min<int>(k, int(last - first + 1));
    std::vector<num::EigenPair> eig = num::smallest_eigenpairs(A, kk, 0.0, &mass);
    std::vector<double> vals;
    double res = 0.0;
    for (const auto& e : eig) {
        vals.push_back(e.value);
        res = std::max(res, e.residual);
    }
    if (max_residual) *max_residual = res;
    return vals;
}

std::vector<double> second_radial_mode(const Grid& g)
{
    const std::size_t n = g.size();
    std::size_t first = dirichlet_at_origin(g) ? 1 : 0;
    std::size_t last = n - 2;
    std::vector<double> mass, zero(n, 0.0);
    BandedMatrix A = conservative_operator(g, zero, first, last, mass);
    std::vector<num::EigenPair> eig = num::smallest_eigenpairs(A, 2, 0.0, &mass);
    std::sort(eig.begin(), eig.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
    std::vector<double> v(n, 0.0);
    for (std::size_t i = first; i <= last; ++i) v[i] = eig[1].vector[i - first];
    double m = sup_norm(v);
    double sgn = v[last] > 0 ? 1.0 : -1.0;
    for (double& t : v) t *= sgn / m;
    return v;
}

ScalarLimitSolution solve_on_grid(const Nonlinearity& f, const Grid& g, std::vector<double> w0, double tol)
{
    if (w0.size() != g.size()) throw std::invalid_argument("seed length does not match grid");
    const num::Stencil3 st = num::radial_laplacian_stencil(g);
    const std::size_t n = g.size();
    const bool dir0 = dirichlet_at_origin(g);
    auto residual = [&](const std::vector<double>& w, std::vector<double>& r) { r = limit_residual(f, g, w); };
    auto jacobian = [&](const std::vector<double>& w) {
        BandedMatrix J(n, 1, 1);
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) J.at(i, i - 1) = -st.lo[i];
            J.at(i, i) = -st.di[i] - f.fu(w[i]);
            if (i + 1 < n) J.at(i, i + 1) = -st.up[i];
        }
        J.set_identity_row(n - 1);
        if (dir0) J.set_identity_row(0);
        return J;
    };
    num::NewtonOptions opt;
    opt.tol = tol;
    opt.max_iter = 60;
    auto [w, rep] = num::newton_solve(residual, jacobian, std::move(w0), opt);
    // rounding floor of the second-difference rows
    double amax = 0.0;
    for (std::size_t i = 0; i < n; ++i) amax = std::max(amax, std::fabs(st.lo[i]) + std::fabs(st.di[i]) + std::fabs(st.up[i]));
    double floor = 64.0 * std::numeric_limits<double>::epsilon() * amax * std::max(1.0, sup_norm(w));
    if (!rep.converged && rep.residual <= std::max(tol, floor)) {
        rep.converged = true;
        rep.status = "converged (rounding floor)";
    }
    if (!rep.converged) {
        std::ostringstream os;
        os << "limit Newton failed (" << rep.status << ", residual " << rep.residual << ")";
        throw ConvergenceError(os.str());
    }
    ScalarLimitSolution sol;
    sol.grid = g;
    sol.w = std::move(w);
    sol.f = f;
    sol.residual = rep.residual;
    sol.newton = rep;
    sol.sign_changes = count_sign_changes(sol.w);
    return sol;
}

ScalarLimitSolution solve_limit_scalar(const Nonlinearity& f, const Grid& grid, const SeedSpec& seed, double tol)
{
    std::vector<double> w0 = seed.values;
    if (w0.empty()) {
        double amp = seed.amplitude;
        if (amp <= 0.0) amp = f.fu(0.0) > 0.0 ? std::sqrt(f.fu(0.0)) : 1.0;
        w0 = second_radial_mode(grid);
        for (double& v : w0) v *= amp;
    }
    if (count_sign_changes(w0) != 1) throw std::invalid_argument("seed must change sign exactly once");

    ScalarLimitSolution first = solve_on_grid(f, grid, w0, tol);
    if (first.sign_changes != 1) {
        std::ostringstream os;
        os << "phase separation fails: w has " << first.sign_changes << " sign changes";
        throw ValidationError(os.str());
    }
    Interface itf = locate_interface(grid, first.w);
    Grid g2 = num::recenter(grid, itf.r0);
    std::vector<double> seed2(g2.size());
    num::CubicSpline sp = first.interpolant();
    for (std::size_t i = 0; i < g2.size(); ++i) seed2[i] = sp.value(g2.nodes[i]);
    seed2.back() = 0.0;
    if (dirichlet_at_origin(g2)) seed2.front() = 0.0;

    ScalarLimitSolution sol = solve_on_grid(f, g2, seed2, tol);
    if (sol.sign_changes != 1) {
        std::ostringstream os;
        os << "phase separation fails after re-centring: " << sol.sign_changes << " sign changes";
        throw ValidationError(os.str());
    }
    itf = locate_interface(g2, sol.w);
    sol.r0 = itf.r0;
    sol.mu = itf.mu;
    sol.r0_linear = itf.r0_linear;
    sol.grid.r0 = itf.r0;
    // orientation: positive outside the interface
    if (sol.w[sol.w.size() - 2] < 0.0) throw ValidationError("w must be positive on the exterior side");
    return sol;
}

SeparationReport check_separation(const ScalarLimitSolution& sol)
{
    SeparationReport r;
    r.sign_changes = count_sign_changes(sol.w);
    if (r.sign_changes != 1) {
        r.reason = r.sign_changes == 0 ? "no interface" : "multiple interfaces";
        return r;
    }
    try {
        Interface itf = locate_interface(sol.grid, sol.w);
        r.r0 = itf.r0;
        r.mu = itf.mu;
    } catch (const std::exception& e) {
        r.reason = e.what();
        return r;
    }
    if (!(r.mu > 0.0)) {
        r.reason = "Hopf slope not positive";
        return r;
    }
    r.pass = true;
    r.reason = "single interface with positive normal slope";
    return r;
}

NondegeneracyReport nondegeneracy_spectrum(const ScalarLimitSolution& sol, int k)
{
    const Grid& g = sol.grid;
    const std::size_t n = g.size();
    const double r0 = sol.r0;
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = -sol.f.fu(sol.w[i]);

    // subdomain grids with r0 as a node; nodes closer than 0.1 h to r0 are dropped
    std::vector<double> in_nodes, in_q, out_nodes, out_q;
    for (std::size_t i = 0; i < n; ++i) {
        double h = i + 1 < n ? g.nodes[i + 1] - g.nodes[i] : g.nodes[i] - g.nodes[i - 1];
        if (std::fabs(g.nodes[i] - r0) < 0.1 * h) continue;
        if (g.nodes[i] < r0) {
            in_nodes.push_back(g.nodes[i]);
            in_q.push_back(q[i]);
        } else {
            out_nodes.push_back(g.nodes[i]);
            out_q.push_back(q[i]);
        }
    }
    const double q0 = -sol.f.fu(0.0);
    in_nodes.push_back(r0);
    in_q.push_back(q0);
    out_nodes.insert(out_nodes.begin(), r0);
    out_q.insert(out_q.begin(), q0);

    NondegeneracyReport rep;
    double res;
    Grid gin = num::grid_from_nodes(in_nodes, r0, g.dim);
    rep.inner = radial_schrodinger_eigs(gin, in_q, k, &res);
    rep.max_residual = res;
    Grid gout = num::grid_from_nodes(out_nodes, r0, g.dim);
    rep.outer = radial_schrodinger_eigs(gout, out_q, k, &res);
    rep.max_residual = std::max(rep.max_residual, res);
    rep.full = radial_schrodinger_eigs(g, q, k, &res);
    rep.max_residual = std::max(rep.max_residual, res);
    rep.min_abs = std::numeric_limits<double>::infinity();
    for (const auto* v : {&rep.inner, &rep.outer, &rep.full})
        for (double x : *v) rep.min_abs = std::min(rep.min_abs, std::fabs(x));
    return rep;
}

ExtrapolatedInterface extrapolated_interface(const ScalarLimitSolution& sol, double tol)
{
    const Grid fine = num::refine(sol.grid);
    num::CubicSpline s(sol.grid.nodes, sol.w);
    std::vector<double> w0(fine.size());
    for (std::size_t i = 0; i < fine.size(); ++i) w0[i] = s.value(fine.nodes[i]);
    ScalarLimitSolution fs = solve_on_grid(sol.f, fine, std::move(w0), tol);
    const Interface coarse = locate_interface(sol.grid, sol.w);
    const Interface half = locate_interface(fine, fs.w);
    ExtrapolatedInterface out;
    out.r0_h = coarse.r0;
    out.mu_h = coarse.mu;
    out.r0_h2 = half.r0;
    out.mu_h2 = half.mu;
    out.r0 = (4.0 * half.r0 - coarse.r0) / 3.0;
    out.mu = (4.0 * half.mu - coarse.mu) / 3.0;
    return out;
}

}  // namespace psep::limit
