#include "psep/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "psep/diagnostics.hpp"
#include "psep/fullsys.hpp"
#include "psep/linop.hpp"

namespace psep::verify {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x, int digits = 4)
{
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

io::Json number_list(const std::vector<double>& v)
{
    io::Json a = io::Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

std::vector<double> sorted_descending(std::vector<double> v)
{
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

limit::ScalarLimitSolution solve_limit(const limit::Nonlinearity& f, double R, double r0_seed, int nodes, int dim)
{
    return limit::solve_limit_scalar(f, num::build_grid(R, r0_seed, nodes, dim));
}

bool relative_close(const std::vector<double>& a, const std::vector<double>& b, double tol, double& worst)
{
    worst = 0.0;
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::fabs(a[i] - b[i]) / std::max(std::fabs(a[i]), 1e-300));
    return worst <= tol;
}

}  // namespace

io::Json to_json(const Check& c)
{
    io::Json j;
    j["id"] = c.id;
    j["name"] = c.name;
    j["status"] = c.pass ? "PASS" : "FAIL";
    j["summary"] = c.summary;
    j["details"] = c.details;
    io::Json notes = io::Json::array();
    for (const auto& n : c.notes) notes.push_back(n);
    j["notes"] = notes;
    return j;
}

Workspace::Workspace(const io::RunConfig& c) : cfg(c)
{
    profile = inner::solve_inner_profile(cfg.profile_L, cfg.profile_n, cfg.profile_tol);
    correction = inner::solve_W(profile);
    limit = solve_limit(cfg.nonlinearity(), cfg.domain_radius(), cfg.interface_seed(), cfg.limit_nodes, cfg.dim);
}

lin::LayerBackground Workspace::background() const
{
    return lin::LayerBackground{limit, profile, correction, cfg.b_tilde, cfg.zeta};
}

Field2 far_field_data(const num::Grid& g, double r0, double R, bool generic)
{
    Field2 f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        f.u1[i] = lin::compact_bump(g.nodes[i], r0 + 0.7 * (R - r0), 0.2 * (R - r0));
        if (generic) f.u2[i] = -0.7 * lin::compact_bump(g.nodes[i], 0.45 * r0, 0.3 * r0);
    }
    return f;
}

ShootingResult shoot_limit(const limit::Nonlinearity& f, int dim, double R, double guess, int steps)
{
    struct State {
        double w, v;
    };
    const double h = R / double(steps);
    auto rhs = [&](double r, State y) {
        // at the origin the regular solution has w'' = -f(w)/dim
        const double acc = r > 0.0 ? -double(dim - 1) / r * y.v - f.f(y.w) : -f.f(y.w) / double(dim);
        return State{y.v, dim == 1 ? -f.f(y.w) : acc};
    };
    auto run = [&](double s, ShootingResult* out) {
        State y = dim == 1 ? State{0.0, s} : State{s, 0.0};
        double r = 0.0;
        int changes = 0;
        for (int i = 0; i < steps; ++i) {
            const State k1 = rhs(r, y);
            const State k2 = rhs(r + 0.5 * h, {y.w + 0.5 * h * k1.w, y.v + 0.5 * h * k1.v});
            const State k3 = rhs(r + 0.5 * h, {y.w + 0.5 * h * k2.w, y.v + 0.5 * h * k2.v});
            const State k4 = rhs(r + h, {y.w + h * k3.w, y.v + h * k3.v});
            const State yn{y.w + h / 6.0 * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w),
                           y.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
            if (i > 0 && i + 1 < steps && (y.w > 0.0) != (yn.w > 0.0)) {
                ++changes;
                if (out && changes == 1) {
                    // root of the cubic Hermite interpolant on [r, r + h]
                    auto herm = [&](double t, bool deriv) {
                        if (!deriv)
                            return (2 * t * t * t - 3 * t * t + 1) * y.w + (t * t * t - 2 * t * t + t) * h * y.v +
                                   (-2 * t * t * t + 3 * t * t) * yn.w + (t * t * t - t * t) * h * yn.v;
                        return (6 * t * t - 6 * t) / h * y.w + (3 * t * t - 4 * t + 1) * y.v +
                               (-6 * t * t + 6 * t) / h * yn.w + (3 * t * t - 2 * t) * yn.v;
                    };
                    double a = 0.0, b = 1.0, fa = y.w;
                    for (int it = 0; it < 80; ++it) {
                        const double m = 0.5 * (a + b), fm = herm(m, false);
                        if ((fm > 0.0) == (fa > 0.0)) {
                            a = m;
                            fa = fm;
                        } else {
                            b = m;
                        }
                    }
                    const double t = 0.5 * (a + b);
                    out->r0 = r + t * h;
                    out->mu = std::fabs(herm(t, true));
                }
            }
            y = yn;
            r += h;
        }
        if (out) out->sign_changes = changes;
        return y.w;
    };
    double s0 = guess, s1 = guess * (1.0 + 1e-4);
    double g0 = run(s0, nullptr), g1 = run(s1, nullptr);
    for (int it = 0; it < 60 && std::fabs(g1) > 1e-13 && g1 != g0; ++it) {
        const double s2 = s1 - g1 * (s1 - s0) / (g1 - g0);
        s0 = s1;
        g0 = g1;
        s1 = s2;
        g1 = run(s1, nullptr);
    }
    ShootingResult res;
    res.parameter = s1;
    res.end_value = run(s1, &res);
    return res;
}

Check inner_profile_fidelity(const Workspace& ws)
{
    Check c;
    c.id = 1;
    c.name = "inner profile fidelity";
    const auto& cfg = ws.cfg;
    const auto t0 = Clock::now();
    const inner::ProfilePair p = inner::solve_inner_profile(cfg.profile_L, cfg.profile_n, cfg.profile_tol);
    c.seconds = since(t0);
    const inner::ProfilePair q =
        inner::solve_inner_profile(cfg.profile_L * 4.0 / 3.0, cfg.profile_n * 2, cfg.profile_tol);
    const double v10 = p.V1[p.center()], v20 = p.V2[p.center()];
    const double dA = std::fabs(p.A - q.A), dB = std::fabs(p.B - q.B);
    const bool normal = std::fabs(v10 - 1.0) <= 1e-9 && std::fabs(v20 - 1.0) <= 1e-9;
    const bool sym = p.symmetry <= 1e-8;
    const bool stable = dA <= 1e-6 && dB <= 1e-6;
    const bool fast = c.seconds <= 5.0;
    c.pass = normal && sym && stable && fast;
    c.summary = "V(0) = (" + fmt(v10, 12) + ", " + fmt(v20, 12) + "), symmetry " + fmt(p.symmetry, 3) + ", |dA| " +
                fmt(dA, 3) + ", |dB| " + fmt(dB, 3);
    c.details = {{"A", p.A},         {"B", p.B},         {"A_refined", q.A}, {"B_refined", q.B},
                 {"V1_0", v10},      {"V2_0", v20},      {"symmetry", p.symmetry},
                 {"residual", p.residual}, {"runtime_ok", fast}};
    c.notes.push_back("runtime limit 5 s; wall time is reported in timing.json");
    return c;
}

Check translation_kernel(const Workspace& ws)
{
    Check c;
    c.id = 2;
    c.name = "kernel of the layer linearization";
    const auto t0 = Clock::now();
    const inner::KernelCheck k = inner::kernel_check(ws.cfg.profile_L, ws.cfg.profile_n, 3, 1e-6);
    c.seconds = since(t0);
    const bool fast = c.seconds <= 10.0;
    c.pass = k.near_zero == 1 && k.correlation >= 0.999 && fast;
    c.summary = std::to_string(k.near_zero) + " eigenvalue(s) within 1e-6, correlation with V' " +
                fmt(k.correlation, 8) + ", gap " + fmt(k.gap, 3);
    c.details = {{"eigenvalues", number_list(k.eigenvalues)},
                 {"near_zero", k.near_zero},
                 {"correlation", k.correlation},
                 {"gap", k.gap},
                 {"runtime_ok", fast}};
    c.notes.push_back("runtime limit 10 s; wall time is reported in timing.json");
    return c;
}

Check correction_profiles(const Workspace& ws)
{
    Check c;
    c.id = 3;
    c.name = "correction and hat profiles";
    const auto& w = ws.correction;
    const inner::HatProfiles hats = inner::solve_kernel_corrections(ws.profile, w);
    const inner::ProfilePair p2 = inner::solve_inner_profile(ws.cfg.profile_L, ws.cfg.profile_n * 2, ws.cfg.profile_tol);
    const inner::CorrectionProfile w2 = inner::solve_W(p2);
    const inner::HatProfiles hats2 = inner::solve_kernel_corrections(p2, w2);
    const double da = std::fabs(hats.a - hats2.a), db = std::fabs(hats.b_const - hats2.b_const);

    const bool solve_ok = w.residual <= 1e-9;
    const bool far_ok = w.far_field_deviation <= 1e-6;
    const bool sym_ok = hats.phi_symmetry <= 1e-7 && hats.psi_antisymmetry <= 1e-7;
    const bool stable = da <= 1e-5 && db <= 1e-5;
    c.pass = solve_ok && far_ok && sym_ok && stable;
    c.summary = "residual " + fmt(w.residual, 3) + ", far-field |W1 + z^2 V1'/2| " + fmt(w.far_field_deviation, 4) +
                " (limit 1e-6), hat symmetry " + fmt(std::max(hats.phi_symmetry, hats.psi_antisymmetry), 3) +
                ", |da| " + fmt(da, 3) + ", |db| " + fmt(db, 3);
    c.details = {{"residual", w.residual},
                 {"far_field_deviation", w.far_field_deviation},
                 {"corrected_far_field_deviation", w.corrected_deviation},
                 {"far_field_slope", w.drift},
                 {"antisymmetry", w.antisymmetry},
                 {"a", hats.a},
                 {"b", hats.b_const},
                 {"a_refined", hats2.a},
                 {"b_refined", hats2.b_const},
                 {"phi_symmetry", hats.phi_symmetry},
                 {"psi_antisymmetry", hats.psi_antisymmetry},
                 {"checks", {{"solve", solve_ok}, {"far_field", far_ok}, {"symmetry", sym_ok}, {"mesh_stability", stable}}}};
    c.notes.push_back("W1 + z^2 V1'/2 tends to a linear function with slope " + fmt(w.drift, 8) +
                      "; after removing it the far-field deviation is " + fmt(w.corrected_deviation, 3));
    return c;
}

Check limit_problem(const Workspace& ws)
{
    Check c;
    c.id = 4;
    c.name = "limit problem";
    const auto& cfg = ws.cfg;
    const auto& sol = ws.limit;
    const limit::SeparationReport sep = limit::check_separation(sol);
    const limit::NondegeneracyReport nd = limit::nondegeneracy_spectrum(sol, 3);
    const limit::ScalarLimitSolution fine =
        solve_limit(sol.f, cfg.domain_radius(), cfg.interface_seed(), 2 * cfg.limit_nodes - 1, cfg.dim);
    const limit::NondegeneracyReport nd2 = limit::nondegeneracy_spectrum(fine, 3);
    double w_in = 0.0, w_out = 0.0, w_full = 0.0;
    const bool stable = relative_close(nd.inner, nd2.inner, 0.1, w_in) &&
                        relative_close(nd.outer, nd2.outer, 0.1, w_out) &&
                        relative_close(nd.full, nd2.full, 0.1, w_full);

    const limit::ExtrapolatedInterface ex = limit::extrapolated_interface(sol);
    const auto& g = sol.grid;
    const double guess = g.dim == 1 ? (sol.w[1] - sol.w[0]) / (g.nodes[1] - g.nodes[0]) : sol.w[0];
    const ShootingResult sh = shoot_limit(sol.f, g.dim, g.R, guess);
    const double dmu = std::fabs(ex.mu - sh.mu);

    c.pass = sep.pass && sol.mu > 0.0 && nd.min_abs >= 1e-3 && stable && sh.sign_changes == 1 && dmu <= 1e-6;
    c.summary = "r0 " + fmt(ex.r0, 10) + ", mu " + fmt(ex.mu, 10) + " (shooting " + fmt(sh.mu, 10) + ", diff " +
                fmt(dmu, 3) + "), min|lambda| " + fmt(nd.min_abs, 4) + ", spectral drift " +
                fmt(std::max({w_in, w_out, w_full}), 3);
    c.details = {{"sign_changes", sep.sign_changes},
                 {"r0", sol.r0},
                 {"mu", sol.mu},
                 {"mu_refined", ex.mu_h2},
                 {"mu_extrapolated", ex.mu},
                 {"r0_extrapolated", ex.r0},
                 {"mu_shooting", sh.mu},
                 {"r0_shooting", sh.r0},
                 {"spectrum_inner", number_list(nd.inner)},
                 {"spectrum_outer", number_list(nd.outer)},
                 {"spectrum_full", number_list(nd.full)},
                 {"spectrum_full_refined", number_list(nd2.full)},
                 {"min_abs_eigenvalue", nd.min_abs},
                 {"spectral_drift", std::max({w_in, w_out, w_full})}};
    c.notes.push_back("unextrapolated mu differs from shooting by " + fmt(std::fabs(sol.mu - sh.mu), 3));
    return c;
}

namespace {

io::Json estimate_json(const lin::EstimateReport& r)
{
    io::Json levels = io::Json::array();
    for (const auto& l : r.levels)
        levels.push_back({{"eps", l.eps},
                          {"max_ratio", l.max_ratio},
                          {"mean_ratio", l.mean_ratio},
                          {"min_ratio", l.min_ratio},
                          {"sigma_min", l.sigma_min}});
    return {{"levels", levels},   {"slope", r.slope}, {"slope_stderr", r.slope_stderr},
            {"constant", r.constant}, {"r2", r.fit.r2}, {"m_max", r.m_max},
            {"alpha", r.alpha}};
}

lin::EstimateConfig estimate_config(const io::RunConfig& cfg)
{
    lin::EstimateConfig e;
    e.eps_list = cfg.eps_list;
    e.ensemble = cfg.ensemble;
    e.seed = cfg.seed;
    e.m_max = cfg.m_max;
    e.alpha = cfg.alpha;
    e.d_fraction = cfg.d_fraction;
    e.nodes = cfg.layer_nodes;
    e.threads = cfg.threads;
    return e;
}

}  // namespace

Check estimate_scaling(const Workspace& ws)
{
    Check c;
    c.id = 5;
    c.name = "estimate scaling";
    const auto t0 = Clock::now();
    const auto in_band = [](double s) { return s >= 0.85 && s <= 1.15; };

    struct Run {
        std::string label;
        bool ok = false;
        double slope = 0.0;
        io::Json json;
    };
    std::vector<Run> runs;
    auto run = [&](const std::string& label, const lin::LayerBackground& bg, const lin::EstimateConfig& e) {
        Run r;
        r.label = label;
        try {
            const lin::EstimateReport rep = lin::measure_estimate(bg, bg.sol.f, e);
            r.slope = rep.slope;
            r.ok = in_band(rep.slope);
            r.json = estimate_json(rep);
        } catch (const lin::NearKernelError& err) {
            r.json = {{"error", err.what()}, {"sigma_min", err.sigma_min()}, {"eps", err.eps()}};
        }
        runs.push_back(std::move(r));
    };

    run("dim" + std::to_string(ws.cfg.dim), ws.background(), estimate_config(ws.cfg));
    if (ws.cfg.dim == 1) {
        // companion radial run with several angular modes
        io::RunConfig c2 = ws.cfg;
        c2.dim = 2;
        c2.R = 0.0;
        c2.r0_seed = 0.0;
        c2.mu_f = 0.0;
        c2.coeffs.clear();
        c2.m_max = 4;
        const limit::ScalarLimitSolution sol2 =
            solve_limit(c2.nonlinearity(), c2.domain_radius(), c2.interface_seed(), c2.limit_nodes, 2);
        const lin::LayerBackground bg2{sol2, ws.profile, ws.correction, c2.b_tilde, c2.zeta};
        run("dim2", bg2, estimate_config(c2));
    }
    c.seconds = since(t0);
    const bool fast = c.seconds <= 600.0;
    c.pass = fast;
    for (const auto& r : runs) {
        c.pass = c.pass && r.ok;
        c.details[r.label] = r.json;
        if (!c.summary.empty()) c.summary += "; ";
        c.summary += r.label + " slope " + (r.json.contains("error") ? std::string("aborted") : fmt(r.slope, 4));
    }
    c.summary += " (band [0.85, 1.15])";
    c.details["runtime_ok"] = fast;
    c.notes.push_back("runtime limit 600 s; wall time is reported in timing.json");
    return c;
}

Check wrong_side_decay(const Workspace& ws)
{
    Check c;
    c.id = 6;
    c.name = "wrong-side decay";
    const auto bg = ws.background();
    const double d = lin::collar_width(ws.limit, ws.cfg.d_fraction);
    const double R = ws.limit.grid.R, r0 = ws.limit.r0;
    const std::vector<double> eps_list = sorted_descending(ws.cfg.eps_list);

    io::Json rows = io::Json::array();
    std::vector<double> rates;
    bool ok = true;
    std::string why;
    std::vector<std::string> wide;
    for (double eps : eps_list) {
        const ansatz::AnsatzField U = lin::ansatz_field(bg, eps, ws.cfg.layer_nodes);
        const lin::ModeOperator L = lin::assemble_linearized(U, ws.limit.f, 0);
        const Field2 phi = lin::solve_linearized(L, far_field_data(U.grid, r0, R, false));
        io::Json row = {{"eps", eps}};
        try {
            const lin::DecayReport dr = lin::decay_diagnostic(U.grid, phi, 2, 1, eps, d);
            row["rate"] = dr.rate;
            row["r2"] = dr.fit.r2;
            row["nodes"] = dr.nodes;
            rates.push_back(dr.rate);
            if (dr.rejected || dr.fit.r2 < 0.99) {
                ok = false;
                if (why.empty()) why = "fit at eps " + fmt(eps) + " has R^2 " + fmt(dr.fit.r2, 4);
            }
        } catch (const ValidationError& e) {
            ok = false;
            row["error"] = e.what();
            if (why.empty()) why = "eps " + fmt(eps) + ": " + e.what();
        }
        try {
            const lin::DecayReport near = lin::decay_diagnostic(U.grid, phi, 2, 1, eps, d, 1e-13, 0.5);
            row["rate_from_half_eps"] = near.rate;
            row["r2_from_half_eps"] = near.fit.r2;
            wide.push_back("eps " + fmt(eps) + ": rate " + fmt(near.rate, 4) + ", R^2 " + fmt(near.fit.r2, 4) +
                           " on [0.5 eps, d/2]");
        } catch (const ValidationError&) {
        }
        rows.push_back(row);
    }
    double spread = 0.0;
    for (std::size_t i = 1; i < rates.size(); ++i)
        spread = std::max(spread, std::fabs(rates[i] / rates[i - 1] - 1.0));
    if (ok && spread > 0.2) {
        ok = false;
        why = "fitted rate changes by " + fmt(100.0 * spread, 3) + "% under eps halving";
    }
    c.pass = ok;
    c.summary = ok ? "rates stable within " + fmt(100.0 * spread, 3) + "%, all R^2 >= 0.99" : why;
    c.details = {{"fits", rows}, {"collar_width", d}, {"rate_spread", spread}};
    for (auto& s : wide) c.notes.push_back(s);
    return c;
}

Check profile_collapse(const Workspace& ws)
{
    Check c;
    c.id = 7;
    c.name = "profile collapse in the layer";
    const auto bg = ws.background();
    const double R = ws.limit.grid.R, r0 = ws.limit.r0;
    const std::vector<double> eps_list = sorted_descending(ws.cfg.eps_list);
    io::Json rows = io::Json::array();
    std::vector<double> res;
    for (double eps : eps_list) {
        const ansatz::AnsatzField U = lin::ansatz_field(bg, eps, ws.cfg.layer_nodes);
        const lin::ModeOperator L = lin::assemble_linearized(U, ws.limit.f, 0);
        const Field2 phi = lin::solve_linearized(L, far_field_data(U.grid, r0, R, true));
        const ansatz::ProfileEvaluator prof(ws.profile, ws.correction);
        const lin::BlowupReport b = lin::blowup_profile(U.grid, phi, U.params, prof, 4.0);
        res.push_back(b.residual);
        rows.push_back({{"eps", eps},
                        {"c_p", b.c_p},
                        {"residual", b.residual},
                        {"c_p_c1", b.c_p_c1},
                        {"residual_c1", b.residual_c1},
                        {"nodes", b.nodes}});
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < res.size(); ++i) decreasing = decreasing && res[i] < res[i - 1];
    c.pass = !res.empty() && res.back() <= 0.1 && decreasing;
    c.summary = "residual on |z| <= 4:";
    for (std::size_t i = 0; i < res.size(); ++i) c.summary += " " + fmt(res[i], 3);
    c.summary += decreasing ? " (decreasing)" : " (not decreasing)";
    c.details = {{"rows", rows}, {"decreasing", decreasing}};
    return c;
}

Check reflection_laws(const Workspace& ws)
{
    Check c;
    c.id = 8;
    c.name = "reflection laws";
    const auto bg = ws.background();
    const double R = ws.limit.grid.R, r0 = ws.limit.r0;
    const double eps = *std::min_element(ws.cfg.eps_list.begin(), ws.cfg.eps_list.end());
    const ansatz::AnsatzField U = lin::ansatz_field(bg, eps, ws.cfg.layer_nodes);
    const lin::ModeOperator L = lin::assemble_linearized(U, ws.limit.f, 0);
    const double d0 = U.params.d0;
    std::vector<std::pair<double, double>> deltas;
    for (double q : {0.2, 0.1, 0.05}) deltas.emplace_back(q * d0, q * d0);

    const Field2 phi = lin::solve_linearized(L, far_field_data(U.grid, r0, R, true));
    const lin::ReflectionReport rep = lin::reflection_check(U.grid, phi, eps, d0, deltas);
    io::Json rows = io::Json::array();
    for (const auto& r : rep.rows)
        rows.push_back({{"delta", r.delta1},
                        {"residual_derivative", r.residual1},
                        {"residual_value", r.residual2},
                        {"scaled_derivative", r.scaled1},
                        {"scaled_value", r.scaled2}});
    c.pass = rep.bounded1 && rep.bounded2;
    c.summary = "eps " + fmt(eps) + ": growth of residual/(2 delta) " + fmt(rep.growth1, 3) + " (derivative law), " +
                fmt(rep.growth2, 3) + " (value law), limit 2";
    c.details = {{"eps", eps}, {"rows", rows}, {"growth_derivative", rep.growth1}, {"growth_value", rep.growth2}};

    // mirror-symmetric data on a mirror-symmetric 1D problem satisfies the derivative law exactly
    if (ws.limit.grid.dim == 1 && std::fabs(r0 - 0.5 * R) <= 1e-8 * R) {
        Field2 g(U.grid.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            g.u1[i] = lin::compact_bump(U.grid.nodes[i], r0 + 0.7 * (R - r0), 0.2 * (R - r0));
            g.u2[i] = lin::compact_bump(U.grid.nodes[i], r0 - 0.7 * (R - r0), 0.2 * (R - r0));
        }
        const Field2 ps = lin::solve_linearized(L, g);
        const lin::ReflectionReport sym = lin::reflection_check(U.grid, ps, eps, d0, deltas);
        double worst = 0.0, scale = std::max(sup_norm(ps.u1), sup_norm(ps.u2));
        for (const auto& r : sym.rows) worst = std::max(worst, r.residual1);
        const bool exact = worst <= 1e-8 * scale;
        c.pass = c.pass && exact;
        c.summary += "; symmetric case residual " + fmt(worst, 3);
        c.details["symmetric_residual"] = worst;
        c.details["symmetric_scale"] = scale;
    }
    c.notes.push_back(rep.note);
    return c;
}

Check collar_schrodinger(const Workspace& ws)
{
    Check c;
    c.id = 9;
    c.name = "boundary collar Schroedinger bounds";
    const lin::SchrodingerReport r = lin::schrodinger_estimate_check(ws.limit, sorted_descending(ws.cfg.eps_list));
    io::Json rows = io::Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"eps", row.eps}, {"ratio1", row.ratio1}, {"ratio1_eps2", row.scaled1}, {"ratio2", row.ratio2}});
    c.pass = r.pass;
    c.summary = "spread of ratio1 eps^2 " + fmt(r.spread1, 4) + ", of ratio2 " + fmt(r.spread2, 4) + " (limit 2)";
    c.details = {{"rows", rows}, {"collar", r.collar}, {"spread1", r.spread1}, {"spread2", r.spread2}};
    return c;
}

full::SolutionBranch continuation_branch(const Workspace& ws)
{
    const auto& cfg = ws.cfg;
    const double eps0 = std::pow(cfg.betas.front(), -0.25);
    const ansatz::AnsatzField seed = lin::ansatz_field(ws.background(), eps0, cfg.continuation_nodes);
    full::ContinuationOptions opt;
    opt.tol = cfg.continuation_tol;
    return full::continue_in_beta(seed, ws.limit.f, cfg.betas, opt);
}

Check full_system(const Workspace& ws) { return assess_branch(ws, continuation_branch(ws)); }

Check assess_branch(const Workspace& ws, const full::SolutionBranch& br)
{
    Check c;
    c.id = 10;
    c.name = "full-system continuation";
    const auto& cfg = ws.cfg;
    const auto bg = ws.background();

    io::Json rows = io::Json::array();
    std::vector<double> disc, overlap, width;
    for (const auto& p : br.points) {
        const ansatz::AnsatzField U = lin::ansatz_field(bg, p.eps, cfg.continuation_nodes);
        const full::AnsatzDiscrepancy dsc = full::compare_to_ansatz(p, U, ws.limit);
        const full::SegregationMetrics m = full::segregation_metrics(p);
        disc.push_back(dsc.sup);
        overlap.push_back(m.overlap);
        width.push_back(m.width_over_eps);
        rows.push_back({{"beta", p.beta},
                        {"eps", p.eps},
                        {"iterations", p.iterations},
                        {"residual", p.residual},
                        {"min_value", p.min_value},
                        {"discrepancy", dsc.sup},
                        {"discrepancy_outer", dsc.outer},
                        {"discrepancy_collar_over_eps", dsc.collar},
                        {"difference_vs_limit", dsc.difference_vs_limit},
                        {"overlap", m.overlap},
                        {"interface", m.interface},
                        {"width_over_eps", m.width_over_eps}});
    }
    auto strictly_decreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (!(v[i] < v[i - 1])) return false;
        return true;
    };
    const bool complete = !br.truncated && br.points.size() >= cfg.betas.size();
    const bool disc_ok = strictly_decreasing(disc), overlap_ok = strictly_decreasing(overlap);
    const double wmax = width.empty() ? 0.0 : *std::max_element(width.begin(), width.end());
    const double wmin = width.empty() ? 0.0 : *std::min_element(width.begin(), width.end());
    const bool width_ok = !width.empty() && wmax <= 3.0 && wmax <= 1.5 * wmin;
    const bool positive = br.warnings.empty();
    c.pass = complete && disc_ok && overlap_ok && width_ok && positive;
    c.summary = std::to_string(br.points.size()) + " points up to beta " +
                (br.points.empty() ? std::string("-") : fmt(br.points.back().beta, 3)) +
                (disc_ok ? ", discrepancy decreasing" : ", discrepancy NOT decreasing") +
                (overlap_ok ? ", overlap decreasing" : ", overlap NOT decreasing") + ", width/eps in [" +
                fmt(wmin, 4) + ", " + fmt(wmax, 4) + "]";
    if (br.truncated) c.summary += "; truncated: " + br.diagnostic;
    c.details = {{"points", rows},
                 {"truncated", br.truncated},
                 {"diagnostic", br.diagnostic},
                 {"bisections", br.bisections},
                 {"warnings", br.warnings}};
    return c;
}

std::vector<Check> run_all(const Workspace& ws)
{
    using Fn = Check (*)(const Workspace&);
    const Fn all[] = {inner_profile_fidelity, translation_kernel, correction_profiles, limit_problem,
                      estimate_scaling,       wrong_side_decay,   profile_collapse,    reflection_laws,
                      collar_schrodinger,     full_system};
    std::vector<Check> out;
    for (Fn f : all) {
        const auto t0 = Clock::now();
        Check c = f(ws);
        if (c.seconds == 0.0) c.seconds = since(t0);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace psep::verify
