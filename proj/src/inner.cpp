#include "psep/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <initializer_list>
#include <sstream>

#include "psep/banded.hpp"
#include "psep/fit.hpp"
#include "psep/spectrum.hpp"

namespace psep::inner {

using num::BandedMatrix;

namespace {

// values below this sit under the rounding noise of the converged discrete system
constexpr double kTailFloor = 1e-13;

// Residual level that rounding in the second difference alone produces (stencil weights sum to 4/h^2).
double rounding_floor(std::initializer_list<const std::vector<double>*> vs, double h)
{
    double m = 0.0;
    for (const auto* v : vs)
        for (double x : *v) m = std::max(m, std::fabs(x));
    return 4.0 * std::numeric_limits<double>::epsilon() * m / (h * h);
}

struct ProfileSystem {
    std::size_t nodes;
    double h;
    double slope;
    std::size_t c;
    Scheme scheme;

    void residual(const std::vector<double>& x, std::vector<double>& R) const
    {
        const std::size_t n = nodes, N = 2 * n;
        R.assign(N, 0.0);
        const double ih2 = 1.0 / (h * h);
        auto F = [&](std::size_t i, int comp) {
            double a = x[2 * i], b = x[2 * i + 1];
            return comp == 0 ? a * b * b : b * a * a;
        };
        for (std::size_t i = 1; i + 1 < n; ++i) {
            for (int comp = 0; comp < 2; ++comp) {
                double lap = -(x[2 * (i + 1) + comp] - 2.0 * x[2 * i + comp] + x[2 * (i - 1) + comp]) * ih2;
                double src = scheme == Scheme::Numerov
                                 ? (F(i - 1, comp) + 10.0 * F(i, comp) + F(i + 1, comp)) / 12.0
                                 : F(i, comp);
                R[2 * i + comp] = lap + src;
            }
        }
        R[2 * c] = x[2 * c] - x[2 * c + 1];
        R[0] = x[0];
        R[N - 1] = x[N - 1];
        R[1] = (x[1] - x[3]) / h - slope;
        R[N - 2] = (x[N - 2] - x[N - 4]) / h - slope;
    }

    BandedMatrix jacobian(const std::vector<double>& x) const
    {
        const std::size_t n = nodes, N = 2 * n;
        BandedMatrix J(N, 3, 3);
        const double ih2 = 1.0 / (h * h);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            for (int comp = 0; comp < 2; ++comp) {
                const std::size_t row = 2 * i + comp;
                const int o = 1 - comp;
                J.add(row, 2 * (i + 1) + comp, -ih2);
                J.add(row, 2 * (i - 1) + comp, -ih2);
                J.add(row, row, 2.0 * ih2);
                auto put = [&](std::size_t k, double wt) {
                    double a = x[2 * k], b = x[2 * k + 1];
                    double self = comp == 0 ? b * b : a * a;
                    J.add(row, 2 * k + comp, wt * self);
                    J.add(row, 2 * k + o, wt * 2.0 * a * b);
                };
                if (scheme == Scheme::Numerov) {
                    put(i - 1, 1.0 / 12.0);
                    put(i, 10.0 / 12.0);
                    put(i + 1, 1.0 / 12.0);
                } else {
                    put(i, 1.0);
                }
            }
        }
        J.clear_row(2 * c);
        J.at(2 * c, 2 * c) = 1.0;
        J.at(2 * c, 2 * c + 1) = -1.0;
        J.set_identity_row(0);
        J.set_identity_row(N - 1);
        J.clear_row(1);
        J.at(1, 1) = 1.0 / h;
        J.at(1, 3) = -1.0 / h;
        J.clear_row(N - 2);
        J.at(N - 2, N - 2) = 1.0 / h;
        J.at(N - 2, N - 4) = -1.0 / h;
        return J;
    }
};

std::vector<double> central_derivative(const std::vector<double>& U, double h)
{
    const std::size_t n = U.size();
    std::vector<double> D(n);
    for (std::size_t i = 1; i + 1 < n; ++i) D[i] = (U[i + 1] - U[i - 1]) / (2.0 * h);
    D[0] = (-3.0 * U[0] + 4.0 * U[1] - U[2]) / (2.0 * h);
    D[n - 1] = (3.0 * U[n - 1] - 4.0 * U[n - 2] + U[n - 3]) / (2.0 * h);
    return D;
}

// Numerov matrix of M with identity rows at the four boundary unknowns.
BandedMatrix compact_dirichlet_matrix(const ProfilePair& p, const Coupling* extra = nullptr)
{
    const std::size_t n = p.size(), N = 2 * n;
    const double ih2 = 1.0 / (p.h * p.h);
    BandedMatrix J(N, 3, 3);
    auto coef = [&](std::size_t k, int comp, int col) {
        double a = p.V1[k], b = p.V2[k];
        double v;
        if (comp != col)
            v = 2.0 * a * b + (extra ? extra->p12[k] : 0.0);
        else if (comp == 0)
            v = b * b + (extra ? extra->p11[k] : 0.0);
        else
            v = a * a + (extra ? extra->p22[k] : 0.0);
        return v;
    };
    for (std::size_t i = 1; i + 1 < n; ++i) {
        for (int comp = 0; comp < 2; ++comp) {
            const std::size_t row = 2 * i + comp;
            J.add(row, 2 * (i + 1) + comp, -ih2);
            J.add(row, 2 * (i - 1) + comp, -ih2);
            J.add(row, row, 2.0 * ih2);
            const double wts[3] = {1.0 / 12.0, 10.0 / 12.0, 1.0 / 12.0};
            for (int s = 0; s < 3; ++s) {
                std::size_t k = i + s - 1;
                J.add(row, 2 * k + 0, wts[s] * coef(k, comp, 0));
                J.add(row, 2 * k + 1, wts[s] * coef(k, comp, 1));
            }
        }
    }
    J.set_identity_row(0);
    J.set_identity_row(1);
    J.set_identity_row(N - 2);
    J.set_identity_row(N - 1);
    return J;
}

struct LinearSolve {
    Field2 u;
    double residual = 0.0;
};

// bc = (u1(-L), u2(-L), u1(L), u2(L)); r is the pointwise right-hand side.
LinearSolve solve_compact(const ProfilePair& p, const BandedMatrix& J, const num::BandedLU& lu, const Field2& r,
                          const double bc[4])
{
    const std::size_t n = p.size(), N = 2 * n;
    std::vector<double> rhs(N, 0.0);
    std::vector<double> a1 = compact_average(r.u1), a2 = compact_average(r.u2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        rhs[2 * i] = a1[i];
        rhs[2 * i + 1] = a2[i];
    }
    rhs[0] = bc[0];
    rhs[1] = bc[1];
    rhs[N - 2] = bc[2];
    rhs[N - 1] = bc[3];
    num::SolveInfo info;
    std::vector<double> x = num::refined_solve(J, lu, rhs, 3, &info);
    return {deinterleave(x), info.residual};
}


num::LinearFit window_fit(const ProfilePair& p, const std::vector<double>& y)
{
    auto [lo, hi] = default_fit_window(p.L);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p.z[i] >= lo && p.z[i] <= hi) {
            xs.push_back(p.z[i]);
            ys.push_back(y[i]);
        }
    return num::linear_fit(xs, ys);
}

void check_profile(const ProfilePair& p)
{
    const std::size_t n = p.size();
    const std::size_t c = p.center();
    for (std::size_t i = 0; i < n; ++i) {
        bool tail1 = std::fabs(p.V1[i]) < kTailFloor, tail2 = std::fabs(p.V2[i]) < kTailFloor;
        if ((!tail1 && !(p.V1[i] > 0.0)) || (!tail2 && !(p.V2[i] > 0.0))) {
            std::ostringstream os;
            os << "profile not positive at z = " << p.z[i];
            throw ValidationError(os.str());
        }
        if (i > 0 && p.V1[i] > kTailFloor && !(p.V1[i] > p.V1[i - 1])) {
            std::ostringstream os;
            os << "V1 not increasing at z = " << p.z[i];
            throw ValidationError(os.str());
        }
    }
    if (std::fabs(p.V1[c] - 1.0) > 1e-9 || std::fabs(p.V2[c] - 1.0) > 1e-9)
        throw ValidationError("profile normalization V1(0) = V2(0) = 1 not met");
    if (!(p.A > 0.0) || !(p.B > 0.0)) throw ValidationError("asymptotic constants A, B must be positive");
}

}  // namespace

std::vector<double> compact_average(const std::vector<double>& r)
{
    std::vector<double> a(r.size(), 0.0);
    for (std::size_t i = 1; i + 1 < r.size(); ++i) a[i] = (r[i - 1] + 10.0 * r[i] + r[i + 1]) / 12.0;
    return a;
}

std::vector<double> profile_derivative(const std::vector<double>& U, const std::vector<double>& F, double h)
{
    const std::size_t n = U.size();
    std::vector<double> D(n);
    for (std::size_t i = 1; i + 1 < n; ++i)
        D[i] = (U[i + 1] - U[i - 1]) / (2.0 * h) - h / 12.0 * (F[i + 1] - F[i - 1]);
    D[0] = (-25.0 * U[0] + 48.0 * U[1] - 36.0 * U[2] + 16.0 * U[3] - 3.0 * U[4]) / (12.0 * h);
    D[n - 1] = (25.0 * U[n - 1] - 48.0 * U[n - 2] + 36.0 * U[n - 3] - 16.0 * U[n - 4] + 3.0 * U[n - 5]) / (12.0 * h);
    return D;
}

std::pair<double, double> default_fit_window(double L) { return {0.6 * L, std::min(0.9 * L, L - 1.0)}; }

ProfilePair solve_inner_profile(double L, int n, double tol, Scheme scheme)
{
    if (!(L >= 8.0)) throw std::invalid_argument("profile half-width L must be >= 8");
    if (n < 400) throw std::invalid_argument("profile mesh needs n >= 400 intervals");
    if (n % 2 != 0) throw std::invalid_argument("profile mesh needs an even number of intervals");

    ProfilePair p;
    p.L = L;
    p.scheme = scheme;
    const std::size_t nodes = std::size_t(n) + 1;
    p.h = 2.0 * L / n;
    p.z.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i) p.z[i] = -L + p.h * double(i);
    const std::size_t c = nodes / 2;
    p.z[c] = 0.0;

    std::vector<double> x(2 * nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        // smooth hyperbola through (0, 1) with slopes 0 and A ~ 1.89 at the ends
        auto guess = [](double t) { return 0.5 * (1.887 * t + std::sqrt(1.887 * 1.887 * t * t + 4.0)); };
        x[2 * i] = guess(p.z[i]);
        x[2 * i + 1] = guess(-p.z[i]);
    }

    num::NewtonOptions opt;
    opt.tol = std::min(tol, 1e-11);
    opt.max_iter = 80;
    opt.check_jacobian = std::getenv("PSEP_PROBE") != nullptr;
    auto run = [&](double slope, std::vector<double>& state) {
        ProfileSystem sys{nodes, p.h, slope, c, scheme};
        auto [sol, rep] = num::newton_solve([&](const std::vector<double>& v, std::vector<double>& r) { sys.residual(v, r); },
                                            [&](const std::vector<double>& v) { return sys.jacobian(v); }, state, opt);
        p.newton_iterations += rep.iterations;
        const double accept = std::max(tol, rounding_floor({&sol}, p.h));
        if (rep.residual > accept) {
            std::ostringstream os;
            os << "profile Newton failed (" << rep.status << ", residual " << rep.residual << ", "
               << rep.iterations << " iterations)";
            throw ConvergenceError(os.str());
        }
        state = std::move(sol);
        p.residual = rep.residual;
        return state[2 * c];
    };

    // the scaling family maps slope s to s / lambda^2 when V(0) is scaled by lambda
    double s0 = 1.0;
    double v0 = run(s0, x);
    double s1 = s0 / (v0 * v0);
    for (double& v : x) v /= v0;
    double f0 = v0 - 1.0;
    double v1 = run(s1, x);
    for (int k = 0; k < 40; ++k) {
        double f1 = v1 - 1.0;
        p.secant_iterations = k + 1;
        if (std::fabs(f1) < 1e-13 || f1 == f0) break;
        double s2 = s1 - f1 * (s1 - s0) / (f1 - f0);
        s0 = s1;
        f0 = f1;
        s1 = s2;
        v1 = run(s1, x);
    }
    p.far_slope = s1;

    Field2 V = deinterleave(x);
    p.V1 = std::move(V.u1);
    p.V2 = std::move(V.u2);
    if (scheme == Scheme::Numerov) {
        std::vector<double> F1(nodes), F2(nodes);
        for (std::size_t i = 0; i < nodes; ++i) {
            F1[i] = p.V1[i] * p.V2[i] * p.V2[i];
            F2[i] = p.V2[i] * p.V1[i] * p.V1[i];
        }
        p.dV1 = profile_derivative(p.V1, F1, p.h);
        p.dV2 = profile_derivative(p.V2, F2, p.h);
    } else {
        p.dV1 = central_derivative(p.V1, p.h);
        p.dV2 = central_derivative(p.V2, p.h);
    }
    for (std::size_t i = 0; i < nodes; ++i)
        p.symmetry = std::max(p.symmetry, std::fabs(p.V1[i] - p.V2[nodes - 1 - i]));

    Asymptotics as = extract_asymptotics(p);
    p.A = as.A;
    p.B = as.B;
    p.fit_residual = as.fit_residual;
    check_profile(p);
    return p;
}

Asymptotics extract_asymptotics(const ProfilePair& p, double lo, double hi)
{
    const double eps = 1e-12 * p.L;
    if (!(lo < hi) || lo < 0.5 * p.L - eps || hi > p.L - 1.0 + eps) {
        std::ostringstream os;
        os << "fit window [" << lo << ", " << hi << "] must lie in [L/2, L-1] = [" << 0.5 * p.L << ", " << p.L - 1.0
           << "]";
        throw std::invalid_argument(os.str());
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p.z[i] >= lo && p.z[i] <= hi) {
            xs.push_back(p.z[i]);
            ys.push_back(p.V1[i]);
        }
    if (xs.size() < 20) throw std::invalid_argument("fit window holds fewer than 20 nodes");
    num::LinearFit f = num::linear_fit(xs, ys);
    if (!(f.slope > 0.0) || !(f.intercept > 0.0)) {
        std::ostringstream os;
        os << "fitted asymptotics not positive: A = " << f.slope << ", B = " << f.intercept;
        throw ValidationError(os.str());
    }
    return {f.slope, f.intercept, f.max_residual, xs.size()};
}

Asymptotics extract_asymptotics(const ProfilePair& p)
{
    auto [lo, hi] = default_fit_window(p.L);
    return extract_asymptotics(p, lo, hi);
}

Field2 apply_M(const ProfilePair& p, const Field2& u)
{
    if (u.u1.size() != p.size() || u.u2.size() != p.size())
        throw std::invalid_argument("apply_M: field length does not match profile mesh");
    const std::size_t n = p.size();
    const double ih2 = 1.0 / (p.h * p.h);
    Field2 out(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double a = p.V1[i], b = p.V2[i];
        out.u1[i] = -(u.u1[i + 1] - 2.0 * u.u1[i] + u.u1[i - 1]) * ih2 + b * b * u.u1[i] + 2.0 * a * b * u.u2[i];
        out.u2[i] = -(u.u2[i + 1] - 2.0 * u.u2[i] + u.u2[i - 1]) * ih2 + 2.0 * a * b * u.u1[i] + a * a * u.u2[i];
    }
    return out;
}

Field2 apply_M_compact(const ProfilePair& p, const Field2& u, const Coupling* extra)
{
    if (u.u1.size() != p.size() || u.u2.size() != p.size())
        throw std::invalid_argument("apply_M_compact: field length does not match profile mesh");
    const std::size_t n = p.size();
    const double ih2 = 1.0 / (p.h * p.h);
    std::vector<double> q1(n), q2(n);
    for (std::size_t k = 0; k < n; ++k) {
        double a = p.V1[k], b = p.V2[k];
        double p11 = b * b, p12 = 2.0 * a * b, p22 = a * a;
        if (extra) {
            p11 += extra->p11[k];
            p12 += extra->p12[k];
            p22 += extra->p22[k];
        }
        q1[k] = p11 * u.u1[k] + p12 * u.u2[k];
        q2[k] = p12 * u.u1[k] + p22 * u.u2[k];
    }
    std::vector<double> a1 = compact_average(q1), a2 = compact_average(q2);
    Field2 out(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out.u1[i] = -(u.u1[i + 1] - 2.0 * u.u1[i] + u.u1[i - 1]) * ih2 + a1[i];
        out.u2[i] = -(u.u2[i + 1] - 2.0 * u.u2[i] + u.u2[i - 1]) * ih2 + a2[i];
    }
    return out;
}

CorrectionProfile solve_W(const ProfilePair& p, double tol, double z_far)
{
    if (p.scheme != Scheme::Numerov) throw std::invalid_argument("solve_W needs a fourth-order profile");
    const std::size_t n = p.size();
    BandedMatrix J = compact_dirichlet_matrix(p);
    num::BandedLU lu(J);
    Field2 r(p.dV1, p.dV2);

    // W1 + z^2 V1'/2 -> drift*z + intercept; the far datum moves only the intercept
    auto far_fit = [&](const Field2& W) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = W.u1[i] + 0.5 * p.z[i] * p.z[i] * p.dV1[i];
        return window_fit(p, y);
    };
    const double bc0[4] = {0.0, 0.0, 0.0, 0.0};
    const double bc1[4] = {0.0, -1.0, 1.0, 0.0};
    LinearSolve x0 = solve_compact(p, J, lu, r, bc0);
    LinearSolve x1 = solve_compact(p, J, lu, r, bc1);
    num::LinearFit f0 = far_fit(x0.u), f1 = far_fit(x1.u);
    const double t = -f0.intercept / (f1.intercept - f0.intercept);

    const double bc[4] = {0.0, -t, t, 0.0};
    LinearSolve xs = solve_compact(p, J, lu, r, bc);
    CorrectionProfile w;
    w.z = p.z;
    w.W1 = std::move(xs.u.u1);
    w.W2 = std::move(xs.u.u2);
    w.residual = xs.residual;
    w.far_value = t;
    w.z_far = z_far;
    Field2 W(w.W1, w.W2);
    num::LinearFit f = far_fit(W);
    w.drift = f.slope;
    w.intercept = f.intercept;
    for (std::size_t i = 0; i < n; ++i) {
        w.antisymmetry = std::max(w.antisymmetry, std::fabs(w.W1[i] + w.W2[n - 1 - i]));
        if (p.z[i] >= z_far) {
            double dev = w.W1[i] + 0.5 * p.z[i] * p.z[i] * p.dV1[i];
            w.far_field_deviation = std::max(w.far_field_deviation, std::fabs(dev));
            w.corrected_deviation = std::max(w.corrected_deviation, std::fabs(dev - w.drift * p.z[i]));
        }
    }
    const double accept = std::max(tol, rounding_floor({&w.W1, &w.W2}, p.h));
    if (w.residual > accept) {
        std::ostringstream os;
        os << "correction solve residual " << w.residual << " exceeds " << accept;
        throw ConvergenceError(os.str());
    }
    return w;
}

Coupling correction_coupling(const ProfilePair& p, const CorrectionProfile& w)
{
    const std::size_t n = p.size();
    Coupling c{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        c.p11[i] = p.V2[i] * w.W2[i];
        c.p12[i] = p.V1[i] * w.W2[i] + p.V2[i] * w.W1[i];
        c.p22[i] = p.V1[i] * w.W1[i];
    }
    return c;
}

HatProfiles solve_kernel_corrections(const ProfilePair& p, const CorrectionProfile& w, double tol)
{
    if (w.W1.size() != p.size()) throw std::invalid_argument("correction profile is on a different mesh");
    const std::size_t n = p.size();
    const double L = p.L;
    BandedMatrix J = compact_dirichlet_matrix(p);
    num::BandedLU lu(J);
    Coupling N = correction_coupling(p, w);

    auto rhs_for = [&](const std::vector<double>& t1, const std::vector<double>& t2) {
        Field2 r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r.u1[i] = -(N.p11[i] * t1[i] + N.p12[i] * t2[i]);
            r.u2[i] = -(N.p12[i] * t1[i] + N.p22[i] * t2[i]);
        }
        return r;
    };

    HatProfiles out;
    out.z = p.z;

    // Phi: symmetric data (0, a, a, 0), a fixed by zero far-field slope
    {
        Field2 r = rhs_for(p.dV1, p.dV2);
        const double b0[4] = {0, 0, 0, 0}, b1[4] = {0, 1, 1, 0};
        LinearSolve x0 = solve_compact(p, J, lu, r, b0), x1 = solve_compact(p, J, lu, r, b1);
        double s0 = window_fit(p, x0.u.u1).slope, s1 = window_fit(p, x1.u.u1).slope;
        double a = -s0 / (s1 - s0);
        const double bc[4] = {0, a, a, 0};
        LinearSolve xs = solve_compact(p, J, lu, r, bc);
        out.Phi1 = std::move(xs.u.u1);
        out.Phi2 = std::move(xs.u.u2);
        out.residual = std::max(out.residual, xs.residual);
        out.a = window_fit(p, out.Phi1).intercept;
    }
    // Psi: antisymmetric data (0, -bL, bL, 0), b fixed by zero far-field intercept
    {
        std::vector<double> s1v(n), s2v(n);
        for (std::size_t i = 0; i < n; ++i) {
            s1v[i] = p.z[i] * p.dV1[i] + p.V1[i];
            s2v[i] = p.z[i] * p.dV2[i] + p.V2[i];
        }
        Field2 r = rhs_for(s1v, s2v);
        const double b0[4] = {0, 0, 0, 0}, b1[4] = {0, -L, L, 0};
        LinearSolve x0 = solve_compact(p, J, lu, r, b0), x1 = solve_compact(p, J, lu, r, b1);
        double i0 = window_fit(p, x0.u.u1).intercept, i1 = window_fit(p, x1.u.u1).intercept;
        double b = -i0 / (i1 - i0);
        const double bc[4] = {0, -b * L, b * L, 0};
        LinearSolve xs = solve_compact(p, J, lu, r, bc);
        out.Psi1 = std::move(xs.u.u1);
        out.Psi2 = std::move(xs.u.u2);
        out.residual = std::max(out.residual, xs.residual);
        out.b_const = window_fit(p, out.Psi1).slope;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = n - 1 - i;
        out.phi_symmetry = std::max(out.phi_symmetry, std::fabs(out.Phi1[j] - out.Phi2[i]));
        out.psi_antisymmetry = std::max(out.psi_antisymmetry, std::fabs(out.Psi1[j] + out.Psi2[i]));
        if (p.z[i] >= L / 3.0 && p.z[i] <= 0.9 * L) {
            out.phi_far_deviation =
                std::max(out.phi_far_deviation, std::fabs(out.Phi1[i] - out.a) + std::fabs(out.Phi2[i]));
            out.psi_far_deviation = std::max(out.psi_far_deviation,
                                             std::fabs(out.Psi1[i] - out.b_const * p.z[i]) + std::fabs(out.Psi2[i]));
        }
    }
    const double accept = std::max(tol, rounding_floor({&out.Phi1, &out.Phi2, &out.Psi1, &out.Psi2}, p.h));
    if (out.residual > accept) {
        std::ostringstream os;
        os << "kernel correction residual " << out.residual << " exceeds " << accept;
        throw ConvergenceError(os.str());
    }
    return out;
}

RefinedKernel build_refined_kernel(const ProfilePair& p, const CorrectionProfile& w, const HatProfiles& hats,
                                   double eps, double b_geom, double H0)
{
    if (!(eps >= 0.0 && eps <= 0.2)) throw std::invalid_argument("eps must lie in [0, 0.2]");
    if (!(b_geom > 0.0)) throw std::invalid_argument("layer slope must be positive");
    if (w.W1.size() != p.size() || hats.Phi1.size() != p.size())
        throw std::invalid_argument("refined kernel inputs are on different meshes");
    const std::size_t n = p.size();
    RefinedKernel k;
    k.eps = eps;
    k.coefficient = 2.0 * eps * H0 / b_geom;
    k.Phi = Field2(n);
    k.Psi = Field2(n);
    for (std::size_t i = 0; i < n; ++i) {
        k.Phi.u1[i] = p.dV1[i] + k.coefficient * hats.Phi1[i];
        k.Phi.u2[i] = p.dV2[i] + k.coefficient * hats.Phi2[i];
        k.Psi.u1[i] = p.z[i] * p.dV1[i] + p.V1[i] + k.coefficient * hats.Psi1[i];
        k.Psi.u2[i] = p.z[i] * p.dV2[i] + p.V2[i] + k.coefficient * hats.Psi2[i];
    }
    return k;
}

Field2 apply_M_tilde(const ProfilePair& p, const CorrectionProfile& w, double eps, double b_geom, double H0,
                     const Field2& u)
{
    Coupling N = correction_coupling(p, w);
    const double c = 2.0 * eps * H0 / b_geom;
    for (std::size_t i = 0; i < p.size(); ++i) {
        N.p11[i] *= c;
        N.p12[i] *= c;
        N.p22[i] *= c;
    }
    return apply_M_compact(p, u, &N);
}

KernelCheck kernel_check(double L, int n, int k, double threshold)
{
    ProfilePair p = solve_inner_profile(L, n, 1e-10, Scheme::Central);
    const std::size_t nodes = p.size(), N = 2 * nodes;
    const double ih2 = 1.0 / (p.h * p.h);
    // unknowns: all but u1(-L) (index 0) and u2(L) (index N-1)
    const std::size_t M = N - 2;
    auto idx = [](std::size_t full) { return full - 1; };
    BandedMatrix S(M, 2, 2);
    std::vector<double> mass(M, 1.0);
    for (std::size_t i = 0; i < nodes; ++i) {
        for (int comp = 0; comp < 2; ++comp) {
            const std::size_t full = 2 * i + comp;
            if (full == 0 || full == N - 1) continue;
            const bool half = (i == 0 && comp == 1) || (i == nodes - 1 && comp == 0);
            const double wt = half ? 0.5 : 1.0;
            const std::size_t row = idx(full);
            const double a = p.V1[i], b = p.V2[i];
            const double self = comp == 0 ? b * b : a * a;
            S.add(row, row, wt * self);
            const std::size_t other = 2 * i + (1 - comp);
            if (other != 0 && other != N - 1) S.add(row, idx(other), wt * 2.0 * a * b);
            auto lap = [&](std::size_t nb) {
                std::size_t f = 2 * nb + comp;
                if (f != 0 && f != N - 1) S.add(row, idx(f), -ih2);
            };
            if (!half) {
                S.add(row, row, 2.0 * ih2);
                lap(i + 1);
                lap(i - 1);
            } else {
                S.add(row, row, ih2);
                lap(i == 0 ? 1 : nodes - 2);
            }
            mass[row] = wt;
        }
    }
    std::vector<num::EigenPair> eig = num::smallest_eigenpairs(S, k, 0.0, &mass);
    KernelCheck out;
    out.threshold = threshold;
    for (const auto& e : eig) {
        out.eigenvalues.push_back(e.value);
        if (std::fabs(e.value) <= threshold) ++out.near_zero;
    }
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](double x, double y) { return std::fabs(x) < std::fabs(y); });
    if (out.eigenvalues.size() > 1) out.gap = std::fabs(out.eigenvalues[1]);
    // correlate the eigenvector nearest 0 with V'
    const num::EigenPair* best = &eig.front();
    for (const auto& e : eig)
        if (std::fabs(e.value) < std::fabs(best->value)) best = &e;
    long double dot = 0, nv = 0, nt = 0;
    for (std::size_t full = 1; full + 1 < N; ++full) {
        std::size_t i = full / 2;
        double t = full % 2 == 0 ? p.dV1[i] : p.dV2[i];
        double v = best->vector[idx(full)];
        dot += (long double)v * t;
        nv += (long double)v * v;
        nt += (long double)t * t;
    }
    out.correlation = double(std::fabs(dot) / std::sqrt(nv * nt));
    return out;
}

}  // namespace psep::inner
