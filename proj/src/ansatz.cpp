#include "psep/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psep/common.hpp"
#include "psep/radial.hpp"

namespace psep::ansatz {

double LayerParams::inner_radius() const { return eps * std::fabs(std::log(eps)); }

void validate(const LayerParams& lp)
{
    std::ostringstream os;
    if (!(lp.eps > 0.0 && lp.eps <= 0.2)) os << "eps must lie in (0, 0.2], got " << lp.eps << "; ";
    if (!(lp.b0 > 0.0)) os << "b0 must be positive; ";
    if (std::fabs(lp.b_tilde) > lp.bound) os << "|b_tilde| exceeds " << lp.bound << "; ";
    if (std::fabs(lp.zeta) > lp.bound) os << "|zeta| exceeds " << lp.bound << "; ";
    if (lp.eps > 0.0 && lp.eps <= 0.2 && !(2.0 * lp.inner_radius() < 2.0 * lp.d0))
        os << "blend collar 2 eps|ln eps| = " << 2.0 * lp.inner_radius() << " does not fit in 2 d0 = " << 2.0 * lp.d0
           << "; ";
    std::string msg = os.str();
    if (!msg.empty()) throw ValidationError("layer parameters: " + msg.substr(0, msg.size() - 2));
}

LayerParams make_layer_params(const limit::ScalarLimitSolution& sol, const inner::ProfilePair& p, double eps,
                              double b_tilde, double zeta)
{
    LayerParams lp;
    lp.eps = eps;
    lp.b0 = std::sqrt(sol.mu / p.A);
    lp.b_tilde = b_tilde;
    lp.zeta = zeta;
    lp.r0 = sol.r0;
    lp.H0 = double(sol.grid.dim - 1) / sol.r0;
    double m = std::min(sol.r0, sol.grid.R - sol.r0);
    lp.d0 = 0.5 * m;
    lp.d = 0.5 * lp.d0;
    validate(lp);
    return lp;
}

double stretched_coordinate(double r, const LayerParams& lp) { return lp.b() * (r - lp.eps * lp.zeta) / lp.eps; }

double unstretch(double z, const LayerParams& lp) { return lp.eps * z / lp.b() + lp.eps * lp.zeta; }

ProfileEvaluator::ProfileEvaluator(const inner::ProfilePair& p, const inner::CorrectionProfile& w)
    : v1_(p.z, p.V1, 0.0, p.A), w1_(p.z, w.W1), A_(p.A), B_(p.B), L_(p.L), drift_(w.drift)
{
}

double ProfileEvaluator::V1(double z) const
{
    if (z > L_) return A_ * z + B_;
    if (z < -L_) return 0.0;
    return v1_.value(z);
}

double ProfileEvaluator::dV1(double z) const
{
    if (z > L_) return A_;
    if (z < -L_) return 0.0;
    return v1_.d1(z);
}

double ProfileEvaluator::W1(double z) const
{
    if (z > L_) return -0.5 * A_ * z * z + drift_ * z;
    if (z < -L_) return 0.0;
    return w1_.value(z);
}

std::string region_name(Region r)
{
    switch (r) {
    case Region::Inner: return "inner";
    case Region::Blend: return "blend";
    case Region::Outer1: return "outer-1";
    default: return "outer-2";
    }
}

Ansatz::Ansatz(const limit::ScalarLimitSolution& sol, const inner::ProfilePair& p, const inner::CorrectionProfile& w,
               const LayerParams& lp)
    : w_(sol.interpolant()), prof_(p, w), lp_(lp), R_(sol.grid.R)
{
    validate(lp_);
    if (std::fabs(lp_.b0 - std::sqrt(sol.mu / p.A)) > 1e-10 * lp_.b0)
        throw ValidationError("layer slope b0 must equal sqrt(mu/A)");
    // On the decaying side W/V grows like z^2, so eps H0 W eventually beats b V. Find the
    // first z < 0 where the curvature term reaches half the leading term.
    const double eps = lp_.eps, b = lp_.b();
    taper_ = prof_.L();
    if (lp_.H0 != 0.0) {
        const double dz = 1e-2;
        for (double z = 0.0; z >= -prof_.L(); z -= dz) {
            double v = prof_.V1(z), wv = prof_.W1(z);
            if (!(v > 0.0) || eps * std::fabs(lp_.H0 * wv) > 0.5 * b * v) {
                taper_ = -z;
                break;
            }
        }
    }
}

double Ansatz::curvature_weight(double z) const
{
    // 1 for z >= -(taper - 1), 0 for z <= -taper, quintic in between
    const double hi = -std::max(taper_ - 1.0, 0.0), lo = -taper_;
    if (z >= hi) return 1.0;
    if (z <= lo) return 0.0;
    double t = (hi - z) / (hi - lo);
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

AnsatzPoint Ansatz::at(double rho) const
{
    const double eps = lp_.eps, b = lp_.b();
    const double r = rho - lp_.r0;
    AnsatzPoint pt;
    pt.z = stretched_coordinate(r, lp_);
    pt.inner1 = eps * b * prof_.V1(pt.z) + eps * eps * lp_.H0 * prof_.W1(pt.z);
    pt.inner2 = eps * b * prof_.V2(pt.z) + eps * eps * lp_.H0 * prof_.W2(pt.z);
    const double layer1 = eps * b * prof_.V1(pt.z) + eps * eps * lp_.H0 * curvature_weight(pt.z) * prof_.W1(pt.z);
    const double layer2 = eps * b * prof_.V2(pt.z) + eps * eps * lp_.H0 * curvature_weight(-pt.z) * prof_.W2(pt.z);
    const double a = lp_.inner_radius();
    const double ar = std::fabs(r);
    if (ar <= a) {
        pt.U1 = layer1;
        pt.U2 = layer2;
        pt.tag = Region::Inner;
        return pt;
    }
    double w = rho >= R_ ? 0.0 : w_.value(rho);
    double o1, o2;
    if (r > 0) {
        o1 = w;
        o2 = eps * b * prof_.V2(pt.z);
    } else {
        o1 = eps * b * prof_.V1(pt.z);
        o2 = -w;
    }
    if (ar >= 2.0 * a) {
        pt.U1 = o1;
        pt.U2 = o2;
        pt.tag = r > 0 ? Region::Outer1 : Region::Outer2;
        return pt;
    }
    double t = (ar - a) / a;
    double chi = 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    pt.U1 = chi * layer1 + (1.0 - chi) * o1;
    pt.U2 = chi * layer2 + (1.0 - chi) * o2;
    pt.tag = Region::Blend;
    return pt;
}

AnsatzField assemble_ansatz(const limit::ScalarLimitSolution& sol, const inner::ProfilePair& p,
                            const inner::CorrectionProfile& w, const LayerParams& lp, const num::Grid& grid)
{
    Ansatz an(sol, p, w, lp);
    AnsatzField U;
    U.grid = grid;
    U.params = lp;
    const std::size_t n = grid.size();
    U.U1.resize(n);
    U.U2.resize(n);
    U.tags.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        AnsatzPoint pt = an.at(grid.nodes[i]);
        U.U1[i] = pt.U1;
        U.U2[i] = pt.U2;
        U.tags[i] = pt.tag;
    }
    U.U1.back() = 0.0;
    U.U2.back() = 0.0;
    if (grid.dim == 1) {
        U.U1.front() = 0.0;
        U.U2.front() = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (double* v : {&U.U1[i], &U.U2[i]}) {
            U.min_before_clamp = std::min(U.min_before_clamp, *v);
            if (*v < 0.0) {
                if (*v < -1e-14) {
                    std::ostringstream os;
                    os << "ansatz value " << *v << " at rho = " << grid.nodes[i] << " is negative";
                    throw ValidationError(os.str());
                }
                *v = 0.0;
                ++U.clamped;
            }
        }
    }
    return U;
}

SeamReport seam_smoothness(const AnsatzField& U)
{
    SeamReport rep;
    const auto& x = U.grid.nodes;
    const std::size_t n = x.size();
    auto d2 = [&](const std::vector<double>& u, std::size_t a, std::size_t b, std::size_t c) {
        double h1 = x[b] - x[a], h2 = x[c] - x[b];
        return 2.0 * (h1 * u[c] - (h1 + h2) * u[b] + h2 * u[a]) / (h1 * h2 * (h1 + h2));
    };
    for (std::size_t s = 2; s + 2 < n; ++s) {
        if (U.tags[s] == U.tags[s - 1]) continue;
        for (const auto* u : {&U.U1, &U.U2}) {
            double left = d2(*u, s - 2, s - 1, s);
            double right = d2(*u, s, s + 1, s + 2);
            double j = std::fabs(left - right);
            if (j > rep.max_jump) {
                rep.max_jump = j;
                rep.spacing = std::max(x[s] - x[s - 1], x[s + 1] - x[s]);
            }
        }
    }
    return rep;
}

NonlinearResidual nonlinear_residual(const AnsatzField& U, const limit::Nonlinearity& f)
{
    std::vector<double> l1 = num::apply_radial_laplacian(U.U1, U.grid);
    std::vector<double> l2 = num::apply_radial_laplacian(U.U2, U.grid);
    const double e4 = std::pow(U.params.eps, -4.0);
    NonlinearResidual r;
    const std::size_t n = U.U1.size();
    const std::size_t first = U.grid.dim == 1 ? 1 : 0;
    for (std::size_t i = first; i + 1 < n; ++i) {
        double a = U.U1[i], b = U.U2[i];
        r.sup1 = std::max(r.sup1, std::fabs(-l1[i] - f.f(a) + e4 * a * b * b));
        r.sup2 = std::max(r.sup2, std::fabs(-l2[i] - f.f(b) + e4 * b * a * a));
    }
    return r;
}

bool RemainderReport::all_bounded() const
{
    for (const auto& f : families)
        if (f.grows) return false;
    return true;
}

RemainderReport verify_remainders(const limit::ScalarLimitSolution& sol, const inner::ProfilePair& p,
                                  const inner::CorrectionProfile& w, const std::vector<double>& eps_list,
                                  double b_tilde, double zeta)
{
    const char* names[] = {"Q_own/(r^3+eps^3)",
                           "dQ_own/(r^2+eps^2)",
                           "d2Q_own/(r+eps)",
                           "Q_other D=1",
                           "Q_other D=2",
                           "Q_other D=4",
                           "pot1 own: U^2 - eps^2 b^2 V^2 over eps^3(|z|^3+1)",
                           "pot1 other: over eps^3 exp(-|z|)",
                           "pot2: U1U2 - eps^2 b^2 V1V2 over eps^3 exp(-|z|)",
                           "R_own over eps^4(z^4+1)",
                           "R_other over eps^4 exp(-|z|)",
                           "R12 over eps^4 exp(-|z|)"};
    const int F = int(sizeof(names) / sizeof(names[0]));
    RemainderReport rep;
    rep.families.resize(F);
    for (int k = 0; k < F; ++k) rep.families[k].name = names[k];

    for (double eps : eps_list) {
        LayerParams lp = make_layer_params(sol, p, eps, b_tilde, zeta);
        Ansatz an(sol, p, w, lp);
        const double a = lp.inner_radius();
        const int M = 4001;
        const double lo = -2.0 * a, hi = 2.0 * a, hr = (hi - lo) / (M - 1);
        std::vector<double> r(M), Q1(M), Q2(M);
        std::vector<AnsatzPoint> pts(M);
        for (int i = 0; i < M; ++i) {
            r[i] = lo + hr * i;
            pts[i] = an.at(lp.r0 + r[i]);
            Q1[i] = pts[i].U1 - pts[i].inner1;
            Q2[i] = pts[i].U2 - pts[i].inner2;
        }
        auto deriv = [&](const std::vector<double>& q, int i, int order) {
            if (order == 1) return (q[i + 1] - q[i - 1]) / (2.0 * hr);
            return (q[i + 1] - 2.0 * q[i] + q[i - 1]) / (hr * hr);
        };
        std::vector<double> C(F, 0.0);
        const double b = lp.b(), H0 = lp.H0;
        const ProfileEvaluator& pe = an.profiles();
        for (int i = 1; i + 1 < M; ++i) {
            const bool right = r[i] >= 0.0;
            const double ar = std::fabs(r[i]);
            const double z = pts[i].z;
            const auto& Qo = right ? Q1 : Q2;
            const auto& Qx = right ? Q2 : Q1;
            C[0] = std::max(C[0], std::fabs(Qo[i]) / (ar * ar * ar + eps * eps * eps));
            C[1] = std::max(C[1], std::fabs(deriv(Qo, i, 1)) / (ar * ar + eps * eps));
            C[2] = std::max(C[2], std::fabs(deriv(Qo, i, 2)) / (ar + eps));
            double qx = std::fabs(Qx[i]) + eps * std::fabs(deriv(Qx, i, 1)) + eps * eps * std::fabs(deriv(Qx, i, 2));
            const double Ds[3] = {1.0, 2.0, 4.0};
            for (int k = 0; k < 3; ++k) C[3 + k] = std::max(C[3 + k], qx / (eps * eps * std::exp(-Ds[k] * ar / eps)));

            double V1 = pe.V1(z), V2 = pe.V2(z), W1 = pe.W1(z), W2 = pe.W2(z);
            double U1 = pts[i].U1, U2 = pts[i].U2;
            double Uo = right ? U1 : U2, Ux = right ? U2 : U1;
            double Vo = right ? V1 : V2, Vx = right ? V2 : V1;
            double Wo = right ? W1 : W2, Wx = right ? W2 : W1;
            double e2b2 = eps * eps * b * b, e3 = eps * eps * eps, e4 = e3 * eps;
            double az = std::fabs(z), ez = std::exp(-az);
            C[6] = std::max(C[6], std::fabs(Uo * Uo - e2b2 * Vo * Vo) / (e3 * (az * az * az + 1.0)));
            C[7] = std::max(C[7], std::fabs(Ux * Ux - e2b2 * Vx * Vx) / (e3 * ez));
            C[8] = std::max(C[8], std::fabs(U1 * U2 - e2b2 * V1 * V2) / (e3 * ez));
            double Ro = Uo * Uo - e2b2 * Vo * Vo - 2.0 * e3 * b * H0 * Vo * Wo;
            double Rx = Ux * Ux - e2b2 * Vx * Vx - 2.0 * e3 * b * H0 * Vx * Wx;
            double R12 = U1 * U2 - e2b2 * V1 * V2 - e3 * b * H0 * (V1 * W2 + V2 * W1);
            C[9] = std::max(C[9], std::fabs(Ro) / (e4 * (z * z * z * z + 1.0)));
            C[10] = std::max(C[10], std::fabs(Rx) / (e4 * ez));
            C[11] = std::max(C[11], std::fabs(R12) / (e4 * ez));
        }
        for (int k = 0; k < F; ++k) {
            rep.families[k].eps.push_back(eps);
            rep.families[k].constant.push_back(C[k]);
        }
    }
    // eps_list order is arbitrary: compare the largest and smallest eps
    for (auto& f : rep.families) {
        if (f.eps.size() < 2) continue;
        std::size_t imax = std::max_element(f.eps.begin(), f.eps.end()) - f.eps.begin();
        std::size_t imin = std::min_element(f.eps.begin(), f.eps.end()) - f.eps.begin();
        // constants below 1e-8 are rounding in U^2 - (eps b V)^2 and carry no trend
        f.grows = f.constant[imin] > 1.5 * f.constant[imax] && f.constant[imin] > 1e-8;
    }
    return rep;
}

}  // namespace psep::ansatz
