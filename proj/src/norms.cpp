#include "psep/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "psep/linop.hpp"
#include "psep/radial.hpp"

namespace psep::lin {

namespace {

constexpr double kLogHuge = 690.7755278982137;   // log(1e300)
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Pointwise mode-summed magnitudes of one component. tan/tan_r/mix are the layer-frame
// terms; hess_rt/hess_tt bound the Cartesian Hessian and stay finite at the origin.
struct Profile {
    std::vector<double> val, dr, drr, tan, tan_r, mix, mix_sup, hess_rt, hess_tt;
};

Profile mode_sums(const ModalField& f, int component)
{
    const num::Grid& g = f.grid;
    const std::size_t n = g.size();
    Profile p;
    for (auto* v : {&p.val, &p.dr, &p.drr, &p.tan, &p.tan_r, &p.mix, &p.mix_sup, &p.hess_rt, &p.hess_tt})
        v->assign(n, 0.0);
    std::vector<double> d1, d2;
    for (std::size_t m = 0; m < f.modes.size(); ++m) {
        const std::vector<double>& u = component == 1 ? f.modes[m].u1 : f.modes[m].u2;
        if (u.size() != n) throw std::invalid_argument("mode field size does not match grid");
        radial_derivatives(g, u, d1, d2);
        const double lam = angular_eigenvalue(g.dim, int(m));
        const double sq = std::sqrt(lam);
        const double dirs = g.dim > 1 ? double(g.dim - 1) : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            p.val[i] += std::fabs(u[i]);
            p.dr[i] += std::fabs(d1[i]);
            p.drr[i] += std::fabs(d2[i]);
            const double rho = g.nodes[i];
            if (rho <= 0.0 || g.dim == 1) continue;
            const double q = d1[i] / rho - u[i] / (rho * rho);
            if (lam == 0.0) {
                p.hess_tt[i] += std::fabs(d1[i] / rho);
                continue;
            }
            p.hess_rt[i] += sq * std::fabs(q);
            p.hess_tt[i] += std::fabs(q) + (lam - double(g.dim - 1)) * std::fabs(u[i]) / (rho * rho);
            p.tan[i] += sq / rho * std::fabs(u[i]);
            p.tan_r[i] += sq / rho * std::fabs(d1[i]);
            p.mix[i] += lam / (rho * rho) * std::fabs(u[i]);
            p.mix_sup[i] += lam / (dirs * rho * rho) * std::fabs(u[i]);
        }
    }
    return p;
}

template <class Pred>
double sup_where(const num::Grid& g, const std::vector<double>& v, Pred in)
{
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (in(g.r(i))) s = std::max(s, v[i]);
    return s;
}

// Max of weight * term over a region; falls back to logs where the weight overflows.
struct WeightedMax {
    double value = 0.0;
    double log_value = kNegInf;
    bool in_log = false;

    void add(double log_w, double term)
    {
        if (!(term > 0.0)) return;
        const double lt = log_w + std::log(term);
        if (lt > log_value) log_value = lt;
        if (log_w < kLogHuge) {
            value = std::max(value, std::exp(log_w) * term);
        } else {
            in_log = true;
        }
    }

    NormBlock block(const std::string& name) const
    {
        NormBlock b;
        b.name = name;
        if (in_log && log_value > std::log(std::max(value, 1e-300))) {
            b.log_value = log_value;
            b.value = std::exp(log_value);
        } else {
            b.value = value;
            b.log_value = value > 0.0 ? std::log(value) : kNegInf;
        }
        return b;
    }
};

NormBlock plain(const std::string& name, double v)
{
    NormBlock b;
    b.name = name;
    b.value = v;
    b.log_value = v > 0.0 ? std::log(v) : kNegInf;
    return b;
}

double log_sum_exp(const std::vector<double>& logs)
{
    double mx = kNegInf;
    for (double l : logs) mx = std::max(mx, l);
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (double l : logs) s += std::exp(l - mx);
    return mx + std::log(s);
}

}  // namespace

ModalField ModalField::single(const num::Grid& g, int m, const Field2& f)
{
    ModalField mf;
    mf.grid = g;
    mf.modes.assign(std::size_t(m) + 1, Field2(g.size()));
    mf.modes[std::size_t(m)] = f;
    return mf;
}

double WeightedNormReport::log_total() const
{
    std::vector<double> logs;
    for (const auto& b : blocks) logs.push_back(b.log_value);
    return log_sum_exp(logs);
}

double WeightedNormReport::total() const
{
    double s = 0.0;
    for (const auto& b : blocks) s += b.value;
    return s;
}

bool WeightedNormReport::overflow() const
{
    for (const auto& b : blocks)
        if (b.log_value > kLogHuge) return true;
    return false;
}

const NormBlock& WeightedNormReport::block(const std::string& name) const
{
    for (const auto& b : blocks)
        if (b.name == name) return b;
    throw std::out_of_range("no norm block named " + name);
}

std::pair<double, long> decimal_parts(double log_value)
{
    if (log_value == kNegInf) return {0.0, 0};
    const double l10 = log_value / std::log(10.0);
    long e = long(std::floor(l10));
    double m = std::pow(10.0, l10 - double(e));
    if (m >= 10.0) {
        m /= 10.0;
        ++e;
    }
    return {m, e};
}

double weight(double r, double eps, double alpha)
{
    if (r >= 0.0) return 1.0 + std::pow(r / eps, 1.0 + alpha);
    return std::exp(2.0 * std::fabs(r) / eps);
}

double log_weight(double r, double eps, double alpha)
{
    if (r >= 0.0) return std::log1p(std::pow(r / eps, 1.0 + alpha));
    return 2.0 * std::fabs(r) / eps;
}

void radial_derivatives(const num::Grid& g, const std::vector<double>& u, std::vector<double>& d1,
                        std::vector<double>& d2)
{
    const std::size_t n = g.size();
    if (u.size() != n) throw std::invalid_argument("field size does not match grid");
    if (n < 3) throw std::invalid_argument("need at least 3 nodes for derivatives");
    d1 = num::apply_stencil(num::first_derivative_stencil(g), u);
    d2 = num::apply_stencil(num::second_derivative_stencil(g), u);
    const auto& x = g.nodes;
    auto ends = [&](std::size_t a, std::size_t b, std::size_t c, std::size_t at) {
        // quadratic through (a, b, c), differentiated at node `at`
        const double xa = x[a], xb = x[b], xc = x[c], t = x[at];
        const double la = ((t - xb) + (t - xc)) / ((xa - xb) * (xa - xc));
        const double lb = ((t - xa) + (t - xc)) / ((xb - xa) * (xb - xc));
        const double lc = ((t - xa) + (t - xb)) / ((xc - xa) * (xc - xb));
        d1[at] = la * u[a] + lb * u[b] + lc * u[c];
        d2[at] = 2.0 * (u[a] / ((xa - xb) * (xa - xc)) + u[b] / ((xb - xa) * (xb - xc)) +
                        u[c] / ((xc - xa) * (xc - xb)));
    };
    ends(0, 1, 2, 0);
    ends(n - 3, n - 2, n - 1, n - 1);
}

WeightedNormReport norm0(const ModalField& phi, double eps, double d, SigmaConvention conv)
{
    const num::Grid& g = phi.grid;
    const Profile p1 = mode_sums(phi, 1), p2 = mode_sums(phi, 2);
    auto inside = [d](double r) { return std::fabs(r) < d; };
    auto outside = [d](double r) { return std::fabs(r) >= d; };
    auto all = [](double) { return true; };
    auto both = [&](auto pick, auto pred) {
        return std::max(sup_where(g, pick(p1), pred), sup_where(g, pick(p2), pred));
    };
    auto val = [](const Profile& p) -> const std::vector<double>& { return p.val; };
    auto dr = [](const Profile& p) -> const std::vector<double>& { return p.dr; };
    auto drr = [](const Profile& p) -> const std::vector<double>& { return p.drr; };
    auto tan = [](const Profile& p) -> const std::vector<double>& { return p.tan; };
    auto tan_r = [](const Profile& p) -> const std::vector<double>& { return p.tan_r; };
    auto mix = [](const Profile& p) -> const std::vector<double>& { return p.mix; };
    auto mix_sup = [](const Profile& p) -> const std::vector<double>& { return p.mix_sup; };

    auto hrt = [](const Profile& p) -> const std::vector<double>& { return p.hess_rt; };
    auto htt = [](const Profile& p) -> const std::vector<double>& { return p.hess_tt; };

    // derivative part only (the zero-order part is the global sup block), gradient and
    // Hessian in polar form
    auto outer = [&](bool) {
        return both(dr, outside) + both(tan, outside) + both(drr, outside) + both(hrt, outside) +
               both(htt, outside);
    };

    const bool sd = conv == SigmaConvention::SupDirection;
    WeightedNormReport rep;
    rep.eps = eps;
    rep.d = d;
    rep.blocks = {
        plain("sup", both(val, all)),
        plain("outer_c2", outer(sd)),
        plain("tangential", both(tan, inside)),
        plain("eps_normal", eps * both(dr, inside)),
        plain("mixed_tangential", sd ? both(mix_sup, inside) : both(mix, inside)),
        plain("eps_tangential_normal", eps * both(tan_r, inside)),
        plain("eps2_normal_normal", eps * eps * both(drr, inside)),
    };
    WeightedNormReport other = rep;
    other.blocks[1] = plain("outer_c2", outer(!sd));
    other.blocks[4] = plain("mixed_tangential", !sd ? both(mix_sup, inside) : both(mix, inside));
    rep.log_total_sup_direction = sd ? rep.log_total() : other.log_total();
    return rep;
}

WeightedNormReport norm1(const ModalField& gf, double eps, double d, double alpha, SigmaConvention conv)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
    const num::Grid& g = gf.grid;
    const Profile p1 = mode_sums(gf, 1), p2 = mode_sums(gf, 2);

    auto outer_c1 = [&](const Profile& p) {
        auto pred = [d](double r) { return std::fabs(r) >= 0.5 * d; };
        return sup_where(g, p.val, pred) + sup_where(g, p.dr, pred) + sup_where(g, p.tan, pred);
    };
    auto collar = [&](const Profile& p, double sign, bool sup_dir, const std::string& name) {
        WeightedMax wm;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double r = g.r(i);
            if (std::fabs(r) > 2.0 * d) continue;
            const double term =
                p.val[i] + p.dr[i] + p.drr[i] + p.tan_r[i] + p.tan[i] + (sup_dir ? p.mix_sup[i] : p.mix[i]);
            wm.add(log_weight(sign * r, eps, alpha), term);
        }
        return wm.block(name);
    };
    auto region_sup = [&](const Profile& p, double sign) {
        return sup_where(g, p.val, [&](double r) { return sign * r >= 2.0 * d; });
    };

    auto build = [&](bool sup_dir) {
        std::vector<NormBlock> b;
        b.push_back(plain("outer_c1", std::max(outer_c1(p1), outer_c1(p2))));
        b.push_back(collar(p1, 1.0, sup_dir, "collar_g1"));
        b.push_back(collar(p2, -1.0, sup_dir, "collar_g2"));
        // own domains: component 1 lives at r > 0, component 2 at r < 0
        const double own = region_sup(p1, 1.0) + region_sup(p2, -1.0);
        NormBlock ob = plain("own_penalty", own * std::pow(eps, -(1.0 + alpha)));
        if (own > 0.0) ob.log_value = std::log(own) - (1.0 + alpha) * std::log(eps);
        b.push_back(ob);
        const double cross = region_sup(p1, -1.0) + region_sup(p2, 1.0);
        NormBlock cb = plain("cross_penalty", cross * std::exp(1.0 / eps));
        if (cross > 0.0) cb.log_value = std::log(cross) + 1.0 / eps;
        b.push_back(cb);
        return b;
    };

    WeightedNormReport rep;
    rep.eps = eps;
    rep.d = d;
    rep.alpha = alpha;
    const bool sd = conv == SigmaConvention::SupDirection;
    rep.blocks = build(sd);
    WeightedNormReport other = rep;
    other.blocks = build(!sd);
    rep.log_total_sup_direction = sd ? rep.log_total() : other.log_total();
    return rep;
}

}  // namespace psep::lin
