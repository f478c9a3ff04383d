#include "psep/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace psep::num {

namespace {

double sup_norm(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(x));
    }
    return m;
}

}  // namespace

double jacobian_probe(const ResidualFn& residual, const BandedMatrix& J,
                      const std::vector<double>& x, unsigned seed)
{
    const std::size_t n = x.size();
    std::vector<double> v(n);
    unsigned long s = seed;
    for (std::size_t i = 0; i < n; ++i) {
        s = s * 6364136223846793005UL + 1442695040888963407UL;
        v[i] = double((s >> 11) & 0xFFFFF) / double(0xFFFFF) - 0.5;
    }
    double xs = std::max(1.0, sup_norm(x));
    double h = 1e-6 * xs;
    std::vector<double> xp = x, xm = x, rp(n), rm(n);
    for (std::size_t i = 0; i < n; ++i) {
        xp[i] += h * v[i];
        xm[i] -= h * v[i];
    }
    residual(xp, rp);
    residual(xm, rm);
    std::vector<double> jv = J * v;
    double num = 0.0, den = 1e-300;
    for (std::size_t i = 0; i < n; ++i) {
        double fd = (rp[i] - rm[i]) / (2.0 * h);
        num = std::max(num, std::abs(fd - jv[i]));
        den = std::max(den, std::abs(jv[i]));
    }
    return num / den;
}

std::pair<std::vector<double>, NewtonReport> newton_solve(const ResidualFn& residual,
                                                          const JacobianFn& jacobian,
                                                          std::vector<double> x,
                                                          const NewtonOptions& opt)
{
    NewtonReport rep;
    const std::size_t n = x.size();
    std::vector<double> r(n), rt(n), xt(n);
    residual(x, r);
    double rn = sup_norm(r);
    rep.history.push_back(rn);

    if (opt.check_jacobian) {
        BandedMatrix J = jacobian(x);
        double mis = jacobian_probe(residual, J, x);
        if (mis > opt.probe_tol) {
            std::ostringstream os;
            os << "jacobian inconsistent with residual: relative mismatch " << mis;
            throw std::runtime_error(os.str());
        }
    }

    for (int it = 0; it < opt.max_iter; ++it) {
        if (rn <= opt.tol) {
            rep.converged = true;
            break;
        }
        BandedMatrix J = jacobian(x);
        std::vector<double> dx;
        try {
            BandedLU lu(J);
            dx = r;
            for (double& v : dx) v = -v;
            lu.solve_in_place(dx);
        } catch (const SingularMatrixError&) {
            if (it == 0) throw;
            rep.status = "singular jacobian";
            break;
        }
        double t = 1.0;
        bool accepted = false;
        for (int k = 0; k <= opt.max_halvings; ++k) {
            for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + t * dx[i];
            residual(xt, rt);
            double rtn = sup_norm(rt);
            if (rtn < rn) {
                accepted = true;
                x.swap(xt);
                r.swap(rt);
                rn = rtn;
                break;
            }
            t *= 0.5;
        }
        rep.iterations = it + 1;
        if (!accepted) {
            rep.status = "step underflow";
            break;
        }
        rep.damping.push_back(t);
        rep.history.push_back(rn);
    }
    if (!rep.converged && rn <= opt.tol) rep.converged = true;
    rep.residual = rn;
    if (rep.converged)
        rep.status = "converged";
    else if (rep.status.empty())
        rep.status = "max iterations";
    return {std::move(x), std::move(rep)};
}

}  // namespace psep::num
