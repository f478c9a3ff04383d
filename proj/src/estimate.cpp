#include "psep/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "psep/common.hpp"

namespace psep::lin {

ansatz::AnsatzField ansatz_field(const LayerBackground& bg, double eps, int nodes)
{
    const auto& sol = bg.sol;
    ansatz::LayerParams lp = ansatz::make_layer_params(sol, bg.profile, eps, bg.b_tilde, bg.zeta);
    num::Grid g = num::build_grid(sol.grid.R, sol.r0, nodes, sol.grid.dim, eps);
    return ansatz::assemble_ansatz(sol, bg.profile, bg.correction, lp, g);
}

double collar_width(const limit::ScalarLimitSolution& sol, double fraction)
{
    return fraction * std::min(sol.r0, sol.grid.R - sol.r0);
}

Field2 DataSample::sample(const num::Grid& g) const
{
    Field2 f(g.size());
    for (const Bump& b : bumps) {
        auto& u = b.component == 1 ? f.u1 : f.u2;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double t = (g.nodes[i] - b.center) / b.width;
            u[i] += b.amplitude * std::exp(-0.5 * t * t);
        }
    }
    return f;
}

DataSample draw_sample(std::uint64_t seed, int level, int index, double eps, double d,
                       const limit::ScalarLimitSolution& sol, int m_max)
{
    // the stream ignores the level so every eps sees the same draws
    (void)level;
    UniformStream rng(seed, 0, std::uint64_t(index));
    const double widths[3] = {eps, 0.25 * d, d};
    const double r0 = sol.r0, R = sol.grid.R;

    auto bump = [&](int component, bool collar, int width_class) {
        Bump b;
        b.component = component;
        b.width = widths[width_class];
        // component 1 owns rho > r0, component 2 owns rho < r0
        const double side = component == 1 ? 1.0 : -1.0;
        const double extent = component == 1 ? R - r0 : r0;
        double dist;
        if (collar || extent <= 2.0 * d) {
            dist = 2.0 * d * rng.next();
        } else {
            dist = 2.0 * d + (extent - 2.0 * d) * rng.next();
        }
        b.center = r0 + side * dist;
        b.amplitude = (rng.next() < 0.5 ? -1.0 : 1.0) * (0.5 + 0.5 * rng.next());
        return b;
    };

    DataSample s;
    const bool collar = index % 2 == 0;
    s.kind = collar ? "collar" : "outer";
    s.bumps.push_back(bump(1 + (index / 2) % 2, collar, (index / 4) % 3));
    const int extra = int(3.0 * rng.next());
    for (int k = 0; k < extra; ++k) {
        int comp = rng.next() < 0.5 ? 1 : 2;
        bool col = rng.next() < 0.5;
        int wc = std::min(2, int(3.0 * rng.next()));
        s.bumps.push_back(bump(comp, col, wc));
    }
    s.mode = m_max > 0 ? index % (m_max + 1) : 0;
    return s;
}

EstimateReport measure_estimate(const LayerBackground& bg, const limit::Nonlinearity& f, const EstimateConfig& cfg)
{
    if (cfg.eps_list.size() < 3) throw ValidationError("estimate needs at least 3 eps values");
    const auto [lo, hi] = std::minmax_element(cfg.eps_list.begin(), cfg.eps_list.end());
    if (*hi < 4.0 * *lo * (1.0 - 1e-12)) throw ValidationError("eps list must span at least a factor 4");
    if (cfg.ensemble < 1) throw ValidationError("ensemble size must be positive");
    const int dim = bg.sol.grid.dim;
    const int m_max = dim == 1 ? 0 : std::max(cfg.m_max, 0);
    const double d = collar_width(bg.sol, cfg.d_fraction);

    EstimateReport rep;
    rep.seed = cfg.seed;
    rep.m_max = m_max;
    rep.alpha = cfg.alpha;

    for (std::size_t lev = 0; lev < cfg.eps_list.size(); ++lev) {
        const double eps = cfg.eps_list[lev];
        ansatz::AnsatzField U = ansatz_field(bg, eps, cfg.nodes);
        const int modes = std::min(m_max, cfg.ensemble - 1) + 1;
        std::vector<ModeOperator> ops;
        for (int m = 0; m < modes; ++m) ops.push_back(assemble_linearized(U, f, m));

        EstimateLevel level;
        level.eps = eps;
        std::vector<double> sig(ops.size());
        parallel_for(ops.size(), cfg.threads, [&](std::size_t m) { sig[m] = smallest_singular_value(ops[m]); });
        level.sigma_min = *std::min_element(sig.begin(), sig.end());

        level.samples.resize(std::size_t(cfg.ensemble));
        try {
            parallel_for(level.samples.size(), cfg.threads, [&](std::size_t k) {
                DataSample ds = draw_sample(cfg.seed, int(lev), int(k), eps, d, bg.sol, m_max);
                const ModeOperator& L = ops[std::size_t(ds.mode)];
                Field2 g = ds.sample(U.grid);
                SolveReport sr;
                Field2 phi = solve_linearized(L, g, &sr);
                WeightedNormReport n0 = norm0(ModalField::single(U.grid, ds.mode, phi), eps, d);
                WeightedNormReport n1 = norm1(ModalField::single(U.grid, ds.mode, g), eps, d, cfg.alpha);
                EstimateSample& s = level.samples[k];
                s.index = int(k);
                s.mode = ds.mode;
                s.kind = ds.kind;
                s.log_norm0 = n0.log_total();
                s.log_norm1 = n1.log_total();
                s.ratio = std::exp(s.log_norm0 - s.log_norm1);
                s.ratio_sup_direction = std::exp(n0.log_total_sup_direction - n1.log_total_sup_direction);
                s.residual = sr.residual;
            });
        } catch (const NearKernelError& e) {
            std::ostringstream os;
            os << "near-kernel abort at eps " << eps << ": " << e.what();
            throw NearKernelError(os.str(), e.sigma_min(), eps, e.mode());
        }

        double mx = 0.0, mn = INFINITY, sum = 0.0;
        for (const auto& s : level.samples) {
            if (!(std::isfinite(s.ratio) && s.ratio > 0.0)) {
                std::ostringstream os;
                os << "non-finite estimate ratio at eps " << eps << ", sample " << s.index;
                throw ValidationError(os.str());
            }
            mx = std::max(mx, s.ratio);
            mn = std::min(mn, s.ratio);
            sum += s.ratio;
        }
        level.max_ratio = mx;
        level.min_ratio = mn;
        level.mean_ratio = sum / double(level.samples.size());
        rep.levels.push_back(std::move(level));
    }

    std::vector<double> x, y;
    for (const auto& l : rep.levels) {
        x.push_back(std::log(l.eps));
        y.push_back(std::log(l.max_ratio));
        rep.constant = std::max(rep.constant, l.max_ratio / l.eps);
    }
    rep.fit = num::linear_fit(x, y);
    rep.slope = rep.fit.slope;
    rep.slope_stderr = rep.fit.slope_stderr;
    return rep;
}

}  // namespace psep::lin
