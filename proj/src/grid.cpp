#include "psep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace psep::num {

namespace {

// xi0 such that sinh(k(1-xi0)) / sinh(k xi0) = (R-r0)/r0
double solve_xi0(double k, double R, double r0)
{
    const double target = (R - r0) / r0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double q = std::sinh(k * (1.0 - mid)) / std::sinh(k * mid);
        if (q > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

GridMap sinh_map(double k, double R, double r0)
{
    GridMap m;
    m.k = k;
    m.xi0 = solve_xi0(k, R, r0);
    m.c = r0 / std::sinh(k * m.xi0);
    return m;
}

std::vector<double> map_nodes(const GridMap& m, double R, double r0, int n)
{
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        double xi = double(i) / double(n - 1);
        x[i] = m.k == 0.0 ? R * xi : r0 + m.c * std::sinh(m.k * (xi - m.xi0));
    }
    x.front() = 0.0;
    x.back() = R;
    return x;
}

double spacing_at_r0(const GridMap& m, int n) { return m.c * m.k / double(n - 1); }

}  // namespace

double Grid::max_spacing_near(double rho, double half) const
{
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (nodes[i + 1] < rho - half || nodes[i] > rho + half) continue;
        h = std::max(h, nodes[i + 1] - nodes[i]);
    }
    return h;
}

Grid build_grid(double R, double r0, int n, int dim, std::optional<double> layer_eps)
{
    if (!(R > 0.0) || !(r0 > 0.0) || !(r0 < R)) {
        std::ostringstream os;
        os << "invalid geometry: need 0 < r0 < R, got r0=" << r0 << ", R=" << R;
        throw std::invalid_argument(os.str());
    }
    if (n < 16) throw std::invalid_argument("grid needs at least 16 nodes, got " + std::to_string(n));
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");

    Grid g;
    g.r0 = r0;
    g.R = R;
    g.dim = dim;

    const double uniform_h = R / double(n - 1);
    if (!layer_eps || uniform_h <= 0.95 * (*layer_eps) / 10.0) {
        g.nodes = map_nodes(g.map, R, r0, n);
        g.refinement = "uniform";
        return g;
    }
    const double eps = *layer_eps;
    if (!(eps > 0.0)) throw std::invalid_argument("layer_eps must be positive");
    const double target = 0.95 * eps / 10.0;

    double klo = 1e-6, khi = 60.0;
    if (spacing_at_r0(sinh_map(khi, R, r0), n) > target) {
        std::ostringstream os;
        os << "n=" << n << " too small to put 10 nodes per eps=" << eps << " at r0=" << r0;
        throw std::invalid_argument(os.str());
    }
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (klo + khi);
        if (spacing_at_r0(sinh_map(mid, R, r0), n) > target)
            klo = mid;
        else
            khi = mid;
    }
    g.map = sinh_map(khi, R, r0);
    g.nodes = map_nodes(g.map, R, r0, n);
    g.refinement = "sinh";
    for (std::size_t i = 1; i < g.nodes.size(); ++i)
        if (!(g.nodes[i] > g.nodes[i - 1])) throw std::runtime_error("grid map produced non-increasing nodes");
    return g;
}

Grid refine(const Grid& g)
{
    Grid out = g;
    int n = int(g.nodes.size());
    int n2 = 2 * (n - 1) + 1;
    out.nodes = map_nodes(g.map, g.R, g.r0, n2);
    if (g.refinement != "uniform" && g.refinement != "sinh") {
        // explicit nodes: insert midpoints
        out.nodes.clear();
        for (int i = 0; i < n; ++i) {
            out.nodes.push_back(g.nodes[i]);
            if (i + 1 < n) out.nodes.push_back(0.5 * (g.nodes[i] + g.nodes[i + 1]));
        }
    } else {
        for (int i = 0; i < n; ++i) out.nodes[2 * i] = g.nodes[i];
    }
    return out;
}

Grid recenter(const Grid& g, double r0)
{
    if (!(r0 > 0.0) || !(r0 < g.R)) throw std::invalid_argument("recenter: r0 outside (0, R)");
    Grid out = g;
    out.r0 = r0;
    if (g.refinement == "sinh") {
        out.map = sinh_map(g.map.k, g.R, r0);
        out.nodes = map_nodes(out.map, g.R, r0, int(g.nodes.size()));
    }
    return out;
}

Grid grid_from_nodes(std::vector<double> nodes, double r0, int dim)
{
    if (nodes.size() < 3) throw std::invalid_argument("grid needs at least 3 nodes");
    if (nodes.front() < 0.0) throw std::invalid_argument("first node must be >= 0");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1])) throw std::invalid_argument("nodes must be strictly increasing");
    Grid g;
    g.R = nodes.back();
    g.r0 = r0;
    g.dim = dim;
    g.nodes = std::move(nodes);
    g.refinement = "explicit";
    return g;
}

}  // namespace psep::num
