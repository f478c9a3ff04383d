#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace psep::num {

// rho(xi) = r0 + c*sinh(k*(xi - xi0)), xi in [0,1]; k == 0 means uniform.
struct GridMap {
    double k = 0.0;
    double c = 0.0;
    double xi0 = 0.0;
};

struct Grid {
    std::vector<double> nodes;
    double r0 = 0.0;
    double R = 0.0;
    int dim = 1;
    std::string refinement = "uniform";
    GridMap map;

    std::size_t size() const { return nodes.size(); }
    // signed distance to the interface
    double r(std::size_t i) const { return nodes[i] - r0; }
    // largest spacing among intervals that touch [rho - half, rho + half]
    double max_spacing_near(double rho, double half) const;
};

// Nodes run from 0 to R. With layer_eps the spacing at r0 is at most layer_eps/10.
Grid build_grid(double R, double r0, int n, int dim,
                std::optional<double> layer_eps = std::nullopt);

// Same map, half the parameter step (2n-1 nodes, old nodes kept).
Grid refine(const Grid& g);

// Same construction re-centred on a new interface radius (sinh maps keep k).
Grid recenter(const Grid& g, double r0);

// Grid with explicit nodes (validated: strictly increasing, starts >= 0, ends at R).
Grid grid_from_nodes(std::vector<double> nodes, double r0, int dim);

}  // namespace psep::num
