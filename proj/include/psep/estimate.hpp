#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psep/ansatz.hpp"
#include "psep/fit.hpp"
#include "psep/inner.hpp"
#include "psep/limit.hpp"
#include "psep/linop.hpp"
#include "psep/norms.hpp"

namespace psep::lin {

// Everything the eps-dependent ansatz is built from.
struct LayerBackground {
    const limit::ScalarLimitSolution& sol;
    const inner::ProfilePair& profile;
    const inner::CorrectionProfile& correction;
    double b_tilde = 0.0;
    double zeta = 0.0;
};

// Ansatz on a sinh grid with `nodes` nodes clustered at the interface (spacing <= eps/10).
ansatz::AnsatzField ansatz_field(const LayerBackground& bg, double eps, int nodes);

// d = fraction * min(r0, R - r0)
double collar_width(const limit::ScalarLimitSolution& sol, double fraction = 0.25);

struct EstimateConfig {
    std::vector<double> eps_list{0.1, 0.05, 0.025};
    int ensemble = 32;
    std::uint64_t seed = 1;
    int m_max = 0;
    double alpha = 0.5;
    double d_fraction = 0.25;
    int nodes = 4000;
    int threads = 1;
};

// One random right-hand side: Gaussian bumps in a single angular mode.
struct Bump {
    int component = 1;
    double center = 0.0;   // radius
    double width = 0.0;
    double amplitude = 0.0;
};

struct DataSample {
    int mode = 0;
    std::string kind;      // "collar" or "outer" for the leading bump
    std::vector<Bump> bumps;

    Field2 sample(const num::Grid& g) const;
};

// Stratified draw for (seed, level, index): the leading bump cycles through
// collar/outer x component x width class; up to two further bumps are random.
DataSample draw_sample(std::uint64_t seed, int level, int index, double eps, double d,
                       const limit::ScalarLimitSolution& sol, int m_max);

struct EstimateSample {
    int index = 0;
    int mode = 0;
    std::string kind;
    double ratio = 0.0;          // ||phi||_0 / ||g||_1
    double log_norm0 = 0.0;
    double log_norm1 = 0.0;
    double ratio_sup_direction = 0.0;
    double residual = 0.0;
};

struct EstimateLevel {
    double eps = 0.0;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    double min_ratio = 0.0;
    double sigma_min = 0.0;      // smallest over the modes used
    std::vector<EstimateSample> samples;
};

struct EstimateReport {
    std::vector<EstimateLevel> levels;   // in eps_list order
    num::LinearFit fit;                  // log(max ratio) against log(eps)
    double slope = 0.0;
    double slope_stderr = 0.0;
    double constant = 0.0;               // max over levels of max_ratio / eps
    std::uint64_t seed = 0;
    int m_max = 0;
    double alpha = 0.0;
};

// Throws NearKernelError (message names eps) if any solve is singular, ValidationError
// for an eps list with fewer than 3 values or spanning less than a factor 4.
EstimateReport measure_estimate(const LayerBackground& bg, const limit::Nonlinearity& f, const EstimateConfig& cfg);

}  // namespace psep::lin
