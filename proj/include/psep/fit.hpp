#pragma once

#include <cstddef>
#include <vector>

namespace psep::num {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    double max_residual = 0.0;
    std::size_t count = 0;
};

// Ordinary least squares y ~ slope*x + intercept (centred sums). Needs >= 2 points
// with distinct x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Least-squares scalar c minimizing ||y - c x||_2.
double scalar_projection(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace psep::num
