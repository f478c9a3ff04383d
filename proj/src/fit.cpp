#include "psep/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psep::num {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("linear_fit needs >= 2 matching points");
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0) throw std::invalid_argument("linear_fit: abscissae are all equal");
    LinearFit f;
    f.count = n;
    f.slope = double(sxy / sxx);
    f.intercept = double(my - sxy / sxx * mx);
    long double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long double e = y[i] - (f.intercept + (long double)f.slope * x[i]);
        sse += e * e;
        f.max_residual = std::max(f.max_residual, double(std::fabs(e)));
    }
    f.r2 = syy > 0 ? double(1 - sse / syy) : 1.0;
    if (n > 2) {
        long double s2 = sse / (n - 2);
        f.slope_stderr = double(std::sqrt(s2 / sxx));
        f.intercept_stderr = double(std::sqrt(s2 * (1.0L / n + mx * mx / sxx)));
    }
    return f;
}

double scalar_projection(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size()) throw std::invalid_argument("scalar_projection: length mismatch");
    long double xy = 0, xx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xy += (long double)x[i] * y[i];
        xx += (long double)x[i] * x[i];
    }
    return xx > 0 ? double(xy / xx) : 0.0;
}

}  // namespace psep::num
