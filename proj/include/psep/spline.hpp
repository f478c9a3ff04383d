#pragma once

#include <cstddef>
#include <vector>

namespace psep::num {

// Clamped cubic spline. End slopes default to the derivative of the cubic
// through the four end nodes.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y);
    CubicSpline(std::vector<double> x, std::vector<double> y, double slope_left, double slope_right);

    // Outside [x0, xn] the end cubic piece is extended.
    double value(double t) const;
    double d1(double t) const;
    double d2(double t) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    void build(double sl, double sr);
    std::size_t interval(double t) const;

    std::vector<double> x_, y_, m_;   // m_ = second derivatives at nodes
};

// Derivative at x[0] of the cubic interpolating the first four points.
double end_slope(const double* x, const double* y);

}  // namespace psep::num
