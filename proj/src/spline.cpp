#include "psep/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace psep::num {

double end_slope(const double* x, const double* y)
{
    // derivative of the Lagrange basis at x[0]
    double s = 0.0;
    for (int j = 0; j < 4; ++j) {
        double dl = 0.0;
        if (j == 0) {
            for (int k = 1; k < 4; ++k) dl += 1.0 / (x[0] - x[k]);
        } else {
            double num = 1.0, den = 1.0;
            for (int k = 0; k < 4; ++k) {
                if (k == j) continue;
                den *= x[j] - x[k];
                if (k != 0) num *= x[0] - x[k];
            }
            dl = num / den;
        }
        s += y[j] * dl;
    }
    return s;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y))
{
    if (x_.size() < 4 || x_.size() != y_.size()) throw std::invalid_argument("spline needs >= 4 matching points");
    const std::size_t n = x_.size();
    double sl = end_slope(x_.data(), y_.data());
    double xr[4] = {x_[n - 1], x_[n - 2], x_[n - 3], x_[n - 4]};
    double yr[4] = {y_[n - 1], y_[n - 2], y_[n - 3], y_[n - 4]};
    double sr = end_slope(xr, yr);
    build(sl, sr);
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y, double sl, double sr)
    : x_(std::move(x)), y_(std::move(y))
{
    if (x_.size() < 2 || x_.size() != y_.size()) throw std::invalid_argument("spline needs >= 2 matching points");
    build(sl, sr);
}

void CubicSpline::build(double sl, double sr)
{
    const std::size_t n = x_.size();
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("spline abscissae must increase");
    // tridiagonal system for second derivatives (Thomas algorithm)
    std::vector<double> a(n), b(n), c(n), d(n);
    double h0 = x_[1] - x_[0];
    b[0] = h0 / 3.0;
    c[0] = h0 / 6.0;
    d[0] = (y_[1] - y_[0]) / h0 - sl;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
        a[i] = hl / 6.0;
        b[i] = (hl + hr) / 3.0;
        c[i] = hr / 6.0;
        d[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
    }
    double hn = x_[n - 1] - x_[n - 2];
    a[n - 1] = hn / 6.0;
    b[n - 1] = hn / 3.0;
    d[n - 1] = sr - (y_[n - 1] - y_[n - 2]) / hn;
    for (std::size_t i = 1; i < n; ++i) {
        double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    m_.assign(n, 0.0);
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
}

std::size_t CubicSpline::interval(double t) const
{
    if (t <= x_.front()) return 0;
    if (t >= x_.back()) return x_.size() - 2;
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    return std::size_t(it - x_.begin()) - 1;
}

double CubicSpline::value(double t) const
{
    std::size_t i = interval(t);
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    return A * y_[i] + B * y_[i + 1] + ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::d1(double t) const
{
    std::size_t i = interval(t);
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    return (y_[i + 1] - y_[i]) / h + ((1.0 - 3.0 * A * A) * m_[i] + (3.0 * B * B - 1.0) * m_[i + 1]) * h / 6.0;
}

double CubicSpline::d2(double t) const
{
    std::size_t i = interval(t);
    double h = x_[i + 1] - x_[i];
    double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    return A * m_[i] + B * m_[i + 1];
}

}  // namespace psep::num
