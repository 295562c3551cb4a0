#include "fraclab/extrapolate.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclab {

double neville_extrapolate(const std::vector<double>& xs, const std::vector<double>& ys, double x0) {
    if (xs.empty() || xs.size() != ys.size()) throw std::invalid_argument("neville_extrapolate: need matching non-empty samples");
    std::vector<double> p = ys;
    const std::size_t n = xs.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            p[i] = ((x0 - xs[i + m]) * p[i] + (xs[i] - x0) * p[i + 1]) / (xs[i] - xs[i + m]);
    return p[0];
}

double richardson_limit(const std::vector<double>& e, const std::vector<double>& f, double p) {
    if (e.size() < 2 || e.size() != f.size()) throw std::invalid_argument("richardson_limit: need at least two samples");
    if (!(p > 0)) throw std::invalid_argument("richardson_limit: exponent must be positive");
    // Polynomial extrapolation in the variable e^p removes the terms e^p, e^{2p}, ...
    std::vector<double> t(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) t[i] = std::pow(e[i], p);
    return neville_extrapolate(t, f, 0.0);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2 || x.size() != y.size()) throw std::invalid_argument("loglog_slope: need at least two samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(std::abs(y[i]));
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fraclab
