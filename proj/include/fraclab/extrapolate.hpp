#pragma once

#include <vector>

namespace fraclab {

// Value at x0 of the interpolating polynomial through (xs, ys) (Neville).
double neville_extrapolate(const std::vector<double>& xs, const std::vector<double>& ys, double x0 = 0.0);

// Limit of a sequence f(e) = f0 + C e^p + ..., sampled at decreasing e.
// Repeated Richardson elimination with exponents p, 2p, 3p, ... using every
// sample; returns f0.
double richardson_limit(const std::vector<double>& e, const std::vector<double>& f, double p);

// Least-squares slope of log|y| against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fraclab
