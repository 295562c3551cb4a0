#pragma once

// Independent reference computations used by the tests. None of these call
// into the library's closed forms.

#include <cmath>
#include <functional>

namespace oracle {

// Midpoint double sum of |x-y|^{-1-2s} over (a,b) x (c,d), b <= c, with n
// cells per unit length.
inline double midpoint_pair(double a, double b, double c, double d, double s, int n) {
    const long na = std::lround((b - a) * n), nc = std::lround((d - c) * n);
    const double ha = (b - a) / na, hc = (d - c) / nc;
    double total = 0;
    for (long i = 0; i < na; ++i) {
        const double x = a + (i + 0.5) * ha;
        double row = 0;
        for (long j = 0; j < nc; ++j) row += std::pow(c + (j + 0.5) * hc - x, -1 - 2 * s);
        total += row;
    }
    return total * ha * hc;
}

// The midpoint error near a touching corner is C h^{1-2s}; one Richardson
// step with the half-resolution sum removes it.
inline double refined_midpoint_pair(double a, double b, double c, double d, double s, int n) {
    const double fine = midpoint_pair(a, b, c, d, s, n);
    const double coarse = midpoint_pair(a, b, c, d, s, n / 2);
    const double r = std::pow(2.0, 1 - 2 * s);
    return (r * fine - coarse) / (r - 1);
}

// int_a^b |x - y|^{-1-2s} dy for x outside [a, b], by direct antidifferentiation
// of the power.
inline double ray_integral(double x, double a, double b, double s) {
    if (x >= b) return (std::pow(x - b, -2 * s) - std::pow(x - a, -2 * s)) / (2 * s);
    return (std::pow(a - x, -2 * s) - std::pow(b - x, -2 * s)) / (2 * s);
}

// int_a^b int_c^d (y - x)^{-1-2s} for s < 1/2 and b <= c, from integrating the
// power twice by hand. Infinite ends drop their terms, which vanish in the limit.
inline double pair_by_hand(double a, double b, double c, double d, double s) {
    const double q = 1 - 2 * s;
    if (std::isinf(a) && std::isinf(d)) return INFINITY;
    auto p = [q](double z) { return std::isinf(z) ? 0.0 : std::pow(z, q); };
    double acc = -std::pow(c - b, q);
    if (!std::isinf(a)) acc += p(c - a) - (std::isinf(d) ? 0.0 : p(d - a));
    if (!std::isinf(d)) acc += p(d - b);
    return acc / (2 * s * q);
}

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4 : 2) * f(a + i * h);
    return acc * h / 3;
}

}  // namespace oracle
