#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fraclab {

// Neumaier compensated accumulator. Used for every reduction whose result is
// reported, so totals do not depend on how per-node partials were produced.
class CompensatedSum {
public:
    void add(double v);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values);

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1]
    std::vector<double> w;
};

// Gauss-Legendre rule with n points, computed by Newton iteration on P_n.
const GaussRule& gauss_legendre(int n);

// Integrate f over [a, b] with an n-point Gauss rule split into `pieces` panels.
template <class F>
double gauss_integrate(F&& f, double a, double b, int n, int pieces = 1) {
    const GaussRule& g = gauss_legendre(n);
    const double step = (b - a) / pieces;
    CompensatedSum acc;
    for (int p = 0; p < pieces; ++p) {
        const double lo = a + p * step;
        const double half = 0.5 * step;
        const double mid = lo + half;
        for (std::size_t k = 0; k < g.x.size(); ++k) acc.add(half * g.w[k] * f(mid + half * g.x[k]));
    }
    return acc.value();
}

}  // namespace fraclab
