#include "fraclab/numerics.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace fraclab {

void CompensatedSum::add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
        comp_ += (sum_ - t) + v;
    else
        comp_ += (v - t) + sum_;
    sum_ = t;
}

double compensated_sum(std::span<const double> values) {
    CompensatedSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

namespace {

GaussRule make_rule(int n) {
    GaussRule g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        g.x[i] = z;
        g.w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return g;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 2) throw std::invalid_argument("gauss_legendre: need at least 2 points");
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

}  // namespace fraclab
