#include <cmath>

#include "doctest.h"
#include "fraclab/kernels.hpp"
#include "fraclab/operator.hpp"
#include "oracles.hpp"

using namespace fraclab;

namespace {

std::vector<std::size_t> all_nodes(const Grid& g) {
    std::vector<std::size_t> v(g.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = k;
    return v;
}

std::vector<std::size_t> outside(const Grid& g) {
    std::vector<std::size_t> v;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (!g.in_omega[k]) v.push_back(k);
    return v;
}

}  // namespace

TEST_CASE("fractional Laplacian of constants and odd fields") {
    const auto g = build_grid(interval(-1, 1), 0.01, 4);
    ScalarField c(g, 0.3);
    c.far = {0.3, 0.3};
    const auto lc = frac_laplacian(c, all_nodes(*g), 0.25);
    for (double v : lc.values) CHECK(v == 0.0);
    ScalarField u(g);
    for (std::size_t k = 0; k < g->size(); ++k) u[k] = std::tanh(3 * g->coord(k, 0));
    u.far = {-1, 1};
    const auto lu = frac_laplacian(u, all_nodes(*g), 0.25);
    for (std::size_t k = 0; k < g->size(); ++k) CHECK(lu[k] == doctest::Approx(-lu[g->size() - 1 - k]).epsilon(1e-9).scale(1));
}

TEST_CASE("fractional Laplacian of the signed half-line indicator at x = 1") {
    // 2 int_{-inf}^0 2 (1-y)^{-3/2} dy = 8. Grid chosen so 0 is a cell edge
    // and 1 a cell centre.
    const double h = 2.0 / 201;
    const auto g = box_grid_1d(-4, 4, h, interval(-1, 1));
    const auto u = indicator(interval(0, kInf), g);
    std::size_t at = 0;
    for (std::size_t k = 0; k < g->size(); ++k)
        if (std::abs(g->coord(k, 0) - 1) < 1e-9) at = k;
    REQUIRE(std::abs(g->coord(at, 0) - 1) < 1e-9);
    CHECK(frac_laplacian(u, {at}, 0.25)[at] == doctest::Approx(8).epsilon(1e-10));
}

TEST_CASE("fractional Laplacian is linear") {
    const auto g = build_grid(interval(-1, 1), 0.02, 4);
    ScalarField u(g), v(g), w(g);
    for (std::size_t k = 0; k < g->size(); ++k) {
        u[k] = std::sin(2 * g->coord(k, 0));
        v[k] = std::exp(-g->coord(k, 0) * g->coord(k, 0));
        w[k] = 0.7 * u[k] - 1.3 * v[k];
    }
    u.far = {0.2, -0.1};
    v.far = {0, 0};
    w.far = {0.14, -0.07};
    const auto nodes = all_nodes(*g);
    const auto lu = frac_laplacian(u, nodes, 0.75), lv = frac_laplacian(v, nodes, 0.75), lw = frac_laplacian(w, nodes, 0.75);
    for (std::size_t k = 0; k < g->size(); ++k) CHECK(std::abs(lw[k] - 0.7 * lu[k] + 1.3 * lv[k]) <= 1e-12 * (1 + std::abs(lw[k])));
}

TEST_CASE("discrete integration by parts against the energy") {
    // For v supported in omega, sum_i Lap(u)_i v_i h = d/dt K(u + t v) at 0.
    const auto g = build_grid(interval(-1, 1), 0.02, 4);
    const KernelOperator op(g, 0.25);
    ScalarField u(g), v(g);
    for (std::size_t k = 0; k < g->size(); ++k) {
        const double x = g->coord(k, 0);
        u[k] = std::tanh(2 * x);
        v[k] = g->in_omega[k] ? std::cos(x) * (1 - x * x) : 0.0;
    }
    u.far = {-1, 1};
    const auto lap = op.laplacian(u);
    double pairing = 0;
    for (std::size_t k = 0; k < g->size(); ++k) pairing += lap[k] * v[k] * g->h;
    ScalarField p = u, m = u;
    for (std::size_t k = 0; k < g->size(); ++k) {
        p[k] += 1e-6 * v[k];
        m[k] -= 1e-6 * v[k];
    }
    CHECK(pairing == doctest::Approx((op.energy(p) - op.energy(m)) / 2e-6).epsilon(1e-6));
}

TEST_CASE("Neumann value from the closed-form ray integrals") {
    const auto g = build_grid(interval(-1, 1), 0.01, 4);
    const auto u = indicator(interval(0, kInf), g);
    const double s = 0.25;
    const double num = oracle::ray_integral(2, 0, 1, s) - oracle::ray_integral(2, -1, 0, s);
    const double den = oracle::ray_integral(2, -1, 1, s);
    CHECK(num / den == doctest::Approx(0.386).epsilon(1e-3));
    CHECK(neumann_value(u, s, 2.0) == doctest::Approx(num / den).epsilon(1e-12));
    auto ratio = [&](double x) {
        return (oracle::ray_integral(x, 0, 1, s) - oracle::ray_integral(x, -1, 0, s)) / oracle::ray_integral(x, -1, 1, s);
    };
    // The value decays like (1 - s) / x, so it is still 0.015 at x = 50.
    CHECK(neumann_value(u, s, 50.0) == doctest::Approx(ratio(50.0)).epsilon(1e-10));
    CHECK(std::abs(neumann_value(u, s, 100.0)) <= 1e-2);
    CHECK_THROWS(neumann_value(u, s, 0.5));
    CHECK_THROWS(neumann_value(u, s, 1.0));
}

TEST_CASE("Neumann extension of constants and the convex hull property") {
    const auto g = build_grid(interval(-1, 1), 0.01, 4);
    ScalarField c(g, 0.0);
    for (std::size_t k = 0; k < g->size(); ++k)
        if (g->in_omega[k]) c[k] = -0.45;
    const auto ext = outside(*g);
    const auto nc = neumann_extension(c, 0.25, ext);
    for (std::size_t k : ext) CHECK(std::abs(nc[k] + 0.45) <= 1e-14);
    ScalarField u(g, 0.0);
    double lo = 1, hi = -1;
    for (std::size_t k = 0; k < g->size(); ++k)
        if (g->in_omega[k]) {
            u[k] = std::sin(4 * g->coord(k, 0));
            lo = std::min(lo, u[k]);
            hi = std::max(hi, u[k]);
        }
    const auto nu = neumann_extension(u, 0.75, ext);
    for (std::size_t k : ext) {
        CHECK(nu[k] >= lo - 1e-14);
        CHECK(nu[k] <= hi + 1e-14);
    }
}

TEST_CASE("profile at s = 0.75") {
    const auto p = solve_profile(0.75, 20, 0.05);
    const std::size_t n = p.u.size();
    CHECK(p.value(0.0) == doctest::Approx(0).scale(1).epsilon(1e-12));
    for (std::size_t i = 0; i < n; ++i) CHECK(p.u[i] == doctest::Approx(-p.u[n - 1 - i]).epsilon(1e-12).scale(1));
    for (std::size_t i = 1; i < n; ++i) CHECK(p.u[i] > p.u[i - 1]);
    CHECK(profile_residual(p) <= 1e-6);
    CHECK(std::isfinite(p.C));
    CHECK(p.value(25) == 1.0);
    CHECK(p.value(-25) == -1.0);
    const auto q = ProfileTable::from_csv(p.to_csv(), 0.75);
    CHECK(q.u == p.u);
    CHECK(q.t == p.t);
    CHECK_THROWS(solve_profile(0.75, 10, 0.05));
    CHECK_THROWS(solve_profile(0.75, 20, 0.1));
}

TEST_CASE("recovery sequence mass correction") {
    const auto p = solve_profile(0.75, 20, 0.05);
    const auto g = build_grid(interval(-1, 1), 0.005, 4);
    const auto r = build_recovery_sequence(g, interval(0, kInf), p, 0.05, 0.0, 2, {0.6, 0, 0.2, 0.05});
    CHECK(std::abs(r.c_eps) <= 1e-12);
    const auto q = build_recovery_sequence(g, interval(0, kInf), p, 0.05, 0.1, 2, {0.6, 0, 0.2, 0.05});
    CHECK(std::abs(q.field.omega_integral() - 0.1) <= g->h * g->h);
    CHECK_THROWS(build_recovery_sequence(g, interval(0, kInf), p, 0.05, 0.1, 2, {0.1, 0, 0.2, 0.05}));
}
