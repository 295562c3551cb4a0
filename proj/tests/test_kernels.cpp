#include <cmath>

#include "doctest.h"
#include "fraclab/kernels.hpp"
#include "oracles.hpp"

using namespace fraclab;

namespace {
const KernelParams quarter{0.25, 1};
}

TEST_CASE("adjacent unit intervals against the closed form and refined midpoint sums") {
    const double v = interaction(interval(-1, 0), interval(0, 1), quarter);
    CHECK(std::abs(v - (8 - 4 * std::sqrt(2.0))) <= 1e-10);
    const double mid = oracle::refined_midpoint_pair(-1, 0, 0, 1, 0.25, 1000);
    CHECK(std::abs(v - mid) / v <= 1e-3);
}

TEST_CASE("separated intervals against plain midpoint sums") {
    for (double s : {0.1, 0.25, 0.4}) {
        const double v = interval_pair_interaction(-1, -0.2, 0.3, 2, s);
        CHECK(v == doctest::Approx(oracle::midpoint_pair(-1, -0.2, 0.3, 2, s, 400)).epsilon(1e-4));
    }
}

TEST_CASE("interaction symmetry, translation and null sets") {
    const auto A = interval(-1, 0.2), B = interval(0.5, 3);
    CHECK(interaction(A, B, quarter) == interaction(B, A, quarter));
    CHECK(interaction(interval(1, 2.2), interval(2.5, 5), quarter) == doctest::Approx(interaction(A, B, quarter)).epsilon(1e-12));
    CHECK(interaction(A, interval(2, 2), quarter) == 0.0);
    CHECK_THROWS(interaction(interval(0, 1), interval(0.5, 2), quarter));
}

TEST_CASE("s-perimeter basic properties") {
    const auto omega = interval(-1, 1);
    CHECK(frac_perimeter(empty_set(), omega, quarter) == 0.0);
    for (const auto& E : {interval(0, kInf), interval(-0.5, 0.5), interval_union({{-3, -0.2}, {0.4, 0.7}})}) {
        CHECK(frac_perimeter(E, omega, quarter) == doctest::Approx(frac_perimeter(complement(E), omega, quarter)).epsilon(1e-12));
        CHECK(frac_perimeter(E, omega, quarter) >= 0);
        const double big = frac_perimeter(E, omega, quarter);
        CHECK(frac_perimeter(E, interval(-0.5, 0.9), quarter) <= big * (1 + 1e-12));
    }
    CHECK_THROWS(frac_perimeter(interval(0, kInf), omega, {0.5, 1}));
}

TEST_CASE("s-perimeter scaling") {
    const double a = frac_perimeter(interval(0, kInf), interval(-1, 1), quarter);
    const double b = frac_perimeter(interval(0, kInf), interval(-2, 2), quarter);
    CHECK(b == doctest::Approx(std::pow(2.0, 1 - 0.5) * a).epsilon(1e-12));
}

TEST_CASE("s-perimeter of a half-line by direct ray integration") {
    // Per_s((0,inf),(-1,1)) = L((0,1),(-1,0)) + L((0,1),(-inf,-1)) + L((1,inf),(-1,0)).
    const double s = 0.25;
    auto inner = [&](double x) { return oracle::ray_integral(x, -1, 0, s); };
    auto left_far = [&](double x) { return std::pow(x + 1, -2 * s) / (2 * s); };
    // Substitution x = t^2 resolves the x^{-2s} endpoint singularity.
    const double t1 = oracle::simpson([&](double t) { return 2 * t * inner(t * t); }, 1e-12, 1, 4000);
    const double t2 = oracle::simpson(left_far, 0, 1, 2000);
    const double t3 = t2;
    const double expected = t1 + t2 + t3;
    CHECK(frac_perimeter(interval(0, kInf), interval(-1, 1), quarter) == doctest::Approx(expected).epsilon(2e-4));
}

TEST_CASE("classical perimeter") {
    CHECK(classical_perimeter(interval(0, kInf), interval(-1, 1)) == 1.0);
    CHECK(classical_perimeter(interval(-0.5, 0.5), interval(-1, 1)) == 2.0);
    CHECK(classical_perimeter(interval(-3, 3), interval(-1, 1)) == 0.0);
    CHECK(std::abs(classical_perimeter(disk(0, 0, 0.3), disk(0, 0, 1)) - 2 * M_PI * 0.3) <= 1e-12);
}

TEST_CASE("rescaled perimeter limits") {
    const std::vector<double> ss{0.30, 0.40, 0.45, 0.49};
    CHECK(rescaled_perimeter_limit(interval(0, kInf), interval(-1, 1), ss).limit == doctest::Approx(1).epsilon(0.05));
    CHECK(rescaled_perimeter_limit(interval(-0.5, 0.5), interval(-1, 1), ss).limit == doctest::Approx(2).epsilon(0.05));
    const auto e = rescaled_perimeter_limit(empty_set(), interval(-1, 1), ss);
    CHECK(e.limit == 0.0);
    for (const auto& r : e.rows) CHECK(r.second == 0.0);
    CHECK_THROWS(rescaled_perimeter_limit(interval(0, kInf), interval(-1, 1), {}));
}

TEST_CASE("Gagliardo energy invariances") {
    const auto g = build_grid(interval(-1, 1), 0.01, 4);
    const KernelOperator op(g, 0.25);
    ScalarField c(g, 0.4);
    c.far = {0.4, 0.4};
    CHECK(op.energy(c) == 0.0);
    ScalarField u(g);
    for (std::size_t k = 0; k < g->size(); ++k) u[k] = std::sin(3 * g->coord(k, 0));
    u.far = {std::sin(-12.0), std::sin(12.0)};
    ScalarField v = u;
    for (auto& x : v.values) x += 0.7;
    v.far = {u.far[0] + 0.7, u.far[1] + 0.7};
    CHECK(op.energy(v) == doctest::Approx(op.energy(u)).epsilon(1e-12));
}

TEST_CASE("signed indicator energy is four times the s-perimeter") {
    const auto g = build_grid(interval(-1, 1), 0.005, 4);
    for (const auto& E : {interval(0, kInf), interval(-0.5, 0.5), interval(0.25, kInf)}) {
        const double K = gagliardo_K(indicator(E, g), interval(-1, 1), quarter);
        CHECK(std::abs(K / (4 * frac_perimeter(E, interval(-1, 1), quarter)) - 1) <= 5e-3);
    }
}

TEST_CASE("parallel kernel sums match the serial references") {
    for (double s : {0.25, 0.75}) {
        const auto g = build_grid(interval(-1, 1), 0.02, 4);
        const KernelOperator op(g, s);
        ScalarField u(g);
        for (std::size_t k = 0; k < g->size(); ++k) u[k] = std::tanh(3 * g->coord(k, 0)) + 0.1 * std::cos(g->coord(k, 0));
        u.far = {u[0], u[g->size() - 1]};
        CHECK(op.energy(u) == doctest::Approx(op.energy_serial(u)).epsilon(1e-12));
        std::vector<double> a, b;
        std::array<double, 2> fa{}, fb{};
        op.gradient(u, a, fa);
        op.gradient_serial(u, b, fb);
        for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-10).scale(1));
        CHECK(fa[0] == doctest::Approx(fb[0]).epsilon(1e-10));
        const auto la = op.laplacian(u), lb = op.laplacian_serial(u);
        for (std::size_t k = 0; k < la.size(); ++k) CHECK(la[k] == doctest::Approx(lb[k]).epsilon(1e-10).scale(1));
    }
}

TEST_CASE("2D kernel sums match the serial references") {
    const auto g = build_grid(disk(0, 0, 1), 0.25, 4);
    const KernelOperator op(g, 0.25);
    ScalarField u(g);
    for (std::size_t k = 0; k < g->size(); ++k) u[k] = std::tanh(2 * g->coord(k, 0) - g->coord(k, 1));
    u.far = {0.1, 0.1};
    CHECK(op.energy(u) == doctest::Approx(op.energy_serial(u)).epsilon(1e-12));
}

TEST_CASE("gradient of the discrete energy against finite differences") {
    const auto g = build_grid(interval(-1, 1), 0.05, 4);
    const KernelOperator op(g, 0.25);
    ScalarField u(g);
    for (std::size_t k = 0; k < g->size(); ++k) u[k] = std::tanh(4 * g->coord(k, 0) - 0.3);
    u.far = {-0.9, 0.8};
    std::vector<double> grad;
    std::array<double, 2> gfar{};
    op.gradient(u, grad, gfar);
    for (std::size_t k : {std::size_t{3}, g->size() / 2, g->size() / 2 + 17, g->size() - 2}) {
        ScalarField p = u, m = u;
        p[k] += 1e-6;
        m[k] -= 1e-6;
        CHECK(grad[k] == doctest::Approx((op.energy(p) - op.energy(m)) / 2e-6).epsilon(1e-5));
    }
    ScalarField p = u, m = u;
    p.far[1] += 1e-6;
    m.far[1] -= 1e-6;
    CHECK(gfar[1] == doctest::Approx((op.energy(p) - op.energy(m)) / 2e-6).epsilon(1e-5));
}
