#include <cmath>

#include "doctest.h"
#include "fraclab/energy.hpp"

using namespace fraclab;

TEST_CASE("double well values") {
    const auto one = potential_W(1), zero = potential_W(0), minus = potential_W(-1);
    CHECK(one.W == 0);
    CHECK(one.dW == 0);
    CHECK(one.d2W == 2);
    CHECK(zero.W == 0.25);
    CHECK(zero.dW == 0);
    CHECK(zero.d2W == -1);
    CHECK(minus.W == 0);
    CHECK(minus.dW == 0);
    CHECK(minus.d2W == 2);
    for (double t : {-1.7, -0.3, 0.4, 1.3}) {
        CHECK(potential_W(t).W > 0);
        const double fd = (potential_W(t + 1e-6).W - potential_W(t - 1e-6).W) / 2e-6;
        CHECK(potential_W(t).dW == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("scaling constants") {
    CHECK(kappa_eps(0.25, 0.1) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
    CHECK(kappa_eps(0.5, 0.1) == doctest::Approx(1 / (0.1 * std::log(10.0))).epsilon(1e-14));
    CHECK(kappa_eps(0.75, 0.1) == doctest::Approx(10).epsilon(1e-14));
    CHECK_THROWS(kappa_eps(0.25, 1.0));
    CHECK_THROWS(kappa_eps(0.25, 0.0));
    CHECK(c_ns(0.25, 1) == doctest::Approx(1));
    CHECK(c_ns(0.75, 2) == doctest::Approx(0.25));
    CHECK(c_ns(0.75, 1) == doctest::Approx(0.5));
    CHECK(unit_ball_volume(0) == 1);
    CHECK(unit_ball_volume(1) == 2);
    CHECK(scaling_regime(0.25) == ScalingRegime::SubHalf);
    CHECK(scaling_regime(0.5) == ScalingRegime::Half);
    CHECK(scaling_regime(0.75) == ScalingRegime::SuperHalf);
}

TEST_CASE("Massari functionals") {
    const auto omega = interval(-1, 1), E = interval(0, kInf);
    const double per = frac_perimeter(E, omega, {0.25, 1});
    CHECK(massari_fractional(E, omega, 0.25, ForcingSpec::none()) == doctest::Approx(per).epsilon(1e-14));
    CHECK(massari_fractional(empty_set(), omega, 0.25, ForcingSpec::constant_value(1)) == 0.0);
    CHECK(massari_fractional(E, omega, 0.25, ForcingSpec::constant_value(1)) == doctest::Approx(per + 2).epsilon(1e-12));
    CHECK_THROWS(massari_fractional(E, omega, 0.6, ForcingSpec::none()));
    for (double t : {-0.6, 0.0, 0.35})
        CHECK(massari_classical(interval(t, kInf), omega, ForcingSpec::constant_value(0.4)) == doctest::Approx(1 + 0.4 * (1 - t)).epsilon(1e-12));
    CHECK(massari_classical(interval(-2, kInf), omega, ForcingSpec::constant_value(0.4)) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(massari_classical(E, omega, ForcingSpec::none()) == 1.0);
}

TEST_CASE("alternative formulation differs by a set-independent constant") {
    const auto omega = interval(-1, 1);
    const auto H = ForcingSpec::constant_value(0.6);
    const double shift = -0.6 * 2 / (2 * (1 - 0.5));
    for (const auto& E : {interval(0, kInf), interval(-0.5, 0.5), interval(0.3, kInf)}) {
        CHECK(std::abs(script_P_fractional(E, omega, 0.25, H) - massari_fractional(E, omega, 0.25, H) - shift) <= 1e-10);
        CHECK(script_P_fractional(E, omega, 0.25, H) ==
              doctest::Approx(script_P_fractional(complement(E), omega, 0.25, ForcingSpec::constant_value(-0.6))).epsilon(1e-12));
    }
    CHECK(script_P_fractional(interval(0, kInf), omega, 0.25, ForcingSpec::none()) ==
          doctest::Approx(frac_perimeter(interval(0, kInf), omega, {0.25, 1})).epsilon(1e-14));
    CHECK(script_P_classical(interval(0, kInf), omega, H) == doctest::Approx(1 + 0.5 * 0.6 * 0).epsilon(1e-12));
}

TEST_CASE("Allen-Cahn energy special fields") {
    const auto g = build_grid(interval(-1, 1), 0.01, 4);
    const auto omega = interval(-1, 1);
    ScalarField one(g, 1.0);
    one.far = {1, 1};
    CHECK(allen_cahn_F_eps(one, omega, 0.25, 0.1, 2).total == 0.0);
    ScalarField zero(g, 0.0);
    CHECK(allen_cahn_F_eps(zero, omega, 0.25, 0.1, 2).total == doctest::Approx(kappa_eps(0.25, 0.1) * 2 / 4).epsilon(1e-12));
    const auto u = indicator(interval(0, kInf), g);
    const auto F = allen_cahn_F_eps(u, omega, 0.25, 0.1, 2);
    CHECK(F.gagliardo == doctest::Approx(F.K).epsilon(1e-14));
    CHECK(F.potential == 0.0);
    CHECK(F.K == doctest::Approx(4 * frac_perimeter(interval(0, kInf), omega, {0.25, 1})).epsilon(1e-2));
    ScalarField big(g, 0.0);
    big[g->size() / 2] = 2.5;
    CHECK_THROWS(allen_cahn_F_eps(big, omega, 0.25, 0.1, 2));
}

TEST_CASE("forcing and multiplier terms") {
    const auto g = build_grid(interval(-1, 1), 0.01, 4);
    const auto omega = interval(-1, 1);
    ScalarField u(g);
    for (std::size_t k = 0; k < g->size(); ++k) u[k] = 0.8 * std::tanh(5 * g->coord(k, 0) - 1);
    u.far = {-0.8, 0.8};
    const auto F = allen_cahn_F_eps(u, omega, 0.75, 0.05, 2);
    const auto E0 = total_E_eps(u, omega, 0.75, 0.05, ForcingSpec::none(), 2);
    CHECK(E0.total == doctest::Approx(F.total).epsilon(1e-14));
    const auto H = ForcingSpec::constant_value(0.3);
    const auto E = total_E_eps(u, omega, 0.75, 0.05, H, 2);
    CHECK(E.total == doctest::Approx(F.total + E.forcing).epsilon(1e-14));
    CHECK(E.total == doctest::Approx(E.sum_of_parts()).epsilon(1e-14));
    ScalarField minus = u;
    for (auto& v : minus.values) v = -v;
    minus.far = {0.8, -0.8};
    const auto Em = total_E_eps(minus, omega, 0.75, 0.05, H, 2);
    CHECK(Em.total - E.total == doctest::Approx(-2 * E.forcing).epsilon(1e-10));
    ScalarField one(g, 1.0);
    one.far = {1, 1};
    CHECK(total_E_eps(one, omega, 0.75, 0.05, H, 2).forcing == doctest::Approx(c_ns(0.75, 1) * 0.3 * 2).epsilon(1e-12));
    CHECK(total_G_eps(u, omega, 0.75, 0.05, 0.0, 2).total == doctest::Approx(F.total).epsilon(1e-14));
    CHECK(total_G_eps(ScalarField(g, 0.0), omega, 0.75, 0.05, 0.3, 2).multiplier_term == 0.0);
    CHECK(total_G_eps(one, omega, 0.75, 0.05, 0.3, 2).multiplier_term == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("sub-half rescale cancels exactly") {
    for (double eps : {0.1, 0.03}) CHECK(kappa_eps(0.25, eps) * std::pow(eps, 0.5) == doctest::Approx(1).epsilon(1e-14));
}
