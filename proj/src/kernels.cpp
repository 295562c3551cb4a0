#include "fraclab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "fraclab/extrapolate.hpp"
#include "fraclab/numerics.hpp"

namespace fraclab {

namespace {

constexpr double kPi = std::numbers::pi;

// (k+1)^a - 2 k^a + (k-1)^a, evaluated by its binomial series for large k to
// avoid the cancellation of the direct form.
double second_difference_pow(double a, long k) {
    const double kk = static_cast<double>(k);
    if (k < 16) return std::pow(kk + 1, a) - 2 * std::pow(kk, a) + std::pow(kk - 1, a);
    const double kinv2 = 1.0 / (kk * kk);
    double coef = 1.0, powk = std::pow(kk, a), sum = 0.0;
    for (int j = 1; j <= 14; ++j) {
        coef *= (a - 2 * j + 2) * (a - 2 * j + 1) / ((2.0 * j - 1) * (2.0 * j));
        powk *= kinv2;
        sum += 2 * coef * powk;
    }
    return sum;
}

// G(d + w) - G(d) without cancellation.
double antiderivative_step(double d, double w, double s) {
    if (d == 0) return s < 0.5 ? std::pow(w, 1 - 2 * s) / (2 * s * (1 - 2 * s)) : kInf;
    if (s == 0.5) return std::log1p(w / d);
    return std::pow(d, 1 - 2 * s) * std::expm1((1 - 2 * s) * std::log1p(w / d)) / (2 * s * (1 - 2 * s));
}

// Integral over the unit square [0,1]^2 of (a1 + b1 u)(a2 + b2 v) |(u,v)|^q,
// with the radial part done in closed form.
double polar_corner(double a1, double b1, double a2, double b2, double q) {
    const double c0 = a1 * a2;
    if (c0 != 0 && q + 2 <= 0) return kInf;
    if ((a1 * b2 != 0 || b1 * a2 != 0) && q + 3 <= 0) return kInf;
    auto integrand = [&](double th, double rho) {
        const double cs = std::cos(th), sn = std::sin(th);
        double v = 0;
        if (c0 != 0) v += c0 * std::pow(rho, q + 2) / (q + 2);
        const double c1 = a1 * b2 * sn + b1 * a2 * cs;
        if (c1 != 0) v += c1 * std::pow(rho, q + 3) / (q + 3);
        const double c2 = b1 * b2 * cs * sn;
        if (c2 != 0) v += c2 * std::pow(rho, q + 4) / (q + 4);
        return v;
    };
    const double lower = gauss_integrate([&](double th) { return integrand(th, 1.0 / std::cos(th)); }, 0.0, kPi / 4, 24, 2);
    const double upper = gauss_integrate([&](double th) { return integrand(th, 1.0 / std::sin(th)); }, kPi / 4, kPi / 2, 24, 2);
    return lower + upper;
}

template <class F>
double integrate_square(F&& f, double x0, double y0, double w, int n, int panels) {
    const GaussRule& g = gauss_legendre(n);
    const double step = w / panels;
    CompensatedSum acc;
    for (int px = 0; px < panels; ++px)
        for (int py = 0; py < panels; ++py) {
            const double mx = x0 + (px + 0.5) * step, my = y0 + (py + 0.5) * step;
            for (std::size_t a = 0; a < g.x.size(); ++a)
                for (std::size_t b = 0; b < g.x.size(); ++b)
                    acc.add(0.25 * step * step * g.w[a] * g.w[b] * f(mx + 0.5 * step * g.x[a], my + 0.5 * step * g.x[b]));
        }
    return acc.value();
}

double square_distance_to_origin(double x0, double y0, double w) {
    const double dx = std::max({x0, 0.0, -(x0 + w)});
    const double dy = std::max({y0, 0.0, -(y0 + w)});
    return std::hypot(dx, dy);
}

// Integral of tent_{k,l}(z) |z|^q over its support, tent being the
// autocorrelation of the unit-cell indicator.
double tent_moment_2d(long k, long l, double q) {
    CompensatedSum acc;
    for (long sx : {k - 1, k})
        for (long sy : {l - 1, l}) {
            // On [sx,sx+1] the x-factor 1-|z1-k| is linear: alpha + beta z1.
            const double ax = sx == k - 1 ? 1.0 - k : 1.0 + k, bx = sx == k - 1 ? 1.0 : -1.0;
            const double ay = sy == l - 1 ? 1.0 - l : 1.0 + l, by = sy == l - 1 ? 1.0 : -1.0;
            if ((sx == 0 || sx == -1) && (sy == 0 || sy == -1)) {
                const double sgx = sx == 0 ? 1.0 : -1.0, sgy = sy == 0 ? 1.0 : -1.0;
                acc.add(polar_corner(ax, bx * sgx, ay, by * sgy, q));
                continue;
            }
            const double d = square_distance_to_origin(sx, sy, 1.0);
            const int panels = d < 3 ? 4 : 1;
            acc.add(integrate_square(
                [&](double x, double y) { return (ax + bx * x) * (ay + by * y) * std::pow(x * x + y * y, 0.5 * q); }, sx, sy, 1.0, 8,
                panels));
        }
    return acc.value();
}

// Angular integral of rho(phi)^{-2s}/(2s) over the rays leaving through one
// side of the box, rho = d / cos(phi); `far_in` filters rays by membership.
double side_tail(double d, double tmin, double tmax, double s, const std::function<bool(double)>* far_in) {
    const double p0 = std::atan2(tmin, d), p1 = std::atan2(tmax, d);
    auto f = [&](double phi) { return std::pow(d / std::cos(phi), -2 * s) / (2 * s); };
    if (!far_in) return gauss_integrate(f, p0, p1, 24, 2);
    const int m = 512;
    const double step = (p1 - p0) / m;
    CompensatedSum acc;
    for (int i = 0; i < m; ++i) {
        const double phi = p0 + (i + 0.5) * step;
        if ((*far_in)(phi)) acc.add(f(phi) * step);
    }
    return acc.value();
}

// Integral of k(x-y) over y outside the box, restricted to far rays in a set.
double box_tail_2d(const Grid& g, double x, double y, double s, const std::function<bool(double, double)>* far_set) {
    struct Side {
        double d, tmin, tmax, nx, ny;
    };
    const Side sides[4] = {{g.hi[0] - x, g.lo[1] - y, g.hi[1] - y, 1, 0},
                           {g.hi[1] - y, x - g.hi[0], x - g.lo[0], 0, 1},
                           {x - g.lo[0], y - g.hi[1], y - g.lo[1], -1, 0},
                           {y - g.lo[1], g.lo[0] - x, g.hi[0] - x, 0, -1}};
    const double reach = 2.0 * std::max(g.hi[0] - g.lo[0], g.hi[1] - g.lo[1]);
    CompensatedSum acc;
    for (const auto& sd : sides) {
        if (!far_set) {
            acc.add(side_tail(sd.d, sd.tmin, sd.tmax, s, nullptr));
            continue;
        }
        const double tx = -sd.ny, ty = sd.nx;
        std::function<bool(double)> probe = [&](double phi) {
            const double dx = sd.nx * std::cos(phi) + tx * std::sin(phi);
            const double dy = sd.ny * std::cos(phi) + ty * std::sin(phi);
            const double rho = sd.d / std::cos(phi) + reach;
            return (*far_set)(x + rho * dx, y + rho * dy);
        };
        acc.add(side_tail(sd.d, sd.tmin, sd.tmax, s, &probe));
    }
    return acc.value();
}

struct SetPredicate {
    std::function<bool(double, double)> in;
    bool bounded;
};

std::vector<double> unit_table_2d(int n0, int n1, double s, bool second_moment) {
    std::vector<double> t(static_cast<std::size_t>(n0) * n1, 0.0);
    const long total = static_cast<long>(n0) * n1;
#pragma omp parallel for schedule(dynamic, 64)
    for (long idx = 1; idx < total; ++idx) {
        const long k = idx % n0, l = idx / n0;
        t[idx] = second_moment ? second_moment_weight_2d(k, l, s) : cell_moment_2d(k, l, s);
    }
    return t;
}

double interaction_2d(const SetPredicate& A, const SetPredicate& B, double s, const Grid& win) {
    if (!(s < 0.5)) throw std::domain_error("interaction: 2D set interactions need s < 1/2");
    const int n0 = win.cells[0], n1 = win.cells[1];
    const double h = win.h;
    std::vector<std::size_t> ia, ib;
    for (std::size_t k = 0; k < win.size(); ++k) {
        const double x = win.coord(k, 0), y = win.coord(k, 1);
        const bool a = A.in(x, y), b = B.in(x, y);
        if (a && b) throw std::invalid_argument("interaction: sets overlap with positive measure");
        if (a) ia.push_back(k);
        if (b) ib.push_back(k);
    }
    const auto table = unit_table_2d(n0, n1, s, false);
    const double scale = std::pow(h, 2 - 2 * s);
    std::vector<double> rows(ia.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t p = 0; p < ia.size(); ++p) {
        const long ai = ia[p] % n0, aj = ia[p] / n0;
        double acc = 0;
        for (std::size_t q : ib) {
            const long bi = q % n0, bj = q / n0;
            acc += table[std::abs(bj - aj) * n0 + std::abs(bi - ai)];
        }
        rows[p] = acc * scale;
    }
    CompensatedSum total;
    total.add(compensated_sum(rows));
    auto add_tail = [&](const std::vector<std::size_t>& cells, const SetPredicate& far) {
        std::vector<double> part(cells.size(), 0.0);
        const std::function<bool(double, double)> pred = far.in;
#pragma omp parallel for schedule(static)
        for (std::size_t p = 0; p < cells.size(); ++p)
            part[p] = h * h * box_tail_2d(win, win.coord(cells[p], 0), win.coord(cells[p], 1), s, &pred);
        total.add(compensated_sum(part));
    };
    if (!B.bounded) add_tail(ia, B);
    if (!A.bounded) add_tail(ib, A);
    return total.value();
}

double perimeter_1d(const RegionSpec& E, const RegionSpec& omega, const KernelParams& p) {
    const RegionSpec Ec = complement(E), omc = complement(omega);
    const RegionSpec e_in = intersect(E, omega), ec_in = intersect(Ec, omega);
    CompensatedSum acc;
    acc.add(interaction(e_in, ec_in, p));
    acc.add(interaction(e_in, intersect(Ec, omc), p));
    acc.add(interaction(intersect(E, omc), ec_in, p));
    return acc.value();
}

// Parameter sub-intervals of [t0,t1] where curve(t) lies in omega.
double inside_length(const std::function<std::array<double, 2>(double)>& curve, double t0, double t1, double speed,
                     const RegionSpec& omega) {
    const int m = 4096;
    auto in = [&](double t) {
        const auto p = curve(t);
        return omega.contains(p[0], p[1]);
    };
    auto crossing = [&](double a, double b) {
        const bool ia = in(a);
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (a + b);
            if (in(mid) == ia)
                a = mid;
            else
                b = mid;
        }
        return 0.5 * (a + b);
    };
    CompensatedSum acc;
    const double step = (t1 - t0) / m;
    double start = t0;
    bool state = in(t0 + 1e-14 * (t1 - t0));
    for (int i = 1; i <= m; ++i) {
        const double t = i == m ? t1 : t0 + i * step;
        const bool now = in(i == m ? t1 - 1e-14 * (t1 - t0) : t);
        if (now != state) {
            const double x = crossing(t - step, t);
            if (state) acc.add(x - start);
            start = x;
            state = now;
        }
    }
    if (state) acc.add(t1 - start);
    return acc.value() * speed;
}

}  // namespace

double outside_box_point_integral_2d(const Grid& g, double x, double y, double s) { return box_tail_2d(g, x, y, s, nullptr); }

void validate(const KernelParams& p) {
    if (!(p.s > 0 && p.s < 1)) throw std::invalid_argument("kernel: s must lie in (0,1)");
    if (p.n != 1 && p.n != 2) throw std::invalid_argument("kernel: dimension must be 1 or 2");
}

double antiderivative_G(double r, double s) {
    if (r == kInf) return s < 0.5 ? kInf : (s == 0.5 ? kInf : 0.0);
    if (r == 0) return s < 0.5 ? 0.0 : -kInf;
    if (s == 0.5) return std::log(r);
    return std::pow(r, 1 - 2 * s) / (2 * s * (1 - 2 * s));
}

double interval_pair_interaction(double a, double b, double c, double d, double s) {
    if (!(a < b && c < d)) return 0.0;
    if (b > c) throw std::invalid_argument("interval_pair_interaction: intervals overlap");
    const bool left_inf = std::isinf(a), right_inf = std::isinf(d);
    // Touching sets diverge for s >= 1/2.
    if (b == c && s >= 0.5) return kInf;
    if (left_inf && right_inf) return s > 0.5 ? -antiderivative_G(c - b, s) : kInf;
    if (right_inf) return antiderivative_G(c - a, s) - antiderivative_G(c - b, s);
    if (left_inf) return antiderivative_G(d - b, s) - antiderivative_G(c - b, s);
    // G(c-a) + G(d-b) - G(c-b) - G(d-a), grouped as two steps of G.
    return antiderivative_step(c - b, b - a, s) - antiderivative_step(d - b, b - a, s);
}

double cell_moment_1d(long k, double s) {
    if (k < 1) throw std::invalid_argument("cell_moment_1d: offset must be >= 1");
    if (k == 1 && s >= 0.5) return kInf;
    if (s == 0.5) return -std::log1p(-1.0 / (static_cast<double>(k) * k));
    return -second_difference_pow(1 - 2 * s, k) / (2 * s * (1 - 2 * s));
}

double omega_tail_1d(double gap, double s) {
    if (s < 0.5) return antiderivative_step(gap, 1.0, s);
    // Cells beyond the box carry the same second-moment weights as interior
    // pairs; past 64 cells the exact cell moments telescope to a G step.
    const long k0 = std::lround(gap) + 1;
    CompensatedSum acc;
    for (long k = k0; k < k0 + 64; ++k) acc.add(second_moment_weight_1d(k, s) + (k == 1 ? 0.5 * self_second_moment_1d(s) : 0.0));
    acc.add(antiderivative_step(static_cast<double>(k0 + 63), 1.0, s));
    return acc.value();
}

double point_cell_weight_1d(long k, double s) {
    if (k < 1) throw std::invalid_argument("point_cell_weight_1d: offset must be >= 1");
    const double lo = k - 0.5;
    return std::pow(lo, -2 * s) * -std::expm1(-2 * s * std::log1p(1.0 / lo)) / (2 * s);
}

double second_moment_weight_1d(long k, double s) {
    if (k < 1) throw std::invalid_argument("second_moment_weight_1d: offset must be >= 1");
    const double kk = static_cast<double>(k);
    return second_difference_pow(3 - 2 * s, k) / ((2 - 2 * s) * (3 - 2 * s) * kk * kk);
}

double self_second_moment_1d(double s) { return 2.0 / ((2 - 2 * s) * (3 - 2 * s)); }

double cell_moment_2d(long k, long l, double s) {
    if (k == 0 && l == 0) throw std::invalid_argument("cell_moment_2d: zero offset");
    return tent_moment_2d(std::abs(k), std::abs(l), -2 - 2 * s);
}

double point_cell_weight_2d(long k, long l, double s) {
    if (k == 0 && l == 0) throw std::invalid_argument("point_cell_weight_2d: zero offset");
    const double x0 = std::abs(k) - 0.5, y0 = std::abs(l) - 0.5;
    const int panels = square_distance_to_origin(x0, y0, 1.0) < 3 ? 8 : 1;
    return integrate_square([&](double x, double y) { return std::pow(x * x + y * y, -1 - s); }, x0, y0, 1.0, 8, panels);
}

double second_moment_weight_2d(long k, long l, double s) {
    if (k == 0 && l == 0) throw std::invalid_argument("second_moment_weight_2d: zero offset");
    return tent_moment_2d(std::abs(k), std::abs(l), -2 * s) / static_cast<double>(k * k + l * l);
}

double self_second_moment_2d(double s) { return tent_moment_2d(0, 0, -2 * s); }

double interaction(const RegionSpec& A, const RegionSpec& B, const KernelParams& p, const Grid* window) {
    validate(p);
    if (A.dim != B.dim || A.dim != p.n) throw std::invalid_argument("interaction: dimension mismatch");
    if (A.is_empty() || B.is_empty()) return 0.0;
    if (A.dim == 2) {
        if (!window) throw std::invalid_argument("interaction: 2D interactions need a window grid");
        return interaction_2d({[&](double x, double y) { return A.contains(x, y); }, A.bounded()},
                              {[&](double x, double y) { return B.contains(x, y); }, B.bounded()}, p.s, *window);
    }
    CompensatedSum acc;
    for (const auto& u : A.intervals)
        for (const auto& v : B.intervals) {
            if (std::max(u.a, v.a) < std::min(u.b, v.b)) throw std::invalid_argument("interaction: sets overlap with positive measure");
            const double val = u.b <= v.a ? interval_pair_interaction(u.a, u.b, v.a, v.b, p.s)
                                          : interval_pair_interaction(v.a, v.b, u.a, u.b, p.s);
            if (std::isinf(val)) throw std::domain_error("interaction: divergent for these sets at this s");
            acc.add(val);
        }
    return acc.value();
}

double frac_perimeter(const RegionSpec& E, const RegionSpec& omega, const KernelParams& p, const Grid* window) {
    validate(p);
    if (!(p.s < 0.5)) throw std::invalid_argument("frac_perimeter: s must lie in (0,1/2)");
    if (E.dim != omega.dim) throw std::invalid_argument("frac_perimeter: dimension mismatch");
    if (E.dim == 1) return perimeter_1d(E, omega, p);
    if (!window) throw std::invalid_argument("frac_perimeter: 2D perimeter needs a window grid");
    auto pred = [](bool inE, bool inOm, const RegionSpec& e, const RegionSpec& om) {
        return [=](double x, double y) { return e.contains(x, y) == inE && om.contains(x, y) == inOm; };
    };
    CompensatedSum acc;
    acc.add(interaction_2d({pred(true, true, E, omega), true}, {pred(false, true, E, omega), true}, p.s, *window));
    acc.add(interaction_2d({pred(true, true, E, omega), true}, {pred(false, false, E, omega), false}, p.s, *window));
    acc.add(interaction_2d({pred(false, true, E, omega), true}, {pred(true, false, E, omega), false}, p.s, *window));
    return acc.value();
}

double classical_perimeter(const RegionSpec& E, const RegionSpec& omega) {
    if (E.dim != omega.dim) throw std::invalid_argument("classical_perimeter: dimension mismatch");
    if (E.dim == 1) {
        double count = 0;
        for (const auto& iv : E.intervals) {
            if (std::isfinite(iv.a) && omega.contains(iv.a)) count += 1;
            if (std::isfinite(iv.b) && omega.contains(iv.b)) count += 1;
        }
        return count;
    }
    if (E.is_empty() || E.is_full()) return 0.0;
    CompensatedSum acc;
    auto add_segment = [&](Point2 p, Point2 q) {
        const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
        if (len == 0) return;
        acc.add(inside_length([=](double t) { return Point2{p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])}; }, 0.0, 1.0, len, omega));
    };
    switch (E.kind) {
        case RegionKind::Disk:
            acc.add(inside_length([&](double t) { return Point2{E.cx + E.r * std::cos(t), E.cy + E.r * std::sin(t)}; }, 0.0, 2 * kPi,
                                  E.r, omega));
            break;
        case RegionKind::Rectangle:
            add_segment({E.x0, E.y0}, {E.x1, E.y0});
            add_segment({E.x1, E.y0}, {E.x1, E.y1});
            add_segment({E.x1, E.y1}, {E.x0, E.y1});
            add_segment({E.x0, E.y1}, {E.x0, E.y0});
            break;
        case RegionKind::Polygon:
            for (std::size_t i = 0; i < E.vertices.size(); ++i) add_segment(E.vertices[i], E.vertices[(i + 1) % E.vertices.size()]);
            break;
        case RegionKind::HalfSpace: {
            if (!omega.bounded()) throw std::invalid_argument("classical_perimeter: half-plane boundary needs a bounded domain");
            const auto bb = omega.bbox();
            const double span = 2 * std::hypot(bb[1] - bb[0], bb[3] - bb[2]) + std::abs(E.c);
            const double nn = std::hypot(E.nx, E.ny);
            const Point2 foot{E.nx * E.c / (nn * nn), E.ny * E.c / (nn * nn)};
            const Point2 dir{-E.ny / nn, E.nx / nn};
            const double cxm = 0.5 * (bb[0] + bb[1]), cym = 0.5 * (bb[2] + bb[3]);
            const double t0 = (cxm - foot[0]) * dir[0] + (cym - foot[1]) * dir[1];
            add_segment({foot[0] + (t0 - span) * dir[0], foot[1] + (t0 - span) * dir[1]},
                        {foot[0] + (t0 + span) * dir[0], foot[1] + (t0 + span) * dir[1]});
            break;
        }
        default: break;
    }
    return acc.value();
}

PerimeterLimit rescaled_perimeter_limit(const RegionSpec& E, const RegionSpec& omega, const std::vector<double>& s_values,
                                        const Grid* window) {
    if (s_values.empty()) throw std::invalid_argument("rescaled_perimeter_limit: empty s list");
    PerimeterLimit out;
    std::vector<double> sig, vals;
    for (double s : s_values) {
        if (!(s > 0 && s < 0.5)) throw std::invalid_argument("rescaled_perimeter_limit: s values must lie in (0,1/2)");
        const double v = (1 - 2 * s) * frac_perimeter(E, omega, {s, E.dim}, window);
        out.rows.emplace_back(s, v);
        sig.push_back(1 - 2 * s);
        vals.push_back(v);
    }
    // The rescaled perimeter is smooth in sigma = 1-2s; extrapolate to sigma = 0.
    out.limit = neville_extrapolate(sig, vals, 0.0);
    return out;
}

KernelOperator::KernelOperator(GridPtr grid, double s) : grid_(std::move(grid)), s_(s) {
    validate({s, grid_->dim});
    const Grid& g = *grid_;
    const int n = g.dim;
    scale_ = std::pow(g.h, n - 2 * s);
    const std::size_t N = g.size();
    for (std::size_t k = 0; k < N; ++k) (g.in_omega[k] ? omega_idx_ : ext_idx_).push_back(k);
    if (n == 1) {
        const long n0 = g.cells[0];
        inner_.assign(n0, 0.0);
        cross_.assign(n0, 0.0);
        for (long k = 1; k < n0; ++k) {
            inner_[k] = scale_ * (s < 0.5 ? cell_moment_1d(k, s) : second_moment_weight_1d(k, s));
            cross_[k] = scale_ * point_cell_weight_1d(k, s);
        }
        if (s >= 0.5 && n0 > 1) inner_[1] += scale_ * 0.5 * self_second_moment_1d(s);
    } else {
        const int n0 = g.cells[0], n1 = g.cells[1];
        inner_ = unit_table_2d(n0, n1, s, s >= 0.5);
        cross_.assign(inner_.size(), 0.0);
        const long total = static_cast<long>(n0) * n1;
#pragma omp parallel for schedule(dynamic, 64)
        for (long idx = 1; idx < total; ++idx) cross_[idx] = point_cell_weight_2d(idx % n0, idx / n0, s);
        for (auto& v : inner_) v *= scale_;
        for (auto& v : cross_) v *= scale_;
        if (s >= 0.5) {
            const double dw = scale_ * 0.25 * self_second_moment_2d(s);
            if (n0 > 1) inner_[1] += dw;
            if (n1 > 1) inner_[n0] += dw;
        }
    }
    tail_.assign(N, {0.0, 0.0});
    const double h = g.h;
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < N; ++k) {
        const double x = g.coord(k, 0);
        if (n == 1) {
            if (g.in_omega[k]) {
                tail_[k][0] = scale_ * omega_tail_1d((x - h / 2 - g.lo[0]) / h, s);
                tail_[k][1] = scale_ * omega_tail_1d((g.hi[0] - x - h / 2) / h, s);
            } else {
                tail_[k][0] = h * std::pow(x - g.lo[0], -2 * s) / (2 * s);
                tail_[k][1] = h * std::pow(g.hi[0] - x, -2 * s) / (2 * s);
            }
        } else {
            tail_[k][0] = h * h * box_tail_2d(g, x, g.coord(k, 1), s, nullptr);
        }
    }
    ext_rows_.assign(N, 0.0);
    for (std::size_t j : ext_idx_) {
        CompensatedSum acc;
        for (std::size_t i : omega_idx_) acc.add(table_cross(i, j));
        ext_rows_[j] = acc.value();
    }
    for (int side = 0; side < 2; ++side) {
        CompensatedSum acc;
        for (std::size_t i : omega_idx_) acc.add(tail_[i][side]);
        far_rows_[side] = acc.value();
    }
}

double KernelOperator::table_inner(std::size_t i, std::size_t j) const {
    if (grid_->dim == 1) return inner_[i > j ? i - j : j - i];
    const long n0 = grid_->cells[0];
    const long di = std::abs(static_cast<long>(i % n0) - static_cast<long>(j % n0));
    const long dj = std::abs(static_cast<long>(i / n0) - static_cast<long>(j / n0));
    return inner_[dj * n0 + di];
}

double KernelOperator::table_cross(std::size_t i, std::size_t j) const {
    if (grid_->dim == 1) return cross_[i > j ? i - j : j - i];
    const long n0 = grid_->cells[0];
    const long di = std::abs(static_cast<long>(i % n0) - static_cast<long>(j % n0));
    const long dj = std::abs(static_cast<long>(i / n0) - static_cast<long>(j / n0));
    return cross_[dj * n0 + di];
}

double KernelOperator::pair_weight(std::size_t i, std::size_t j) const {
    if (i == j) return 0.0;
    return grid_->in_omega[i] == grid_->in_omega[j] ? table_inner(i, j) : table_cross(i, j);
}

double KernelOperator::tail_weight(std::size_t i, int side) const { return tail_[i][side]; }

// For an Omega node: sum_j c_j W_ij (u_i-u_j)^p with c_j = 1/2 on Omega pairs
// when squared (energy) and 1 otherwise; p = 2 or 1.
double KernelOperator::row_sum(std::size_t i, const ScalarField& u, bool squared) const {
    const Grid& g = *grid_;
    const double* v = u.values.data();
    const std::uint8_t* in = g.in_omega.data();
    const double ui = v[i];
    const double half = squared ? 0.5 : 1.0;
    double acc = 0.0;
    const std::size_t N = g.size();
    if (g.dim == 1) {
        for (std::size_t j = 0; j < N; ++j) {
            const std::size_t k = i > j ? i - j : j - i;
            const double d = ui - v[j];
            const double w = in[j] ? half * inner_[k] : cross_[k];
            acc += squared ? w * d * d : w * d;
        }
    } else {
        const long n0 = g.cells[0], n1 = g.cells[1];
        const long ai = static_cast<long>(i % n0), aj = static_cast<long>(i / n0);
        for (long bj = 0; bj < n1; ++bj) {
            const double* irow = inner_.data() + std::abs(bj - aj) * n0;
            const double* crow = cross_.data() + std::abs(bj - aj) * n0;
            const std::size_t base = static_cast<std::size_t>(bj) * n0;
            for (long bi = 0; bi < n0; ++bi) {
                const long k = std::abs(bi - ai);
                const double d = ui - v[base + bi];
                const double w = in[base + bi] ? half * irow[k] : crow[k];
                acc += squared ? w * d * d : w * d;
            }
        }
    }
    for (int side = 0; side < far_sides(); ++side) {
        const double d = ui - u.far[side];
        acc += squared ? tail_[i][side] * d * d : tail_[i][side] * d;
    }
    return acc;
}

double KernelOperator::energy(const ScalarField& u) const {
    if (u.grid.get() != grid_.get() && u.size() != grid_->size()) throw std::invalid_argument("KernelOperator: field lives on another grid");
    std::vector<double> part(omega_idx_.size());
    const long m = static_cast<long>(omega_idx_.size());
#pragma omp parallel for schedule(static)
    for (long p = 0; p < m; ++p) part[p] = row_sum(omega_idx_[p], u, true);
    return compensated_sum(part);
}

void KernelOperator::gradient(const ScalarField& u, std::vector<double>& g, std::array<double, 2>& gfar) const {
    const std::size_t N = grid_->size();
    g.assign(N, 0.0);
    const double* v = u.values.data();
    const long m = static_cast<long>(omega_idx_.size());
    const long e = static_cast<long>(ext_idx_.size());
#pragma omp parallel
    {
#pragma omp for schedule(static) nowait
        for (long p = 0; p < m; ++p) g[omega_idx_[p]] = 2.0 * row_sum(omega_idx_[p], u, false);
#pragma omp for schedule(static)
        for (long q = 0; q < e; ++q) {
            const std::size_t j = ext_idx_[q];
            double acc = 0.0;
            for (std::size_t i : omega_idx_) acc += table_cross(i, j) * (v[j] - v[i]);
            g[j] = 2.0 * acc;
        }
    }
    gfar = {0.0, 0.0};
    for (int side = 0; side < far_sides(); ++side) {
        CompensatedSum acc;
        for (std::size_t i : omega_idx_) acc.add(tail_[i][side] * (v[i] - u.far[side]));
        gfar[side] = -2.0 * acc.value();
    }
}

std::vector<double> KernelOperator::laplacian(const ScalarField& u) const {
    const Grid& g = *grid_;
    const std::size_t N = g.size();
    std::vector<double> out(N, 0.0);
    const double inv = 2.0 / g.cell_volume();
    const double* v = u.values.data();
#pragma omp parallel for schedule(static)
    for (long ii = 0; ii < static_cast<long>(N); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double acc = 0.0;
        if (g.in_omega[i]) {
            acc = row_sum(i, u, false);
        } else {
            for (std::size_t j = 0; j < N; ++j) acc += pair_weight(i, j) * (v[i] - v[j]);
            for (int side = 0; side < far_sides(); ++side) acc += tail_[i][side] * (v[i] - u.far[side]);
        }
        out[i] = inv * acc;
    }
    return out;
}

namespace {

// Closed-form weights for the 1D serial reference, rebuilt per pair.
struct Reference1D {
    const Grid& g;
    double s;
    double scale;
    double pair(std::size_t i, std::size_t j) const {
        if (i == j) return 0.0;
        const long k = static_cast<long>(i > j ? i - j : j - i);
        if (g.in_omega[i] != g.in_omega[j]) return scale * point_cell_weight_1d(k, s);
        if (s < 0.5) return scale * cell_moment_1d(k, s);
        return scale * (second_moment_weight_1d(k, s) + (k == 1 ? 0.5 * self_second_moment_1d(s) : 0.0));
    }
    double tail(std::size_t i, int side) const {
        const double x = g.coord(i, 0), h = g.h;
        const double G = [&] {
            if (!g.in_omega[i]) return h * std::pow(side == 0 ? x - g.lo[0] : g.hi[0] - x, -2 * s) / (2 * s);
            const double near = side == 0 ? x - h / 2 - g.lo[0] : g.hi[0] - x - h / 2;
            if (s >= 0.5) return scale * omega_tail_1d(near / h, s);
            return antiderivative_G(near + h, s) - antiderivative_G(near, s);
        }();
        return G;
    }
};

}  // namespace

double KernelOperator::energy_serial(const ScalarField& u) const {
    const Grid& g = *grid_;
    if (g.dim != 1) {
        double acc = 0.0;
        for (std::size_t i : omega_idx_) acc += row_sum(i, u, true);
        return acc;
    }
    const Reference1D ref{g, s_, std::pow(g.h, 1 - 2 * s_)};
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_omega[i]) continue;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double d = u[i] - u[j];
            acc += (g.in_omega[j] ? 0.5 : 1.0) * ref.pair(i, j) * d * d;
        }
        for (int side = 0; side < 2; ++side) acc += ref.tail(i, side) * (u[i] - u.far[side]) * (u[i] - u.far[side]);
    }
    return acc;
}

void KernelOperator::gradient_serial(const ScalarField& u, std::vector<double>& g, std::array<double, 2>& gfar) const {
    const Grid& gr = *grid_;
    const std::size_t N = gr.size();
    g.assign(N, 0.0);
    gfar = {0.0, 0.0};
    const Reference1D ref{gr, s_, std::pow(gr.h, gr.dim - 2 * s_)};
    auto w = [&](std::size_t i, std::size_t j) { return gr.dim == 1 ? ref.pair(i, j) : pair_weight(i, j); };
    auto t = [&](std::size_t i, int side) { return gr.dim == 1 ? ref.tail(i, side) : tail_[i][side]; };
    for (std::size_t i = 0; i < N; ++i) {
        if (!gr.in_omega[i]) continue;
        for (std::size_t j = 0; j < N; ++j) {
            if (i == j) continue;
            const double d = u[i] - u[j];
            g[i] += 2.0 * w(i, j) * d;
            if (!gr.in_omega[j]) g[j] -= 2.0 * w(i, j) * d;
        }
        for (int side = 0; side < far_sides(); ++side) {
            g[i] += 2.0 * t(i, side) * (u[i] - u.far[side]);
            gfar[side] -= 2.0 * t(i, side) * (u[i] - u.far[side]);
        }
    }
}

std::vector<double> KernelOperator::laplacian_serial(const ScalarField& u) const {
    const Grid& gr = *grid_;
    const std::size_t N = gr.size();
    std::vector<double> out(N, 0.0);
    const Reference1D ref{gr, s_, std::pow(gr.h, gr.dim - 2 * s_)};
    for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) acc += (gr.dim == 1 ? ref.pair(i, j) : pair_weight(i, j)) * (u[i] - u[j]);
        for (int side = 0; side < far_sides(); ++side)
            acc += (gr.dim == 1 ? ref.tail(i, side) : tail_[i][side]) * (u[i] - u.far[side]);
        out[i] = 2.0 * acc / gr.cell_volume();
    }
    return out;
}

GridPtr with_omega(const GridPtr& grid, const RegionSpec& omega) {
    if (omega.dim != grid->dim) throw std::invalid_argument("with_omega: dimension mismatch");
    auto g = std::make_shared<Grid>(*grid);
    g->omega = omega;
    for (std::size_t k = 0; k < g->size(); ++k)
        g->in_omega[k] = omega.contains(g->coord(k, 0), g->dim == 2 ? g->coord(k, 1) : 0.0) ? 1 : 0;
    return g;
}

ScalarField rebind(const ScalarField& u, const GridPtr& grid) {
    if (grid->size() != u.size()) throw std::invalid_argument("rebind: grid size mismatch");
    ScalarField v = u;
    v.grid = grid;
    return v;
}

double gagliardo_K(const ScalarField& u, const RegionSpec& omega, const KernelParams& p) {
    validate(p);
    if (p.n != u.grid->dim) throw std::invalid_argument("gagliardo_K: dimension mismatch");
    if (omega.describe() == u.grid->omega.describe()) return KernelOperator(u.grid, p.s).energy(u);
    const GridPtr g = with_omega(u.grid, omega);
    return KernelOperator(g, p.s).energy(rebind(u, g));
}

}  // namespace fraclab
