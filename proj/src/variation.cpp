#include "fraclab/variation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>

#include "fraclab/kernels.hpp"
#include "fraclab/numerics.hpp"

namespace fraclab {

namespace {

constexpr double kT1 = 1e-2;
constexpr double kT2 = 5e-3;

double rho2(const Bump& b, double x, double y) {
    const double ex = (x - b.cx) / b.radius, ey = (y - b.cy) / b.radius;
    return ex * ex + ey * ey;
}

bool in_support(const VectorFieldSpec& X, double x, double y) {
    for (const auto& b : X.parts)
        if (rho2(b, x, y) < 1) return true;
    return false;
}

struct Piece {
    double a, b, v;
    bool inside;
};

// Moved cell edges of a 1D grid under phi_t.
std::vector<double> moved_edges(const Grid& g, const VectorFieldSpec& X, double t) {
    std::vector<double> edge(g.size() + 1);
    for (std::size_t k = 0; k <= g.size(); ++k) edge[k] = flow_point(X, {g.lo[0] + k * g.h, 0}, t)[0];
    return edge;
}

// K of the piecewise-constant function taking u_k on [edge_k, edge_k+1] and
// the far values beyond the box, from the closed-form interval interactions.
// Consecutive pieces with equal values and membership are merged first.
double piecewise_K_1d(const ScalarField& u, const std::vector<double>& edge, double s) {
    const Grid& g = *u.grid;
    std::vector<Piece> pieces{{-kInf, edge.front(), u.far[0], false}};
    for (std::size_t k = 0; k < g.size(); ++k) {
        const bool in = g.in_omega[k];
        Piece& last = pieces.back();
        if (last.inside == in && last.v == u[k] && last.b == edge[k])
            last.b = edge[k + 1];
        else
            pieces.push_back({edge[k], edge[k + 1], u[k], in});
    }
    if (pieces.back().v == u.far[1] && !pieces.back().inside)
        pieces.back().b = kInf;
    else
        pieces.push_back({edge.back(), kInf, u.far[1], false});
    const long n = static_cast<long>(pieces.size());
    std::vector<double> rows(n, 0.0);
#pragma omp parallel for schedule(dynamic, 4)
    for (long i = 0; i < n; ++i) {
        const Piece& P = pieces[i];
        if (!P.inside) continue;
        CompensatedSum acc;
        for (long j = 0; j < n; ++j) {
            if (j == i) continue;
            const Piece& Q = pieces[j];
            if (Q.inside && j < i) continue;  // each omega pair once
            const double d = P.v - Q.v;
            if (d == 0) continue;
            const double L = j > i ? interval_pair_interaction(P.a, P.b, Q.a, Q.b, s) : interval_pair_interaction(Q.a, Q.b, P.a, P.b, s);
            acc.add(d * d * L);
        }
        rows[i] = acc.value();
    }
    return compensated_sum(rows);
}

}  // namespace

Point2 VectorFieldSpec::value(double x, double y) const {
    Point2 v{0, 0};
    for (const auto& b : parts) {
        const double r2 = rho2(b, x, y);
        if (r2 >= 1) continue;
        const double q = 1 - r2, w = b.amplitude * q * q * q;
        v[0] += w * b.dx;
        v[1] += w * b.dy;
    }
    return v;
}

double VectorFieldSpec::divergence(double x, double y) const {
    double d = 0;
    for (const auto& b : parts) {
        const double r2 = rho2(b, x, y);
        if (r2 >= 1) continue;
        const double q = 1 - r2;
        d += -6 * b.amplitude * q * q * ((x - b.cx) * b.dx + (y - b.cy) * b.dy) / (b.radius * b.radius);
    }
    return d;
}

double VectorFieldSpec::lipschitz_bound() const {
    // max over rho of 6 rho (1 - rho^2)^2 is attained at rho = 1/sqrt(5).
    const double peak = 6 / std::sqrt(5.0) * 0.64;
    double L = 0;
    for (const auto& b : parts) L += std::abs(b.amplitude) * std::hypot(b.dx, b.dy) * peak / b.radius;
    return L;
}

bool VectorFieldSpec::is_zero() const {
    for (const auto& b : parts)
        if (b.amplitude != 0 && (b.dx != 0 || b.dy != 0)) return false;
    return true;
}

bool VectorFieldSpec::supported_in(const RegionSpec& omega) const {
    for (const auto& b : parts)
        if (signed_distance_at(omega, b.cx, b.cy) <= b.radius) return false;
    return true;
}

VectorFieldSpec VectorFieldSpec::scaled(double a) const {
    VectorFieldSpec out = *this;
    for (auto& b : out.parts) b.amplitude *= a;
    return out;
}

VectorFieldSpec VectorFieldSpec::plus(const VectorFieldSpec& other) const {
    VectorFieldSpec out = *this;
    out.parts.insert(out.parts.end(), other.parts.begin(), other.parts.end());
    out.name = name + "+" + other.name;
    return out;
}

VectorFieldSpec bump_field(double cx, double radius, double amplitude, const std::string& name) {
    return bump_field_2d(cx, 0, radius, amplitude, 1, 0, name);
}

VectorFieldSpec bump_field_2d(double cx, double cy, double radius, double amplitude, double dx, double dy, const std::string& name) {
    if (!(radius > 0)) throw std::invalid_argument("bump_field: radius must be positive");
    VectorFieldSpec X;
    X.parts.push_back({cx, cy, radius, amplitude, dx, dy});
    X.name = name;
    return X;
}

Point2 flow_point(const VectorFieldSpec& X, Point2 p, double t) {
    constexpr int steps = 8;
    const double dt = t / steps;
    for (int k = 0; k < steps; ++k) {
        const Point2 k1 = X.value(p[0], p[1]);
        const Point2 k2 = X.value(p[0] + 0.5 * dt * k1[0], p[1] + 0.5 * dt * k1[1]);
        const Point2 k3 = X.value(p[0] + 0.5 * dt * k2[0], p[1] + 0.5 * dt * k2[1]);
        const Point2 k4 = X.value(p[0] + dt * k3[0], p[1] + dt * k3[1]);
        p[0] += dt * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6;
        p[1] += dt * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6;
    }
    return p;
}

ScalarField flow_pushforward(const ScalarField& u, const VectorFieldSpec& X, double t) {
    if (std::abs(t) * X.lipschitz_bound() >= 0.5) throw std::invalid_argument("flow_pushforward: |t| Lip(X) must stay below 1/2");
    if (t == 0 || X.is_zero()) return u;
    const Grid& g = *u.grid;
    ScalarField out = u;
    if (g.dim == 1) {
        // The image of cell k under phi_t is [phi_t(e_k), phi_t(e_{k+1})];
        // u o phi_{-t} equals u_k there, so cell averages are overlap lengths.
        const std::size_t N = g.size();
        const std::vector<double> edge = moved_edges(g, X, t);
        std::size_t src = 0;
        for (std::size_t j = 0; j < N; ++j) {
            const double a = g.lo[0] + j * g.h, b = a + g.h;
            if (edge[j] == a && edge[j + 1] == b) {
                out[j] = u[j];
                continue;
            }
            while (src > 0 && edge[src] > a) --src;
            while (src + 1 < N && edge[src + 1] <= a) ++src;
            CompensatedSum acc;
            for (std::size_t k = src; k < N && edge[k] < b; ++k) {
                const double lo = std::max(a, edge[k]), hi = std::min(b, edge[k + 1]);
                if (hi > lo) acc.add(u[k] * (hi - lo));
            }
            out[j] = acc.value() / g.h;
        }
        return out;
    }
    const int q = std::max(4, static_cast<int>(std::ceil(4 * g.h / std::min(std::abs(t), kT2))));
    auto sample = [&](double x, double y) {
        const long i = static_cast<long>(std::floor((x - g.lo[0]) / g.h)), j = static_cast<long>(std::floor((y - g.lo[1]) / g.h));
        if (i < 0 || j < 0 || i >= g.cells[0] || j >= g.cells[1]) return u.far[0];
        return u[g.index(static_cast<int>(i), static_cast<int>(j))];
    };
    const long N = static_cast<long>(g.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long kk = 0; kk < N; ++kk) {
        const std::size_t k = static_cast<std::size_t>(kk);
        const double cx = g.coord(k, 0), cy = g.coord(k, 1);
        const double reach = g.h + std::abs(t) * 2;
        bool near = false;
        for (const auto& b : X.parts)
            if (std::hypot(cx - b.cx, cy - b.cy) < b.radius + reach) near = true;
        if (!near) continue;
        CompensatedSum acc;
        for (int a = 0; a < q; ++a)
            for (int c = 0; c < q; ++c) {
                const double x = cx - g.h / 2 + (a + 0.5) * g.h / q, y = cy - g.h / 2 + (c + 0.5) * g.h / q;
                const Point2 p = in_support(X, x, y) ? flow_point(X, {x, y}, -t) : Point2{x, y};
                acc.add(sample(p[0], p[1]));
            }
        out[k] = acc.value() / (q * q);
    }
    return out;
}

CurvatureEstimate hybrid_mean_curvature(const ScalarField& u, double s, const VectorFieldSpec& X) {
    if (!(s > 0 && s < 0.5)) throw std::invalid_argument("hybrid_mean_curvature: s must lie in (0,1/2)");
    if (!X.supported_in(u.grid->omega)) throw std::invalid_argument("hybrid_mean_curvature: X must be supported inside omega");
    std::function<double(double)> K;
    std::unique_ptr<KernelOperator> op;
    if (u.grid->dim == 1) {
        // The transported field is piecewise constant on the moved cells, so
        // its energy is evaluated exactly instead of after resampling.
        K = [&](double t) {
            if (std::abs(t) * X.lipschitz_bound() >= 0.5) throw std::invalid_argument("hybrid_mean_curvature: |t| Lip(X) must stay below 1/2");
            return piecewise_K_1d(u, moved_edges(*u.grid, X, t), s);
        };
    } else {
        op = std::make_unique<KernelOperator>(u.grid, s);
        K = [&](double t) { return op->energy(flow_pushforward(u, X, t)); };
    }
    auto D = [&](double t) { return (K(t) - K(-t)) / (2 * t); };
    CurvatureEstimate e;
    e.coarse = D(kT1);
    e.fine = D(kT2);
    e.value = e.fine + (e.fine - e.coarse) / 3;
    e.error = std::abs(e.fine - e.coarse);
    return e;
}

double divergence_integral(const ScalarField& u, const VectorFieldSpec& X) {
    const Grid& g = *u.grid;
    if (g.dim == 1) {
        // E cap omega is the union of runs of positive omega cells; the
        // integral of div X over a run (a, b) is X(b) - X(a).
        CompensatedSum acc;
        std::size_t k = 0;
        while (k < g.size()) {
            if (!(g.in_omega[k] && u[k] > 0)) {
                ++k;
                continue;
            }
            const std::size_t start = k;
            while (k < g.size() && g.in_omega[k] && u[k] > 0) ++k;
            const double a = g.lo[0] + start * g.h, b = g.lo[0] + k * g.h;
            acc.add(X.value(b)[0] - X.value(a)[0]);
        }
        return acc.value();
    }
    constexpr int q = 8;
    CompensatedSum acc;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!(g.in_omega[k] && u[k] > 0)) continue;
        const double cx = g.coord(k, 0), cy = g.coord(k, 1);
        for (int a = 0; a < q; ++a)
            for (int c = 0; c < q; ++c)
                acc.add(X.divergence(cx - g.h / 2 + (a + 0.5) * g.h / q, cy - g.h / 2 + (c + 0.5) * g.h / q));
    }
    return acc.value() * g.cell_volume() / (q * q);
}

ConstancyReport constancy_diagnostic(const ScalarField& u, double s, const std::vector<VectorFieldSpec>& fields, double tolerance) {
    ConstancyReport rep;
    double lo = kInf, hi = -kInf;
    CompensatedSum sum;
    bool all_flat = true;
    for (const auto& X : fields) {
        RatioRow row;
        row.field = X.name;
        const auto est = hybrid_mean_curvature(u, s, X);
        row.numerator = est.value;
        row.numerator_error = est.error;
        row.denominator = divergence_integral(u, X);
        if (std::abs(est.value) > est.error) all_flat = false;
        if (std::abs(row.denominator) < 1e-8) {
            row.excluded = true;
        } else {
            row.ratio = row.numerator / row.denominator;
            row.ratio_error = row.numerator_error / std::abs(row.denominator);
            lo = std::min(lo, row.ratio);
            hi = std::max(hi, row.ratio);
            sum.add(row.ratio);
            ++rep.included;
        }
        rep.rows.push_back(row);
    }
    rep.degenerate = all_flat || rep.included == 0;
    if (rep.included > 0) {
        rep.mean = sum.value() / rep.included;
        rep.spread = rep.mean != 0 ? (hi - lo) / std::abs(rep.mean) : (hi - lo == 0 ? 0.0 : kInf);
    }
    rep.constant = rep.included >= 2 && rep.spread <= tolerance;
    return rep;
}

}  // namespace fraclab
