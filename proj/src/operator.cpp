#include "fraclab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "fraclab/energy.hpp"
#include "fraclab/extrapolate.hpp"
#include "fraclab/kernels.hpp"
#include "fraclab/numerics.hpp"

namespace fraclab {

namespace {

// int over [d, d+w] of r^{-1-2s} dr, stable for w << d.
double ray_cell_integral(double d, double w, double s) { return std::pow(d, -2 * s) * -std::expm1(-2 * s * std::log1p(w / d)) / (2 * s); }

std::vector<double> point_table_2d(const Grid& g, double s) {
    const long n0 = g.cells[0], n1 = g.cells[1];
    std::vector<double> t(static_cast<std::size_t>(n0 * n1), 0.0);
#pragma omp parallel for schedule(dynamic, 64)
    for (long idx = 1; idx < n0 * n1; ++idx) t[idx] = point_cell_weight_2d(idx % n0, idx / n0, s);
    return t;
}

double neumann_at_node(const ScalarField& u, double s, std::size_t k, const std::vector<double>* table) {
    const Grid& g = *u.grid;
    if (g.in_omega[k]) throw std::domain_error("neumann_extension: node lies in omega");
    CompensatedSum num, den;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (!g.in_omega[j]) continue;
        double w;
        if (g.dim == 1) {
            w = point_cell_weight_1d(static_cast<long>(j > k ? j - k : k - j), s);
        } else {
            const long n0 = g.cells[0];
            const long di = std::abs(static_cast<long>(j % n0) - static_cast<long>(k % n0));
            const long dj = std::abs(static_cast<long>(j / n0) - static_cast<long>(k / n0));
            w = (*table)[dj * n0 + di];
        }
        num.add(w * u[j]);
        den.add(w);
    }
    return num.value() / den.value();
}

double bspline3(double q) {
    q = std::abs(q);
    if (q < 1) return (4 - 6 * q * q + 3 * q * q * q) / 6;
    if (q < 2) return (2 - q) * (2 - q) * (2 - q) / 6;
    return 0.0;
}

}  // namespace

ScalarField frac_laplacian(const ScalarField& u, const std::vector<std::size_t>& at, double s) {
    const Grid& g = *u.grid;
    validate({s, g.dim});
    for (std::size_t k : at)
        if (k >= g.size()) throw std::out_of_range("frac_laplacian: node outside the grid");
    ScalarField out(u.grid, 0.0, u.M);
    out.far = {0.0, 0.0};
    const double hs = std::pow(g.h, -2 * s);
    std::vector<double> table;
    if (g.dim == 2) table = point_table_2d(g, s);
    const long m = static_cast<long>(at.size());
#pragma omp parallel for schedule(static)
    for (long p = 0; p < m; ++p) {
        const std::size_t i = at[p];
        const double ui = u[i];
        CompensatedSum acc;
        if (g.dim == 1) {
            for (std::size_t j = 0; j < g.size(); ++j)
                if (j != i) acc.add(hs * point_cell_weight_1d(static_cast<long>(j > i ? j - i : i - j), s) * (ui - u[j]));
            const double x = g.coord(i, 0);
            acc.add(std::pow(x - g.lo[0], -2 * s) / (2 * s) * (ui - u.far[0]));
            acc.add(std::pow(g.hi[0] - x, -2 * s) / (2 * s) * (ui - u.far[1]));
        } else {
            const long n0 = g.cells[0];
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (j == i) continue;
                const long di = std::abs(static_cast<long>(j % n0) - static_cast<long>(i % n0));
                const long dj = std::abs(static_cast<long>(j / n0) - static_cast<long>(i / n0));
                acc.add(hs * table[dj * n0 + di] * (ui - u[j]));
            }
            acc.add(outside_box_point_integral_2d(g, g.coord(i, 0), g.coord(i, 1), s) * (ui - u.far[0]));
        }
        out[i] = 2.0 * acc.value();
    }
    return out;
}

double neumann_value(const ScalarField& u, double s, double x, double y) {
    const Grid& g = *u.grid;
    validate({s, g.dim});
    if (g.dim == 2) {
        const double fi = (x - g.lo[0]) / g.h - 0.5, fj = (y - g.lo[1]) / g.h - 0.5;
        const long i = std::lround(fi), j = std::lround(fj);
        if (std::abs(fi - i) > 1e-9 || std::abs(fj - j) > 1e-9 || i < 0 || j < 0 || i >= g.cells[0] || j >= g.cells[1])
            throw std::invalid_argument("neumann_value: 2D points must be grid nodes");
        const auto table = point_table_2d(g, s);
        return neumann_at_node(u, s, g.index(static_cast<int>(i), static_cast<int>(j)), &table);
    }
    CompensatedSum num, den;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (!g.in_omega[j]) continue;
        const double a = g.coord(j, 0) - g.h / 2, b = a + g.h;
        if (x >= a && x <= b) throw std::domain_error("neumann_value: point lies in the closure of omega");
        const double w = x < a ? ray_cell_integral(a - x, g.h, s) : ray_cell_integral(x - b, g.h, s);
        num.add(w * u[j]);
        den.add(w);
    }
    if (den.value() == 0) throw std::invalid_argument("neumann_value: omega has no cells");
    return num.value() / den.value();
}

ScalarField neumann_extension(const ScalarField& u, double s, const std::vector<std::size_t>& at) {
    const Grid& g = *u.grid;
    validate({s, g.dim});
    std::vector<double> table;
    if (g.dim == 2) table = point_table_2d(g, s);
    ScalarField out = u;
    const long m = static_cast<long>(at.size());
    for (std::size_t k : at)
        if (k >= g.size()) throw std::out_of_range("neumann_extension: node outside the grid");
#pragma omp parallel for schedule(static)
    for (long p = 0; p < m; ++p) out[at[p]] = neumann_at_node(u, s, at[p], &table);
    return out;
}

double ProfileTable::value(double x) const {
    if (t.empty()) throw std::logic_error("ProfileTable: empty table");
    if (x <= t.front()) return x < -L ? -1.0 : u.front();
    if (x >= t.back()) return x > L ? 1.0 : u.back();
    const double f = (x - t.front()) / h;
    const std::size_t i = std::min(static_cast<std::size_t>(f), t.size() - 2);
    const double w = f - static_cast<double>(i);
    return (1 - w) * u[i] + w * u[i + 1];
}

std::string ProfileTable::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "t,u0\n";
    for (std::size_t i = 0; i < t.size(); ++i) os << t[i] << ',' << u[i] << '\n';
    return os.str();
}

ProfileTable ProfileTable::from_csv(const std::string& text, double s) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "t,u0") throw std::invalid_argument("ProfileTable: bad CSV header");
    ProfileTable p;
    p.s = s;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("ProfileTable: bad CSV row");
        p.t.push_back(std::stod(line.substr(0, comma)));
        p.u.push_back(std::stod(line.substr(comma + 1)));
    }
    if (p.t.size() < 2) throw std::invalid_argument("ProfileTable: too few rows");
    p.h = p.t[1] - p.t[0];
    p.L = p.t.back() + p.h / 2;
    for (std::size_t i = 0; i < p.t.size(); ++i)
        if (p.t[i] >= p.L / 2) p.C = std::max(p.C, std::abs(1 - p.u[i]) * std::pow(1 + p.t[i], 2 * s));
    return p;
}

namespace {

GridPtr profile_grid(double L, double h) { return box_grid_1d(-L, L, h, interval(-L, L)); }

ScalarField profile_field(const ProfileTable& p) {
    ScalarField f(profile_grid(p.L, p.h), 0.0, 2.0);
    if (f.size() != p.u.size()) throw std::invalid_argument("ProfileTable: size does not match its grid");
    f.values = p.u;
    f.far = {-1.0, 1.0};
    return f;
}

}  // namespace

ProfileTable solve_profile(double s, double L, double h, const SolverOptions& opt) {
    if (!(L >= 20) || !(h > 0 && h <= 0.05)) throw std::invalid_argument("solve_profile: need L >= 20 and h <= 0.05");
    validate({s, 1});
    const GridPtr grid = profile_grid(L, h);
    ScalarField init(grid, 0.0, 2.0);
    for (std::size_t k = 0; k < init.size(); ++k) init[k] = std::tanh(grid->coord(k, 0));
    init.far = {-1.0, 1.0};
    auto res = minimize_E_eps_dirichlet(grid, s, 1.0, ForcingSpec::none(), init, 2.0, init, opt);
    if (!res.converged) throw ConvergenceError("solve_profile: no convergence within the iteration cap");
    ProfileTable p;
    p.s = s;
    p.L = L;
    p.h = h;
    const std::size_t N = grid->size();
    p.t.resize(N);
    p.u.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
        p.t[k] = grid->coord(k, 0);
        p.u[k] = 0.5 * (res.field[k] - res.field[N - 1 - k]);
    }
    for (std::size_t k = 0; k < N; ++k)
        if (p.t[k] >= L / 2) p.C = std::max(p.C, std::abs(1 - p.u[k]) * std::pow(1 + p.t[k], 2 * s));
    p.iterations = res.iterations;
    p.residual = profile_residual(p);
    return p;
}

double profile_residual(const ProfileTable& p) {
    const ScalarField f = profile_field(p);
    const KernelOperator op(f.grid, p.s);
    const auto lap = op.laplacian(f);
    double r = 0;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (std::abs(p.t[k]) <= p.L / 2) r = std::max(r, std::abs(lap[k] + potential_W(f[k]).dW));
    return r;
}

CstarSweep cstar_sweep(const ProfileTable& p, int interfaces, const std::vector<double>& eps) {
    if (p.s < 0.5) throw std::invalid_argument("cstar_sweep: s < 1/2 has limit K, not a surface tension");
    if (interfaces != 1 && interfaces != 2) throw std::invalid_argument("cstar_sweep: interfaces must be 1 or 2");
    if (eps.size() < 2) throw std::invalid_argument("cstar_sweep: need at least two eps values");
    const RegionSpec omega = interval(-1, 1);
    const RegionSpec E = interfaces == 1 ? interval(0, kInf) : interval(-0.5, 0.5);
    CstarSweep out;
    for (double e : eps) {
        // Nodes at eps times the profile nodes, so the profile is sampled exactly.
        const GridPtr grid = box_grid_1d(-2, 2, e * p.h, omega);
        ScalarField v = indicator(E, grid);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = p.value(signed_distance_at(E, grid->coord(k, 0)) / e);
        auto op = std::make_shared<KernelOperator>(grid, p.s);
        out.eps.push_back(e);
        out.F.push_back(AllenCahnModel(op, e).evaluate(v).total);
    }
    if (p.s > 0.5) {
        out.limit = richardson_limit(out.eps, out.F, 2 * p.s - 1);
    } else {
        std::vector<double> x;
        for (double e : eps) x.push_back(1.0 / std::abs(std::log(e)));
        out.limit = richardson_limit(x, out.F, 1.0);
    }
    return out;
}

double estimate_cstar(const ProfileTable& p) { return cstar_sweep(p, 1).limit; }

double estimate_cstar(double s) {
    if (!(s >= 0.5 && s < 1)) throw std::invalid_argument("estimate_cstar: s must lie in [1/2, 1)");
    static std::mutex mu;
    static std::map<double, ProfileTable> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(s);
    if (it == cache.end()) it = cache.emplace(s, solve_profile(s, 80, 0.05)).first;
    return estimate_cstar(it->second);
}

RecoveryField build_recovery_sequence(const GridPtr& grid, const RegionSpec& E, const ProfileTable& u0, double eps, double m, double M,
                                      const BumpSpec& bump) {
    if (u0.s < 0.5) throw std::invalid_argument("build_recovery_sequence: s must lie in [1/2, 1)");
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("build_recovery_sequence: eps must lie in (0,1)");
    if (E.dim != grid->dim) throw std::invalid_argument("build_recovery_sequence: dimension mismatch");
    const RegionSpec& omega = grid->omega;
    if (signed_distance_at(omega, bump.cx, bump.cy) < bump.radius) throw std::invalid_argument("build_recovery_sequence: bump leaves omega");
    if (std::abs(signed_distance_at(E, bump.cx, bump.cy)) < bump.radius + bump.clearance)
        throw std::invalid_argument("build_recovery_sequence: bump support meets the interface tube");
    RecoveryField out;
    out.field = indicator(E, grid);
    out.field.M = M;
    ScalarField& u = out.field;
    const Grid& g = *grid;
    std::vector<double> phi(g.size(), 0.0);
    CompensatedSum vmass, pmass;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double x = g.coord(k, 0), y = g.dim == 2 ? g.coord(k, 1) : 0.0;
        u[k] = u0.value(signed_distance_at(E, x, y) / eps);
        if (!g.in_omega[k]) continue;
        phi[k] = bspline3(2 * std::hypot(x - bump.cx, y - bump.cy) / bump.radius);
        vmass.add(u[k]);
        pmass.add(phi[k]);
    }
    const double vol = g.cell_volume();
    if (pmass.value() == 0) throw std::invalid_argument("build_recovery_sequence: bump narrower than a cell");
    out.c_eps = m - vmass.value() * vol;
    const double norm = 1.0 / (pmass.value() * vol);
    CompensatedSum mass;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.in_omega[k]) continue;
        u[k] += out.c_eps * phi[k] * norm;
        if (std::abs(u[k]) > M) throw std::invalid_argument("build_recovery_sequence: corrected field leaves [-M, M]");
        mass.add(u[k]);
    }
    out.mass = mass.value() * vol;
    return out;
}

}  // namespace fraclab
