#include "fraclab/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fraclab/numerics.hpp"

namespace fraclab {

namespace {

// Projected Barzilai-Borwein iteration in a diagonal metric with Armijo
// backtracking. The objective change of a trial step is computed from the
// exact expansion of the quartic energy rather than by differencing two
// totals, so the line search keeps working at residuals near round-off.
struct Engine {
    const AllenCahnModel& model;
    std::vector<std::uint8_t> free;
    std::array<bool, 2> far_free{false, false};
    std::vector<double> D;
    std::array<double, 2> Dfar{1, 1};
    double M = 2;
    std::optional<double> mass;
    SolverOptions opt;

    explicit Engine(const AllenCahnModel& m) : model(m) {}

    const Grid& grid() const { return model.op().grid(); }

    void project(ScalarField& u) const {
        const auto& om = model.op().omega_nodes();
        if (!mass) {
            for (std::size_t k : om)
                if (free[k]) u[k] = std::clamp(u[k], -M, M);
            return;
        }
        const double vol = grid().cell_volume();
        const double count = static_cast<double>(om.size());
        for (int cycle = 0; cycle < opt.max_projection_cycles; ++cycle) {
            for (std::size_t k : om) u[k] = std::clamp(u[k], -M, M);
            CompensatedSum acc;
            for (std::size_t k : om) acc.add(u[k]);
            const double shift = (*mass - acc.value() * vol) / (count * vol);
            bool inside = true;
            for (std::size_t k : om) {
                u[k] += shift;
                if (std::abs(u[k]) > M) inside = false;
            }
            if (inside) return;
        }
        throw ConvergenceError("mass projection: clipping and mass shift did not reach a joint point");
    }

    // K is quadratic, so its change along d is the trapezoid of the two
    // gradients; the quartic potential is expanded exactly about u.
    double change(const ScalarField& u, const ScalarField& d, const std::vector<double>& g, const std::array<double, 2>& gfar,
                  const std::vector<double>& gn, const std::array<double, 2>& gfarn) const {
        CompensatedSum lin, quart;
        for (std::size_t k = 0; k < d.size(); ++k)
            if (d[k] != 0) lin.add(0.5 * (g[k] + gn[k]) * d[k]);
        for (int s = 0; s < 2; ++s) lin.add(0.5 * (gfar[s] + gfarn[s]) * d.far[s]);
        for (std::size_t k : model.op().omega_nodes()) {
            const double t = u[k], e = d[k];
            const double dw = 0.5 * (potential_W(t).dW - potential_W(t + e).dW) * e;
            quart.add(dw + 0.5 * (3 * t * t - 1) * e * e + t * e * e * e + 0.25 * e * e * e * e);
        }
        return lin.value() + quart.value() * grid().cell_volume();
    }

    double lambda_of(const ScalarField& u, const std::vector<double>& g) const {
        const double vol = grid().cell_volume();
        CompensatedSum acc;
        double n = 0;
        for (std::size_t k : model.op().omega_nodes())
            if (std::abs(u[k]) < M) acc.add(g[k] / vol), n += 1;
        return n > 0 ? -acc.value() / n : 0.0;
    }

    double residual(const ScalarField& u, const std::vector<double>& g, const std::array<double, 2>& gfar, double& lambda) const {
        const double vol = grid().cell_volume();
        double r = 0;
        lambda = 0;
        if (mass) {
            lambda = lambda_of(u, g);
            for (std::size_t k : model.op().omega_nodes())
                if (std::abs(u[k]) < M) r = std::max(r, std::abs(g[k] / vol + lambda));
            for (std::size_t k : model.op().exterior_nodes())
                if (free[k]) r = std::max(r, std::abs(g[k] / D[k]));
        } else {
            for (std::size_t k : model.op().omega_nodes())
                if (free[k]) r = std::max(r, std::abs(std::clamp(u[k] - g[k] / D[k], -M, M) - u[k]));
        }
        for (int s = 0; s < 2; ++s)
            if (far_free[s]) r = std::max(r, std::abs(gfar[s] / Dfar[s]));
        return r;
    }

    MinimizeResult run(ScalarField u) const {
        project(u);
        std::vector<double> g, gn;
        std::array<double, 2> gfar{}, gfarn{};
        model.gradient(u, g, gfar);
        double f = model.objective(u);
        if (!std::isfinite(f)) throw ConvergenceError("optimizer: non-finite initial objective");
        MinimizeResult out;
        double tau = 1.0;
        ScalarField trial = u, d = u;
        int it = 0;
        for (;; ++it) {
            double lambda = 0;
            const double res = residual(u, g, gfar, lambda);
            if (opt.trace) {
                const double merr = mass ? u.omega_integral() - *mass : 0.0;
                out.trace.push_back({it, f * model.kappa(), res, merr, lambda});
            }
            out.stationarity_residual = res;
            if (res < opt.tol) {
                out.converged = true;
                break;
            }
            if (it >= opt.max_iter) break;
            bool accepted = false;
            double df = 0;
            for (int bt = 0; bt < opt.max_backtracks; ++bt) {
                for (std::size_t k = 0; k < u.size(); ++k) trial[k] = free[k] ? u[k] - tau * g[k] / D[k] : u[k];
                for (int s = 0; s < 2; ++s) trial.far[s] = far_free[s] ? u.far[s] - tau * gfar[s] / Dfar[s] : u.far[s];
                project(trial);
                double dec = 0;
                for (std::size_t k = 0; k < u.size(); ++k) {
                    d[k] = trial[k] - u[k];
                    dec += g[k] * d[k];
                }
                for (int s = 0; s < 2; ++s) {
                    d.far[s] = trial.far[s] - u.far[s];
                    dec += gfar[s] * d.far[s];
                }
                if (!(dec < 0)) break;
                model.gradient(trial, gn, gfarn);
                df = change(u, d, g, gfar, gn, gfarn);
                if (df <= opt.armijo * dec) {
                    accepted = true;
                    break;
                }
                tau *= 0.5;
            }
            if (!accepted) break;
            double sDs = 0, sy = 0;
            for (std::size_t k = 0; k < u.size(); ++k) {
                if (d[k] == 0) continue;
                sDs += d[k] * d[k] * D[k];
                sy += d[k] * (gn[k] - g[k]);
            }
            for (int s = 0; s < 2; ++s) {
                sDs += d.far[s] * d.far[s] * Dfar[s];
                sy += d.far[s] * (gfarn[s] - gfar[s]);
            }
            tau = sy > 0 ? sDs / sy : 2 * tau;
            tau = std::clamp(tau, 1e-12, 1e12);
            std::swap(u, trial);
            std::swap(g, gn);
            gfar = gfarn;
            f += df;
            if (!std::isfinite(f)) throw ConvergenceError("optimizer: objective became non-finite");
        }
        out.iterations = it;
        out.energy = model.evaluate(u);
        out.field = std::move(u);
        return out;
    }
};

void check_grid_field(const GridPtr& grid, const ScalarField& u, const char* what) {
    if (u.size() != grid->size()) throw std::invalid_argument(std::string(what) + ": field does not match the grid");
}

}  // namespace

SetFamily half_line_family(const RegionSpec& omega, const RegionSpec& exterior) {
    if (omega.dim != 1 || omega.is_empty() || !omega.bounded()) throw std::invalid_argument("half_line_family: needs a bounded 1D omega");
    SetFamily f;
    f.bounds = {{omega.intervals.front().a, omega.intervals.back().b}};
    const RegionSpec outside = difference(exterior, omega);
    f.make = [omega, outside](const std::vector<double>& p) { return unite(intersect(interval(p[0], kInf), omega), outside); };
    return f;
}

SetFamily slab_family(const RegionSpec& omega, const RegionSpec& exterior) {
    if (omega.dim != 1 || omega.is_empty() || !omega.bounded()) throw std::invalid_argument("slab_family: needs a bounded 1D omega");
    SetFamily f;
    const double a = omega.intervals.front().a, b = omega.intervals.back().b;
    f.bounds = {{a, b}, {a, b}};
    const RegionSpec outside = difference(exterior, omega);
    f.make = [omega, outside](const std::vector<double>& p) { return unite(intersect(interval(p[0], p[1]), omega), outside); };
    return f;
}

MinimizeResult minimize_massari_set(const RegionSpec& omega, std::optional<double> s, const ForcingSpec& H, const RegionSpec& exterior,
                                    const SetFamily& family, const MassariOptions& opt) {
    if (family.bounds.empty() || !family.make) throw std::invalid_argument("minimize_massari_set: empty family");
    if (opt.coarse_points < 2) throw std::invalid_argument("minimize_massari_set: need at least two coarse points");
    const std::size_t np = family.bounds.size();
    auto objective = [&](const std::vector<double>& p) {
        const RegionSpec E = family.make(p);
        if (omega.dim == 1 && measure(intersect(symmetric_difference(E, exterior), complement(omega))) > 0)
            throw std::invalid_argument("minimize_massari_set: family member differs from the exterior outside omega");
        try {
            return s ? massari_fractional(E, omega, *s, H) : massari_classical(E, omega, H);
        } catch (const std::domain_error&) {
            return kInf;
        }
    };
    std::vector<double> best(np), cur(np);
    double best_val = kInf;
    std::vector<int> idx(np, 0);
    const int n = opt.coarse_points;
    std::vector<double> step(np);
    for (std::size_t q = 0; q < np; ++q) step[q] = (family.bounds[q].second - family.bounds[q].first) / (n - 1);
    // Lexicographic scan; only improvements beyond rounding replace the
    // incumbent, so ties keep the smallest parameter vector.
    auto improves = [](double v, double ref) { return std::isinf(ref) ? v < ref : v < ref - 1e-10 * std::max(1.0, std::abs(ref)); };
    std::size_t total = 1;
    for (std::size_t q = 0; q < np; ++q) total *= static_cast<std::size_t>(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (std::size_t q = np; q-- > 0;) {
            idx[q] = static_cast<int>(rest % n);
            rest /= n;
        }
        for (std::size_t q = 0; q < np; ++q) cur[q] = idx[q] == n - 1 ? family.bounds[q].second : family.bounds[q].first + idx[q] * step[q];
        const double v = objective(cur);
        if (improves(v, best_val)) best_val = v, best = cur;
    }
    if (!std::isfinite(best_val)) throw std::invalid_argument("minimize_massari_set: all family members infeasible");
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int sweep = 0; sweep < 3; ++sweep)
        for (std::size_t q = 0; q < np; ++q) {
            double lo = std::max(family.bounds[q].first, best[q] - step[q]);
            double hi = std::min(family.bounds[q].second, best[q] + step[q]);
            auto at = [&](double t) {
                auto p = best;
                p[q] = t;
                return objective(p);
            };
            double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            double f1 = at(x1), f2 = at(x2);
            while (hi - lo > opt.refine_tol) {
                if (f1 <= f2) {
                    hi = x2, x2 = x1, f2 = f1;
                    x1 = hi - gr * (hi - lo);
                    f1 = at(x1);
                } else {
                    lo = x1, x1 = x2, f1 = f2;
                    x2 = lo + gr * (hi - lo);
                    f2 = at(x2);
                }
            }
            const double xm = 0.5 * (lo + hi), fm = at(xm);
            if (improves(fm, best_val)) best_val = fm, best[q] = xm;
        }
    MinimizeResult out;
    out.params = best;
    out.set = family.make(best);
    out.iterations = 1;
    out.converged = true;
    out.label = "best-found";
    const double forcing = forcing_integral(out.set, omega, H, true) / (s ? 1.0 - 2.0 * *s : unit_ball_volume(omega.dim - 1));
    out.energy.forcing = forcing;
    out.energy.gagliardo = best_val - forcing;
    out.energy.regime = s ? ScalingRegime::SubHalf : ScalingRegime::SuperHalf;
    out.energy.total = best_val;
    return out;
}

MinimizeResult minimize_E_eps_dirichlet(const GridPtr& grid, double s, double eps, const ForcingSpec& forcing,
                                        const ScalarField& exterior_data, double M, const ScalarField& init, const SolverOptions& opt,
                                        const std::vector<std::uint8_t>* free_nodes) {
    check_grid_field(grid, exterior_data, "minimize_E_eps_dirichlet");
    check_grid_field(grid, init, "minimize_E_eps_dirichlet");
    if (!(M >= 1)) throw std::invalid_argument("minimize_E_eps_dirichlet: need M >= 1");
    for (std::size_t k = 0; k < grid->size(); ++k)
        if (!grid->in_omega[k] && std::abs(exterior_data[k]) > M) throw std::invalid_argument("minimize_E_eps_dirichlet: exterior data exceed M");
    auto op = std::make_shared<KernelOperator>(grid, s);
    AllenCahnModel model(op, eps, forcing);
    Engine eng{model};
    eng.free.assign(grid->size(), 0);
    eng.D.assign(grid->size(), grid->cell_volume());
    if (free_nodes && free_nodes->size() != grid->size()) throw std::invalid_argument("minimize_E_eps_dirichlet: free mask size mismatch");
    for (std::size_t k : op->omega_nodes()) eng.free[k] = free_nodes ? (*free_nodes)[k] : 1;
    eng.M = M;
    eng.opt = opt;
    ScalarField u = exterior_data;
    u.M = M;
    for (std::size_t k : op->omega_nodes())
        if (eng.free[k]) u[k] = init[k];
    auto out = eng.run(std::move(u));
    out.label = "dirichlet";
    return out;
}

MinimizeResult minimize_F_eps_mass(const GridPtr& grid, double s, double eps, double m, double M, const ScalarField& init,
                                   const SolverOptions& opt) {
    check_grid_field(grid, init, "minimize_F_eps_mass");
    if (!(std::abs(m) < grid->omega_measure())) throw std::invalid_argument("minimize_F_eps_mass: need |m| < |omega|");
    if (!(M > 1)) throw std::invalid_argument("minimize_F_eps_mass: need M > 1");
    auto op = std::make_shared<KernelOperator>(grid, s);
    AllenCahnModel model(op, eps);
    Engine eng{model};
    eng.free.assign(grid->size(), 1);
    eng.D.assign(grid->size(), grid->cell_volume());
    const double e2s = model.eps2s();
    for (std::size_t k : op->exterior_nodes()) eng.D[k] = 2.0 * e2s * op->exterior_row_sums()[k];
    const auto fr = op->far_row_sums();
    for (int side = 0; side < op->far_sides(); ++side) {
        eng.far_free[side] = fr[side] > 0;
        eng.Dfar[side] = 2.0 * e2s * fr[side];
    }
    eng.M = M;
    eng.mass = m;
    eng.opt = opt;
    ScalarField u = init;
    u.M = M;
    if (op->far_sides() == 1) u.far[1] = u.far[0];
    auto out = eng.run(std::move(u));
    const auto [lam, mu] = extract_multiplier(out.field, s, eps);
    out.lambda_eps = lam;
    out.mu_eps = mu;
    out.label = "mass-constrained";
    return out;
}

ScalarField mass_matched_indicator(const GridPtr& grid, double m) {
    const Grid& g = *grid;
    const double target = 0.5 * (m + g.omega_measure());
    if (g.dim == 1) {
        const double b = g.omega.intervals.back().b;
        // |omega cap (t, inf)| is monotone in t; bisect on the exact measure.
        double lo = g.omega.intervals.front().a, hi = b;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (measure(intersect(g.omega, interval(mid, kInf))) > target)
                lo = mid;
            else
                hi = mid;
        }
        ScalarField u = indicator(interval(0.5 * (lo + hi), kInf), grid);
        return u;
    }
    const auto bb = g.omega.bbox();
    double lo = bb[0], hi = bb[1];
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        double count = 0;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (g.in_omega[k] && g.coord(k, 0) > mid) count += 1;
        if (count * g.cell_volume() > target)
            lo = mid;
        else
            hi = mid;
    }
    return indicator(half_space(-1.0, 0.0, -0.5 * (lo + hi)), grid);
}

MinimizeResult minimize_F_eps_mass_multistart(const GridPtr& grid, double s, double eps, double m, double M, const SolverOptions& opt) {
    std::vector<ScalarField> inits;
    inits.emplace_back(grid, -1.0, M);
    inits.emplace_back(grid, 1.0, M);
    inits.push_back(mass_matched_indicator(grid, m));
    std::optional<MinimizeResult> best;
    for (auto& init : inits) {
        init.M = M;
        auto r = minimize_F_eps_mass(grid, s, eps, m, M, init, opt);
        if (!best || r.energy.total < best->energy.total) best = std::move(r);
    }
    best->label = "best-found";
    return std::move(*best);
}

std::pair<double, double> extract_multiplier(const ScalarField& u, double s, double eps) {
    const Grid& g = *u.grid;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g.in_omega[k] && std::abs(u[k]) >= u.M)
            throw std::invalid_argument("extract_multiplier: box constraint active in omega");
    KernelOperator op(u.grid, s);
    const auto lap = op.laplacian(u);
    const double e2s = std::pow(eps, 2 * s);
    CompensatedSum acc;
    for (std::size_t k : op.omega_nodes()) acc.add(e2s * lap[k] + potential_W(u[k]).dW);
    const double lambda = -acc.value() / static_cast<double>(op.omega_nodes().size());
    return {lambda, kappa_eps(s, eps) * lambda};
}

LambdaMinimalityReport check_lambda_minimality(const RegionSpec& E, const RegionSpec& omega, double s, double Lambda,
                                               const std::vector<RegionSpec>& competitors, double tolerance) {
    if (E.dim != 1) throw std::invalid_argument("check_lambda_minimality: 1D sets only");
    LambdaMinimalityReport rep;
    const double perE = frac_perimeter(E, omega, {s, 1});
    rep.min_margin = kInf;
    for (const auto& F : competitors) {
        const RegionSpec diff = symmetric_difference(E, F);
        if (measure(intersect(diff, complement(omega))) > 0)
            throw std::invalid_argument("check_lambda_minimality: competitor differs from E outside omega");
        LambdaMinimalityRow row;
        row.competitor = F.describe();
        row.per_E = perE;
        row.per_F = frac_perimeter(F, omega, {s, 1});
        row.sym_diff = measure(intersect(diff, omega));
        row.margin = row.per_F + Lambda * row.sym_diff - perE;
        row.violated = row.margin < -tolerance;
        rep.any_violation = rep.any_violation || row.violated;
        rep.min_margin = std::min(rep.min_margin, row.margin);
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace fraclab
