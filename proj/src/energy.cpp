#include "fraclab/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "fraclab/numerics.hpp"

namespace fraclab {

PotentialValues potential_W(double t) {
    const double a = 1.0 - t * t;
    return {0.25 * a * a, -t * a, 3.0 * t * t - 1.0};
}

ScalingRegime scaling_regime(double s) {
    if (!(s > 0 && s < 1)) throw std::invalid_argument("scaling_regime: s must lie in (0,1)");
    if (s < 0.5) return ScalingRegime::SubHalf;
    if (s == 0.5) return ScalingRegime::Half;
    return ScalingRegime::SuperHalf;
}

std::string to_string(ScalingRegime r) {
    switch (r) {
        case ScalingRegime::SubHalf: return "sub-half";
        case ScalingRegime::Half: return "half";
        default: return "super-half";
    }
}

double kappa_eps(double s, double eps) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("kappa_eps: eps must lie in (0,1)");
    switch (scaling_regime(s)) {
        case ScalingRegime::SubHalf: return std::pow(eps, -2 * s);
        case ScalingRegime::Half: return 1.0 / std::abs(eps * std::log(eps));
        default: return 1.0 / eps;
    }
}

double unit_ball_volume(int d) {
    switch (d) {
        case 0: return 1.0;
        case 1: return 2.0;
        case 2: return 3.14159265358979323846;
        default: throw std::invalid_argument("unit_ball_volume: dimension out of range");
    }
}

double c_ns(double s, int n) {
    if (!(s > 0 && s < 1)) throw std::invalid_argument("c_ns: s must lie in (0,1)");
    return s < 0.5 ? 1.0 / (2.0 * (1.0 - 2.0 * s)) : 1.0 / (2.0 * unit_ball_volume(n - 1));
}

namespace {

// kappa * eps^{2s}, computed without forming both factors.
double gagliardo_rescale(double s, double eps) {
    switch (scaling_regime(s)) {
        case ScalingRegime::SubHalf: return 1.0;
        case ScalingRegime::Half: return 1.0 / std::abs(std::log(eps));
        default: return std::pow(eps, 2 * s - 1);
    }
}

double safe_kappa(double s, double eps) {
    if (eps < 1) return kappa_eps(s, eps);
    // eps = 1 is the unscaled profile problem; only the forcing sees kappa.
    if (eps == 1) return 1.0;
    throw std::invalid_argument("AllenCahnModel: eps must lie in (0,1]");
}

}  // namespace

ForcingSpec ForcingSpec::constant_value(double h) {
    ForcingSpec f;
    f.H = [h](double, double) { return h; };
    f.H_eps = [h](double, double, double) { return h; };
    f.sup_bound = std::abs(h);
    f.constant = true;
    f.value = h;
    return f;
}

ForcingSpec ForcingSpec::from_base(std::function<double(double, double)> g, std::function<double(double, double)> H_limit, double s,
                                   double g_sup) {
    ForcingSpec f;
    f.H = std::move(H_limit);
    f.H_eps = [g = std::move(g), s](double x, double y, double eps) { return 2.0 * kappa_eps(s, eps) * g(x / eps, y / eps); };
    f.sup_bound = g_sup;
    f.constant = false;
    return f;
}

double forcing_integral(const RegionSpec& E, const RegionSpec& omega, const ForcingSpec& H, bool inside, const Grid* window) {
    if (E.dim != omega.dim) throw std::invalid_argument("forcing_integral: dimension mismatch");
    if (E.dim == 1) {
        const RegionSpec part = inside ? intersect(E, omega) : difference(omega, E);
        CompensatedSum acc;
        for (const auto& iv : part.intervals) {
            if (H.constant)
                acc.add(H.value * (iv.b - iv.a));
            else
                acc.add(gauss_integrate([&](double x) { return H.H(x, 0.0); }, iv.a, iv.b, 16, 16));
        }
        return acc.value();
    }
    if (!window) throw std::invalid_argument("forcing_integral: 2D integrals need a window grid");
    CompensatedSum acc;
    for (std::size_t k = 0; k < window->size(); ++k) {
        const double x = window->coord(k, 0), y = window->coord(k, 1);
        if (omega.contains(x, y) && E.contains(x, y) == inside) acc.add(H.H(x, y));
    }
    return acc.value() * window->cell_volume();
}

double massari_fractional(const RegionSpec& E, const RegionSpec& omega, double s, const ForcingSpec& H, const Grid* window) {
    if (!(s > 0 && s < 0.5)) throw std::invalid_argument("massari_fractional: s must lie in (0,1/2)");
    return frac_perimeter(E, omega, {s, E.dim}, window) + forcing_integral(E, omega, H, true, window) / (1.0 - 2.0 * s);
}

double massari_classical(const RegionSpec& E, const RegionSpec& omega, const ForcingSpec& H, const Grid* window) {
    return classical_perimeter(E, omega) + forcing_integral(E, omega, H, true, window) / unit_ball_volume(E.dim - 1);
}

double script_P_fractional(const RegionSpec& E, const RegionSpec& omega, double s, const ForcingSpec& H, const Grid* window) {
    if (!(s > 0 && s < 0.5)) throw std::invalid_argument("script_P_fractional: s must lie in (0,1/2)");
    const double signed_int = forcing_integral(E, omega, H, true, window) - forcing_integral(E, omega, H, false, window);
    return frac_perimeter(E, omega, {s, E.dim}, window) + signed_int / (2.0 * (1.0 - 2.0 * s));
}

double script_P_classical(const RegionSpec& E, const RegionSpec& omega, const ForcingSpec& H, const Grid* window) {
    const double signed_int = forcing_integral(E, omega, H, true, window) - forcing_integral(E, omega, H, false, window);
    return classical_perimeter(E, omega) + signed_int / (2.0 * unit_ball_volume(E.dim - 1));
}

AllenCahnModel::AllenCahnModel(std::shared_ptr<const KernelOperator> op, double eps, ForcingSpec forcing, double mu)
    : op_(std::move(op)), eps_(eps), mu_(mu), forcing_(std::move(forcing)) {
    const double s = op_->s();
    eps2s_ = std::pow(eps, 2 * s);
    kappa_ = safe_kappa(s, eps);
    const Grid& g = op_->grid();
    hdens_.assign(g.size(), 0.0);
    hraw_.assign(g.size(), 0.0);
    const double cns = c_ns(s, g.dim);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.in_omega[k]) continue;
        const double x = g.coord(k, 0), y = g.dim == 2 ? g.coord(k, 1) : 0.0;
        hraw_[k] = forcing_.constant ? forcing_.value : forcing_.H_eps(x, y, eps);
        hdens_[k] = (cns * hraw_[k] + mu_) / kappa_;
    }
}

EnergyBreakdown AllenCahnModel::evaluate(const ScalarField& u) const {
    const Grid& g = op_->grid();
    EnergyBreakdown e;
    e.regime = scaling_regime(op_->s());
    e.kappa = kappa_;
    e.K = op_->energy(u);
    CompensatedSum w, f, m;
    for (std::size_t k : op_->omega_nodes()) {
        w.add(potential_W(u[k]).W);
        f.add(hraw_[k] * u[k]);
        m.add(u[k]);
    }
    const double vol = g.cell_volume();
    e.W_integral = w.value() * vol;
    e.gagliardo = (eps_ < 1 ? gagliardo_rescale(op_->s(), eps_) : 1.0) * e.K;
    e.potential = kappa_ * e.W_integral;
    e.forcing = c_ns(op_->s(), g.dim) * f.value() * vol;
    e.multiplier_term = mu_ * m.value() * vol;
    e.total = e.sum_of_parts();
    return e;
}

double AllenCahnModel::objective(const ScalarField& u) const {
    const double K = op_->energy(u);
    CompensatedSum acc;
    for (std::size_t k : op_->omega_nodes()) acc.add(potential_W(u[k]).W + hdens_[k] * u[k]);
    return eps2s_ * K + acc.value() * op_->grid().cell_volume();
}

void AllenCahnModel::gradient(const ScalarField& u, std::vector<double>& g, std::array<double, 2>& gfar) const {
    op_->gradient(u, g, gfar);
    const double vol = op_->grid().cell_volume();
    for (auto& v : g) v *= eps2s_;
    for (auto& v : gfar) v *= eps2s_;
    for (std::size_t k : op_->omega_nodes()) g[k] += vol * (potential_W(u[k]).dW + hdens_[k]);
}

std::vector<double> AllenCahnModel::stationarity_density(const ScalarField& u) const {
    std::vector<double> lap = op_->laplacian(u);
    std::vector<double> out(lap.size(), 0.0);
    for (std::size_t k : op_->omega_nodes()) out[k] = eps2s_ * lap[k] + potential_W(u[k]).dW + hdens_[k];
    return out;
}

namespace {

std::shared_ptr<const KernelOperator> operator_for(const ScalarField& u, const RegionSpec& omega, double s, ScalarField& bound) {
    if (omega.describe() == u.grid->omega.describe()) {
        bound = u;
        return std::make_shared<KernelOperator>(u.grid, s);
    }
    const GridPtr g = with_omega(u.grid, omega);
    bound = rebind(u, g);
    return std::make_shared<KernelOperator>(g, s);
}

void require_XM(const ScalarField& u, double M) {
    ScalarField probe = u;
    probe.M = M;
    if (!probe.in_XM()) throw std::invalid_argument("energy: field violates the X_M bound on omega");
}

}  // namespace

EnergyBreakdown allen_cahn_F_eps(const ScalarField& u, const RegionSpec& omega, double s, double eps, double M) {
    return total_E_eps(u, omega, s, eps, ForcingSpec::none(), M);
}

EnergyBreakdown total_E_eps(const ScalarField& u, const RegionSpec& omega, double s, double eps, const ForcingSpec& forcing, double M) {
    kappa_eps(s, eps);
    ScalarField v;
    auto op = operator_for(u, omega, s, v);
    require_XM(v, M);
    return AllenCahnModel(op, eps, forcing).evaluate(v);
}

EnergyBreakdown total_G_eps(const ScalarField& u, const RegionSpec& omega, double s, double eps, double mu_eps, double M) {
    kappa_eps(s, eps);
    ScalarField v;
    auto op = operator_for(u, omega, s, v);
    require_XM(v, M);
    return AllenCahnModel(op, eps, ForcingSpec::none(), mu_eps).evaluate(v);
}

}  // namespace fraclab
