#pragma once

#include <functional>
#include <memory>
#include <string>

#include "fraclab/domain.hpp"
#include "fraclab/kernels.hpp"

namespace fraclab {

struct PotentialValues {
    double W;
    double dW;
    double d2W;
};

// Model double well W(t) = (1 - t^2)^2 / 4.
PotentialValues potential_W(double t);

enum class ScalingRegime { SubHalf, Half, SuperHalf };

ScalingRegime scaling_regime(double s);
std::string to_string(ScalingRegime r);

double kappa_eps(double s, double eps);
// Volume of the unit ball in R^d (omega_0 = 1, omega_1 = 2).
double unit_ball_volume(int d);
double c_ns(double s, int n);

// Forcing H_eps and its macroscopic limit H. Either a constant, or built from
// a base profile g as H_eps(x) = 2 kappa_eps g(x/eps).
struct ForcingSpec {
    std::function<double(double, double)> H;
    std::function<double(double, double, double)> H_eps;
    double sup_bound = 0;
    bool constant = true;
    double value = 0;

    static ForcingSpec none() { return constant_value(0.0); }
    static ForcingSpec constant_value(double h);
    static ForcingSpec from_base(std::function<double(double, double)> g, std::function<double(double, double)> H_limit, double s,
                                 double g_sup);
};

struct EnergyBreakdown {
    double gagliardo = 0;        // kappa eps^{2s} K
    double potential = 0;        // kappa int W(u)
    double forcing = 0;          // c_{n,s} int H_eps u
    double multiplier_term = 0;  // mu int u
    ScalingRegime regime = ScalingRegime::SubHalf;
    double total = 0;
    double K = 0;
    double W_integral = 0;
    double kappa = 0;

    double sum_of_parts() const { return gagliardo + potential + forcing + multiplier_term; }
};

// Integral of H over the parts of omega inside (sign=+1) or outside (sign=-1)
// of E. 1D is Gauss quadrature on exact intervals; 2D uses the window cells.
double forcing_integral(const RegionSpec& E, const RegionSpec& omega, const ForcingSpec& H, bool inside, const Grid* window = nullptr);

double massari_fractional(const RegionSpec& E, const RegionSpec& omega, double s, const ForcingSpec& H, const Grid* window = nullptr);
double massari_classical(const RegionSpec& E, const RegionSpec& omega, const ForcingSpec& H, const Grid* window = nullptr);
double script_P_fractional(const RegionSpec& E, const RegionSpec& omega, double s, const ForcingSpec& H, const Grid* window = nullptr);
double script_P_classical(const RegionSpec& E, const RegionSpec& omega, const ForcingSpec& H, const Grid* window = nullptr);

// Allen-Cahn energy on a grid field with a reusable kernel operator. The
// optimisers work with J = eps^{2s} K + int W + (forcing + multiplier)/kappa,
// i.e. the total divided by kappa.
class AllenCahnModel {
public:
    AllenCahnModel(std::shared_ptr<const KernelOperator> op, double eps, ForcingSpec forcing = ForcingSpec::none(), double mu = 0.0);

    const KernelOperator& op() const { return *op_; }
    double eps() const { return eps_; }
    double eps2s() const { return eps2s_; }
    double kappa() const { return kappa_; }
    double mu() const { return mu_; }
    const std::vector<double>& forcing_density() const { return hdens_; }

    EnergyBreakdown evaluate(const ScalarField& u) const;
    // Total divided by kappa (finite also when kappa is not defined, eps = 1).
    double objective(const ScalarField& u) const;
    void gradient(const ScalarField& u, std::vector<double>& g, std::array<double, 2>& gfar) const;
    // eps^{2s} (-Delta)^s u + W'(u) (+ forcing/kappa) at each node.
    std::vector<double> stationarity_density(const ScalarField& u) const;

private:
    std::shared_ptr<const KernelOperator> op_;
    double eps_, eps2s_, kappa_, mu_;
    ForcingSpec forcing_;
    std::vector<double> hdens_;  // (c_ns H_eps + mu) / kappa per node
    std::vector<double> hraw_;   // H_eps per node
};

EnergyBreakdown allen_cahn_F_eps(const ScalarField& u, const RegionSpec& omega, double s, double eps, double M);
EnergyBreakdown total_E_eps(const ScalarField& u, const RegionSpec& omega, double s, double eps, const ForcingSpec& forcing, double M);
EnergyBreakdown total_G_eps(const ScalarField& u, const RegionSpec& omega, double s, double eps, double mu_eps, double M);

}  // namespace fraclab
