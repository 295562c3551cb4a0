#pragma once

#include <vector>

#include "fraclab/domain.hpp"
#include "fraclab/lab/config.hpp"
#include "fraclab/lab/report.hpp"
#include "fraclab/optimize.hpp"

namespace fraclab::lab {

SweepReport run_sweep_s_to_half(const ExperimentConfig& cfg);
SweepReport run_sweep_eps(const ExperimentConfig& cfg);
SweepReport run_neumann_check(const ExperimentConfig& cfg);
SweepReport run_curvature_check(const ExperimentConfig& cfg);
SweepReport counterexample_classical(const ExperimentConfig& cfg);
SweepReport counterexample_fractional(const ExperimentConfig& cfg);
SweepReport run_minimize(const ExperimentConfig& cfg);
// Validates the config and dispatches on cfg.experiment.
SweepReport run_experiment(const ExperimentConfig& cfg);

// One mass-constrained sweep point, kept for the drivers built on top of the
// eps sweep.
struct EpsPoint {
    double eps = 0;
    double h = 0;
    MinimizeResult result;
    double F = 0;
    double G = 0;
    double mass_error = 0;
    double sup_u = 0;
    double el_residual = 0;
    double l1_to_indicator = 0;
    double indicator_energy = 0;
};

std::vector<EpsPoint> eps_sweep_points(const ExperimentConfig& cfg);

// Shooting for u'' = u^3 - u, u(-1) = -1, u'(-1) = slope, RK4 on [-1, 1].
struct ShootResult {
    double slope = 0;
    double end_residual = 0;   // |u(1) + 1|
    double mass_residual = 0;  // |int u|
    double combined = 0;       // max of the two, +inf after blow-up
    double energy_drift = 0;   // max |E(x) - E(-1)| with E = u'^2/2 - u^4/4 + u^2/2
    bool blown = false;
};

ShootResult shoot(double slope, double step);

// L1 distance over omega to the signed indicator with mass m built from the
// largest values of u.
double l1_to_best_indicator(const ScalarField& u, double m);
// sign(u) in omega, kernel-average extension outside, far values equal to
// the omega mean of the snapped field.
ScalarField snap_limit_couple(const ScalarField& u, double s);
// Sign changes of u across consecutive omega cells (1D).
int interface_count(const ScalarField& u);

}  // namespace fraclab::lab
