#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fraclab/domain.hpp"
#include "fraclab/energy.hpp"

namespace fraclab {

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverOptions {
    double tol = 1e-7;
    int max_iter = 200000;
    double armijo = 1e-4;
    int max_backtracks = 60;
    int max_projection_cycles = 100;
    bool trace = false;
};

struct TraceRow {
    int iter;
    double energy;
    double residual;
    double mass_error;
    double lambda;
};

struct MinimizeResult {
    ScalarField field;
    RegionSpec set;
    std::vector<double> params;
    int iterations = 0;
    double stationarity_residual = 0;
    EnergyBreakdown energy;
    std::optional<double> lambda_eps;
    std::optional<double> mu_eps;
    bool converged = false;
    std::string label;
    std::vector<TraceRow> trace;
};

// Parametric family of candidate sets for the Massari problems.
struct SetFamily {
    std::vector<std::pair<double, double>> bounds;
    std::function<RegionSpec(const std::vector<double>&)> make;
};

// E_t = ((t, inf) cap omega) cup (exterior minus omega), t in omega's hull.
SetFamily half_line_family(const RegionSpec& omega, const RegionSpec& exterior);
// E_{a,b} = ((a, b) cap omega) cup (exterior minus omega), a <= b.
SetFamily slab_family(const RegionSpec& omega, const RegionSpec& exterior);

struct MassariOptions {
    int coarse_points = 201;
    double refine_tol = 1e-10;
};

// s in (0,1/2) selects the fractional functional; std::nullopt the classical one.
MinimizeResult minimize_massari_set(const RegionSpec& omega, std::optional<double> s, const ForcingSpec& H, const RegionSpec& exterior,
                                    const SetFamily& family, const MassariOptions& opt = {});

// Exterior data are the values of `exterior_data` outside omega (and its far
// values); only the omega nodes move. A free mask restricts the moving nodes
// further, so a problem on a subdomain can reuse the interior weights of a
// larger omega; the reported energy then includes constant terms.
MinimizeResult minimize_E_eps_dirichlet(const GridPtr& grid, double s, double eps, const ForcingSpec& forcing,
                                        const ScalarField& exterior_data, double M, const ScalarField& init,
                                        const SolverOptions& opt = {}, const std::vector<std::uint8_t>* free_nodes = nullptr);

// Every box node and the far values are unknowns; the mass constraint only
// involves omega.
MinimizeResult minimize_F_eps_mass(const GridPtr& grid, double s, double eps, double m, double M, const ScalarField& init,
                                   const SolverOptions& opt = {});

// Runs from -1, +1 and the signed indicator with mass m; keeps the lowest
// energy and labels the result "best-found".
MinimizeResult minimize_F_eps_mass_multistart(const GridPtr& grid, double s, double eps, double m, double M,
                                              const SolverOptions& opt = {});

// Signed indicator of a half-line inside omega with |omega cap E| = (m+|omega|)/2.
ScalarField mass_matched_indicator(const GridPtr& grid, double m);

// lambda = -mean over omega of eps^{2s}(-Delta)^s u + W'(u); mu = kappa lambda.
std::pair<double, double> extract_multiplier(const ScalarField& u, double s, double eps);

struct LambdaMinimalityRow {
    std::string competitor;
    double per_E = 0;
    double per_F = 0;
    double sym_diff = 0;
    double margin = 0;  // Per(F) + Lambda |E delta F| - Per(E)
    bool violated = false;
};

struct LambdaMinimalityReport {
    std::vector<LambdaMinimalityRow> rows;
    bool any_violation = false;
    double min_margin = 0;
};

LambdaMinimalityReport check_lambda_minimality(const RegionSpec& E, const RegionSpec& omega, double s, double Lambda,
                                               const std::vector<RegionSpec>& competitors, double tolerance = 1e-9);

}  // namespace fraclab
