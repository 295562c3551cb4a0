#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fraclab/domain.hpp"
#include "fraclab/optimize.hpp"

namespace fraclab {

// 2 PV int (u(x)-u(y)) |x-y|^{-n-2s} dy at the requested nodes, with u
// piecewise constant on cells and equal to its far values beyond the box.
// Other entries of the result are zero.
ScalarField frac_laplacian(const ScalarField& u, const std::vector<std::size_t>& at, double s);

// Kernel-weighted average of u over omega seen from (x, y), which must lie
// outside the closure of omega. 1D points may lie anywhere on the line; 2D
// points must be grid nodes.
double neumann_value(const ScalarField& u, double s, double x, double y = 0.0);
// Copy of u with the given exterior nodes replaced by their Neumann values.
ScalarField neumann_extension(const ScalarField& u, double s, const std::vector<std::size_t>& at);

struct ProfileTable {
    double s = 0;
    double L = 0;
    double h = 0;
    std::vector<double> t;
    std::vector<double> u;
    double C = 0;  // max over [L/2, L] of |1 - u0(t)| (1+t)^{2s}
    double residual = 0;
    int iterations = 0;

    // Linear interpolation inside [-L, L], sign(t) beyond.
    double value(double x) const;
    std::string to_csv() const;
    static ProfileTable from_csv(const std::string& text, double s);
};

// Minimiser of K(u,(-L,L)) + int W(u) with data -1 / +1 beyond -L / L.
ProfileTable solve_profile(double s, double L, double h, const SolverOptions& opt = {1e-8});

// Euler-Lagrange residual max |(-Delta)^s u0 + W'(u0)| over |t| <= L/2.
double profile_residual(const ProfileTable& p);

struct CstarSweep {
    std::vector<double> eps;
    std::vector<double> F;
    double limit = 0;
};

// F_eps(u0(d/eps), (-1,1)) for E = (0,inf) when interfaces = 1 and
// E = (-1/2, 1/2) when interfaces = 2, extrapolated in eps.
CstarSweep cstar_sweep(const ProfileTable& p, int interfaces, const std::vector<double>& eps = {0.1, 0.05, 0.025, 0.0125});
double estimate_cstar(double s);
double estimate_cstar(const ProfileTable& p);

struct BumpSpec {
    double cx = 0;
    double cy = 0;
    double radius = 0.2;
    double clearance = 0.05;
};

struct RecoveryField {
    ScalarField field;
    double c_eps = 0;
    double mass = 0;
};

// u_eps = u0(d/eps) + c_eps phi with phi a cubic B-spline bump of unit
// discrete integral, c_eps = m - int_omega u0(d/eps).
RecoveryField build_recovery_sequence(const GridPtr& grid, const RegionSpec& E, const ProfileTable& u0, double eps, double m, double M,
                                      const BumpSpec& bump);

}  // namespace fraclab
