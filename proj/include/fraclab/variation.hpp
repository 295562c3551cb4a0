#pragma once

#include <string>
#include <vector>

#include "fraclab/domain.hpp"

namespace fraclab {

// X(x) = amplitude (1 - rho^2)^3 direction, rho = |x - centre| / radius < 1.
struct Bump {
    double cx = 0;
    double cy = 0;
    double radius = 0.5;
    double amplitude = 1;
    double dx = 1;
    double dy = 0;
};

// Finite sum of bumps; C^2 with compact support.
struct VectorFieldSpec {
    std::vector<Bump> parts;
    std::string name;

    Point2 value(double x, double y = 0.0) const;
    double divergence(double x, double y = 0.0) const;
    double lipschitz_bound() const;
    bool is_zero() const;
    // Support (union of bump disks) at distance > 0 from the complement of omega.
    bool supported_in(const RegionSpec& omega) const;

    VectorFieldSpec scaled(double a) const;
    VectorFieldSpec plus(const VectorFieldSpec& other) const;
};

VectorFieldSpec bump_field(double cx, double radius, double amplitude, const std::string& name = "");
VectorFieldSpec bump_field_2d(double cx, double cy, double radius, double amplitude, double dx, double dy, const std::string& name = "");

// Position at time t of the RK4 flow of X started at p.
Point2 flow_point(const VectorFieldSpec& X, Point2 p, double t);

// u o phi_{-t}: values transported along the flow. 1D moves every cell edge
// exactly through the flow and returns cell averages; 2D averages q x q
// subsamples per cell inside the support. Nodes away from the support and
// the far values are unchanged.
ScalarField flow_pushforward(const ScalarField& u, const VectorFieldSpec& X, double t);

struct CurvatureEstimate {
    double value = 0;  // Richardson combination of the two central differences
    double error = 0;  // |D(t2) - D(t1)|
    double coarse = 0;
    double fine = 0;
};

// d/dt K(phi_t(u), omega) at t = 0 by central differences at t = 1e-2, 5e-3.
CurvatureEstimate hybrid_mean_curvature(const ScalarField& u, double s, const VectorFieldSpec& X);

struct RatioRow {
    std::string field;
    double numerator = 0;
    double numerator_error = 0;
    double denominator = 0;
    double ratio = 0;
    double ratio_error = 0;
    bool excluded = false;
};

struct ConstancyReport {
    std::vector<RatioRow> rows;
    double mean = 0;
    double spread = 0;  // (max - min) / |mean| over included rows
    int included = 0;
    bool degenerate = false;
    bool constant = false;
};

// Ratios of delta K[X] to int_{E cap omega} div X with E = {u > 0}.
ConstancyReport constancy_diagnostic(const ScalarField& u, double s, const std::vector<VectorFieldSpec>& fields, double tolerance = 0.1);

// int over {u > 0} cap omega of div X (closed form in 1D, subsampled in 2D).
double divergence_integral(const ScalarField& u, const VectorFieldSpec& X);

}  // namespace fraclab
