#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace fraclab {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
    double a;
    double b;
};

using Point2 = std::array<double, 2>;

enum class RegionKind { IntervalUnion, Rectangle, Disk, Polygon, HalfSpace };

// Parametric region in R^1 or R^2. 1D regions are always stored as a sorted
// union of disjoint open intervals (complements are resolved eagerly); 2D
// shapes carry a complement flag instead.
struct RegionSpec {
    RegionKind kind = RegionKind::IntervalUnion;
    int dim = 1;
    bool complement = false;
    std::vector<Interval> intervals;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;  // rectangle
    double cx = 0, cy = 0, r = 0;           // disk
    std::vector<Point2> vertices;           // polygon, counter-clockwise or not
    double nx = 0, ny = 0, c = 0;           // half-space {n.x < c}

    bool contains(double x, double y = 0.0) const;
    bool bounded() const;
    bool is_empty() const;
    bool is_full() const;
    // Axis-aligned bounding box of the shape (of its complement's hole for
    // complemented shapes); throws for unbounded kinds.
    std::array<double, 4> bbox() const;
    std::string describe() const;
};

RegionSpec empty_set();
RegionSpec whole_line();
RegionSpec interval(double a, double b);
RegionSpec interval_union(std::vector<Interval> parts);
RegionSpec rectangle(double x0, double x1, double y0, double y1);
RegionSpec disk(double cx, double cy, double r);
RegionSpec polygon(std::vector<Point2> vertices);
RegionSpec half_space(double nx, double ny, double c);
RegionSpec complement(const RegionSpec& e);

// Interval-union algebra (1D only).
RegionSpec intersect(const RegionSpec& a, const RegionSpec& b);
RegionSpec unite(const RegionSpec& a, const RegionSpec& b);
RegionSpec difference(const RegionSpec& a, const RegionSpec& b);
RegionSpec symmetric_difference(const RegionSpec& a, const RegionSpec& b);

// Cell-centred uniform grid on the box [lo, hi]^n. Nodes are cell centres.
struct Grid {
    int dim = 1;
    std::array<double, 2> lo{0, 0};
    std::array<double, 2> hi{0, 0};
    double h = 0;
    std::array<int, 2> cells{0, 1};
    double R = 0;
    RegionSpec omega;
    std::vector<std::uint8_t> in_omega;

    std::size_t size() const { return static_cast<std::size_t>(cells[0]) * cells[1]; }
    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(j) * cells[0] + i; }
    double coord(std::size_t idx, int axis) const;
    double cell_volume() const { return dim == 1 ? h : h * h; }
    std::size_t omega_count() const;
    double omega_measure() const { return static_cast<double>(omega_count()) * cell_volume(); }
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(const RegionSpec& omega, double h, double R);
// Grid whose box is exactly [lo, hi] in 1D with the given membership region.
GridPtr box_grid_1d(double lo, double hi, double h, const RegionSpec& omega);

struct ScalarField {
    GridPtr grid;
    std::vector<double> values;
    std::array<double, 2> far{0, 0};  // 1D: left/right; 2D: far[0]
    double M = 2.0;

    ScalarField() = default;
    ScalarField(GridPtr g, double fill = 0.0, double bound = 2.0);

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    bool in_XM() const;
    double omega_integral() const;
    double omega_max_abs() const;
};

struct MassConstraint {
    double m = 0;
    double tolerance = 1e-8;
};

void check_mass_constraint(const MassConstraint& mc, const RegionSpec& omega);

ScalarField indicator(const RegionSpec& set, const GridPtr& grid);
ScalarField signed_distance(const RegionSpec& set, const GridPtr& grid);
double signed_distance_at(const RegionSpec& set, double x, double y = 0.0);

// Exact Lebesgue measure of a bounded parametric region.
double measure(const RegionSpec& region);
// Measure of region intersected with the grid box: exact for interval unions
// and bounded parametric shapes inside the box, cell counting otherwise.
double measure(const RegionSpec& region, const Grid& window);
double measure_symmetric_difference(const RegionSpec& a, const RegionSpec& b);

double diameter(const RegionSpec& omega);

}  // namespace fraclab
