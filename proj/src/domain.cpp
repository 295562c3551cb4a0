#include "fraclab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fraclab/numerics.hpp"

namespace fraclab {

namespace {

std::vector<Interval> normalize(std::vector<Interval> parts) {
    std::erase_if(parts, [](const Interval& iv) { return !(iv.a < iv.b); });
    std::sort(parts.begin(), parts.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });
    std::vector<Interval> out;
    for (const auto& iv : parts) {
        // Touching intervals are merged: the shared point has measure zero.
        if (!out.empty() && iv.a <= out.back().b)
            out.back().b = std::max(out.back().b, iv.b);
        else
            out.push_back(iv);
    }
    return out;
}

void require_1d(const RegionSpec& r, const char* what) {
    if (r.dim != 1) throw std::invalid_argument(std::string(what) + ": interval algebra needs 1D regions");
}

double segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const double ux = b[0] - a[0], uy = b[1] - a[1];
    const double len2 = ux * ux + uy * uy;
    double t = len2 > 0 ? ((p[0] - a[0]) * ux + (p[1] - a[1]) * uy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p[0] - a[0] - t * ux, p[1] - a[1] - t * uy);
}

}  // namespace

bool RegionSpec::contains(double x, double y) const {
    bool in = false;
    switch (kind) {
        case RegionKind::IntervalUnion:
            for (const auto& iv : intervals)
                if (iv.a < x && x < iv.b) return true;
            return false;
        case RegionKind::Rectangle:
            in = x0 < x && x < x1 && y0 < y && y < y1;
            break;
        case RegionKind::Disk:
            in = (x - cx) * (x - cx) + (y - cy) * (y - cy) < r * r;
            break;
        case RegionKind::Polygon: {
            const std::size_t n = vertices.size();
            for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
                const auto& p = vertices[i];
                const auto& q = vertices[j];
                if ((p[1] > y) != (q[1] > y) && x < (q[0] - p[0]) * (y - p[1]) / (q[1] - p[1]) + p[0]) in = !in;
            }
            break;
        }
        case RegionKind::HalfSpace:
            in = nx * x + ny * y < c;
            break;
    }
    return in != complement;
}

bool RegionSpec::bounded() const {
    if (dim == 1) {
        return intervals.empty() || (std::isfinite(intervals.front().a) && std::isfinite(intervals.back().b));
    }
    return !complement && kind != RegionKind::HalfSpace;
}

bool RegionSpec::is_empty() const {
    if (dim == 1) return intervals.empty();
    if (complement) return false;
    switch (kind) {
        case RegionKind::Rectangle: return !(x0 < x1 && y0 < y1);
        case RegionKind::Disk: return !(r > 0);
        case RegionKind::Polygon: return vertices.size() < 3;
        default: return nx == 0 && ny == 0 && c <= 0;
    }
}

bool RegionSpec::is_full() const {
    if (dim == 1) return intervals.size() == 1 && std::isinf(intervals[0].a) && std::isinf(intervals[0].b);
    return kind == RegionKind::HalfSpace && nx == 0 && ny == 0 && c > 0;
}

std::array<double, 4> RegionSpec::bbox() const {
    if (dim == 1) {
        if (intervals.empty() || !bounded()) throw std::invalid_argument("bbox: unbounded or empty region");
        return {intervals.front().a, intervals.back().b, 0, 0};
    }
    switch (kind) {
        case RegionKind::Rectangle: return {x0, x1, y0, y1};
        case RegionKind::Disk: return {cx - r, cx + r, cy - r, cy + r};
        case RegionKind::Polygon: {
            std::array<double, 4> b{kInf, -kInf, kInf, -kInf};
            for (const auto& v : vertices) {
                b[0] = std::min(b[0], v[0]);
                b[1] = std::max(b[1], v[0]);
                b[2] = std::min(b[2], v[1]);
                b[3] = std::max(b[3], v[1]);
            }
            return b;
        }
        default: throw std::invalid_argument("bbox: half-space is unbounded");
    }
}

std::string RegionSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (dim == 1) {
        if (intervals.empty()) return "empty";
        os << "intervals(";
        for (std::size_t i = 0; i < intervals.size(); ++i)
            os << (i ? ";" : "") << intervals[i].a << "," << intervals[i].b;
        os << ")";
        return os.str();
    }
    if (complement) os << "complement(";
    switch (kind) {
        case RegionKind::Rectangle: os << "rect(" << x0 << "," << x1 << "," << y0 << "," << y1 << ")"; break;
        case RegionKind::Disk: os << "disk(" << cx << "," << cy << "," << r << ")"; break;
        case RegionKind::Polygon:
            os << "polygon(";
            for (std::size_t i = 0; i < vertices.size(); ++i) os << (i ? ";" : "") << vertices[i][0] << "," << vertices[i][1];
            os << ")";
            break;
        default: os << "halfplane(" << nx << "," << ny << "," << c << ")";
    }
    if (complement) os << ")";
    return os.str();
}

RegionSpec empty_set() { return RegionSpec{}; }

RegionSpec whole_line() { return interval(-kInf, kInf); }

RegionSpec interval(double a, double b) { return interval_union({{a, b}}); }

RegionSpec interval_union(std::vector<Interval> parts) {
    for (const auto& iv : parts)
        if (std::isnan(iv.a) || std::isnan(iv.b)) throw std::invalid_argument("interval_union: NaN endpoint");
    RegionSpec r;
    r.intervals = normalize(std::move(parts));
    return r;
}

RegionSpec rectangle(double x0, double x1, double y0, double y1) {
    if (!(x0 < x1 && y0 < y1)) throw std::invalid_argument("rectangle: need x0<x1 and y0<y1");
    RegionSpec r;
    r.kind = RegionKind::Rectangle;
    r.dim = 2;
    r.x0 = x0, r.x1 = x1, r.y0 = y0, r.y1 = y1;
    return r;
}

RegionSpec disk(double cx, double cy, double radius) {
    if (!(radius > 0)) throw std::invalid_argument("disk: radius must be positive");
    RegionSpec r;
    r.kind = RegionKind::Disk;
    r.dim = 2;
    r.cx = cx, r.cy = cy, r.r = radius;
    return r;
}

RegionSpec polygon(std::vector<Point2> vertices) {
    if (vertices.size() < 3) throw std::invalid_argument("polygon: need at least 3 vertices");
    RegionSpec r;
    r.kind = RegionKind::Polygon;
    r.dim = 2;
    r.vertices = std::move(vertices);
    return r;
}

RegionSpec half_space(double nx, double ny, double c) {
    if (nx == 0 && ny == 0) throw std::invalid_argument("half_space: zero normal");
    RegionSpec r;
    r.kind = RegionKind::HalfSpace;
    r.dim = 2;
    r.nx = nx, r.ny = ny, r.c = c;
    return r;
}

RegionSpec complement(const RegionSpec& e) {
    if (e.dim == 2) {
        RegionSpec r = e;
        r.complement = !r.complement;
        return r;
    }
    std::vector<Interval> out;
    double start = -kInf;
    for (const auto& iv : e.intervals) {
        if (iv.a > start) out.push_back({start, iv.a});
        start = iv.b;
    }
    if (start < kInf) out.push_back({start, kInf});
    return interval_union(std::move(out));
}

RegionSpec intersect(const RegionSpec& a, const RegionSpec& b) {
    require_1d(a, "intersect");
    require_1d(b, "intersect");
    std::vector<Interval> out;
    for (const auto& p : a.intervals)
        for (const auto& q : b.intervals) {
            const double lo = std::max(p.a, q.a), hi = std::min(p.b, q.b);
            if (lo < hi) out.push_back({lo, hi});
        }
    return interval_union(std::move(out));
}

RegionSpec unite(const RegionSpec& a, const RegionSpec& b) {
    require_1d(a, "unite");
    require_1d(b, "unite");
    auto parts = a.intervals;
    parts.insert(parts.end(), b.intervals.begin(), b.intervals.end());
    return interval_union(std::move(parts));
}

RegionSpec difference(const RegionSpec& a, const RegionSpec& b) { return intersect(a, complement(b)); }

RegionSpec symmetric_difference(const RegionSpec& a, const RegionSpec& b) {
    return unite(difference(a, b), difference(b, a));
}

double Grid::coord(std::size_t idx, int axis) const {
    const std::size_t i = axis == 0 ? idx % cells[0] : idx / cells[0];
    return lo[axis] + (static_cast<double>(i) + 0.5) * h;
}

std::size_t Grid::omega_count() const {
    return static_cast<std::size_t>(std::count(in_omega.begin(), in_omega.end(), std::uint8_t{1}));
}

namespace {

void fill_membership(Grid& g) {
    g.in_omega.assign(g.size(), 0);
    for (std::size_t k = 0; k < g.size(); ++k)
        g.in_omega[k] = g.omega.contains(g.coord(k, 0), g.dim == 2 ? g.coord(k, 1) : 0.0) ? 1 : 0;
}

}  // namespace

GridPtr build_grid(const RegionSpec& omega, double h, double R) {
    if (!(h > 0)) throw std::invalid_argument("build_grid: spacing h must be positive");
    if (!omega.bounded() || omega.is_empty()) throw std::invalid_argument("build_grid: domain must be bounded and non-empty");
    const auto bb = omega.bbox();
    const double diam = diameter(omega);
    if (!(R >= 2.0 * diam - 1e-12)) throw std::invalid_argument("build_grid: truncation radius R must be at least 2*diam(omega)");
    auto g = std::make_shared<Grid>();
    g->dim = omega.dim;
    g->h = h;
    g->R = R;
    g->omega = omega;
    const int cells = static_cast<int>(std::lround(2.0 * R / h));
    for (int ax = 0; ax < g->dim; ++ax) {
        const double centre = 0.5 * (bb[2 * ax] + bb[2 * ax + 1]);
        g->lo[ax] = centre - R;
        g->hi[ax] = g->lo[ax] + cells * h;
        g->cells[ax] = cells;
        if (bb[2 * ax] < g->lo[ax] + h || bb[2 * ax + 1] > g->hi[ax] - h)
            throw std::invalid_argument("build_grid: box leaves less than one cell of margin around omega");
    }
    if (g->dim == 1) g->cells[1] = 1;
    fill_membership(*g);
    return g;
}

GridPtr box_grid_1d(double lo, double hi, double h, const RegionSpec& omega) {
    if (!(h > 0) || !(hi > lo)) throw std::invalid_argument("box_grid_1d: need h>0 and hi>lo");
    auto g = std::make_shared<Grid>();
    g->dim = 1;
    g->h = h;
    g->lo[0] = lo;
    g->cells[0] = static_cast<int>(std::lround((hi - lo) / h));
    g->hi[0] = lo + g->cells[0] * h;
    g->cells[1] = 1;
    g->R = 0.5 * (hi - lo);
    g->omega = omega;
    fill_membership(*g);
    return g;
}

ScalarField::ScalarField(GridPtr g, double fill, double bound)
    : grid(std::move(g)), values(grid->size(), fill), far{fill, fill}, M(bound) {}

bool ScalarField::in_XM() const {
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k])) return false;
        if (grid->in_omega[k] && std::abs(values[k]) > M * (1 + 1e-12)) return false;
    }
    return true;
}

double ScalarField::omega_integral() const {
    CompensatedSum acc;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (grid->in_omega[k]) acc.add(values[k]);
    return acc.value() * grid->cell_volume();
}

double ScalarField::omega_max_abs() const {
    double m = 0;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (grid->in_omega[k]) m = std::max(m, std::abs(values[k]));
    return m;
}

void check_mass_constraint(const MassConstraint& mc, const RegionSpec& omega) {
    if (!(mc.tolerance > 0)) throw std::invalid_argument("mass constraint: tolerance must be positive");
    if (!(std::abs(mc.m) < measure(omega))) throw std::invalid_argument("mass constraint: need |m| < |omega|");
}

ScalarField indicator(const RegionSpec& set, const GridPtr& grid) {
    if (set.dim != grid->dim) throw std::invalid_argument("indicator: dimension mismatch");
    ScalarField f(grid, -1.0);
    for (std::size_t k = 0; k < f.size(); ++k)
        f[k] = set.contains(grid->coord(k, 0), grid->dim == 2 ? grid->coord(k, 1) : 0.0) ? 1.0 : -1.0;
    if (set.dim == 1) {
        const bool left = !set.intervals.empty() && std::isinf(set.intervals.front().a);
        const bool right = !set.intervals.empty() && std::isinf(set.intervals.back().b);
        f.far = {left ? 1.0 : -1.0, right ? 1.0 : -1.0};
    } else if (set.kind == RegionKind::HalfSpace) {
        // Both sides are unbounded; a single far constant can only carry the
        // directional average.
        f.far = {0.0, 0.0};
    } else {
        f.far = {set.complement ? 1.0 : -1.0, set.complement ? 1.0 : -1.0};
    }
    return f;
}

double signed_distance_at(const RegionSpec& set, double x, double y) {
    if (set.is_empty() || set.is_full()) throw std::invalid_argument("signed_distance: set has empty boundary");
    double d = 0;
    if (set.dim == 1) {
        d = kInf;
        for (const auto& iv : set.intervals) {
            if (std::isfinite(iv.a)) d = std::min(d, std::abs(x - iv.a));
            if (std::isfinite(iv.b)) d = std::min(d, std::abs(x - iv.b));
        }
        return set.contains(x) ? d : -d;
    }
    switch (set.kind) {
        case RegionKind::Disk: d = set.r - std::hypot(x - set.cx, y - set.cy); break;
        case RegionKind::HalfSpace: d = (set.c - set.nx * x - set.ny * y) / std::hypot(set.nx, set.ny); break;
        case RegionKind::Rectangle: {
            const double dx = std::max({set.x0 - x, 0.0, x - set.x1});
            const double dy = std::max({set.y0 - y, 0.0, y - set.y1});
            if (dx > 0 || dy > 0)
                d = -std::hypot(dx, dy);
            else
                d = std::min({x - set.x0, set.x1 - x, y - set.y0, set.y1 - y});
            break;
        }
        case RegionKind::Polygon: {
            double m = kInf;
            const std::size_t n = set.vertices.size();
            for (std::size_t i = 0; i < n; ++i) m = std::min(m, segment_distance({x, y}, set.vertices[i], set.vertices[(i + 1) % n]));
            RegionSpec plain = set;
            plain.complement = false;
            d = plain.contains(x, y) ? m : -m;
            break;
        }
        default: break;
    }
    return set.complement ? -d : d;
}

ScalarField signed_distance(const RegionSpec& set, const GridPtr& grid) {
    if (set.dim != grid->dim) throw std::invalid_argument("signed_distance: dimension mismatch");
    ScalarField f(grid, 0.0, kInf);
    for (std::size_t k = 0; k < f.size(); ++k)
        f[k] = signed_distance_at(set, grid->coord(k, 0), grid->dim == 2 ? grid->coord(k, 1) : 0.0);
    f.far = {-kInf, kInf};
    return f;
}

double measure(const RegionSpec& region) {
    if (!region.bounded()) throw std::invalid_argument("measure: unbounded region needs a window");
    if (region.dim == 1) {
        CompensatedSum acc;
        for (const auto& iv : region.intervals) acc.add(iv.b - iv.a);
        return acc.value();
    }
    switch (region.kind) {
        case RegionKind::Rectangle: return (region.x1 - region.x0) * (region.y1 - region.y0);
        case RegionKind::Disk: return std::numbers::pi * region.r * region.r;
        case RegionKind::Polygon: {
            CompensatedSum acc;
            const auto& v = region.vertices;
            for (std::size_t i = 0; i < v.size(); ++i) {
                const auto& p = v[i];
                const auto& q = v[(i + 1) % v.size()];
                acc.add(p[0] * q[1] - q[0] * p[1]);
            }
            return 0.5 * std::abs(acc.value());
        }
        default: throw std::invalid_argument("measure: unbounded region needs a window");
    }
}

double measure(const RegionSpec& region, const Grid& window) {
    if (region.dim != window.dim) throw std::invalid_argument("measure: dimension mismatch");
    if (region.dim == 1) return measure(intersect(region, interval(window.lo[0], window.hi[0])));
    if (region.bounded()) {
        const auto bb = region.bbox();
        if (bb[0] >= window.lo[0] && bb[1] <= window.hi[0] && bb[2] >= window.lo[1] && bb[3] <= window.hi[1]) return measure(region);
    }
    std::size_t count = 0;
    for (std::size_t k = 0; k < window.size(); ++k)
        if (region.contains(window.coord(k, 0), window.coord(k, 1))) ++count;
    return static_cast<double>(count) * window.cell_volume();
}

double measure_symmetric_difference(const RegionSpec& a, const RegionSpec& b) {
    return measure(symmetric_difference(a, b));
}

double diameter(const RegionSpec& omega) {
    if (!omega.bounded() || omega.is_empty()) throw std::invalid_argument("diameter: region must be bounded and non-empty");
    if (omega.dim == 1) return omega.intervals.back().b - omega.intervals.front().a;
    switch (omega.kind) {
        case RegionKind::Disk: return 2.0 * omega.r;
        case RegionKind::Rectangle: return std::hypot(omega.x1 - omega.x0, omega.y1 - omega.y0);
        default: {
            double d = 0;
            for (const auto& p : omega.vertices)
                for (const auto& q : omega.vertices) d = std::max(d, std::hypot(p[0] - q[0], p[1] - q[1]));
            return d;
        }
    }
}

}  // namespace fraclab
