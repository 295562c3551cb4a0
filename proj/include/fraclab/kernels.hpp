#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "fraclab/domain.hpp"

namespace fraclab {

// Kernel |x-y|^{-n-2s}; the fractional Laplacian carries the prefactor 2 and
// no dimensional normalisation constant.
struct KernelParams {
    double s = 0.25;
    int n = 1;
};

void validate(const KernelParams& p);

// Double antiderivative in 1D: G'' = -r^{-1-2s}, G' = r^{-2s}/(2s).
// G(r) = r^{1-2s}/(2s(1-2s)), and log r at s = 1/2.
double antiderivative_G(double r, double s);

// L((a,b),(c,d)) for b <= c; endpoints may be infinite. Returns +inf when
// the pair interaction diverges.
double interval_pair_interaction(double a, double b, double c, double d, double s);

// Unit-cell weights in 1D (cells of width 1, offset k >= 1).
double cell_moment_1d(long k, double s);          // exact cell-cell integral
double point_cell_weight_1d(long k, double s);    // centre of cell 0 against cell k
double second_moment_weight_1d(long k, double s); // tent-weighted |z|^2 moment / k^2
double self_second_moment_1d(double s);
// Weight between a unit cell and everything beyond a box edge lying `gap`
// cells away from the cell's near side.
double omega_tail_1d(double gap, double s);

// Unit-cell weights in 2D (offset (k,l) != (0,0)).
double cell_moment_2d(long k, long l, double s);
double point_cell_weight_2d(long k, long l, double s);
double second_moment_weight_2d(long k, long l, double s);
double self_second_moment_2d(double s);

// int over R^2 minus the grid box of |x-y|^{-2-2s} dy, for (x,y) inside the box.
double outside_box_point_integral_2d(const Grid& g, double x, double y, double s);

double interaction(const RegionSpec& A, const RegionSpec& B, const KernelParams& p, const Grid* window = nullptr);
double frac_perimeter(const RegionSpec& E, const RegionSpec& omega, const KernelParams& p, const Grid* window = nullptr);
double classical_perimeter(const RegionSpec& E, const RegionSpec& omega);

struct PerimeterLimit {
    std::vector<std::pair<double, double>> rows;  // (s, (1-2s) Per_s)
    double limit = 0;
};

PerimeterLimit rescaled_perimeter_limit(const RegionSpec& E, const RegionSpec& omega, const std::vector<double>& s_values,
                                        const Grid* window = nullptr);

// Discrete Gagliardo form on a grid:
//   K_h(u) = sum_{i in Omega} [ 1/2 sum_{j in Omega} W_ij (u_i-u_j)^2
//                               + sum_{j in box\Omega} W_ij (u_i-u_j)^2
//                               + sum_side T_i (u_i - far_side)^2 ].
// Omega-Omega pairs use exact cell moments for s < 1/2 and a second-moment
// rule for s >= 1/2; Omega-exterior pairs collocate the exterior node against
// the interior cell, which makes exterior stationarity reproduce the
// kernel-average extension formula exactly.
class KernelOperator {
public:
    KernelOperator(GridPtr grid, double s);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    double s() const { return s_; }

    double pair_weight(std::size_t i, std::size_t j) const;
    // Interaction of the cell (or node, outside Omega) with the part of R^n
    // beyond the box on the given side (1D: 0 left, 1 right; 2D: side 0).
    double tail_weight(std::size_t i, int side) const;
    int far_sides() const { return grid_->dim == 1 ? 2 : 1; }

    double energy(const ScalarField& u) const;
    // dK/du at every node plus dK/dfar.
    void gradient(const ScalarField& u, std::vector<double>& g, std::array<double, 2>& gfar) const;
    // 2 PV int (u(x)-u(y)) k(x-y) dy at every node.
    std::vector<double> laplacian(const ScalarField& u) const;

    // Serial references that rebuild every weight from the closed forms.
    double energy_serial(const ScalarField& u) const;
    void gradient_serial(const ScalarField& u, std::vector<double>& g, std::array<double, 2>& gfar) const;
    std::vector<double> laplacian_serial(const ScalarField& u) const;

    // Diagonal scale of the Hessian of K in each exterior unknown and the far
    // values; used as the metric of the optimisers.
    const std::vector<double>& exterior_row_sums() const { return ext_rows_; }
    std::array<double, 2> far_row_sums() const { return far_rows_; }

    const std::vector<std::size_t>& omega_nodes() const { return omega_idx_; }
    const std::vector<std::size_t>& exterior_nodes() const { return ext_idx_; }

private:
    double table_inner(std::size_t i, std::size_t j) const;
    double table_cross(std::size_t i, std::size_t j) const;
    double row_sum(std::size_t i, const ScalarField& u, bool squared) const;

    GridPtr grid_;
    double s_;
    double scale_;
    std::vector<double> inner_;  // offset-indexed, already scaled
    std::vector<double> cross_;
    std::vector<std::array<double, 2>> tail_;
    std::vector<std::size_t> omega_idx_;
    std::vector<std::size_t> ext_idx_;
    std::vector<double> ext_rows_;
    std::array<double, 2> far_rows_{0, 0};
};

// Convenience wrapper; when omega differs from the grid's domain the grid
// membership is rebuilt for omega.
double gagliardo_K(const ScalarField& u, const RegionSpec& omega, const KernelParams& p);

GridPtr with_omega(const GridPtr& grid, const RegionSpec& omega);
ScalarField rebind(const ScalarField& u, const GridPtr& grid);

}  // namespace fraclab
