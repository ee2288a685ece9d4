#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>

#include "diskuq/geometry.hpp"

namespace diskuq {

/// Tensor grid on the unit square: n x n interior nodes with spacing
/// h = 1/(n+1); fields are stored as (n+2) x (n+2) matrices including the
/// boundary ring, value(i, j) at (x, y) = (i h, j h).
struct SquareGrid {
    int n = 63;
    double h() const { return 1.0 / (n + 1); }
    int full() const { return n + 2; }
    Vec2 point(int i, int j) const { return Vec2(i * h(), j * h()); }
    bool interior(int i, int j) const { return i >= 1 && i <= n && j >= 1 && j <= n; }
};

using GridField = Eigen::MatrixXd;  // (n+2) x (n+2)

GridField grid_from_function(const SquareGrid& g,
                             const std::function<double(const Vec2&)>& f);

/// Default link phi(t) = exp(t): phi(0) = 1, phi' = phi > 0, f_min = 0.
double link_phi(double t);
double link_phi_prime(double t);

/// Solves (1/2) Delta u - f u = 0 in the interior, u = g on the boundary
/// (five-point Laplacian, sparse direct solve). Requires f >= 0, g > 0.
GridField solve_dirichlet(const SquareGrid& grid, const GridField& f,
                          const std::function<double(const Vec2&)>& g);

/// Differential application w = S_f[v] = (1/2) Delta_h v - f v on interior
/// nodes; the boundary ring of the result is zero.
GridField apply_Sf(const SquareGrid& grid, const GridField& f, const GridField& v);

/// Inverse with zero Dirichlet data: solves (1/2) Delta_h w - f w = psi,
/// w = 0 on the boundary.
GridField apply_Vf(const SquareGrid& grid, const GridField& f, const GridField& psi);

/// Forward map G(theta) = u_{phi o theta} evaluated at design points by
/// bilinear interpolation.
Eigen::VectorXd schrodinger_forward(const SquareGrid& grid, const GridField& theta,
                                    const std::function<double(const Vec2&)>& g,
                                    const std::vector<Vec2>& design_points);

double grid_interpolate(const SquareGrid& grid, const GridField& u, const Vec2& x);

/// BvM variance sigma^2(f0, psi) = || S_{f0}[ psi / (u_{f0} phi'(theta0)) ] ||^2
/// under the normalized Lebesgue weight h^2. psi must vanish (with two
/// derivatives) near the boundary; violations are reported via the returned
/// boundary_residual.
struct SchrodingerVariance {
    double value = 0.0;
    double boundary_residual = 0.0;  // max |psi| on the two outermost bands
};
SchrodingerVariance variance_schrodinger(const SquareGrid& grid, const GridField& theta0,
                                         const GridField& psi,
                                         const std::function<double(const Vec2&)>& g);

/// psi_tilde = S_{f0} S_{f0}[ psi / (u phi') ] / (u phi'), the inverse
/// information operator applied to psi.
GridField invert_info(const SquareGrid& grid, const GridField& theta0,
                      const GridField& psi, const std::function<double(const Vec2&)>& g);

/// CSV serialization of a grid field: rows (i, j, value) over the full
/// (n+2) x (n+2) grid including the boundary ring.
void write_grid_csv(std::ostream& os, const GridField& f);
GridField read_grid_csv(std::istream& is);

}  // namespace diskuq
