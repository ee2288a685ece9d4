#include "diskuq/schrodinger.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace diskuq {

GridField grid_from_function(const SquareGrid& g,
                             const std::function<double(const Vec2&)>& f) {
    GridField out(g.full(), g.full());
    for (int i = 0; i < g.full(); ++i)
        for (int j = 0; j < g.full(); ++j) out(i, j) = f(g.point(i, j));
    return out;
}

double link_phi(double t) { return std::exp(t); }
double link_phi_prime(double t) { return std::exp(t); }

namespace {

void check_shape(const SquareGrid& grid, const GridField& f, const char* name) {
    if (f.rows() != grid.full() || f.cols() != grid.full())
        throw std::invalid_argument(std::string(name) + ": grid field has wrong shape");
}

int idx(const SquareGrid& grid, int i, int j) { return (i - 1) * grid.n + (j - 1); }

/// Assembles the SPD operator A = -(1/2)Delta_h + f on interior nodes.
Eigen::SparseMatrix<double> assemble(const SquareGrid& grid, const GridField& f) {
    const int n = grid.n;
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(5) * n * n);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            const int r = idx(grid, i, j);
            trips.emplace_back(r, r, 2.0 * inv_h2 + f(i, j));
            if (i > 1) trips.emplace_back(r, idx(grid, i - 1, j), -0.5 * inv_h2);
            if (i < n) trips.emplace_back(r, idx(grid, i + 1, j), -0.5 * inv_h2);
            if (j > 1) trips.emplace_back(r, idx(grid, i, j - 1), -0.5 * inv_h2);
            if (j < n) trips.emplace_back(r, idx(grid, i, j + 1), -0.5 * inv_h2);
        }
    }
    Eigen::SparseMatrix<double> A(n * n, n * n);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

GridField solve_with_rhs(const SquareGrid& grid, const GridField& f,
                         const Eigen::VectorXd& rhs, const GridField& boundary) {
    const int n = grid.n;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(assemble(grid, f));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("schrodinger: sparse factorization failed");
    Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("schrodinger: sparse solve failed");
    GridField u = boundary;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) u(i, j) = x(idx(grid, i, j));
    return u;
}

}  // namespace

GridField solve_dirichlet(const SquareGrid& grid, const GridField& f,
                          const std::function<double(const Vec2&)>& g) {
    check_shape(grid, f, "solve_dirichlet");
    const int n = grid.n;
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    if (f.minCoeff() < 0.0)
        throw std::invalid_argument("solve_dirichlet: potential must be nonnegative");

    GridField boundary = GridField::Zero(grid.full(), grid.full());
    for (int i = 0; i < grid.full(); ++i) {
        for (int j : {0, n + 1}) {
            boundary(i, j) = g(grid.point(i, j));
            boundary(j, i) = g(grid.point(j, i));
        }
    }
    for (int i = 0; i < grid.full(); ++i) {
        if (boundary(i, 0) <= 0.0 || boundary(i, n + 1) <= 0.0 ||
            boundary(0, i) <= 0.0 || boundary(n + 1, i) <= 0.0)
            throw std::invalid_argument("solve_dirichlet: boundary data must be positive");
    }

    // RHS carries the known boundary neighbors of near-boundary nodes.
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n * n);
    for (int j = 1; j <= n; ++j) {
        rhs(idx(grid, 1, j)) += 0.5 * inv_h2 * boundary(0, j);
        rhs(idx(grid, n, j)) += 0.5 * inv_h2 * boundary(n + 1, j);
        rhs(idx(grid, j, 1)) += 0.5 * inv_h2 * boundary(j, 0);
        rhs(idx(grid, j, n)) += 0.5 * inv_h2 * boundary(j, n + 1);
    }
    return solve_with_rhs(grid, f, rhs, boundary);
}

GridField apply_Sf(const SquareGrid& grid, const GridField& f, const GridField& v) {
    check_shape(grid, f, "apply_Sf");
    check_shape(grid, v, "apply_Sf");
    const int n = grid.n;
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    GridField w = GridField::Zero(grid.full(), grid.full());
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            w(i, j) = 0.5 * inv_h2 *
                          (v(i - 1, j) + v(i + 1, j) + v(i, j - 1) + v(i, j + 1) -
                           4.0 * v(i, j)) -
                      f(i, j) * v(i, j);
    return w;
}

GridField apply_Vf(const SquareGrid& grid, const GridField& f, const GridField& psi) {
    check_shape(grid, f, "apply_Vf");
    check_shape(grid, psi, "apply_Vf");
    if (f.minCoeff() < 0.0)
        throw std::invalid_argument("apply_Vf: potential must be nonnegative");
    const int n = grid.n;
    // (1/2 Delta_h - f) w = psi  <=>  A w = -psi with A SPD.
    Eigen::VectorXd rhs(n * n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) rhs(idx(grid, i, j)) = -psi(i, j);
    return solve_with_rhs(grid, f, rhs, GridField::Zero(grid.full(), grid.full()));
}

double grid_interpolate(const SquareGrid& grid, const GridField& u, const Vec2& x) {
    if (x.x() < 0.0 || x.x() > 1.0 || x.y() < 0.0 || x.y() > 1.0)
        throw std::invalid_argument("grid_interpolate: point outside the unit square");
    const double h = grid.h();
    int i = std::min(static_cast<int>(x.x() / h), grid.n);
    int j = std::min(static_cast<int>(x.y() / h), grid.n);
    const double s = x.x() / h - i;
    const double t = x.y() / h - j;
    return (1 - s) * (1 - t) * u(i, j) + s * (1 - t) * u(i + 1, j) +
           (1 - s) * t * u(i, j + 1) + s * t * u(i + 1, j + 1);
}

Eigen::VectorXd schrodinger_forward(const SquareGrid& grid, const GridField& theta,
                                    const std::function<double(const Vec2&)>& g,
                                    const std::vector<Vec2>& design_points) {
    GridField f = theta.unaryExpr([](double t) { return link_phi(t); });
    GridField u = solve_dirichlet(grid, f, g);
    Eigen::VectorXd out(static_cast<Eigen::Index>(design_points.size()));
    for (size_t k = 0; k < design_points.size(); ++k)
        out(static_cast<Eigen::Index>(k)) = grid_interpolate(grid, u, design_points[k]);
    return out;
}

namespace {

/// psi / (u_{f0} phi'(theta0)) with divisor guard; also reports how far psi
/// is from vanishing on the two outermost interior bands.
GridField quotient_field(const SquareGrid& grid, const GridField& theta0,
                         const GridField& psi, const std::function<double(const Vec2&)>& g,
                         GridField* u_out, GridField* divisor_out,
                         double* boundary_residual) {
    GridField f0 = theta0.unaryExpr([](double t) { return link_phi(t); });
    GridField u = solve_dirichlet(grid, f0, g);
    GridField divisor = u.cwiseProduct(theta0.unaryExpr([](double t) { return link_phi_prime(t); }));
    if (divisor.cwiseAbs().minCoeff() < 1e-8)
        throw std::runtime_error("schrodinger: divisor u*phi'(theta0) below 1e-8");
    double resid = 0.0;
    const int n = grid.n;
    for (int i = 0; i < grid.full(); ++i) {
        for (int band = 0; band <= 1; ++band) {
            resid = std::max({resid, std::abs(psi(i, band)), std::abs(psi(i, n + 1 - band)),
                              std::abs(psi(band, i)), std::abs(psi(n + 1 - band, i))});
        }
    }
    if (boundary_residual) *boundary_residual = resid;
    if (u_out) *u_out = u;
    if (divisor_out) *divisor_out = divisor;
    return psi.cwiseQuotient(divisor);
}

}  // namespace

SchrodingerVariance variance_schrodinger(const SquareGrid& grid, const GridField& theta0,
                                         const GridField& psi,
                                         const std::function<double(const Vec2&)>& g) {
    check_shape(grid, theta0, "variance_schrodinger");
    check_shape(grid, psi, "variance_schrodinger");
    SchrodingerVariance out;
    GridField f0 = theta0.unaryExpr([](double t) { return link_phi(t); });
    GridField q = quotient_field(grid, theta0, psi, g, nullptr, nullptr,
                                 &out.boundary_residual);
    GridField s = apply_Sf(grid, f0, q);
    out.value = grid.h() * grid.h() * s.squaredNorm();
    return out;
}

GridField invert_info(const SquareGrid& grid, const GridField& theta0,
                      const GridField& psi, const std::function<double(const Vec2&)>& g) {
    check_shape(grid, theta0, "invert_info");
    check_shape(grid, psi, "invert_info");
    GridField f0 = theta0.unaryExpr([](double t) { return link_phi(t); });
    GridField divisor;
    double resid = 0.0;
    GridField q = quotient_field(grid, theta0, psi, g, nullptr, &divisor, &resid);
    GridField s = apply_Sf(grid, f0, apply_Sf(grid, f0, q));
    return s.cwiseQuotient(divisor);
}

void write_grid_csv(std::ostream& os, const GridField& f) {
    os << "i,j,value\n";
    os.precision(17);
    for (Eigen::Index i = 0; i < f.rows(); ++i)
        for (Eigen::Index j = 0; j < f.cols(); ++j)
            os << i << ',' << j << ',' << f(i, j) << '\n';
}

GridField read_grid_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "i,j,value")
        throw std::runtime_error("grid csv: missing header");
    std::vector<std::tuple<int, int, double>> rows;
    int max_i = 0, max_j = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        int i = 0, j = 0;
        double v = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf", &i, &j, &v) != 3 || i < 0 || j < 0)
            throw std::runtime_error("grid csv: malformed row: " + line);
        rows.emplace_back(i, j, v);
        max_i = std::max(max_i, i);
        max_j = std::max(max_j, j);
    }
    if (max_i != max_j || rows.size() != static_cast<std::size_t>(max_i + 1) *
                                             static_cast<std::size_t>(max_j + 1))
        throw std::runtime_error("grid csv: not a full square grid");
    GridField f = GridField::Zero(max_i + 1, max_j + 1);
    for (const auto& [i, j, v] : rows) f(i, j) = v;
    return f;
}

}  // namespace diskuq
