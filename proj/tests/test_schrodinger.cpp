#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "diskuq/schrodinger.hpp"

using namespace diskuq;

namespace {

constexpr double kPi = std::numbers::pi;

double const_one(const Vec2&) { return 1.0; }

GridField zero_like(const SquareGrid& g) { return GridField::Zero(g.full(), g.full()); }

/// Smooth bump supported in a disk around c, vanishing with all derivatives
/// at the support edge.
double bump(const Vec2& x, const Vec2& c, double radius, double amp) {
    const double s = (x - c).squaredNorm() / (radius * radius);
    return s < 1.0 ? amp * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
}

}  // namespace

TEST_CASE("dirichlet solve basics") {
    SquareGrid grid;
    grid.n = 31;

    SUBCASE("zero potential with constant data is constant") {
        GridField u = solve_dirichlet(grid, zero_like(grid),
                                      [](const Vec2&) { return 2.5; });
        CHECK((u.array() - 2.5).abs().maxCoeff() < 1e-10);
    }

    SUBCASE("positivity and maximum principle") {
        GridField f = grid_from_function(
            grid, [](const Vec2& x) { return 1.0 + std::sin(3 * x.x()) * 0.5; });
        auto g = [](const Vec2& x) { return 1.0 + 0.5 * x.x() * x.y(); };
        GridField u = solve_dirichlet(grid, f, g);
        CHECK(u.minCoeff() > 0.0);
        double gmax = 0.0;
        for (int i = 0; i < grid.full(); ++i) {
            gmax = std::max({gmax, g(grid.point(i, 0)), g(grid.point(i, grid.n + 1)),
                             g(grid.point(0, i)), g(grid.point(grid.n + 1, i))});
        }
        CHECK(u.maxCoeff() <= gmax + 1e-12);
    }

    SUBCASE("input validation") {
        CHECK_THROWS(solve_dirichlet(grid, GridField::Constant(grid.full(), grid.full(), -0.1),
                                     const_one));
        CHECK_THROWS(solve_dirichlet(grid, zero_like(grid),
                                     [](const Vec2&) { return -1.0; }));
        CHECK_THROWS(solve_dirichlet(SquareGrid{15}, zero_like(grid), const_one));
    }

    SUBCASE("manufactured solution converges at second order") {
        // u* = exp((x^2+y^2)/2) > 0 solves (1/2)Delta u - f u = 0 with
        // f = Delta u*/(2u*) = 1 + (x^2+y^2)/2 >= 1.
        auto u_star = [](const Vec2& p) { return std::exp(0.5 * p.squaredNorm()); };
        auto f_of = [](const Vec2& p) { return 1.0 + 0.5 * p.squaredNorm(); };
        auto err_on = [&](int n) {
            SquareGrid g{n};
            GridField ff = grid_from_function(g, f_of);
            GridField u = solve_dirichlet(g, ff, u_star);
            double err = 0.0;
            for (int i = 1; i <= g.n; ++i)
                for (int j = 1; j <= g.n; ++j)
                    err = std::max(err, std::abs(u(i, j) - u_star(g.point(i, j))));
            return err;
        };
        const double e1 = err_on(31);
        const double e2 = err_on(63);
        const double order = std::log2(e1 / e2);
        CHECK(order == doctest::Approx(2.0).epsilon(0.05));
    }

    SUBCASE("monotonicity: larger potential, smaller solution") {
        GridField f1 = GridField::Constant(grid.full(), grid.full(), 1.0);
        GridField f2 = GridField::Constant(grid.full(), grid.full(), 4.0);
        GridField u1 = solve_dirichlet(grid, f1, const_one);
        GridField u2 = solve_dirichlet(grid, f2, const_one);
        for (int i = 1; i <= grid.n; ++i)
            for (int j = 1; j <= grid.n; ++j) CHECK(u2(i, j) < u1(i, j));
    }
}

TEST_CASE("schrodinger operator pair") {
    SquareGrid grid;
    grid.n = 31;
    GridField f = grid_from_function(
        grid, [](const Vec2& x) { return 1.0 + 0.5 * std::cos(2 * x.x() + x.y()); });

    SUBCASE("V_f of zero is zero") {
        GridField w = apply_Vf(grid, f, zero_like(grid));
        CHECK(w.cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("S_f after V_f is the identity") {
        GridField psi = grid_from_function(grid, [](const Vec2& x) {
            return bump(x, Vec2(0.5, 0.5), 0.35, 1.0);
        });
        GridField w = apply_Vf(grid, f, psi);
        GridField back = apply_Sf(grid, f, w);
        double err = 0.0;
        for (int i = 1; i <= grid.n; ++i)
            for (int j = 1; j <= grid.n; ++j)
                err = std::max(err, std::abs(back(i, j) - psi(i, j)));
        CHECK(err < 1e-10);
    }

    SUBCASE("V_f after S_f is the identity on zero-boundary fields") {
        GridField v = grid_from_function(grid, [](const Vec2& x) {
            return bump(x, Vec2(0.4, 0.6), 0.3, 0.8);
        });
        GridField back = apply_Vf(grid, f, apply_Sf(grid, f, v));
        CHECK((back - v).cwiseAbs().maxCoeff() < 1e-10);
    }

    SUBCASE("maximum principle gives the sign flip") {
        GridField psi = grid_from_function(grid, [](const Vec2& x) {
            return bump(x, Vec2(0.5, 0.5), 0.3, 1.0);
        });
        GridField w = apply_Vf(grid, f, psi);
        CHECK(w.maxCoeff() <= 1e-14);
        CHECK(w.minCoeff() < 0.0);
    }
}

TEST_CASE("link function") {
    CHECK(link_phi(0.0) == doctest::Approx(1.0));
    for (double t : {-1.0, -0.2, 0.0, 0.7, 2.0}) {
        CHECK(link_phi_prime(t) == doctest::Approx(link_phi(t)));
        CHECK(link_phi_prime(t) > 0.0);
        const double h = 1e-6;
        const double fd = (link_phi(t + h) - link_phi(t - h)) / (2 * h);
        CHECK(std::abs(fd - link_phi_prime(t)) < 1e-8);
    }
}

TEST_CASE("forward map") {
    SquareGrid grid;
    grid.n = 47;
    std::vector<Vec2> design{{0.25, 0.25}, {0.5, 0.75}, {0.8, 0.3}, {0.333, 0.61}};

    SUBCASE("theta = 0 matches the unit-potential solve") {
        Eigen::VectorXd obs = schrodinger_forward(grid, zero_like(grid), const_one, design);
        GridField u = solve_dirichlet(
            grid, GridField::Constant(grid.full(), grid.full(), 1.0), const_one);
        for (size_t k = 0; k < design.size(); ++k)
            CHECK(obs(static_cast<Eigen::Index>(k)) ==
                  doctest::Approx(grid_interpolate(grid, u, design[k])).epsilon(1e-12));
    }

    SUBCASE("Lipschitz bound stable under refinement") {
        auto measure_c = [&](int n) {
            SquareGrid g{n};
            GridField th1 = grid_from_function(g, [](const Vec2& x) {
                return 0.3 * std::sin(2 * x.x()) * x.y();
            });
            GridField th2 = grid_from_function(g, [](const Vec2& x) {
                return 0.3 * std::sin(2 * x.x()) * x.y() + 0.05 * std::cos(3 * x.y());
            });
            Eigen::VectorXd o1 = schrodinger_forward(g, th1, const_one, design);
            Eigen::VectorXd o2 = schrodinger_forward(g, th2, const_one, design);
            const double dth = (th1 - th2).cwiseAbs().maxCoeff();
            return (o1 - o2).lpNorm<Eigen::Infinity>() / dth;
        };
        const double c1 = measure_c(31);
        const double c2 = measure_c(63);
        CHECK(c1 < 1.0);  // contraction-scale constant for this data
        CHECK(c1 == doctest::Approx(c2).epsilon(0.05));
    }
}

TEST_CASE("information operator and variance") {
    SquareGrid grid;
    grid.n = 47;
    GridField theta0 = grid_from_function(grid, [](const Vec2& x) {
        return 0.4 * bump(x, Vec2(0.45, 0.55), 0.4, 1.0);
    });
    GridField psi = grid_from_function(grid, [](const Vec2& x) {
        return bump(x, Vec2(0.5, 0.5), 0.3, 1.0);
    });

    SUBCASE("zero functional, zero variance, clean boundary check") {
        SchrodingerVariance v = variance_schrodinger(grid, theta0, zero_like(grid), const_one);
        CHECK(v.value == 0.0);
        CHECK(v.boundary_residual == 0.0);
    }

    SUBCASE("variance stable within 2% under refinement") {
        auto var_on = [&](int n) {
            SquareGrid g{n};
            GridField th = grid_from_function(g, [](const Vec2& x) {
                return 0.4 * bump(x, Vec2(0.45, 0.55), 0.4, 1.0);
            });
            GridField p = grid_from_function(g, [](const Vec2& x) {
                return bump(x, Vec2(0.5, 0.5), 0.35, 1.0);
            });
            return variance_schrodinger(g, th, p, const_one).value;
        };
        const double v1 = var_on(143);
        const double v2 = var_on(287);
        CHECK(v1 == doctest::Approx(v2).epsilon(0.02));
    }

    SUBCASE("duality with invert_info within 5%") {
        const double direct = variance_schrodinger(grid, theta0, psi, const_one).value;
        GridField psi_tilde = invert_info(grid, theta0, psi, const_one);
        const double h2 = grid.h() * grid.h();
        const double dual = h2 * (psi.cwiseProduct(psi_tilde)).sum();
        CHECK(direct == doctest::Approx(dual).epsilon(0.05));
    }

    SUBCASE("invert_info linearity and forward consistency") {
        GridField psi2 = grid_from_function(grid, [](const Vec2& x) {
            return bump(x, Vec2(0.6, 0.4), 0.25, 0.7);
        });
        GridField a = invert_info(grid, theta0, psi, const_one);
        GridField b = invert_info(grid, theta0, psi2, const_one);
        GridField combo = invert_info(grid, theta0, psi + 2.0 * psi2, const_one);
        CHECK((combo - a - 2.0 * b).cwiseAbs().maxCoeff() <
              1e-10 * std::max(1.0, combo.cwiseAbs().maxCoeff()));

        // I_0^* I_0 psi_tilde = psi with I_0 = V_f [u phi' .],
        // I_0^* = u phi' V_f[.]: residual small away from the boundary bands.
        GridField f0 = theta0.unaryExpr([](double t) { return link_phi(t); });
        GridField u = solve_dirichlet(grid, f0, const_one);
        GridField uphi = u.cwiseProduct(
            theta0.unaryExpr([](double t) { return link_phi_prime(t); }));
        GridField forward =
            uphi.cwiseProduct(apply_Vf(grid, f0, apply_Vf(grid, f0, uphi.cwiseProduct(a))));
        double err = 0.0;
        for (int i = 4; i <= grid.n - 3; ++i)
            for (int j = 4; j <= grid.n - 3; ++j)
                err = std::max(err, std::abs(forward(i, j) - psi(i, j)));
        CHECK(err < 5e-3 * psi.cwiseAbs().maxCoeff());
    }

    SUBCASE("discrete adjoint identity for I_0") {
        GridField f0 = theta0.unaryExpr([](double t) { return link_phi(t); });
        GridField u = solve_dirichlet(grid, f0, const_one);
        GridField uphi = u.cwiseProduct(
            theta0.unaryExpr([](double t) { return link_phi_prime(t); }));
        GridField h = grid_from_function(grid, [](const Vec2& x) {
            return bump(x, Vec2(0.55, 0.45), 0.3, 1.0);
        });
        GridField w = grid_from_function(grid, [](const Vec2& x) {
            return bump(x, Vec2(0.4, 0.6), 0.35, 0.9);
        });
        GridField i0h = apply_Vf(grid, f0, uphi.cwiseProduct(h));
        GridField i0s_w = uphi.cwiseProduct(apply_Vf(grid, f0, w));
        const double lhs = (i0h.cwiseProduct(w)).sum();
        const double rhs = (h.cwiseProduct(i0s_w)).sum();
        CHECK(std::abs(lhs - rhs) < 1e-8 * std::abs(lhs));
    }

    SUBCASE("divisor guard") {
        // boundary data tending to zero makes u*phi' tiny near the corner
        CHECK_THROWS(invert_info(grid, theta0, psi, [](const Vec2&) { return 1e-9; }));
    }
}

TEST_CASE("grid field csv round trip") {
    SquareGrid g{3};
    GridField f = grid_from_function(
        g, [](const Vec2& x) { return std::sin(3.0 * x.x()) + x.y() * x.y(); });
    std::stringstream ss;
    write_grid_csv(ss, f);
    GridField back = read_grid_csv(ss);
    REQUIRE(back.rows() == f.rows());
    CHECK((back - f).cwiseAbs().maxCoeff() < 1e-15);

    std::stringstream bad("i,j,value\n0,0,1.0\n");
    CHECK(read_grid_csv(bad).rows() == 1);
    std::stringstream bad2("nope\n");
    CHECK_THROWS(read_grid_csv(bad2));
}
