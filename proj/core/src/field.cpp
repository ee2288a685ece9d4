#include "diskuq/field.hpp"

#include <cmath>
#include <stdexcept>

namespace diskuq {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ScalarFieldPtr make_analytic(std::function<double(const Vec2&)> f) {
    return std::make_shared<AnalyticField>(std::move(f));
}

ScalarFieldPtr make_zero_field() {
    return make_analytic([](const Vec2&) { return 0.0; });
}

double PolarGridField::eval(const Vec2& x) const {
    const double rho = x.norm();
    if (rho > 1.0) return 0.0;
    double omega = std::atan2(x.y(), x.x());
    if (omega < 0.0) omega += 2.0 * kPi;
    // Radial cell containing rho among nodes (i+1/2)/n_rho, clamped so the
    // pole and the rim extrapolate from the nearest cell.
    double ri = rho * n_rho_ - 0.5;
    ri = std::clamp(ri, 0.0, static_cast<double>(n_rho_ - 1) - 1e-12);
    const int i0 = static_cast<int>(ri);
    const double fr = ri - i0;
    const double oj = omega * n_omega_ / (2.0 * kPi);
    const int j0 = static_cast<int>(oj) % n_omega_;
    const double fo = oj - std::floor(oj);
    const int i1 = i0 + 1, j1 = (j0 + 1) % n_omega_;
    return (1 - fr) * ((1 - fo) * values_(i0, j0) + fo * values_(i0, j1)) +
           fr * ((1 - fo) * values_(i1, j0) + fo * values_(i1, j1));
}

Eigen::VectorXd nodal_values(const TriMesh& mesh, const ScalarField& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(mesh.vertices.size()));
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = f.eval(mesh.vertices[i]);
    }
    return v;
}

MatXc MatrixField::eval(const Vec2& x) const {
    MatXc m = MatXc::Zero(matrix_size(), matrix_size());
    if (x.norm() > support_radius) return m;
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const double c = components[a]->eval(x);
        if (std::isnan(c)) throw std::runtime_error("MatrixField: NaN component value");
        m += c * basis[a];
    }
    return m;
}

Eigen::VectorXd MatrixField::coeffs(const Vec2& x) const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(dim());
    if (x.norm() > support_radius) return c;
    for (int a = 0; a < dim(); ++a) {
        c[a] = components[a]->eval(x);
        if (std::isnan(c[a])) throw std::runtime_error("MatrixField: NaN component value");
    }
    return c;
}

MatrixField su2_field(ScalarFieldPtr c1, ScalarFieldPtr c2, ScalarFieldPtr c3,
                      double support_radius) {
    MatrixField f;
    f.basis.assign(su2_basis().begin(), su2_basis().end());
    f.components = {std::move(c1), std::move(c2), std::move(c3)};
    f.support_radius = support_radius;
    return f;
}

MatrixField zero_su2_field() {
    return su2_field(make_zero_field(), make_zero_field(), make_zero_field());
}

MatrixField scalar_unitary_field(ScalarFieldPtr f, double support_radius) {
    MatrixField mf;
    MatXc i_basis(1, 1);
    i_basis(0, 0) = std::complex<double>(0.0, 1.0);
    mf.basis = {i_basis};
    mf.components = {std::move(f)};
    mf.support_radius = support_radius;
    return mf;
}

namespace {
// Gauss-Legendre nodes/weights on [0,1] by Newton iteration on P_n.
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Initial guess on [-1,1].
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);  // = w_[-1,1] / 2
    }
}
}  // namespace

DiskQuadrature disk_quadrature(int n_rho, int n_omega) {
    std::vector<double> rn, rw;
    gauss_legendre_01(n_rho, rn, rw);
    DiskQuadrature q;
    q.nodes.reserve(static_cast<std::size_t>(n_rho) * n_omega);
    q.weights.reserve(q.nodes.capacity());
    for (int i = 0; i < n_rho; ++i) {
        for (int j = 0; j < n_omega; ++j) {
            const double omega = 2.0 * kPi * j / n_omega;
            q.nodes.emplace_back(rn[i] * std::cos(omega), rn[i] * std::sin(omega));
            q.weights.push_back(rw[i] * rn[i] * 2.0 * kPi / n_omega);
        }
    }
    return q;
}

double l2_inner(const MatrixField& f, const MatrixField& g, int n_rho, int n_omega) {
    const DiskQuadrature q = disk_quadrature(n_rho, n_omega);
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        s += q.weights[i] * frobenius_inner(f.eval(q.nodes[i]), g.eval(q.nodes[i]));
    }
    return s;
}

}  // namespace diskuq
