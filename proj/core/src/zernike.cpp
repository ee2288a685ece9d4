#include "diskuq/zernike.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

namespace diskuq {

namespace {
constexpr double kPi = 3.14159265358979323846;

double zernike_norm(int n, int m) {
    return m == 0 ? std::sqrt((n + 1) / kPi) : std::sqrt(2.0 * (n + 1) / kPi);
}

// Jacobi polynomial P_s^{(a,0)}(x) by the stable three-term recurrence.
double jacobi_a0(int s, int a, double x) {
    if (s == 0) return 1.0;
    double p0 = 1.0;
    double p1 = 0.5 * ((a + 2) * x + a);
    for (int k = 2; k <= s; ++k) {
        const double c0 = 2.0 * k * (k + a) * (2 * k + a - 2);
        const double c1 = (2 * k + a - 1) * (static_cast<double>(2 * k + a) * (2 * k + a - 2) * x + a * a);
        const double c2 = 2.0 * (k + a - 1) * (k - 1) * (2 * k + a);
        const double p2 = (c1 * p1 - c2 * p0) / c0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

// Radial part R_n^{|m|}(rho) via R = (-1)^s rho^m P_s^{(m,0)}(1-2 rho^2).
double zernike_radial(int n, int absm, double rho) {
    const int s = (n - absm) / 2;
    const double sign = (s % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(rho, absm) * jacobi_a0(s, absm, 1.0 - 2.0 * rho * rho);
}
}  // namespace

int zernike_dim(int max_degree) { return (max_degree + 1) * (max_degree + 2) / 2; }

const std::vector<ZernikeIndex>& zernike_indices(int max_degree) {
    static std::map<int, std::vector<ZernikeIndex>> cache;
    auto& v = cache[max_degree];
    if (v.empty()) {
        for (int n = 0; n <= max_degree; ++n)
            for (int k = 0; k <= n; ++k) v.push_back({n, k});
    }
    return v;
}

double zernike_eval(int n, int k, const Vec2& x) {
    if (k < 0 || k > n) throw std::invalid_argument("zernike_eval: invalid (n,k)");
    const int m = 2 * k - n;
    const int absm = std::abs(m);
    const double rho = x.norm();
    const double omega = std::atan2(x.y(), x.x());
    double ang = 1.0;
    if (m > 0) ang = std::cos(absm * omega);
    else if (m < 0) ang = std::sin(absm * omega);
    return zernike_norm(n, m) * zernike_radial(n, absm, rho) * ang;
}

void zernike_eval_all(int max_degree, const Vec2& x, double* out) {
    const double rho = x.norm();
    const double omega = std::atan2(x.y(), x.x());
    const double x1 = 1.0 - 2.0 * rho * rho;
    const double co = std::cos(omega), si = std::sin(omega);
    double cm = 1.0, sm = 0.0;  // cos(m omega), sin(m omega)
    double rho_m = 1.0;
    auto offset = [](int n, int k) { return n * (n + 1) / 2 + k; };
    for (int m = 0; m <= max_degree; ++m) {
        // Jacobi recurrence in s for fixed a = m.
        double p0 = 1.0, p1 = 0.0;
        const int smax = (max_degree - m) / 2;
        for (int s = 0; s <= smax; ++s) {
            double p;
            if (s == 0) p = 1.0;
            else if (s == 1) p = 0.5 * ((m + 2) * x1 + m);
            else {
                const double c0 = 2.0 * s * (s + m) * (2 * s + m - 2);
                const double c1 = (2 * s + m - 1) *
                                  (static_cast<double>(2 * s + m) * (2 * s + m - 2) * x1 + m * m);
                const double c2 = 2.0 * (s + m - 1) * (s - 1) * (2 * s + m);
                p = (c1 * p1 - c2 * p0) / c0;
            }
            p0 = p1;
            p1 = p;
            const int n = m + 2 * s;
            const double sign = (s % 2 == 0) ? 1.0 : -1.0;
            const double radial = sign * rho_m * p;
            if (m == 0) {
                out[offset(n, n / 2)] = zernike_norm(n, 0) * radial;
            } else {
                out[offset(n, (n + m) / 2)] = zernike_norm(n, m) * radial * cm;
                out[offset(n, (n - m) / 2)] = zernike_norm(n, m) * radial * sm;
            }
        }
        const double cm2 = cm * co - sm * si;
        sm = sm * co + cm * si;
        cm = cm2;
        rho_m *= rho;
    }
}

Eigen::VectorXd zernike_radial_coeffs(int n, int absm) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n + 1);
    const int smax = (n - absm) / 2;
    for (int s = 0; s <= smax; ++s) {
        const double lg = std::lgamma(n - s + 1.0) - std::lgamma(s + 1.0) -
                          std::lgamma((n + absm) / 2 - s + 1.0) -
                          std::lgamma((n - absm) / 2 - s + 1.0);
        c[n - 2 * s] = ((s % 2 == 0) ? 1.0 : -1.0) * std::exp(lg);
    }
    return c;
}

Eigen::VectorXd apply_L_radial(const Eigen::VectorXd& coeffs, int absm) {
    const double scale = 1.0 / (16.0 * kPi * kPi);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs.size());
    for (int p = 0; p < coeffs.size(); ++p) {
        if (coeffs[p] == 0.0) continue;
        const double lower = static_cast<double>(absm) * absm - static_cast<double>(p) * p;
        if (lower != 0.0) {
            if (p < 2)
                throw std::invalid_argument("apply_L_radial: rho^{p-2} with p < 2");
            out[p - 2] += scale * lower * coeffs[p];
        }
        out[p] += scale * (p + 1.0) * (p + 1.0) * coeffs[p];
    }
    return out;
}

Eigen::MatrixXd apply_L_fd(const Eigen::MatrixXd& values) {
    const int nr = static_cast<int>(values.rows());
    const int nw = static_cast<int>(values.cols());
    if (nw % 2 != 0) throw std::invalid_argument("apply_L_fd: n_omega must be even");
    const double dr = 1.0 / nr;
    const double dw = 2.0 * kPi / nw;
    const double scale = 1.0 / (16.0 * kPi * kPi);
    Eigen::MatrixXd out(nr, nw);
    auto val = [&](int i, int j) {
        // Pole ghost: rho_{-1} = -rho_0 corresponds to omega + pi.
        if (i < 0) return values(-1 - i, (j + nw / 2) % nw);
        return values(i, (j % nw + nw) % nw);
    };
    for (int i = 0; i < nr; ++i) {
        const double rho = (i + 0.5) * dr;
        for (int j = 0; j < nw; ++j) {
            double d1, d2;
            if (i < nr - 1) {
                d1 = (val(i + 1, j) - val(i - 1, j)) / (2 * dr);
                d2 = (val(i + 1, j) - 2 * val(i, j) + val(i - 1, j)) / (dr * dr);
            } else {
                // One-sided stencils at the last ring; the (1-rho^2) factor
                // keeps the overall truncation error second order.
                d1 = (3 * val(i, j) - 4 * val(i - 1, j) + val(i - 2, j)) / (2 * dr);
                d2 = (val(i, j) - 2 * val(i - 1, j) + val(i - 2, j)) / (dr * dr);
            }
            const double dww = (val(i, j + 1) - 2 * val(i, j) + val(i, j - 1)) / (dw * dw);
            out(i, j) = scale * (-((1 - rho * rho) * d2 + (1.0 / rho - 3 * rho) * d1 +
                                   dww / (rho * rho)) +
                                 val(i, j));
        }
    }
    return out;
}

ZernikeExpansion analyze(const ScalarField& f, int max_degree, int n_rho, int n_omega) {
    if (n_rho <= 0) n_rho = max_degree + 6;
    if (n_omega <= 0) n_omega = 4 * max_degree + 16;
    const auto q = disk_quadrature(n_rho, n_omega);
    const int dim = zernike_dim(max_degree);
    ZernikeExpansion e;
    e.max_degree = max_degree;
    e.coeffs = Eigen::VectorXd::Zero(dim);
    std::vector<double> basis(dim);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const double fv = f.eval(q.nodes[i]);
        if (fv == 0.0) continue;
        zernike_eval_all(max_degree, q.nodes[i], basis.data());
        const double wf = q.weights[i] * fv;
        for (int d = 0; d < dim; ++d) e.coeffs[d] += wf * basis[d];
    }
    return e;
}

double synthesize_at(const ZernikeExpansion& e, const Vec2& x) {
    const int dim = zernike_dim(e.max_degree);
    std::vector<double> basis(dim);
    zernike_eval_all(e.max_degree, x, basis.data());
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += e.coeffs[d] * basis[d];
    return s;
}

ScalarFieldPtr synthesize_field(const ZernikeExpansion& e) {
    return make_analytic([e](const Vec2& x) { return synthesize_at(e, x); });
}

NormalGalerkin::NormalGalerkin(const MatrixField& phi0, int max_degree,
                               const BoundaryGrid& grid, const OdeOptions& opts,
                               int g_dim)
    : g_dim_(g_dim), max_degree_(max_degree) {
    if (g_dim != 1 && g_dim != 3)
        throw std::invalid_argument("NormalGalerkin: g_dim must be 1 or 3");
    const int dim_z = zernike_dim(max_degree);
    const int cols = dim_z * g_dim;
    const int rows = static_cast<int>(grid.size()) * g_dim;
    g_ = Eigen::MatrixXd::Zero(rows, cols);
    w_ = Eigen::VectorXd::Zero(rows);
    std::vector<double> basis(dim_z);
    const auto& b3 = su2_basis();
    for (int i = 0; i < grid.rows(); ++i) {
        for (int j = 0; j < grid.cols(); ++j) {
            const std::size_t bi = grid.index(i, j);
            const double lw = grid.lambda_weight(i, j);
            for (int b = 0; b < g_dim; ++b)
                w_[static_cast<Eigen::Index>(bi) * g_dim + b] = lw;
            const auto beam = make_beam(grid.phi(i), grid.vphi(j));
            const double tau = beam.exit_time;
            if (tau < 1e-8) continue;
            // Composite Simpson along the chord (even step count).
            const int n = 2 * ((opts.steps_for(tau) + 1) / 2);
            const double dt = tau / n;
            const auto u = integrating_factor(phi0, beam, n, opts.cf4);
            for (int q = 0; q <= n; ++q) {
                const double wq = ((q == 0 || q == n) ? 1.0 : (q % 2 == 1) ? 4.0 : 2.0) *
                                  dt / 3.0;
                const Vec2 x = beam.entry_point + (q * dt) * beam.direction;
                zernike_eval_all(max_degree, x, basis.data());
                // Conjugation matrix R[b][a] = <u^-1 B_a u, B_b>.
                double R[3][3];
                if (g_dim == 1) {
                    R[0][0] = 1.0;  // abelian scalar case
                } else {
                    for (int a = 0; a < 3; ++a) {
                        const Mat2c conj = u[q].adjoint() * b3[a] * u[q];
                        for (int b = 0; b < 3; ++b)
                            R[b][a] = frobenius_inner(conj, b3[b]);
                    }
                }
                for (int z = 0; z < dim_z; ++z) {
                    const double wz = wq * basis[z];
                    if (wz == 0.0) continue;
                    for (int a = 0; a < g_dim; ++a)
                        for (int b = 0; b < g_dim; ++b)
                            g_(static_cast<Eigen::Index>(bi) * g_dim + b,
                               z * g_dim + a) += wz * R[b][a];
                }
            }
        }
    }
    m_ = g_.transpose() * w_.asDiagonal() * g_;
    m_ = 0.5 * (m_ + m_.transpose()).eval();
}

Eigen::VectorXd NormalGalerkin::boundary_image(const Eigen::VectorXd& x) const {
    return g_ * x;
}

double NormalGalerkin::boundary_norm_sq(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd img = g_ * x;
    return img.dot(w_.asDiagonal() * img);
}

SpectralCalibration calibrate_N0(int max_degree, const BoundaryGrid& grid,
                                 const OdeOptions& opts) {
    NormalGalerkin op(zero_su2_field(), max_degree, grid, opts, 1);
    const auto& idx = zernike_indices(max_degree);
    const Eigen::MatrixXd& m = op.matrix();
    SpectralCalibration cal;
    cal.max_degree = max_degree;
    cal.c_hat = Eigen::VectorXd::Zero(max_degree + 1);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(max_degree + 1);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        cal.c_hat[idx[i].n] += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        counts[idx[i].n] += 1.0;
    }
    cal.c_hat.array() /= counts.array();
    double leak = 0.0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        double off = 0.0;
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            if (r != c) off += m(r, c) * m(r, c);
        leak = std::max(leak, std::sqrt(off) / m(c, c));
    }
    cal.leakage = leak;
    double conv = 0.0;
    for (int n = 0; n <= max_degree; ++n) {
        conv += (n + 1.0) * (n + 1.0) / (16.0 * kPi * kPi) * cal.c_hat[n] * cal.c_hat[n];
    }
    cal.convention_constant = conv / (max_degree + 1);
    return cal;
}

InvertResult invert_normal(const NormalGalerkin& op, const SpectralCalibration& cal,
                           const MatrixField& psi, double tol, int max_iters) {
    if (cal.max_degree != op.max_degree())
        throw std::invalid_argument("invert_normal: calibration degree mismatch");
    const int dim_z = zernike_dim(op.max_degree());
    const int gd = op.g_dim();
    if (psi.dim() != gd) throw std::invalid_argument("invert_normal: component mismatch");
    const auto& idx = zernike_indices(op.max_degree());

    Eigen::VectorXd b(dim_z * gd);
    std::vector<ZernikeExpansion> psi_exp(gd);
    for (int a = 0; a < gd; ++a) {
        psi_exp[a] = analyze(*psi.components[a], op.max_degree());
        for (int z = 0; z < dim_z; ++z) b[z * gd + a] = psi_exp[a].coeffs[z];
    }

    // Diagonal preconditioner from the calibrated N0 spectrum.
    Eigen::VectorXd pinv(dim_z * gd);
    for (int z = 0; z < dim_z; ++z)
        for (int a = 0; a < gd; ++a) pinv[z * gd + a] = 1.0 / cal.c_hat[idx[z].n];

    const Eigen::MatrixXd& m = op.matrix();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = pinv.asDiagonal() * r;
    Eigen::VectorXd p = z;
    double rz = r.dot(z);
    const double bnorm = b.norm();
    InvertResult res;
    res.residual = bnorm > 0 ? 1.0 : 0.0;
    for (int it = 0; it < max_iters && res.residual > tol; ++it) {
        const Eigen::VectorXd mp = m * p;
        const double alpha = rz / p.dot(mp);
        x += alpha * p;
        r -= alpha * mp;
        z = pinv.asDiagonal() * r;
        const double rz_new = r.dot(z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        res.iterations = it + 1;
        res.residual = bnorm > 0 ? r.norm() / bnorm : 0.0;
        res.residual_history.push_back(res.residual);
    }

    res.components.resize(gd);
    for (int a = 0; a < gd; ++a) {
        res.components[a].max_degree = op.max_degree();
        res.components[a].coeffs = Eigen::VectorXd::Zero(dim_z);
        for (int zi = 0; zi < dim_z; ++zi)
            res.components[a].coeffs[zi] = x[zi * gd + a];
    }
    res.field.basis = psi.basis;
    res.field.support_radius = 1.0;
    for (int a = 0; a < gd; ++a)
        res.field.components.push_back(synthesize_field(res.components[a]));
    res.variance = op.boundary_norm_sq(x);
    return res;
}

double asymptotic_variance(const NormalGalerkin& op, const SpectralCalibration& cal,
                           const MatrixField& psi, double tol) {
    return invert_normal(op, cal, psi, tol).variance;
}

void write_calibration_json(std::ostream& os, const SpectralCalibration& cal) {
    nlohmann::json j;
    j["max_degree"] = cal.max_degree;
    j["leakage"] = cal.leakage;
    j["convention_constant"] = cal.convention_constant;
    j["c_hat"] = std::vector<double>(cal.c_hat.data(), cal.c_hat.data() + cal.c_hat.size());
    os << j.dump() << '\n';
}

SpectralCalibration read_calibration_json(std::istream& is) {
    nlohmann::json j;
    is >> j;
    SpectralCalibration cal;
    cal.max_degree = j.at("max_degree");
    cal.leakage = j.at("leakage");
    cal.convention_constant = j.at("convention_constant");
    const auto c = j.at("c_hat").get<std::vector<double>>();
    cal.c_hat = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    return cal;
}

void write_expansion_json(std::ostream& os, const ZernikeExpansion& e) {
    nlohmann::json j;
    j["max_degree"] = e.max_degree;
    j["coeffs"] = std::vector<double>(e.coeffs.data(), e.coeffs.data() + e.coeffs.size());
    os << j.dump() << '\n';
}

ZernikeExpansion read_expansion_json(std::istream& is) {
    nlohmann::json j;
    is >> j;
    ZernikeExpansion e;
    e.max_degree = j.at("max_degree");
    const auto c = j.at("coeffs").get<std::vector<double>>();
    if (static_cast<int>(c.size()) != zernike_dim(e.max_degree))
        throw std::runtime_error("expansion: coefficient count does not match degree");
    e.coeffs = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    return e;
}

}  // namespace diskuq
