#include "diskuq/xray_linear.hpp"

#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

namespace diskuq {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double BoundaryGrid::phi(int i) const { return 2.0 * kPi * i / n_phi; }

double BoundaryGrid::vphi(int j) const { return -kPi / 2 + kPi * j / n_vphi; }

double BoundaryGrid::lambda_weight(int i, int j) const {
    (void)i;
    const double cell = (2.0 * kPi / n_phi) * (kPi / n_vphi) / (2.0 * kPi * kPi);
    return (j == 0 || j == n_vphi) ? 0.5 * cell : cell;
}

MatXc BoundaryMatrixFunction::interpolate(double phi, double vphi) const {
    const int np = grid.n_phi, nv = grid.n_vphi;
    double pi_ = phi / (2.0 * kPi) * np;
    pi_ -= std::floor(pi_ / np) * np;
    const int i0 = static_cast<int>(pi_) % np;
    const double fp = pi_ - std::floor(pi_);
    double vj = (vphi + kPi / 2) / kPi * nv;
    vj = std::clamp(vj, 0.0, static_cast<double>(nv) - 1e-12);
    const int j0 = static_cast<int>(vj);
    const double fv = vj - j0;
    const int i1 = (i0 + 1) % np;
    const auto& v = values;
    return (1 - fp) * ((1 - fv) * v[grid.index(i0, j0)] + fv * v[grid.index(i0, j0 + 1)]) +
           fp * ((1 - fv) * v[grid.index(i1, j0)] + fv * v[grid.index(i1, j0 + 1)]);
}

double l2_lambda_inner(const BoundaryMatrixFunction& f, const BoundaryMatrixFunction& g) {
    double s = 0.0;
    for (int i = 0; i < f.grid.rows(); ++i)
        for (int j = 0; j < f.grid.cols(); ++j) {
            const std::size_t idx = f.grid.index(i, j);
            s += f.grid.lambda_weight(i, j) * frobenius_inner(f.values[idx], g.values[idx]);
        }
    return s;
}

double l2_lambda_norm(const BoundaryMatrixFunction& f) {
    return std::sqrt(l2_lambda_inner(f, f));
}

std::vector<MatXc> linearized_forward(const MatrixField& phi0, const MatrixField& h,
                                      const std::vector<BeamSample>& beams,
                                      const OdeOptions& opts) {
    std::vector<MatXc> out;
    out.reserve(beams.size());
    for (const auto& b : beams) {
        const int n = opts.steps_for(b.exit_time);
        out.push_back(attenuated_xray(phi0, phi0, h, b, n, opts.cf4) *
                      scattering_datum(phi0, b, n, opts.cf4));
    }
    return out;
}

BoundaryMatrixFunction linearized_forward(const MatrixField& phi0, const MatrixField& h,
                                          const BoundaryGrid& grid,
                                          const OdeOptions& opts) {
    BoundaryMatrixFunction f;
    f.grid = grid;
    f.values.resize(grid.size());
    for (int i = 0; i < grid.rows(); ++i)
        for (int j = 0; j < grid.cols(); ++j) {
            const auto beam = make_beam(grid.phi(i), grid.vphi(j));
            const int n = opts.steps_for(beam.exit_time);
            f.values[grid.index(i, j)] =
                attenuated_xray(phi0, phi0, h, beam, n, opts.cf4) *
                scattering_datum(phi0, beam, n, opts.cf4);
        }
    return f;
}

MatXc adjoint_apply(const MatrixField& phi0, const BoundaryMatrixFunction& h,
                    const Vec2& x, int n_dirs, const OdeOptions& opts) {
    if (x.norm() >= 1.0) throw std::invalid_argument("adjoint_apply: |x| >= 1");
    if (n_dirs < 8) throw std::invalid_argument("adjoint_apply: n_dirs < 8");
    const int m = phi0.matrix_size();
    MatXc acc = MatXc::Zero(m, m);
    for (int d = 0; d < n_dirs; ++d) {
        const double a = 2.0 * kPi * d / n_dirs;
        const Vec2 v(std::cos(a), std::sin(a));
        const Chord c = chord_through(x, v);
        const double tau = c.footpoint.exit_time;
        if (tau < 1e-9) continue;
        // Integrating factor along the chord from the footpoint up to x.
        const int n = std::max(1, static_cast<int>(std::ceil(c.backward_time / opts.h_max)));
        // Integrate over [0, backward_time] of the footpoint beam.
        BeamSample partial = c.footpoint;
        partial.exit_time = c.backward_time;  // reuse the stepper on a sub-chord
        const MatXc u = integrating_factor(phi0, partial, n, opts.cf4).back();
        const MatXc hval =
            h.interpolate(c.footpoint.boundary_angle, c.footpoint.direction_angle);
        acc += (u * hval * u.adjoint()) / tau;
    }
    return acc * (2.0 * kPi / n_dirs);
}

MatXc normal_apply_point(const MatrixField& phi0, const MatrixField& f, const Vec2& x,
                         int n_dirs, const OdeOptions& opts) {
    if (x.norm() >= 1.0) throw std::invalid_argument("normal_apply_point: |x| >= 1");
    const int m = phi0.matrix_size();
    MatXc acc = MatXc::Zero(m, m);
    for (int d = 0; d < n_dirs; ++d) {
        const double a = 2.0 * kPi * d / n_dirs;
        const Vec2 v(std::cos(a), std::sin(a));
        const Chord c = chord_through(x, v);
        const BeamSample beam = c.footpoint;
        const double tau = beam.exit_time;
        if (tau < 1e-9) continue;
        const int n = opts.steps_for(tau);
        const double dt = tau / n;
        const auto u = integrating_factor(phi0, beam, n, opts.cf4);
        // Inner transform along the full chord (trapezoid on the ODE grid).
        MatXc inner = MatXc::Zero(m, m);
        for (int j = 0; j <= n; ++j) {
            const double w = (j == 0 || j == n) ? 0.5 * dt : dt;
            inner += w * (u[j].adjoint() * f.eval(point_along(beam, j * dt)) * u[j]);
        }
        // Conjugating factor at x: u at t = backward_time along the chord.
        const double tb = std::clamp(c.backward_time / dt, 0.0, static_cast<double>(n));
        const int jb = std::min(n - 1, static_cast<int>(tb));
        const double fb = tb - jb;
        // Group-consistent interpolation: step the lower node by the fraction.
        MatXc ub = u[jb];
        if (fb > 1e-12) {
            BeamSample stepb = beam;
            const double t0 = jb * dt;
            ub = (expm(MatXc(-fb * dt *
                             phi0.eval(point_along(stepb, t0 + 0.5 * fb * dt)))) *
                  ub)
                     .eval();
        }
        acc += (ub * inner * ub.adjoint()) / tau;
    }
    return acc * (2.0 * kPi / n_dirs);
}

std::vector<MatXc> normal_apply(const MatrixField& phi0, const MatrixField& f,
                                const std::vector<Vec2>& points, int n_dirs,
                                const OdeOptions& opts) {
    std::vector<MatXc> out;
    out.reserve(points.size());
    for (const auto& x : points) out.push_back(normal_apply_point(phi0, f, x, n_dirs, opts));
    return out;
}

MatrixField field_sum(const MatrixField& a, const MatrixField& b, double scale_b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("field_sum: dimension mismatch");
    MatrixField out;
    out.basis = a.basis;
    out.support_radius = std::max(a.support_radius, b.support_radius);
    for (int c = 0; c < a.dim(); ++c) {
        auto fa = a.components[c];
        auto fb = b.components[c];
        const double ra = a.support_radius, rb = b.support_radius;
        out.components.push_back(make_analytic([fa, fb, ra, rb, scale_b](const Vec2& x) {
            const double r = x.norm();
            double v = 0.0;
            if (r <= ra) v += fa->eval(x);
            if (r <= rb) v += scale_b * fb->eval(x);
            return v;
        }));
    }
    return out;
}

double remainder_norm(const MatrixField& phi0, const MatrixField& h,
                      const std::vector<BeamSample>& beams, const OdeOptions& opts) {
    const MatrixField sum = field_sum(phi0, h);
    double ss = 0.0;
    for (const auto& b : beams) {
        const int n = opts.steps_for(b.exit_time);
        const MatXc c1 = scattering_datum(sum, b, n, opts.cf4);
        const MatXc c0 = scattering_datum(phi0, b, n, opts.cf4);
        const MatXc lin =
            attenuated_xray(phi0, phi0, h, b, n, opts.cf4) * c0;
        ss += (c1 - c0 - lin).squaredNorm();
    }
    return std::sqrt(ss / static_cast<double>(beams.size()));
}

void write_boundary_json(std::ostream& os, const BoundaryMatrixFunction& f) {
    nlohmann::json j;
    j["n_phi"] = f.grid.n_phi;
    j["n_vphi"] = f.grid.n_vphi;
    j["matrix_size"] = f.values.empty() ? 0 : static_cast<int>(f.values[0].rows());
    nlohmann::json vals = nlohmann::json::array();
    for (const auto& m : f.values) {
        nlohmann::json entry = nlohmann::json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                entry.push_back(m(r, c).real());
                entry.push_back(m(r, c).imag());
            }
        vals.push_back(std::move(entry));
    }
    j["values"] = std::move(vals);
    os << j.dump() << '\n';
}

BoundaryMatrixFunction read_boundary_json(std::istream& is) {
    nlohmann::json j;
    is >> j;
    BoundaryMatrixFunction f;
    f.grid.n_phi = j.at("n_phi");
    f.grid.n_vphi = j.at("n_vphi");
    const int n = j.at("matrix_size");
    for (const auto& entry : j.at("values")) {
        MatXc m(n, n);
        std::size_t idx = 0;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                m(r, c) = std::complex<double>(entry.at(idx), entry.at(idx + 1));
                idx += 2;
            }
        f.values.push_back(std::move(m));
    }
    if (f.values.size() != f.grid.size())
        throw std::runtime_error("boundary function: grid/value size mismatch");
    return f;
}

}  // namespace diskuq
