#include "diskuq/xray_forward.hpp"

#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

#include "diskuq/rng.hpp"

namespace diskuq {

namespace {
// Gauss nodes and weights of the fourth-order commutator-free scheme.
const double kSqrt3 = 1.7320508075688772;
const double kC1 = 0.5 - kSqrt3 / 6.0;
const double kC2 = 0.5 + kSqrt3 / 6.0;
const double kAlpha = 0.25 + kSqrt3 / 6.0;
const double kBeta = 0.25 - kSqrt3 / 6.0;

// One forward step of u' = -Phi(gamma(t)) u over [t, t+h].
MatXc step_factor(const MatrixField& field, const BeamSample& beam, double t, double h,
                  bool cf4) {
    if (!cf4) {
        return expm(MatXc(-h * field.eval(beam.entry_point + (t + 0.5 * h) * beam.direction)));
    }
    const MatXc b1 = -field.eval(beam.entry_point + (t + kC1 * h) * beam.direction);
    const MatXc b2 = -field.eval(beam.entry_point + (t + kC2 * h) * beam.direction);
    return expm(MatXc(h * (kBeta * b1 + kAlpha * b2))) *
           expm(MatXc(h * (kAlpha * b1 + kBeta * b2)));
}
}  // namespace

int OdeOptions::steps_for(double exit_time) const {
    return std::max(1, static_cast<int>(std::ceil(exit_time / h_max)));
}

std::vector<MatXc> integrating_factor(const MatrixField& field, const BeamSample& beam,
                                      int n_steps, bool cf4) {
    if (n_steps < 1) throw std::invalid_argument("integrating_factor: n_steps < 1");
    const int n = field.matrix_size();
    const double h = beam.exit_time / n_steps;
    std::vector<MatXc> path;
    path.reserve(static_cast<std::size_t>(n_steps) + 1);
    MatXc u = MatXc::Identity(n, n);
    path.push_back(u);
    for (int j = 0; j < n_steps; ++j) {
        u = (step_factor(field, beam, j * h, h, cf4) * u).eval();
        path.push_back(u);
    }
    return path;
}

MatXc scattering_datum(const MatrixField& field, const BeamSample& beam, int n_steps,
                       bool cf4) {
    if (n_steps < 1) throw std::invalid_argument("scattering_datum: n_steps < 1");
    const int n = field.matrix_size();
    const double h = beam.exit_time / n_steps;
    MatXc u = MatXc::Identity(n, n);
    for (int j = 0; j < n_steps; ++j) {
        u = (step_factor(field, beam, j * h, h, cf4) * u).eval();
    }
    // C_Phi = U(0) with U(tau) = Id equals u(tau)^{-1}; u is unitary.
    return u.adjoint();
}

MatXc scattering_datum(const MatrixField& field, const BeamSample& beam,
                       const OdeOptions& opts) {
    return scattering_datum(field, beam, opts.steps_for(beam.exit_time), opts.cf4);
}

std::vector<MatXc> forward_map(const MatrixField& field,
                               const std::vector<BeamSample>& beams,
                               const OdeOptions& opts) {
    std::vector<MatXc> out;
    out.reserve(beams.size());
    for (const auto& b : beams) out.push_back(scattering_datum(field, b, opts));
    return out;
}

ScatteringDataset generate_dataset(const MatrixField& field, std::size_t n,
                                   double sigma, std::uint64_t seed,
                                   const OdeOptions& opts) {
    if (sigma <= 0.0) throw std::invalid_argument("generate_dataset: sigma <= 0");
    ScatteringDataset ds;
    ds.noise_sigma = sigma;
    ds.beams = sample_beams(n, seed);
    auto rng = make_rng(seed, 1);
    std::normal_distribution<double> gauss;
    const int m = field.matrix_size();
    ds.measurements.reserve(n);
    for (const auto& b : ds.beams) {
        MatXc y = scattering_datum(field, b, opts);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                y(i, j) += sigma * std::complex<double>(gauss(rng), gauss(rng));
        ds.measurements.push_back(std::move(y));
    }
    return ds;
}

MatXc attenuated_xray(const MatrixField& phi, const MatrixField& psi,
                      const MatrixField& h, const BeamSample& beam, int n_steps,
                      bool cf4) {
    const int n = phi.matrix_size();
    const double dt = beam.exit_time / n_steps;
    const auto u_phi = integrating_factor(phi, beam, n_steps, cf4);
    const auto u_psi = integrating_factor(psi, beam, n_steps, cf4);
    MatXc acc = MatXc::Zero(n, n);
    for (int j = 0; j <= n_steps; ++j) {
        const double w = (j == 0 || j == n_steps) ? 0.5 * dt : dt;
        const Vec2 x = beam.entry_point + (j * dt) * beam.direction;
        acc += w * (u_phi[j].adjoint() * h.eval(x) * u_psi[j]);
    }
    return acc;
}

namespace {
nlohmann::json matrix_to_json(const MatXc& m) {
    nlohmann::json j = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            j.push_back(m(r, c).real());
            j.push_back(m(r, c).imag());
        }
    return j;
}

MatXc matrix_from_json(const nlohmann::json& j, int n) {
    MatXc m(n, n);
    std::size_t idx = 0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            m(r, c) = std::complex<double>(j.at(idx), j.at(idx + 1));
            idx += 2;
        }
    return m;
}
}  // namespace

void write_dataset_json(std::ostream& os, const ScatteringDataset& ds) {
    nlohmann::json j;
    j["sigma"] = ds.noise_sigma;
    j["truth_tag"] = ds.truth_tag;
    j["matrix_size"] = ds.measurements.empty() ? 0 : static_cast<int>(ds.measurements[0].rows());
    auto beams = nlohmann::json::array();
    for (const auto& b : ds.beams)
        beams.push_back({b.boundary_angle, b.direction_angle});
    j["beams"] = std::move(beams);
    auto meas = nlohmann::json::array();
    for (const auto& m : ds.measurements) meas.push_back(matrix_to_json(m));
    j["measurements"] = std::move(meas);
    os << j.dump(2) << "\n";
}

ScatteringDataset read_dataset_json(std::istream& is) {
    nlohmann::json j;
    is >> j;
    ScatteringDataset ds;
    ds.noise_sigma = j.at("sigma");
    ds.truth_tag = j.value("truth_tag", "");
    const int n = j.at("matrix_size");
    for (const auto& b : j.at("beams"))
        ds.beams.push_back(make_beam(b.at(0), b.at(1)));
    for (const auto& m : j.at("measurements"))
        ds.measurements.push_back(matrix_from_json(m, n));
    if (ds.beams.size() != ds.measurements.size())
        throw std::runtime_error("dataset: beams/measurements length mismatch");
    return ds;
}

void write_dataset_csv(std::ostream& os, const ScatteringDataset& ds) {
    const int n = ds.measurements.empty() ? 0 : static_cast<int>(ds.measurements[0].rows());
    os << "boundary_angle,direction_angle";
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            os << ",m" << r << c << "_re,m" << r << c << "_im";
    os << '\n';
    os.precision(17);
    for (std::size_t i = 0; i < ds.beams.size(); ++i) {
        os << ds.beams[i].boundary_angle << ',' << ds.beams[i].direction_angle;
        const MatXc& m = ds.measurements[i];
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                os << ',' << m(r, c).real() << ',' << m(r, c).imag();
        os << '\n';
    }
}

}  // namespace diskuq
