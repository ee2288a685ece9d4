#include "diskuq/gp_prior.hpp"

#include <Eigen/Cholesky>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "diskuq/rng.hpp"

namespace diskuq {

double matern_kernel(double r, const MaternConfig& cfg) {
    if (r < 0.0) throw std::invalid_argument("matern_kernel: r < 0");
    const double a2 = cfg.amplitude * cfg.amplitude;
    if (r == 0.0) return a2;
    const double z = std::sqrt(2.0 * cfg.nu) * r / cfg.length_scale;
    const double lg = (1.0 - cfg.nu) * std::log(2.0) - std::lgamma(cfg.nu) +
                      cfg.nu * std::log(z);
    return a2 * std::exp(lg) * boost::math::cyl_bessel_k(cfg.nu, z);
}

MaternSampler::MaternSampler(const std::vector<Vec2>& nodes, const MaternConfig& cfg)
    : cfg_(cfg) {
    const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = matern_kernel(
                (nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)])
                    .norm(),
                cfg);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    for (double jit = cfg.jitter; jit <= 1.000001e-6; jit *= 10.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(k + jit * Eigen::MatrixXd::Identity(n, n));
        if (llt.info() == Eigen::Success) {
            chol_ = llt.matrixL();
            applied_jitter_ = jit;
            return;
        }
    }
    throw std::runtime_error("MaternSampler: Cholesky failed after jitter escalation");
}

Eigen::VectorXd MaternSampler::draw(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss;
    Eigen::VectorXd z(chol_.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = gauss(rng);
    return chol_ * z;
}

double MaternSampler::rkhs_norm_sq(const Eigen::VectorXd& field) const {
    // theta^T K^{-1} theta = ||L^{-1} theta||^2.
    const Eigen::VectorXd y =
        chol_.triangularView<Eigen::Lower>().solve(field);
    return y.squaredNorm();
}

Eigen::VectorXd sample_field(const std::vector<Vec2>& nodes, const MaternConfig& cfg,
                             std::uint64_t seed) {
    MaternSampler sampler(nodes, cfg);
    auto rng = make_rng(seed);
    return sampler.draw(rng);
}

double rescale_factor(std::size_t N, double alpha, InverseProblem problem) {
    if (N < 1) throw std::invalid_argument("rescale_factor: N < 1");
    const double n = static_cast<double>(N);
    switch (problem) {
        case InverseProblem::xray:
            return std::pow(n, -1.0 / (2.0 * alpha + 2.0));
        case InverseProblem::schrodinger: {
            const double d = 2.0;
            return std::pow(n, -d / (4.0 * alpha + 2.0 * d));
        }
    }
    return 1.0;
}

double alpha_from_matern(const MaternConfig& cfg, int d) {
    return cfg.nu + 0.5 * d;
}

void write_field_csv(std::ostream& os, const std::vector<Vec2>& nodes,
                     const Eigen::VectorXd& values) {
    if (static_cast<Eigen::Index>(nodes.size()) != values.size())
        throw std::invalid_argument("write_field_csv: node/value count mismatch");
    os << "x,y,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        os << nodes[i].x() << ',' << nodes[i].y() << ','
           << values(static_cast<Eigen::Index>(i)) << '\n';
}

}  // namespace diskuq
