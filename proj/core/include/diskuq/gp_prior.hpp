#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <random>
#include <vector>

#include "diskuq/geometry.hpp"

namespace diskuq {

struct MaternConfig {
    double nu = 3.0;
    double length_scale = 0.2;
    double amplitude = 1.0;
    double jitter = 1e-10;
};

/// Matern covariance
///   amplitude^2 * 2^{1-nu}/Gamma(nu) * (sqrt(2 nu) r / l)^nu K_nu(sqrt(2 nu) r / l).
double matern_kernel(double r, const MaternConfig& cfg);

/// Dense Gaussian-process sampler on a fixed nodal set: one Cholesky
/// factorization (with jitter escalation x10 up to 1e-6), then draws are
/// matrix-vector products.
class MaternSampler {
  public:
    MaternSampler(const std::vector<Vec2>& nodes, const MaternConfig& cfg);

    Eigen::VectorXd draw(std::mt19937_64& rng) const;
    /// theta^T K^{-1} theta, the nodal surrogate of the squared RKHS norm.
    double rkhs_norm_sq(const Eigen::VectorXd& field) const;

    int size() const { return static_cast<int>(chol_.rows()); }
    double applied_jitter() const { return applied_jitter_; }
    const MaternConfig& config() const { return cfg_; }

  private:
    MaternConfig cfg_;
    Eigen::MatrixXd chol_;  // lower Cholesky factor of K + jitter I
    double applied_jitter_ = 0.0;
};

/// Single draw convenience wrapper (fresh factorization).
Eigen::VectorXd sample_field(const std::vector<Vec2>& nodes, const MaternConfig& cfg,
                             std::uint64_t seed);

enum class InverseProblem { xray, schrodinger };

/// N-dependent prior rescaling factor: N^{-1/(2 alpha + 2)} for the X-ray
/// problem and N^{-d/(4 alpha + 2d)} (d = 2) for the Schrodinger problem,
/// with alpha = nu + d/2 when derived from a Matern config.
double rescale_factor(std::size_t N, double alpha, InverseProblem problem);
double alpha_from_matern(const MaternConfig& cfg, int d = 2);

/// CSV export of a sampled nodal field: columns x, y, value.
void write_field_csv(std::ostream& os, const std::vector<Vec2>& nodes,
                     const Eigen::VectorXd& values);

}  // namespace diskuq
