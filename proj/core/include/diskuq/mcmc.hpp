#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "diskuq/gp_prior.hpp"
#include "diskuq/mesh.hpp"
#include "diskuq/schrodinger.hpp"
#include "diskuq/xray_forward.hpp"

namespace diskuq {

/// Parameter fields are nodal coefficient matrices: one row per node, one
/// column per field component. A forward model maps them to a flat real
/// observation vector whose layout matches the dataset flattening below.
class ForwardModel {
  public:
    virtual ~ForwardModel() = default;
    virtual Eigen::VectorXd evaluate(const Eigen::MatrixXd& theta) const = 0;
    virtual int nodes() const = 0;
    virtual int components() const = 0;
};

/// Row-major (real, imag) flattening of a list of matrices; the layout used
/// for scattering observations (8 reals per su(2) datum).
Eigen::VectorXd flatten_matrices(const std::vector<MatXc>& mats);

/// Scattering forward model on a fixed mesh and beam set. Chord quadrature
/// stencils are precomputed once; each evaluation runs the exponential-
/// midpoint scheme in SU(2) (quaternion arithmetic), so the cost per beam is
/// O(steps) with no matrix allocation.
class XRayMCModel : public ForwardModel {
  public:
    XRayMCModel(std::shared_ptr<const TriMesh> mesh, std::vector<BeamSample> beams,
                double h_max = 0.05);

    Eigen::VectorXd evaluate(const Eigen::MatrixXd& theta) const override;
    int nodes() const override { return static_cast<int>(mesh_->vertices.size()); }
    int components() const override { return 3; }
    const TriMesh& mesh() const { return *mesh_; }
    const std::vector<BeamSample>& beams() const { return beams_; }

  private:
    struct BeamPlan {
        int n_steps = 0;
        double dt = 0.0;
        std::vector<MeshStencil> midpoints;
    };
    std::shared_ptr<const TriMesh> mesh_;
    std::vector<BeamSample> beams_;
    std::vector<BeamPlan> plans_;
};

/// Schrodinger forward model: theta lives on the (n+2)^2 grid nodes
/// (boundary ring included, one component), observations are point values of
/// u_{exp(theta)} at the design points.
class SchrodingerMCModel : public ForwardModel {
  public:
    SchrodingerMCModel(SquareGrid grid, std::function<double(const Vec2&)> g,
                       std::vector<Vec2> design_points);

    Eigen::VectorXd evaluate(const Eigen::MatrixXd& theta) const override;
    int nodes() const override { return grid_.full() * grid_.full(); }
    int components() const override { return 1; }
    const SquareGrid& grid() const { return grid_; }
    const std::vector<Vec2>& design_points() const { return design_; }

    GridField to_grid(const Eigen::MatrixXd& theta) const;

  private:
    SquareGrid grid_;
    std::function<double(const Vec2&)> g_;
    std::vector<Vec2> design_;
};

/// Gaussian log-likelihood sum_i -|y_i - G(theta)_i|^2 / (2 sigma^2), with
/// additive constants dropped. sigma is the per-real-coordinate noise level.
double log_likelihood(const ForwardModel& model, const Eigen::MatrixXd& theta,
                      const Eigen::VectorXd& y, double sigma);

struct ChainConfig {
    int n_steps = 20000;
    int burn_in = 1000;
    int thinning = 1;
    double beta = 0.02;
    bool adapt_beta = true;  // pilot adaptation during burn-in only
    double target_acc_low = 0.2;
    double target_acc_high = 0.3;
    std::uint64_t seed = 0;
};

struct ChainRecord {
    std::vector<std::vector<double>> tracked;  // one series per functional
    Eigen::MatrixXd mean_field;                // average over retained samples
    double acceptance_rate = 0.0;
    double beta_final = 0.0;
    int burn_in = 0;
    int thinning = 0;
    std::uint64_t seed = 0;
};

/// One pCN transition: proposal sqrt(1-beta^2) theta + beta xi with a fresh
/// centered prior draw xi, accepted with probability exp(min(0, dloglik)).
/// Returns true on acceptance and updates theta/log_lik in place.
bool pcn_step(Eigen::MatrixXd& theta, double& log_lik, double beta,
              const std::function<Eigen::MatrixXd()>& prior_draw,
              const std::function<double(const Eigen::MatrixXd&)>& log_lik_fn,
              std::mt19937_64& rng);

/// Checkpointable pCN chain over a forward model with i.i.d. Matern prior
/// components (scaled by prior_scale).
class PcnChain {
  public:
    PcnChain(const ForwardModel& model, Eigen::VectorXd y, double sigma,
             std::shared_ptr<const MaternSampler> prior, double prior_scale,
             const ChainConfig& cfg, Eigen::MatrixXd init,
             std::vector<Eigen::MatrixXd> tracked_weights);

    /// Advances until cfg.n_steps pCN transitions have been applied.
    void run();
    /// Advances by at most n transitions (for checkpoint cadence).
    void advance(int n);
    int step() const { return step_; }

    ChainRecord record() const;

    void save_checkpoint(std::ostream& os) const;
    void load_checkpoint(std::istream& is);

  private:
    Eigen::MatrixXd draw_prior();

    const ForwardModel& model_;
    Eigen::VectorXd y_;
    double sigma_;
    std::shared_ptr<const MaternSampler> prior_;
    double prior_scale_;
    ChainConfig cfg_;
    std::vector<Eigen::MatrixXd> tracked_weights_;

    Eigen::MatrixXd theta_;
    double log_lik_ = 0.0;
    std::mt19937_64 rng_;
    int step_ = 0;
    long accepted_ = 0;
    long window_accepted_ = 0;
    int window_steps_ = 0;
    double beta_ = 0.0;
    std::vector<std::vector<double>> tracked_;
    Eigen::MatrixXd mean_accum_;
    long retained_ = 0;
};

/// Nodal weights of the functional theta -> <theta, psi>_{L^2} on a mesh
/// (lumped mass quadrature), one column per su(2) component of psi.
Eigen::MatrixXd functional_weights(const TriMesh& mesh, const MatrixField& psi);
/// Same on the square grid with weight h^2 per node (single component).
Eigen::MatrixXd functional_weights(const SquareGrid& grid, const GridField& psi);

double apply_functional(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& theta);

struct CredibleInterval {
    double center = 0.0;
    double radius = 0.0;
};
/// Smallest symmetric interval around the series mean with empirical mass
/// at least 1 - xi.
CredibleInterval credible_interval(const std::vector<double>& series, double xi);

struct BvmReport {
    double empirical_sd = 0.0;  // sd of sqrt(N) (v - mean)
    double theory_sd = 0.0;
    double ratio = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double ad_p_value = 0.0;  // Anderson-Darling normality, case 3
};
BvmReport bvm_diagnostic(const std::vector<double>& series, std::size_t N,
                         double sigma_sq_theory);

/// Anderson-Darling normality test with estimated mean and variance
/// (case 3), returning an approximate p-value.
double anderson_darling_pvalue(const std::vector<double>& series);

struct CoverageReplication {
    std::uint64_t seed = 0;
    double truth_value = 0.0;
    CredibleInterval interval;
    bool covered = false;
    bool failed = false;
    std::string failure;
};

struct CoverageResult {
    std::vector<CoverageReplication> replications;
    int covering = 0;
    int completed = 0;
    int failed = 0;
    double fraction = 0.0;
    double binomial_se = 0.0;
};

/// Runs M independent replications; the callback performs dataset
/// generation, chain run, and interval construction for one seed, throwing
/// on failure. Failures are logged and excluded from the fraction.
CoverageResult coverage_experiment(
    const std::function<CoverageReplication(std::uint64_t seed)>& replicate, int M,
    std::uint64_t base_seed);

}  // namespace diskuq
