#include "diskuq/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "diskuq/rng.hpp"

namespace diskuq {

Eigen::VectorXd flatten_matrices(const std::vector<MatXc>& mats) {
    std::size_t total = 0;
    for (const auto& m : mats) total += 2 * static_cast<std::size_t>(m.size());
    Eigen::VectorXd out(static_cast<Eigen::Index>(total));
    Eigen::Index p = 0;
    for (const auto& m : mats) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                out(p++) = m(r, c).real();
                out(p++) = m(r, c).imag();
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// X-ray model: quaternion transport along precomputed chord stencils.
// A unitary w Id - i (x . sigma) is the quaternion (w, x); products follow
// quaternion multiplication and the inverse is the conjugate.

namespace {

struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
};

inline Quat quat_mul(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y + a.y * b.w + a.z * b.x - a.x * b.z,
            a.w * b.z + a.z * b.w + a.x * b.y - a.y * b.x};
}

/// exp(-dt * Phi) for Phi = sum_k c_k (i sigma_k / sqrt(2)) as a quaternion.
inline Quat quat_exp_step(double c1, double c2, double c3, double dt) {
    const double norm = std::sqrt(c1 * c1 + c2 * c2 + c3 * c3);
    const double t = dt * norm / std::sqrt(2.0);
    // f = sin(t)/norm, with the small-angle limit dt/sqrt(2)
    const double f = t < 1e-8 ? dt / std::sqrt(2.0) * (1.0 - t * t / 6.0)
                              : std::sin(t) / norm;
    return {std::cos(t), f * c1, f * c2, f * c3};
}

}  // namespace

XRayMCModel::XRayMCModel(std::shared_ptr<const TriMesh> mesh,
                         std::vector<BeamSample> beams, double h_max)
    : mesh_(std::move(mesh)), beams_(std::move(beams)) {
    if (h_max <= 0.0) throw std::invalid_argument("XRayMCModel: h_max must be positive");
    plans_.reserve(beams_.size());
    for (const auto& beam : beams_) {
        BeamPlan plan;
        plan.n_steps = std::max(1, static_cast<int>(std::ceil(beam.exit_time / h_max)));
        plan.dt = beam.exit_time / plan.n_steps;
        plan.midpoints.reserve(static_cast<std::size_t>(plan.n_steps));
        for (int s = 0; s < plan.n_steps; ++s) {
            const Vec2 mid = point_along(beam, (s + 0.5) * plan.dt);
            plan.midpoints.push_back(mesh_->stencil(mid));
        }
        plans_.push_back(std::move(plan));
    }
}

Eigen::VectorXd XRayMCModel::evaluate(const Eigen::MatrixXd& theta) const {
    if (theta.rows() != nodes() || theta.cols() != 3)
        throw std::invalid_argument("XRayMCModel: theta must be n_nodes x 3");
    Eigen::VectorXd out(static_cast<Eigen::Index>(8 * beams_.size()));
    for (std::size_t b = 0; b < beams_.size(); ++b) {
        const BeamPlan& plan = plans_[b];
        Quat u;  // influx-normalized factor, u(0) = Id
        for (const MeshStencil& st : plan.midpoints) {
            double c[3] = {0.0, 0.0, 0.0};
            if (st.valid()) {
                for (int k = 0; k < 3; ++k)
                    c[k] = st.weight[0] * theta(st.vertex[0], k) +
                           st.weight[1] * theta(st.vertex[1], k) +
                           st.weight[2] * theta(st.vertex[2], k);
            }
            u = quat_mul(quat_exp_step(c[0], c[1], c[2], plan.dt), u);
        }
        // C = u(tau)^{-1} = conjugate quaternion (w, -x, -y, -z); entries:
        // [[w - i z, -y - i x], [y - i x, w + i z]] for quaternion (w,x,y,z).
        const double w = u.w, x = -u.x, y = -u.y, z = -u.z;
        const Eigen::Index p = static_cast<Eigen::Index>(8 * b);
        out(p + 0) = w;
        out(p + 1) = -z;
        out(p + 2) = -y;
        out(p + 3) = -x;
        out(p + 4) = y;
        out(p + 5) = -x;
        out(p + 6) = w;
        out(p + 7) = z;
    }
    return out;
}

SchrodingerMCModel::SchrodingerMCModel(SquareGrid grid,
                                       std::function<double(const Vec2&)> g,
                                       std::vector<Vec2> design_points)
    : grid_(grid), g_(std::move(g)), design_(std::move(design_points)) {}

GridField SchrodingerMCModel::to_grid(const Eigen::MatrixXd& theta) const {
    if (theta.rows() != nodes() || theta.cols() != 1)
        throw std::invalid_argument("SchrodingerMCModel: theta must be (n+2)^2 x 1");
    GridField field(grid_.full(), grid_.full());
    Eigen::Index p = 0;
    for (int i = 0; i < grid_.full(); ++i)
        for (int j = 0; j < grid_.full(); ++j) field(i, j) = theta(p++, 0);
    return field;
}

Eigen::VectorXd SchrodingerMCModel::evaluate(const Eigen::MatrixXd& theta) const {
    return schrodinger_forward(grid_, to_grid(theta), g_, design_);
}

double log_likelihood(const ForwardModel& model, const Eigen::MatrixXd& theta,
                      const Eigen::VectorXd& y, double sigma) {
    if (sigma <= 0.0) throw std::invalid_argument("log_likelihood: sigma must be positive");
    if (!y.allFinite()) throw std::invalid_argument("log_likelihood: non-finite data");
    const Eigen::VectorXd pred = model.evaluate(theta);
    if (pred.size() != y.size())
        throw std::invalid_argument("log_likelihood: data/model size mismatch");
    return -(y - pred).squaredNorm() / (2.0 * sigma * sigma);
}

bool pcn_step(Eigen::MatrixXd& theta, double& log_lik, double beta,
              const std::function<Eigen::MatrixXd()>& prior_draw,
              const std::function<double(const Eigen::MatrixXd&)>& log_lik_fn,
              std::mt19937_64& rng) {
    if (beta <= 0.0 || beta > 1.0)
        throw std::invalid_argument("pcn_step: beta must lie in (0, 1]");
    const Eigen::MatrixXd proposal =
        std::sqrt(1.0 - beta * beta) * theta + beta * prior_draw();
    const double proposal_ll = log_lik_fn(proposal);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (std::log(unif(rng)) < proposal_ll - log_lik) {
        theta = proposal;
        log_lik = proposal_ll;
        return true;
    }
    return false;
}

PcnChain::PcnChain(const ForwardModel& model, Eigen::VectorXd y, double sigma,
                   std::shared_ptr<const MaternSampler> prior, double prior_scale,
                   const ChainConfig& cfg, Eigen::MatrixXd init,
                   std::vector<Eigen::MatrixXd> tracked_weights)
    : model_(model),
      y_(std::move(y)),
      sigma_(sigma),
      prior_(std::move(prior)),
      prior_scale_(prior_scale),
      cfg_(cfg),
      tracked_weights_(std::move(tracked_weights)),
      theta_(std::move(init)),
      rng_(make_rng(cfg.seed, 3)),
      beta_(cfg.beta) {
    if (cfg_.n_steps <= cfg_.burn_in)
        throw std::invalid_argument("PcnChain: n_steps must exceed burn_in");
    if (cfg_.thinning < 1) throw std::invalid_argument("PcnChain: thinning must be >= 1");
    if (prior_->size() != model_.nodes())
        throw std::invalid_argument("PcnChain: prior node count mismatch");
    log_lik_ = log_likelihood(model_, theta_, y_, sigma_);
    tracked_.resize(tracked_weights_.size());
    mean_accum_ = Eigen::MatrixXd::Zero(theta_.rows(), theta_.cols());
}

Eigen::MatrixXd PcnChain::draw_prior() {
    Eigen::MatrixXd xi(model_.nodes(), model_.components());
    for (int c = 0; c < model_.components(); ++c)
        xi.col(c) = prior_scale_ * prior_->draw(rng_);
    return xi;
}

void PcnChain::advance(int n) {
    for (int it = 0; it < n && step_ < cfg_.n_steps; ++it) {
        const bool accepted = pcn_step(
            theta_, log_lik_, beta_, [this] { return draw_prior(); },
            [this](const Eigen::MatrixXd& t) {
                return log_likelihood(model_, t, y_, sigma_);
            },
            rng_);
        ++step_;
        accepted_ += accepted ? 1 : 0;
        window_accepted_ += accepted ? 1 : 0;
        ++window_steps_;

        if (cfg_.adapt_beta && step_ <= cfg_.burn_in && window_steps_ >= 100) {
            const double rate = static_cast<double>(window_accepted_) / window_steps_;
            if (rate < cfg_.target_acc_low) beta_ = std::max(1e-5, beta_ * 0.7);
            if (rate > cfg_.target_acc_high) beta_ = std::min(1.0, beta_ * 1.3);
            window_accepted_ = 0;
            window_steps_ = 0;
        }

        if (step_ > cfg_.burn_in && (step_ - cfg_.burn_in - 1) % cfg_.thinning == 0) {
            for (std::size_t j = 0; j < tracked_weights_.size(); ++j)
                tracked_[j].push_back(apply_functional(tracked_weights_[j], theta_));
            mean_accum_ += theta_;
            ++retained_;
        }
    }
}

void PcnChain::run() { advance(cfg_.n_steps - step_); }

ChainRecord PcnChain::record() const {
    ChainRecord rec;
    rec.tracked = tracked_;
    rec.mean_field = retained_ > 0
                         ? Eigen::MatrixXd(mean_accum_ / static_cast<double>(retained_))
                         : Eigen::MatrixXd::Zero(theta_.rows(), theta_.cols());
    rec.acceptance_rate = step_ > 0 ? static_cast<double>(accepted_) / step_ : 0.0;
    rec.beta_final = beta_;
    rec.burn_in = cfg_.burn_in;
    rec.thinning = cfg_.thinning;
    rec.seed = cfg_.seed;
    return rec;
}

void PcnChain::save_checkpoint(std::ostream& os) const {
    os.precision(17);
    os << "diskuq-chain-v1\n";
    os << step_ << ' ' << accepted_ << ' ' << window_accepted_ << ' ' << window_steps_
       << ' ' << retained_ << ' ' << beta_ << ' ' << log_lik_ << '\n';
    os << theta_.rows() << ' ' << theta_.cols() << '\n';
    for (Eigen::Index i = 0; i < theta_.size(); ++i) os << theta_.data()[i] << ' ';
    os << '\n';
    for (Eigen::Index i = 0; i < mean_accum_.size(); ++i) os << mean_accum_.data()[i] << ' ';
    os << '\n';
    os << tracked_.size() << '\n';
    for (const auto& series : tracked_) {
        os << series.size() << '\n';
        for (double v : series) os << v << ' ';
        os << '\n';
    }
    os << rng_ << '\n';
}

void PcnChain::load_checkpoint(std::istream& is) {
    std::string tag;
    is >> tag;
    if (tag != "diskuq-chain-v1")
        throw std::runtime_error("PcnChain: unrecognized checkpoint format");
    is >> step_ >> accepted_ >> window_accepted_ >> window_steps_ >> retained_ >>
        beta_ >> log_lik_;
    Eigen::Index rows, cols;
    is >> rows >> cols;
    theta_.resize(rows, cols);
    for (Eigen::Index i = 0; i < theta_.size(); ++i) is >> theta_.data()[i];
    mean_accum_.resize(rows, cols);
    for (Eigen::Index i = 0; i < mean_accum_.size(); ++i) is >> mean_accum_.data()[i];
    std::size_t n_tracked;
    is >> n_tracked;
    tracked_.assign(n_tracked, {});
    for (auto& series : tracked_) {
        std::size_t len;
        is >> len;
        series.resize(len);
        for (double& v : series) is >> v;
    }
    is >> rng_;
    if (!is) throw std::runtime_error("PcnChain: truncated checkpoint");
}

Eigen::MatrixXd functional_weights(const TriMesh& mesh, const MatrixField& psi) {
    const auto& mass = mesh.lumped_mass();
    const int n = static_cast<int>(mesh.vertices.size());
    Eigen::MatrixXd w(n, 3);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < 3; ++k)
            w(i, k) = mass(i) * psi.components[static_cast<std::size_t>(k)]->eval(
                                    mesh.vertices[static_cast<std::size_t>(i)]);
    return w;
}

Eigen::MatrixXd functional_weights(const SquareGrid& grid, const GridField& psi) {
    const double h2 = grid.h() * grid.h();
    Eigen::MatrixXd w(grid.full() * grid.full(), 1);
    Eigen::Index p = 0;
    for (int i = 0; i < grid.full(); ++i)
        for (int j = 0; j < grid.full(); ++j) w(p++, 0) = h2 * psi(i, j);
    return w;
}

double apply_functional(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& theta) {
    return (weights.array() * theta.array()).sum();
}

CredibleInterval credible_interval(const std::vector<double>& series, double xi) {
    if (series.empty()) throw std::invalid_argument("credible_interval: empty series");
    if (xi <= 0.0 || xi >= 1.0)
        throw std::invalid_argument("credible_interval: xi must lie in (0,1)");
    CredibleInterval ci;
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    ci.center = mean;
    std::vector<double> dev(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) dev[i] = std::abs(series[i] - mean);
    std::sort(dev.begin(), dev.end());
    const std::size_t need = static_cast<std::size_t>(
        std::ceil((1.0 - xi) * static_cast<double>(series.size())));
    ci.radius = need == 0 ? 0.0 : dev[std::min(need, dev.size()) - 1];
    return ci;
}

double anderson_darling_pvalue(const std::vector<double>& series) {
    const std::size_t n = series.size();
    if (n < 8) throw std::invalid_argument("anderson_darling_pvalue: need >= 8 samples");
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : series) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    if (sd == 0.0) return 0.0;

    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i)
        z[i] = 0.5 * std::erfc(-(series[i] - mean) / (sd * std::sqrt(2.0)));
    std::sort(z.begin(), z.end());

    double a_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double zi = std::clamp(z[i], 1e-300, 1.0 - 1e-16);
        const double zr = std::clamp(z[n - 1 - i], 1e-300, 1.0 - 1e-16);
        a_sq += (2.0 * static_cast<double>(i) + 1.0) *
                (std::log(zi) + std::log1p(-zr));
    }
    a_sq = -static_cast<double>(n) - a_sq / static_cast<double>(n);
    // small-sample correction for estimated mean and variance
    const double nn = static_cast<double>(n);
    const double a_star = a_sq * (1.0 + 0.75 / nn + 2.25 / (nn * nn));

    if (a_star < 0.2)
        return 1.0 - std::exp(-13.436 + 101.14 * a_star - 223.73 * a_star * a_star);
    if (a_star < 0.34)
        return 1.0 - std::exp(-8.318 + 42.796 * a_star - 59.938 * a_star * a_star);
    if (a_star < 0.6)
        return std::exp(0.9177 - 4.279 * a_star - 1.38 * a_star * a_star);
    return std::exp(1.2937 - 5.709 * a_star + 0.0186 * a_star * a_star);
}

BvmReport bvm_diagnostic(const std::vector<double>& series, std::size_t N,
                         double sigma_sq_theory) {
    if (series.size() < 8)
        throw std::invalid_argument("bvm_diagnostic: series too short");
    BvmReport rep;
    const double n = static_cast<double>(series.size());
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : series) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    rep.empirical_sd = std::sqrt(static_cast<double>(N) * m2 * n / (n - 1.0));
    rep.theory_sd = std::sqrt(sigma_sq_theory);
    rep.ratio = rep.theory_sd > 0.0 ? rep.empirical_sd / rep.theory_sd : 0.0;
    rep.skewness = m3 / std::pow(m2, 1.5);
    rep.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    rep.ad_p_value = anderson_darling_pvalue(series);
    return rep;
}

CoverageResult coverage_experiment(
    const std::function<CoverageReplication(std::uint64_t seed)>& replicate, int M,
    std::uint64_t base_seed) {
    if (M < 20) throw std::invalid_argument("coverage_experiment: need M >= 20");
    CoverageResult res;
    res.replications.reserve(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(m) * 1000003ULL;
        CoverageReplication rep;
        try {
            rep = replicate(seed);
            rep.seed = seed;
            rep.covered =
                std::abs(rep.truth_value - rep.interval.center) <= rep.interval.radius;
        } catch (const std::exception& e) {
            rep.seed = seed;
            rep.failed = true;
            rep.failure = e.what();
        }
        if (rep.failed) {
            ++res.failed;
        } else {
            ++res.completed;
            res.covering += rep.covered ? 1 : 0;
        }
        res.replications.push_back(std::move(rep));
    }
    if (res.completed > 0) {
        res.fraction = static_cast<double>(res.covering) / res.completed;
        res.binomial_se =
            std::sqrt(std::max(res.fraction * (1.0 - res.fraction), 1e-12) /
                      res.completed);
    }
    return res;
}

}  // namespace diskuq
