#include "diskuq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "diskuq/presets.hpp"
#include "diskuq/rng.hpp"
#include "diskuq/xray_linear.hpp"
#include "diskuq/zernike.hpp"

namespace diskuq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// configuration plumbing

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["model"] = c.model;
    j["truth"] = c.truth;
    j["n_observations"] = c.n_observations;
    j["sigma"] = c.sigma;
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["prior"] = {{"nu", c.prior.nu},
                  {"length_scale", c.prior.length_scale},
                  {"amplitude", c.prior.amplitude},
                  {"jitter", c.prior.jitter},
                  {"rescale", c.prior_rescale}};
    j["chain"] = {{"n_steps", c.chain.n_steps}, {"burn_in", c.chain.burn_in},
                  {"thinning", c.chain.thinning}, {"beta", c.chain.beta},
                  {"adapt_beta", c.chain.adapt_beta}};
    j["init"] = c.init;
    j["tracked"] = c.tracked;
    j["mesh_rings"] = c.mesh_rings;
    j["ode_h"] = c.ode_h;
    j["schrodinger_n"] = c.schrodinger_n;
    j["variance"] = {{"max_degree", c.variance_max_degree},
                     {"n_phi", c.variance_n_phi},
                     {"n_vphi", c.variance_n_vphi},
                     {"ode_h", c.variance_ode_h},
                     {"tol", c.variance_tol}};
    j["coverage"] = {{"m", c.coverage_m},
                     {"xi", c.coverage_xi},
                     {"n", c.coverage_n},
                     {"chain_steps", c.coverage_chain_steps},
                     {"mesh_rings", c.coverage_mesh_rings}};
    j["credible_xi"] = c.credible_xi;
    return j;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    ExperimentConfig c;
    try {
        maybe(j, "model", c.model);
        maybe(j, "truth", c.truth);
        maybe(j, "n_observations", c.n_observations);
        maybe(j, "sigma", c.sigma);
        maybe(j, "seed", c.seed);
        maybe(j, "output_dir", c.output_dir);
        if (j.contains("prior")) {
            const json& p = j["prior"];
            maybe(p, "nu", c.prior.nu);
            maybe(p, "length_scale", c.prior.length_scale);
            maybe(p, "amplitude", c.prior.amplitude);
            maybe(p, "jitter", c.prior.jitter);
            maybe(p, "rescale", c.prior_rescale);
        }
        if (j.contains("chain")) {
            const json& p = j["chain"];
            maybe(p, "n_steps", c.chain.n_steps);
            maybe(p, "burn_in", c.chain.burn_in);
            maybe(p, "thinning", c.chain.thinning);
            maybe(p, "beta", c.chain.beta);
            maybe(p, "adapt_beta", c.chain.adapt_beta);
        }
        maybe(j, "init", c.init);
        if (j.contains("tracked")) c.tracked = j["tracked"].get<std::vector<std::string>>();
        maybe(j, "mesh_rings", c.mesh_rings);
        maybe(j, "ode_h", c.ode_h);
        maybe(j, "schrodinger_n", c.schrodinger_n);
        if (j.contains("variance")) {
            const json& p = j["variance"];
            maybe(p, "max_degree", c.variance_max_degree);
            maybe(p, "n_phi", c.variance_n_phi);
            maybe(p, "n_vphi", c.variance_n_vphi);
            maybe(p, "ode_h", c.variance_ode_h);
            maybe(p, "tol", c.variance_tol);
        }
        if (j.contains("coverage")) {
            const json& p = j["coverage"];
            maybe(p, "m", c.coverage_m);
            maybe(p, "xi", c.coverage_xi);
            maybe(p, "n", c.coverage_n);
            maybe(p, "chain_steps", c.coverage_chain_steps);
            maybe(p, "mesh_rings", c.coverage_mesh_rings);
        }
        maybe(j, "credible_xi", c.credible_xi);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config field error: ") + e.what());
    }
    validate_config(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config file not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_canonical_json(const ExperimentConfig& cfg) {
    return config_to_json(cfg).dump(2);
}

std::string config_hash(const ExperimentConfig& cfg) {
    // FNV-1a over the canonical dump
    const std::string s = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
    if (cfg.model != "xray" && cfg.model != "schrodinger")
        fail("model must be 'xray' or 'schrodinger'");
    if (cfg.n_observations == 0) fail("n_observations must be positive");
    if (cfg.sigma <= 0.0) fail("sigma must be positive");
    if (cfg.prior.nu <= 0 || cfg.prior.length_scale <= 0 || cfg.prior.amplitude <= 0)
        fail("prior parameters must be positive");
    if (cfg.chain.n_steps <= cfg.chain.burn_in) fail("chain n_steps must exceed burn_in");
    if (cfg.chain.thinning < 1) fail("chain thinning must be >= 1");
    if (cfg.chain.beta <= 0 || cfg.chain.beta > 1) fail("chain beta must lie in (0,1]");
    if (cfg.init != "truth" && cfg.init != "prior_draw" && cfg.init != "zero")
        fail("init must be truth, prior_draw, or zero");
    if (cfg.tracked.empty()) fail("at least one tracked functional required");
    if (cfg.mesh_rings < 2) fail("mesh_rings must be >= 2");
    if (cfg.ode_h <= 0) fail("ode_h must be positive");
    if (cfg.schrodinger_n < 7) fail("schrodinger_n must be >= 7");
    if (cfg.coverage_m < 0) fail("coverage m must be nonnegative");
    if (cfg.coverage_xi <= 0 || cfg.coverage_xi >= 1) fail("coverage xi must lie in (0,1)");
    if (cfg.credible_xi <= 0 || cfg.credible_xi >= 1) fail("credible_xi must lie in (0,1)");
    if (cfg.model == "xray") {
        if (cfg.truth != "phi") fail("unknown x-ray truth preset: " + cfg.truth);
        for (const auto& t : cfg.tracked)
            if (t != "psi1" && t != "psi2" && t != "psi3")
                fail("unknown x-ray tracked preset: " + t);
    } else {
        if (cfg.truth != "theta0") fail("unknown schrodinger truth preset: " + cfg.truth);
        for (const auto& t : cfg.tracked)
            if (t != "bump1" && t != "bump2")
                fail("unknown schrodinger tracked preset: " + t);
    }
}

namespace {

// ---------------------------------------------------------------------------
// presets and shared assembly

double square_bump(const Vec2& x, const Vec2& c, double radius, double amp) {
    const double s = (x - c).squaredNorm() / (radius * radius);
    return s < 1.0 ? amp * std::exp(1.0 - 1.0 / (1.0 - s)) : 0.0;
}

double schrodinger_truth_theta(const Vec2& x) {
    return 0.5 * square_bump(x, Vec2(0.45, 0.55), 0.4, 1.0);
}

double schrodinger_tracked(const std::string& tag, const Vec2& x) {
    if (tag == "bump1") return square_bump(x, Vec2(0.5, 0.5), 0.3, 1.0);
    return square_bump(x, Vec2(0.62, 0.38), 0.25, 0.8);
}

MatrixField xray_tracked(const std::string& tag) {
    if (tag == "psi1") return preset_psi(1);
    if (tag == "psi2") return preset_psi(2);
    return preset_psi(3);
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

void write_provenance(const ExperimentConfig& cfg, const std::string& command) {
    json j;
    j["command"] = command;
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.seed;
    j["config"] = json::parse(config_canonical_json(cfg));
    std::ofstream out(fs::path(cfg.output_dir) / (command + "_provenance.json"));
    out << j.dump(2) << '\n';
}

struct SchrodingerDataset {
    std::vector<Vec2> design;
    Eigen::VectorXd values;
    double sigma = 0.0;
    std::string truth_tag;
};

SchrodingerDataset generate_schrodinger_dataset(const ExperimentConfig& cfg,
                                                std::size_t n, std::uint64_t seed) {
    SquareGrid grid{cfg.schrodinger_n};
    GridField theta = grid_from_function(grid, schrodinger_truth_theta);
    auto rng_design = make_rng(seed, 10);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SchrodingerDataset ds;
    ds.sigma = cfg.sigma;
    ds.truth_tag = cfg.truth;
    ds.design.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        ds.design.emplace_back(unif(rng_design), unif(rng_design));
    ds.values = schrodinger_forward(grid, theta, [](const Vec2&) { return 1.0; },
                                    ds.design);
    auto rng_noise = make_rng(seed, 11);
    std::normal_distribution<double> gauss;
    for (Eigen::Index i = 0; i < ds.values.size(); ++i)
        ds.values(i) += cfg.sigma * gauss(rng_noise);
    return ds;
}

void write_schrodinger_dataset(const std::string& path, const SchrodingerDataset& ds) {
    json j;
    j["model"] = "schrodinger";
    j["sigma"] = ds.sigma;
    j["truth_tag"] = ds.truth_tag;
    json design = json::array();
    json values = json::array();
    for (std::size_t i = 0; i < ds.design.size(); ++i) {
        design.push_back({ds.design[i].x(), ds.design[i].y()});
        values.push_back(ds.values(static_cast<Eigen::Index>(i)));
    }
    j["design"] = design;
    j["values"] = values;
    std::ofstream out(path);
    out << j.dump(2) << '\n';
}

SchrodingerDataset read_schrodinger_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("dataset not found: " + path);
    json j = json::parse(in);
    SchrodingerDataset ds;
    ds.sigma = j.at("sigma").get<double>();
    ds.truth_tag = j.value("truth_tag", "");
    for (const auto& p : j.at("design"))
        ds.design.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    const auto& vals = j.at("values");
    ds.values.resize(static_cast<Eigen::Index>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i)
        ds.values(static_cast<Eigen::Index>(i)) = vals[i].get<double>();
    return ds;
}

std::string dataset_path(const ExperimentConfig& cfg) {
    return (fs::path(cfg.output_dir) / "dataset.json").string();
}

struct SampleArtifacts {
    ChainRecord record;
    std::vector<std::string> tracked_names;
    std::size_t n_observations = 0;
};

void write_series_csv(const std::string& path, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& series) {
    std::ofstream out(path);
    out.precision(17);
    for (std::size_t j = 0; j < names.size(); ++j)
        out << names[j] << (j + 1 < names.size() ? ',' : '\n');
    if (series.empty()) return;
    for (std::size_t i = 0; i < series[0].size(); ++i) {
        for (std::size_t j = 0; j < series.size(); ++j)
            out << series[j][i] << (j + 1 < series.size() ? ',' : '\n');
    }
}

void write_histogram_csv(const std::string& path, const std::vector<double>& series,
                         int bins = 50) {
    const auto [lo_it, hi_it] = std::minmax_element(series.begin(), series.end());
    const double lo = *lo_it, hi = *hi_it;
    const double width = (hi > lo) ? (hi - lo) / bins : 1.0;
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    for (double v : series) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }
    std::ofstream out(path);
    out.precision(17);
    out << "bin_left,bin_right,count\n";
    for (int b = 0; b < bins; ++b)
        out << lo + b * width << ',' << lo + (b + 1) * width << ','
            << counts[static_cast<std::size_t>(b)] << '\n';
}

void write_summary(const ExperimentConfig& cfg, const SampleArtifacts& art) {
    json j;
    j["acceptance_rate"] = art.record.acceptance_rate;
    j["beta_final"] = art.record.beta_final;
    j["burn_in"] = art.record.burn_in;
    j["thinning"] = art.record.thinning;
    j["seed"] = art.record.seed;
    j["n_observations"] = art.n_observations;
    json f = json::array();
    for (std::size_t k = 0; k < art.tracked_names.size(); ++k) {
        const auto& s = art.record.tracked[k];
        double mean = 0.0;
        for (double v : s) mean += v;
        mean /= static_cast<double>(s.size());
        double var = 0.0;
        for (double v : s) var += (v - mean) * (v - mean);
        var /= static_cast<double>(s.size() - 1);
        CredibleInterval ci = credible_interval(s, cfg.credible_xi);
        f.push_back({{"name", art.tracked_names[k]},
                     {"mean", mean},
                     {"sd", std::sqrt(var)},
                     {"credible_xi", cfg.credible_xi},
                     {"credible_center", ci.center},
                     {"credible_radius", ci.radius},
                     {"samples", s.size()}});
    }
    j["functionals"] = f;
    std::ofstream out(fs::path(cfg.output_dir) / "summary.json");
    out << j.dump(2) << '\n';
}

void write_mean_field_csv(const std::string& path, const Eigen::MatrixXd& mean) {
    std::ofstream out(path);
    out.precision(17);
    out << "node";
    for (Eigen::Index c = 0; c < mean.cols(); ++c) out << ",component_" << c;
    out << '\n';
    for (Eigen::Index i = 0; i < mean.rows(); ++i) {
        out << i;
        for (Eigen::Index c = 0; c < mean.cols(); ++c) out << ',' << mean(i, c);
        out << '\n';
    }
}

Eigen::MatrixXd xray_truth_theta(const TriMesh& mesh) {
    MatrixField phi = preset_phi();
    Eigen::MatrixXd theta(static_cast<int>(mesh.vertices.size()), 3);
    for (int k = 0; k < 3; ++k)
        theta.col(k) = nodal_values(mesh, *phi.components[static_cast<std::size_t>(k)]);
    return theta;
}

Eigen::MatrixXd grid_theta(const SquareGrid& grid, const GridField& f) {
    Eigen::MatrixXd theta(grid.full() * grid.full(), 1);
    Eigen::Index p = 0;
    for (int i = 0; i < grid.full(); ++i)
        for (int j = 0; j < grid.full(); ++j) theta(p++, 0) = f(i, j);
    return theta;
}

/// Shared chain construction for sample and coverage runs.
SampleArtifacts run_xray_chain(const ExperimentConfig& cfg,
                               const ScatteringDataset& ds, int mesh_rings,
                               const ChainConfig& chain_cfg,
                               const std::string& checkpoint_path) {
    auto mesh = disk_mesh(mesh_rings);
    XRayMCModel model(mesh, ds.beams, cfg.ode_h);
    auto prior = std::make_shared<MaternSampler>(mesh->vertices, cfg.prior);
    const double scale =
        cfg.prior_rescale
            ? rescale_factor(ds.beams.size(), alpha_from_matern(cfg.prior),
                             InverseProblem::xray)
            : 1.0;

    Eigen::MatrixXd init;
    if (cfg.init == "truth") {
        init = xray_truth_theta(*mesh);
    } else if (cfg.init == "zero") {
        init = Eigen::MatrixXd::Zero(model.nodes(), 3);
    } else {
        auto rng = make_rng(chain_cfg.seed, 2);
        init.resize(model.nodes(), 3);
        for (int c = 0; c < 3; ++c) init.col(c) = scale * prior->draw(rng);
    }

    std::vector<Eigen::MatrixXd> weights;
    for (const auto& tag : cfg.tracked)
        weights.push_back(functional_weights(*mesh, xray_tracked(tag)));

    PcnChain chain(model, flatten_matrices(ds.measurements), ds.noise_sigma, prior,
                   scale, chain_cfg, init, weights);
    if (!checkpoint_path.empty() && fs::exists(checkpoint_path)) {
        std::ifstream in(checkpoint_path);
        chain.load_checkpoint(in);
    }
    while (chain.step() < chain_cfg.n_steps) {
        chain.advance(2000);
        if (!checkpoint_path.empty()) {
            std::ofstream out(checkpoint_path + ".tmp");
            chain.save_checkpoint(out);
            out.close();
            fs::rename(checkpoint_path + ".tmp", checkpoint_path);
        }
    }
    SampleArtifacts art;
    art.record = chain.record();
    art.tracked_names = cfg.tracked;
    art.n_observations = ds.beams.size();
    return art;
}

SampleArtifacts run_schrodinger_chain(const ExperimentConfig& cfg,
                                      const SchrodingerDataset& ds,
                                      const ChainConfig& chain_cfg,
                                      const std::string& checkpoint_path) {
    SquareGrid grid{cfg.schrodinger_n};
    std::vector<Vec2> nodes;
    nodes.reserve(static_cast<std::size_t>(grid.full()) * grid.full());
    for (int i = 0; i < grid.full(); ++i)
        for (int j = 0; j < grid.full(); ++j) nodes.push_back(grid.point(i, j));
    SchrodingerMCModel model(grid, [](const Vec2&) { return 1.0; }, ds.design);
    auto prior = std::make_shared<MaternSampler>(nodes, cfg.prior);
    const double scale =
        cfg.prior_rescale
            ? rescale_factor(ds.design.size(), alpha_from_matern(cfg.prior),
                             InverseProblem::schrodinger)
            : 1.0;

    GridField truth = grid_from_function(grid, schrodinger_truth_theta);
    Eigen::MatrixXd init;
    if (cfg.init == "truth") {
        init = grid_theta(grid, truth);
    } else if (cfg.init == "zero") {
        init = Eigen::MatrixXd::Zero(model.nodes(), 1);
    } else {
        auto rng = make_rng(chain_cfg.seed, 2);
        init = scale * prior->draw(rng);
    }

    std::vector<Eigen::MatrixXd> weights;
    for (const auto& tag : cfg.tracked) {
        GridField psi = grid_from_function(
            grid, [&tag](const Vec2& x) { return schrodinger_tracked(tag, x); });
        weights.push_back(functional_weights(grid, psi));
    }

    PcnChain chain(model, ds.values, ds.sigma, prior, scale, chain_cfg, init, weights);
    if (!checkpoint_path.empty() && fs::exists(checkpoint_path)) {
        std::ifstream in(checkpoint_path);
        chain.load_checkpoint(in);
    }
    while (chain.step() < chain_cfg.n_steps) {
        chain.advance(2000);
        if (!checkpoint_path.empty()) {
            std::ofstream out(checkpoint_path + ".tmp");
            chain.save_checkpoint(out);
            out.close();
            fs::rename(checkpoint_path + ".tmp", checkpoint_path);
        }
    }
    SampleArtifacts art;
    art.record = chain.record();
    art.tracked_names = cfg.tracked;
    art.n_observations = ds.design.size();
    return art;
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ensure_dir(cfg.output_dir);
    if (cfg.model == "xray") {
        OdeOptions opts;
        opts.h_max = cfg.ode_h;
        ScatteringDataset ds = generate_dataset(preset_phi(), cfg.n_observations,
                                                cfg.sigma, cfg.seed, opts);
        ds.truth_tag = cfg.truth;
        std::ofstream out(dataset_path(cfg));
        write_dataset_json(out, ds);
    } else {
        SchrodingerDataset ds =
            generate_schrodinger_dataset(cfg, cfg.n_observations, cfg.seed);
        write_schrodinger_dataset(dataset_path(cfg), ds);
    }
    write_provenance(cfg, "simulate");
    return 0;
}

int cmd_sample(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ensure_dir(cfg.output_dir);
    ChainConfig chain_cfg = cfg.chain;
    chain_cfg.seed = cfg.seed;
    const std::string checkpoint = (fs::path(cfg.output_dir) / "checkpoint.txt").string();

    SampleArtifacts art;
    if (cfg.model == "xray") {
        std::ifstream in(dataset_path(cfg));
        if (!in) throw std::runtime_error("dataset not found; run simulate first");
        ScatteringDataset ds = read_dataset_json(in);
        art = run_xray_chain(cfg, ds, cfg.mesh_rings, chain_cfg, checkpoint);
    } else {
        SchrodingerDataset ds = read_schrodinger_dataset(dataset_path(cfg));
        art = run_schrodinger_chain(cfg, ds, chain_cfg, checkpoint);
    }

    write_series_csv((fs::path(cfg.output_dir) / "tracked.csv").string(),
                     art.tracked_names, art.record.tracked);
    write_mean_field_csv((fs::path(cfg.output_dir) / "mean_field.csv").string(),
                         art.record.mean_field);
    if (cfg.model == "schrodinger") {
        SquareGrid grid{cfg.schrodinger_n};
        GridField mean(grid.full(), grid.full());
        Eigen::Index p = 0;
        for (int i = 0; i < grid.full(); ++i)
            for (int j = 0; j < grid.full(); ++j) mean(i, j) = art.record.mean_field(p++, 0);
        std::ofstream gout(fs::path(cfg.output_dir) / "mean_field_grid.csv");
        write_grid_csv(gout, mean);
    }
    for (std::size_t k = 0; k < art.tracked_names.size(); ++k)
        write_histogram_csv((fs::path(cfg.output_dir) /
                             ("histogram_" + art.tracked_names[k] + ".csv"))
                                .string(),
                            art.record.tracked[k]);
    write_summary(cfg, art);
    write_provenance(cfg, "sample");
    return 0;
}

int cmd_variance(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ensure_dir(cfg.output_dir);
    std::ofstream out(fs::path(cfg.output_dir) / "variance.csv");
    out.precision(17);
    if (cfg.model == "xray") {
        OdeOptions opts;
        opts.h_max = cfg.variance_ode_h;
        BoundaryGrid grid;
        grid.n_phi = cfg.variance_n_phi;
        grid.n_vphi = cfg.variance_n_vphi;
        SpectralCalibration cal = calibrate_N0(cfg.variance_max_degree, grid, opts);
        NormalGalerkin op(preset_phi(), cfg.variance_max_degree, grid, opts, 3);
        out << "functional,sigma_sq,iterations,residual,max_degree,n_phi,n_vphi,ode_h\n";
        for (const auto& tag : cfg.tracked) {
            InvertResult res = invert_normal(op, cal, xray_tracked(tag),
                                             cfg.variance_tol);
            if (res.residual > cfg.variance_tol)
                throw std::runtime_error("variance: inversion did not converge for " + tag);
            out << tag << ',' << res.variance << ',' << res.iterations << ','
                << res.residual << ',' << cfg.variance_max_degree << ','
                << cfg.variance_n_phi << ',' << cfg.variance_n_vphi << ','
                << cfg.variance_ode_h << '\n';
        }
    } else {
        SquareGrid grid{cfg.schrodinger_n};
        GridField theta0 = grid_from_function(grid, schrodinger_truth_theta);
        out << "functional,sigma_sq,boundary_residual,grid_n,h\n";
        for (const auto& tag : cfg.tracked) {
            GridField psi = grid_from_function(
                grid, [&tag](const Vec2& x) { return schrodinger_tracked(tag, x); });
            SchrodingerVariance v = variance_schrodinger(grid, theta0, psi,
                                                         [](const Vec2&) { return 1.0; });
            out << tag << ',' << v.value << ',' << v.boundary_residual << ','
                << grid.n << ',' << grid.h() << '\n';
        }
    }
    write_provenance(cfg, "variance");
    return 0;
}

int cmd_coverage(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.coverage_m < 20)
        throw std::invalid_argument("config: coverage m must be >= 20");
    ensure_dir(cfg.output_dir);

    ChainConfig chain_cfg = cfg.chain;
    chain_cfg.n_steps = cfg.coverage_chain_steps;
    chain_cfg.burn_in = std::min(cfg.chain.burn_in, cfg.coverage_chain_steps / 4);

    ExperimentConfig rep_cfg = cfg;
    rep_cfg.tracked = {cfg.tracked.front()};
    rep_cfg.init = "truth";

    auto replicate = [&](std::uint64_t seed) {
        CoverageReplication rep;
        ChainConfig cc = chain_cfg;
        cc.seed = seed;
        if (cfg.model == "xray") {
            OdeOptions opts;
            opts.h_max = cfg.ode_h;
            ScatteringDataset ds =
                generate_dataset(preset_phi(), cfg.coverage_n, cfg.sigma, seed, opts);
            SampleArtifacts art =
                run_xray_chain(rep_cfg, ds, cfg.coverage_mesh_rings, cc, "");
            auto mesh = disk_mesh(cfg.coverage_mesh_rings);
            Eigen::MatrixXd w = functional_weights(*mesh, xray_tracked(rep_cfg.tracked[0]));
            rep.truth_value = apply_functional(w, xray_truth_theta(*mesh));
            rep.interval = credible_interval(art.record.tracked[0], cfg.coverage_xi);
        } else {
            SchrodingerDataset ds = generate_schrodinger_dataset(cfg, cfg.coverage_n, seed);
            SampleArtifacts art = run_schrodinger_chain(rep_cfg, ds, cc, "");
            SquareGrid grid{cfg.schrodinger_n};
            GridField psi = grid_from_function(grid, [&](const Vec2& x) {
                return schrodinger_tracked(rep_cfg.tracked[0], x);
            });
            Eigen::MatrixXd w = functional_weights(grid, psi);
            rep.truth_value = apply_functional(
                w, grid_theta(grid, grid_from_function(grid, schrodinger_truth_theta)));
            rep.interval = credible_interval(art.record.tracked[0], cfg.coverage_xi);
        }
        return rep;
    };

    CoverageResult res = coverage_experiment(replicate, cfg.coverage_m, cfg.seed);

    std::ofstream out(fs::path(cfg.output_dir) / "coverage.csv");
    out.precision(17);
    out << "seed,truth,center,radius,covered,failed,failure\n";
    for (const auto& rep : res.replications)
        out << rep.seed << ',' << rep.truth_value << ',' << rep.interval.center << ','
            << rep.interval.radius << ',' << (rep.covered ? 1 : 0) << ','
            << (rep.failed ? 1 : 0) << ',' << rep.failure << '\n';

    json j;
    j["xi"] = cfg.coverage_xi;
    j["replications"] = cfg.coverage_m;
    j["completed"] = res.completed;
    j["failed"] = res.failed;
    j["covering"] = res.covering;
    j["fraction"] = res.fraction;
    j["binomial_se"] = res.binomial_se;
    std::ofstream sout(fs::path(cfg.output_dir) / "coverage_summary.json");
    sout << j.dump(2) << '\n';
    write_provenance(cfg, "coverage");
    return 0;
}

int cmd_diagnose(const ExperimentConfig& cfg) {
    validate_config(cfg);
    // requires tracked.csv from sample and variance.csv from variance
    std::ifstream tin(fs::path(cfg.output_dir) / "tracked.csv");
    if (!tin) throw std::runtime_error("tracked.csv not found; run sample first");
    std::string header;
    std::getline(tin, header);
    std::vector<std::string> names;
    {
        std::stringstream ss(header);
        std::string tok;
        while (std::getline(ss, tok, ',')) names.push_back(tok);
    }
    std::vector<std::vector<double>> series(names.size());
    std::string line;
    while (std::getline(tin, line)) {
        std::stringstream ss(line);
        std::string tok;
        std::size_t k = 0;
        while (std::getline(ss, tok, ',') && k < names.size())
            series[k++].push_back(std::stod(tok));
    }

    std::ifstream vin(fs::path(cfg.output_dir) / "variance.csv");
    if (!vin) throw std::runtime_error("variance.csv not found; run variance first");
    std::getline(vin, line);  // header
    std::map<std::string, double> sigma_sq;
    while (std::getline(vin, line)) {
        std::stringstream ss(line);
        std::string name, val;
        std::getline(ss, name, ',');
        std::getline(ss, val, ',');
        sigma_sq[name] = std::stod(val);
    }

    json j = json::array();
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (!sigma_sq.count(names[k]))
            throw std::runtime_error("variance entry missing for " + names[k]);
        // asymptotic variance of sqrt(N) <theta - mean, psi> is
        // sigma_noise^2 * sigma_sq_psi
        const double theory = cfg.sigma * cfg.sigma * sigma_sq[names[k]];
        BvmReport rep = bvm_diagnostic(series[k], cfg.n_observations, theory);
        j.push_back({{"name", names[k]},
                     {"empirical_sd", rep.empirical_sd},
                     {"theory_sd", rep.theory_sd},
                     {"ratio", rep.ratio},
                     {"skewness", rep.skewness},
                     {"excess_kurtosis", rep.excess_kurtosis},
                     {"ad_p_value", rep.ad_p_value}});
    }
    std::ofstream out(fs::path(cfg.output_dir) / "diagnostics.json");
    out << json({{"functionals", j}}).dump(2) << '\n';
    write_provenance(cfg, "diagnose");
    return 0;
}

}  // namespace diskuq
