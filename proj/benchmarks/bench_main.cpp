#include <benchmark/benchmark.h>

#include <memory>

#include "diskuq/geometry.hpp"
#include "diskuq/lie.hpp"
#include "diskuq/mcmc.hpp"
#include "diskuq/presets.hpp"
#include "diskuq/rng.hpp"
#include "diskuq/schrodinger.hpp"
#include "diskuq/xray_forward.hpp"
#include "diskuq/zernike.hpp"

namespace {

void BM_sample_beams(benchmark::State& state) {
    for (auto _ : state) {
        auto beams = diskuq::sample_beams(static_cast<std::size_t>(state.range(0)), 1);
        benchmark::DoNotOptimize(beams);
    }
}
BENCHMARK(BM_sample_beams)->Arg(1000)->Arg(100000);

void BM_expm_su2(benchmark::State& state) {
    auto rng = diskuq::make_rng(2);
    std::normal_distribution<double> gauss;
    diskuq::Mat2c a = diskuq::Mat2c::Zero();
    for (const auto& b : diskuq::su2_basis()) a += gauss(rng) * b;
    for (auto _ : state) {
        auto u = diskuq::expm(diskuq::MatXc(a));
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_expm_su2);

void BM_forward_map(benchmark::State& state) {
    diskuq::MatrixField phi = diskuq::preset_phi();
    auto beams = diskuq::sample_beams(static_cast<std::size_t>(state.range(0)), 3);
    diskuq::OdeOptions opts;
    opts.h_max = 0.05;
    for (auto _ : state) {
        auto data = diskuq::forward_map(phi, beams, opts);
        benchmark::DoNotOptimize(data);
    }
}
BENCHMARK(BM_forward_map)->Arg(100)->Arg(600);

void BM_normal_galerkin_assembly(benchmark::State& state) {
    diskuq::MatrixField phi = diskuq::preset_phi();
    diskuq::BoundaryGrid grid;
    grid.n_phi = 48;
    grid.n_vphi = 24;
    diskuq::OdeOptions opts;
    opts.h_max = 0.05;
    const int deg = static_cast<int>(state.range(0));
    for (auto _ : state) {
        diskuq::NormalGalerkin op(phi, deg, grid, opts, 3);
        benchmark::DoNotOptimize(op.matrix());
    }
}
BENCHMARK(BM_normal_galerkin_assembly)->Arg(4)->Arg(8);

void BM_schrodinger_solve(benchmark::State& state) {
    diskuq::SquareGrid grid{static_cast<int>(state.range(0))};
    diskuq::GridField f = diskuq::grid_from_function(
        grid, [](const diskuq::Vec2& x) { return 1.0 + 0.5 * x.squaredNorm(); });
    auto g_one = [](const diskuq::Vec2&) { return 1.0; };
    for (auto _ : state) {
        auto u = diskuq::solve_dirichlet(grid, f, g_one);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_schrodinger_solve)->Arg(63)->Arg(127);

void BM_pcn_chain_step(benchmark::State& state) {
    auto mesh = diskuq::disk_mesh(9);
    diskuq::OdeOptions opts;
    opts.h_max = 0.05;
    diskuq::ScatteringDataset ds =
        diskuq::generate_dataset(diskuq::preset_phi(), 300, 0.1, 17, opts);
    diskuq::XRayMCModel model(mesh, ds.beams, 0.05);
    diskuq::MaternConfig mcfg;
    auto prior = std::make_shared<diskuq::MaternSampler>(mesh->vertices, mcfg);

    diskuq::ChainConfig cfg;
    cfg.n_steps = 1 << 30;  // driven by the benchmark loop, not the config
    cfg.burn_in = 0;
    cfg.beta = 0.05;
    cfg.adapt_beta = false;
    cfg.seed = 11;
    diskuq::PcnChain chain(model, diskuq::flatten_matrices(ds.measurements),
                           ds.noise_sigma, prior, 1.0, cfg,
                           Eigen::MatrixXd::Zero(model.nodes(), 3), {});
    for (auto _ : state) chain.advance(1);
}
BENCHMARK(BM_pcn_chain_step);

}  // namespace

BENCHMARK_MAIN();
