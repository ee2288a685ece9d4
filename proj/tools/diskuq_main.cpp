// Command-line front end: simulate | sample | variance | coverage | diagnose.
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <CLI11.hpp>
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "diskuq/experiment.hpp"

namespace {

struct SubArgs {
    std::string config_path;
    std::int64_t seed = -1;  // -1: keep the config's seed
};

void add_common(CLI::App* sub, SubArgs& args) {
    sub->add_option("--config", args.config_path, "Path to the JSON configuration")
        ->required();
    sub->add_option("--seed", args.seed, "Override the config seed");
}

int dispatch(const std::string& name, const SubArgs& args) {
    diskuq::ExperimentConfig cfg = diskuq::load_config(args.config_path);
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (name == "simulate") return diskuq::cmd_simulate(cfg);
    if (name == "sample") return diskuq::cmd_sample(cfg);
    if (name == "variance") return diskuq::cmd_variance(cfg);
    if (name == "coverage") return diskuq::cmd_coverage(cfg);
    return diskuq::cmd_diagnose(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian uncertainty quantification for disk scattering and "
                 "Schrodinger boundary data"};
    app.require_subcommand(1);

    const char* names[] = {"simulate", "sample", "variance", "coverage", "diagnose"};
    const char* descs[] = {
        "Generate a synthetic dataset from the truth preset",
        "Run the pCN posterior chain and write summaries",
        "Compute asymptotic variances of the tracked functionals",
        "Run a frequentist coverage study of credible intervals",
        "Compare posterior spread against the asymptotic theory"};
    SubArgs args[5];
    for (int i = 0; i < 5; ++i) add_common(app.add_subcommand(names[i], descs[i]), args[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    for (int i = 0; i < 5; ++i) {
        if (!app.get_subcommands().empty() &&
            app.get_subcommands()[0]->get_name() == names[i]) {
            try {
                return dispatch(names[i], args[i]);
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 1;
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << '\n';
                return 2;
            }
        }
    }
    return 1;
}
