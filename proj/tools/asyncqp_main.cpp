#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asyncqp/experiment.hpp"
#include "asyncqp/types.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

asyncqp::ExperimentConfig load(const std::string& config_path,
                               const std::optional<std::uint64_t>& seed) {
    asyncqp::ExperimentConfig config = asyncqp::load_config(config_path);
    if (seed) config.override_seeds(*seed);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Totally asynchronous block-gradient quadratic programming"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string generate_out = "problem.json";
    std::string run_out;
    std::string plot_out = "convergence.svg";
    std::vector<std::string> trace_paths;
    std::optional<double> epsilon;

    auto* generate = app.add_subcommand("generate", "Generate a problem file");
    generate->add_option("--config", config_path, "Experiment config")->required();
    generate->add_option("--seed", seed, "Override all component seeds");
    generate->add_option("--out", generate_out, "Problem file to write");

    auto* plan = app.add_subcommand("plan", "Print stepsize/regularization intervals");
    plan->add_option("--config", config_path, "Experiment config")->required();
    plan->add_option("--seed", seed, "Override all component seeds");

    auto* run = app.add_subcommand("run", "Run the asynchronous simulation");
    run->add_option("--config", config_path, "Experiment config")->required();
    run->add_option("--seed", seed, "Override all component seeds");
    run->add_option("--out", run_out, "Trace CSV path (overrides config)");

    auto* plot = app.add_subcommand("plot", "Render trace CSVs as an SVG");
    plot->add_option("traces", trace_paths, "Trace CSV files")->required()->expected(-1);
    plot->add_option("--epsilon", epsilon, "Horizontal error-bound reference line");
    plot->add_option("--out", plot_out, "SVG path to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (generate->parsed()) {
            asyncqp::cmd_generate(load(config_path, seed), generate_out);
            std::cout << "wrote " << generate_out << '\n';
        } else if (plan->parsed()) {
            std::cout << asyncqp::cmd_plan(load(config_path, seed)).to_string();
        } else if (run->parsed()) {
            asyncqp::ExperimentConfig config = load(config_path, seed);
            if (!run_out.empty()) config.output.trace = run_out;
            std::cout << asyncqp::cmd_run(config).to_string();
        } else if (plot->parsed()) {
            asyncqp::cmd_plot(trace_paths, epsilon, plot_out);
            std::cout << "wrote " << plot_out << '\n';
        }
    } catch (const asyncqp::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const asyncqp::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const asyncqp::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
