#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asyncqp/async_sim.hpp"
#include "asyncqp/block_norm.hpp"
#include "asyncqp/param_planner.hpp"
#include "asyncqp/problem_gen.hpp"
#include "asyncqp/qp_model.hpp"
#include "asyncqp/types.hpp"

namespace asyncqp {

struct StepsizePolicy {
    enum class Mode { Sample, Explicit };
    Mode mode = Mode::Sample;
    std::uint64_t seed = 0;
    std::vector<double> values;
};

struct RegularizationPolicy {
    enum class Mode { None, Sample, Explicit };
    Mode mode = Mode::None;
    double epsilon = 0.0;
    double k_d = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> alphas;
};

struct InitPolicy {
    enum class Mode { SharedRandom, PerAgentRandom, Explicit };
    Mode mode = Mode::SharedRandom;
    std::uint64_t seed = 0;
    double radius = 10.0;  // ||x(0)||_2 of random starts
    std::vector<std::vector<double>> states;
};

struct OutputSpec {
    std::string trace = "trace.csv";
    std::optional<std::string> events;
};

struct ExperimentConfig {
    std::optional<std::string> problem_file;
    std::optional<GenSpec> problem_generate;
    std::optional<NormScheme> scheme;  // default: all weights 1, all exponents inf
    ActivationSchedule schedule = ActivationSchedule::bernoulli(1.0, 1.0, 0);
    DelayModel delays = DelayModel::fixed_delay(1);
    long horizon = 1;
    StepsizePolicy stepsize;
    RegularizationPolicy regularization;
    InitPolicy init;
    SimOptions sim_options;
    // Plan stepsizes from exact extreme eigenvalues (what a network operator
    // with full knowledge would do) or from Gershgorin/trace upper bounds.
    bool use_exact_spectrum = true;
    OutputSpec output;

    /// Replace every component seed with one derived from `master`.
    void override_seeds(std::uint64_t master);
};

ExperimentConfig load_config(const std::string& path);

QuadraticProblem resolve_problem(const ExperimentConfig& config);

/// Key=value lines, one per line, ready to print.
struct PlanOutput {
    std::vector<std::pair<std::string, std::string>> fields;
    std::string to_string() const;
};

PlanOutput cmd_plan(const ExperimentConfig& config);

struct RunSummary {
    long horizon = 0;
    int n = 0;
    int agents = 0;
    double norm2 = 0.0, cond = 0.0;
    bool spectrum_is_bound = false;
    StepsizeInterval gamma_interval;
    double contraction_q = 0.0;
    double d_o = 0.0;
    double initial_dist2_max = 0.0, final_dist2_max = 0.0;
    double final_dist_blockmax_max = 0.0;
    long updates = 0, sends = 0, deliveries = 0;
    double wall_time_s = 0.0;
    std::string trace_path;
    // regularized runs only
    bool regularized = false;
    double alpha_min = 0.0, alpha_max = 0.0;
    double measured_k_qa = 0.0;
    double measured_e_a = 0.0;
    double e_a_bound = 0.0;
    double epsilon = 0.0, k_d = 0.0;

    std::string to_string() const;
};

RunSummary cmd_run(const ExperimentConfig& config);

void cmd_generate(const ExperimentConfig& config, const std::string& out_path);

void cmd_plot(const std::vector<std::string>& trace_paths, std::optional<double> epsilon,
              const std::string& out_path);

}  // namespace asyncqp
