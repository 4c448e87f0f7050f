#include "asyncqp/experiment.hpp"

#include <chrono>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "asyncqp/io.hpp"
#include "asyncqp/rng.hpp"
#include "asyncqp/svg_plot.hpp"

namespace asyncqp {

namespace {

using nlohmann::json;

constexpr int kConfigFormatVersion = 1;

[[noreturn]] void config_fail(const std::string& what) { throw ConfigError("config: " + what); }

double parse_exponent(const json& v) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        config_fail("norm exponent string must be \"inf\"");
    }
    return v.get<double>();
}

GenSpec parse_gen_spec(const json& g) {
    GenSpec spec;
    spec.n = g.at("n").get<int>();
    if (g.contains("blocks"))
        spec.block_sizes = g.at("blocks").get<std::vector<int>>();
    else
        spec.num_agents = g.value("agents", 1);
    spec.norm2 = g.at("norm2").get<double>();
    spec.cond = g.at("cond").get<double>();
    const std::string law = g.value("spectrum", "log-uniform");
    if (law == "log-uniform")
        spec.spectrum = SpectrumLaw::LogUniform;
    else if (law == "uniform")
        spec.spectrum = SpectrumLaw::Uniform;
    else
        config_fail("spectrum must be \"log-uniform\" or \"uniform\"");
    if (g.contains("r"))
        spec.r_explicit = g.at("r").get<std::vector<double>>();
    else
        spec.r_norm = g.value("r_norm", 0.0);
    spec.seed = g.value("seed", std::uint64_t{0});
    return spec;
}

std::vector<Vector> build_initial_states(const InitPolicy& init, int num_agents, int n) {
    std::vector<Vector> states;
    states.reserve(static_cast<std::size_t>(num_agents));
    switch (init.mode) {
        case InitPolicy::Mode::SharedRandom: {
            Rng rng(mix64(init.seed ^ 0x696e6974ULL));
            Vector x0(n);
            for (int i = 0; i < n; ++i) x0(i) = rng.gaussian();
            const double norm = x0.norm();
            if (norm > 0.0) x0 *= init.radius / norm;
            states.assign(static_cast<std::size_t>(num_agents), x0);
            break;
        }
        case InitPolicy::Mode::PerAgentRandom: {
            for (int a = 0; a < num_agents; ++a) {
                Rng rng(counter_hash(init.seed, static_cast<std::uint64_t>(a), 0x696e6974ULL));
                Vector x0(n);
                for (int i = 0; i < n; ++i) x0(i) = rng.gaussian();
                const double norm = x0.norm();
                if (norm > 0.0) x0 *= init.radius / norm;
                states.push_back(std::move(x0));
            }
            break;
        }
        case InitPolicy::Mode::Explicit: {
            if (static_cast<int>(init.states.size()) != num_agents)
                config_fail("explicit init needs one state per agent");
            for (const auto& s : init.states) {
                if (static_cast<int>(s.size()) != n)
                    config_fail("explicit init state has wrong dimension");
                states.push_back(Eigen::Map<const Vector>(s.data(), n));
            }
            break;
        }
    }
    return states;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

void ExperimentConfig::override_seeds(std::uint64_t master) {
    if (problem_generate) problem_generate->seed = mix64(master ^ 0x01);
    schedule.seed = mix64(master ^ 0x02);
    delays.seed = mix64(master ^ 0x03);
    stepsize.seed = mix64(master ^ 0x04);
    regularization.seed = mix64(master ^ 0x05);
    init.seed = mix64(master ^ 0x06);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config: cannot parse " + path + ": " + e.what());
    }

    try {
        ExperimentConfig config;
        if (doc.value("format_version", kConfigFormatVersion) != kConfigFormatVersion)
            config_fail("unsupported format_version");

        const json& p = doc.at("problem");
        const bool has_file = p.contains("file");
        const bool has_gen = p.contains("generate");
        if (has_file == has_gen) config_fail("problem needs exactly one of \"file\"/\"generate\"");
        if (has_file) config.problem_file = p.at("file").get<std::string>();
        if (has_gen) config.problem_generate = parse_gen_spec(p.at("generate"));

        if (doc.contains("schedule")) {
            const json& s = doc.at("schedule");
            const std::string mode = s.value("mode", "bernoulli");
            if (mode == "bernoulli") {
                config.schedule = ActivationSchedule::bernoulli(
                    s.value("p_update", 1.0), s.value("p_transmit", 1.0),
                    s.value("seed", std::uint64_t{0}));
            } else if (mode == "explicit") {
                config.schedule = ActivationSchedule::explicit_times(
                    s.at("update_times").get<std::vector<std::vector<long>>>(),
                    s.at("transmit_times").get<std::vector<std::vector<long>>>());
            } else {
                config_fail("schedule mode must be \"bernoulli\" or \"explicit\"");
            }
        }

        if (doc.contains("delay")) {
            const json& d = doc.at("delay");
            const std::string mode = d.value("mode", "fixed");
            if (mode == "fixed")
                config.delays = DelayModel::fixed_delay(d.value("d", 1L));
            else if (mode == "uniform")
                config.delays = DelayModel::uniform(d.at("min").get<long>(),
                                                    d.at("max").get<long>(),
                                                    d.value("seed", std::uint64_t{0}));
            else if (mode == "adversarial")
                config.delays = DelayModel::adversarial();
            else if (mode == "custom")
                config.delays = DelayModel::custom_list(d.at("delays").get<std::vector<long>>());
            else
                config_fail("delay mode must be fixed|uniform|adversarial|custom");
        }

        config.horizon = doc.value("horizon", 1L);
        if (config.horizon < 0) config_fail("horizon must be >= 0");

        if (doc.contains("stepsize")) {
            const json& s = doc.at("stepsize");
            const std::string mode = s.value("mode", "sample");
            if (mode == "sample") {
                config.stepsize.mode = StepsizePolicy::Mode::Sample;
                config.stepsize.seed = s.value("seed", std::uint64_t{0});
            } else if (mode == "explicit") {
                config.stepsize.mode = StepsizePolicy::Mode::Explicit;
                config.stepsize.values = s.at("gammas").get<std::vector<double>>();
            } else {
                config_fail("stepsize mode must be \"sample\" or \"explicit\"");
            }
        }

        if (doc.contains("regularization")) {
            const json& r = doc.at("regularization");
            const std::string mode = r.value("mode", "none");
            if (mode == "none") {
                config.regularization.mode = RegularizationPolicy::Mode::None;
            } else if (mode == "sample") {
                config.regularization.mode = RegularizationPolicy::Mode::Sample;
                config.regularization.epsilon = r.at("epsilon").get<double>();
                config.regularization.k_d = r.at("k_D").get<double>();
                config.regularization.seed = r.value("seed", std::uint64_t{0});
            } else if (mode == "explicit") {
                config.regularization.mode = RegularizationPolicy::Mode::Explicit;
                config.regularization.alphas = r.at("alphas").get<std::vector<double>>();
            } else {
                config_fail("regularization mode must be none|sample|explicit");
            }
        }

        if (doc.contains("init")) {
            const json& i = doc.at("init");
            const std::string mode = i.value("mode", "shared-random");
            if (mode == "shared-random")
                config.init.mode = InitPolicy::Mode::SharedRandom;
            else if (mode == "per-agent-random")
                config.init.mode = InitPolicy::Mode::PerAgentRandom;
            else if (mode == "explicit")
                config.init.mode = InitPolicy::Mode::Explicit;
            else
                config_fail("init mode must be shared-random|per-agent-random|explicit");
            config.init.seed = i.value("seed", std::uint64_t{0});
            config.init.radius = i.value("radius", 10.0);
            if (config.init.mode == InitPolicy::Mode::Explicit)
                config.init.states = i.at("states").get<std::vector<std::vector<double>>>();
        }

        if (doc.contains("sim")) {
            const json& s = doc.at("sim");
            config.sim_options.updates_see_same_tick_deliveries =
                s.value("updates_see_same_tick_deliveries", false);
            config.sim_options.timestamp_dedup = s.value("timestamp_dedup", false);
            config.sim_options.record_events = s.value("record_events", false);
        }

        config.use_exact_spectrum = doc.value("use_exact_spectrum", true);

        if (doc.contains("norm_scheme")) {
            // Deferred to resolve time (needs the agent count); stash raw values.
            const json& ns = doc.at("norm_scheme");
            NormScheme scheme;
            // Accept scalar or per-agent arrays for both fields.
            if (ns.contains("weights") && ns.at("weights").is_array())
                scheme.weights = ns.at("weights").get<std::vector<double>>();
            else
                scheme.weights = {ns.value("weights", 1.0)};
            if (ns.contains("exponents") && ns.at("exponents").is_array()) {
                for (const auto& e : ns.at("exponents")) scheme.exponents.push_back(parse_exponent(e));
            } else if (ns.contains("exponents")) {
                scheme.exponents = {parse_exponent(ns.at("exponents"))};
            } else {
                scheme.exponents = {std::numeric_limits<double>::infinity()};
            }
            config.scheme = std::move(scheme);
        }

        if (doc.contains("output")) {
            const json& o = doc.at("output");
            config.output.trace = o.value("trace", std::string("trace.csv"));
            if (o.contains("events")) config.output.events = o.at("events").get<std::string>();
        }

        if (doc.contains("seed")) config.override_seeds(doc.at("seed").get<std::uint64_t>());
        return config;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

QuadraticProblem resolve_problem(const ExperimentConfig& config) {
    if (config.problem_file) return load_problem_file(*config.problem_file);
    if (config.problem_generate) return generate_problem(*config.problem_generate);
    throw ConfigError("config: no problem source");
}

namespace {

NormScheme resolve_scheme(const ExperimentConfig& config, int num_agents) {
    if (!config.scheme) return NormScheme::uniform(num_agents);
    NormScheme scheme = *config.scheme;
    if (scheme.weights.size() == 1 && num_agents > 1)
        scheme.weights.assign(static_cast<std::size_t>(num_agents), scheme.weights[0]);
    if (scheme.exponents.size() == 1 && num_agents > 1)
        scheme.exponents.assign(static_cast<std::size_t>(num_agents), scheme.exponents[0]);
    scheme.validate(num_agents);
    return scheme;
}

SpectralInfo problem_spectrum(const QuadraticProblem& problem, bool exact) {
    SpectralInfo info = exact ? spectral_exact(problem.q()) : spectral_bounds(problem.q());
    if (!info.lambda_min_valid)
        throw InfeasibleError(
            "spectral bounds cannot certify positive definiteness; use exact spectrum");
    return info;
}

}  // namespace

std::string PlanOutput::to_string() const {
    std::ostringstream os;
    for (const auto& [key, value] : fields) os << key << '=' << value << '\n';
    return os.str();
}

PlanOutput cmd_plan(const ExperimentConfig& config) {
    const QuadraticProblem problem = resolve_problem(config);
    const SpectralInfo spec = problem_spectrum(problem, config.use_exact_spectrum);
    const StepsizeInterval interval = stepsize_interval(spec.norm2, spec.cond);

    PlanOutput out;
    out.fields.emplace_back("n", std::to_string(problem.dim()));
    out.fields.emplace_back("agents", std::to_string(problem.num_agents()));
    out.fields.emplace_back("norm2", fmt(spec.norm2));
    out.fields.emplace_back("cond", fmt(spec.cond));
    out.fields.emplace_back("spectrum_is_bound", spec.is_upper_bound ? "1" : "0");
    out.fields.emplace_back("gamma_lo", fmt(interval.lower));
    out.fields.emplace_back("gamma_hi", fmt(interval.upper));
    out.fields.emplace_back("q_mid", fmt(1.0 - 1.0 / spec.cond));

    if (config.regularization.mode == RegularizationPolicy::Mode::Sample) {
        const double norm_r = problem.r().norm();
        out.fields.emplace_back("norm_r", fmt(norm_r));
        out.fields.emplace_back("epsilon", fmt(config.regularization.epsilon));
        out.fields.emplace_back("k_D", fmt(config.regularization.k_d));
        out.fields.emplace_back(
            "kD_feasible_lo",
            fmt(feasible_kd_lower(spec.cond, spec.norm2, norm_r, config.regularization.epsilon)));
        const RegularizationPlan plan = plan_regularization(
            spec.cond, spec.norm2, norm_r, config.regularization.epsilon, config.regularization.k_d);
        out.fields.emplace_back("alpha_lo", fmt(plan.alpha_lower));
        out.fields.emplace_back("alpha_hi", fmt(plan.alpha_upper));
        out.fields.emplace_back("predicted_error_bound", fmt(plan.predicted_error_bound));
        out.fields.emplace_back("reg_norm2_bound", fmt(plan.reg_norm2_bound));
        out.fields.emplace_back("reg_gamma_lo", fmt(plan.predicted_stepsizes.lower));
        out.fields.emplace_back("reg_gamma_hi", fmt(plan.predicted_stepsizes.upper));
        out.fields.emplace_back("reg_q_mid", fmt(1.0 - 1.0 / plan.k_d));
    } else if (config.regularization.mode == RegularizationPolicy::Mode::Explicit) {
        RegularizationChoice choice{config.regularization.alphas};
        const QuadraticProblem reg = regularize(problem, choice);
        const SpectralInfo reg_spec = problem_spectrum(reg, config.use_exact_spectrum);
        const StepsizeInterval reg_interval = stepsize_interval(reg_spec.norm2, reg_spec.cond);
        out.fields.emplace_back("alpha_min", fmt(choice.alpha_min()));
        out.fields.emplace_back("alpha_max", fmt(choice.alpha_max()));
        out.fields.emplace_back("reg_norm2", fmt(reg_spec.norm2));
        out.fields.emplace_back("reg_cond", fmt(reg_spec.cond));
        out.fields.emplace_back("reg_gamma_lo", fmt(reg_interval.lower));
        out.fields.emplace_back("reg_gamma_hi", fmt(reg_interval.upper));
        out.fields.emplace_back(
            "error_bound",
            fmt(error_bound(spec.cond, spec.norm2, problem.r().norm(), choice.alpha_max())));
    }
    return out;
}

std::string RunSummary::to_string() const {
    std::ostringstream os;
    os << "horizon=" << horizon << '\n'
       << "n=" << n << '\n'
       << "agents=" << agents << '\n'
       << "norm2=" << fmt(norm2) << '\n'
       << "cond=" << fmt(cond) << '\n'
       << "spectrum_is_bound=" << (spectrum_is_bound ? 1 : 0) << '\n'
       << "gamma_lo=" << fmt(gamma_interval.lower) << '\n'
       << "gamma_hi=" << fmt(gamma_interval.upper) << '\n'
       << "q=" << fmt(contraction_q) << '\n'
       << "D_o=" << fmt(d_o) << '\n'
       << "initial_dist2_max=" << fmt(initial_dist2_max) << '\n'
       << "final_dist2_max=" << fmt(final_dist2_max) << '\n'
       << "final_dist_blockmax_max=" << fmt(final_dist_blockmax_max) << '\n'
       << "updates=" << updates << '\n'
       << "sends=" << sends << '\n'
       << "deliveries=" << deliveries << '\n';
    if (regularized) {
        os << "alpha_min=" << fmt(alpha_min) << '\n'
           << "alpha_max=" << fmt(alpha_max) << '\n'
           << "k_QA=" << fmt(measured_k_qa) << '\n'
           << "e_A=" << fmt(measured_e_a) << '\n'
           << "e_A_bound=" << fmt(e_a_bound) << '\n'
           << "epsilon=" << fmt(epsilon) << '\n'
           << "k_D=" << fmt(k_d) << '\n';
    }
    os << "trace=" << trace_path << '\n' << "wall_time_s=" << fmt(wall_time_s) << '\n';
    return os.str();
}

RunSummary cmd_run(const ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const QuadraticProblem base = resolve_problem(config);
    const int num_agents = base.num_agents();

    RunSummary summary;
    summary.horizon = config.horizon;
    summary.n = base.dim();
    summary.agents = num_agents;

    // Choose the problem the agents actually iterate on.
    std::optional<QuadraticProblem> reg_problem;
    RegularizationChoice choice;
    if (config.regularization.mode == RegularizationPolicy::Mode::Sample) {
        const SpectralInfo base_spec = problem_spectrum(base, config.use_exact_spectrum);
        const RegularizationPlan plan =
            plan_regularization(base_spec.cond, base_spec.norm2, base.r().norm(),
                                config.regularization.epsilon, config.regularization.k_d);
        choice.alphas = sample_alphas(plan, num_agents, config.regularization.seed);
        reg_problem = regularize(base, choice);
        summary.epsilon = config.regularization.epsilon;
        summary.k_d = config.regularization.k_d;
    } else if (config.regularization.mode == RegularizationPolicy::Mode::Explicit) {
        choice.alphas = config.regularization.alphas;
        if (static_cast<int>(choice.alphas.size()) != num_agents)
            config_fail("explicit regularization needs one alpha per agent");
        reg_problem = regularize(base, choice);
    }
    const QuadraticProblem& problem = reg_problem ? *reg_problem : base;

    const SpectralInfo spec = problem_spectrum(problem, config.use_exact_spectrum);
    summary.norm2 = spec.norm2;
    summary.cond = spec.cond;
    summary.spectrum_is_bound = spec.is_upper_bound;
    summary.gamma_interval = stepsize_interval(spec.norm2, spec.cond);

    GammaMatrix gammas;
    if (config.stepsize.mode == StepsizePolicy::Mode::Sample) {
        gammas.gammas = sample_stepsizes(summary.gamma_interval, num_agents, config.stepsize.seed);
    } else {
        gammas.gammas = config.stepsize.values;
        if (static_cast<int>(gammas.gammas.size()) != num_agents)
            config_fail("explicit stepsizes need one gamma per agent");
    }

    const NormScheme scheme = resolve_scheme(config, num_agents);
    std::vector<Vector> initial_states =
        build_initial_states(config.init, num_agents, base.dim());
    if (base.box())
        for (Vector& x : initial_states) x = project_box(x, *base.box());

    const SimTrace trace = asyncqp::run(problem, config.schedule, config.delays, gammas,
                                        config.horizon, initial_states, scheme,
                                        config.sim_options);

    summary.contraction_q = trace.contraction_q;
    summary.d_o = trace.d_o;
    summary.initial_dist2_max = trace.max_dist2_at(0);
    summary.final_dist2_max = trace.max_dist2_at(trace.horizon);
    summary.final_dist_blockmax_max = trace.max_dist_blockmax_at(trace.horizon);
    summary.updates = trace.updates;
    summary.sends = trace.sends;
    summary.deliveries = trace.deliveries;

    if (reg_problem) {
        summary.regularized = true;
        summary.alpha_min = choice.alpha_min();
        summary.alpha_max = choice.alpha_max();
        summary.measured_k_qa = spectral_exact(reg_problem->q()).cond;
        const Vector x_hat = base.exact_minimizer();
        const Vector x_hat_a = reg_problem->exact_minimizer();
        summary.measured_e_a = (x_hat - x_hat_a).norm();
        const SpectralInfo base_exact = spectral_exact(base.q());
        summary.e_a_bound =
            error_bound(base_exact.cond, base_exact.norm2, base.r().norm(), choice.alpha_max());
    }

    summary.trace_path = config.output.trace;
    write_trace_csv(trace, config.output.trace);
    if (config.output.events) write_events_csv(trace, *config.output.events);

    summary.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return summary;
}

void cmd_generate(const ExperimentConfig& config, const std::string& out_path) {
    if (!config.problem_generate)
        throw ConfigError("config: generate requires a problem.generate section");
    write_problem_file(generate_problem(*config.problem_generate), out_path);
}

void cmd_plot(const std::vector<std::string>& trace_paths, std::optional<double> epsilon,
              const std::string& out_path) {
    if (trace_paths.empty()) throw std::invalid_argument("plot: no trace files given");
    std::vector<PlotSeries> series;
    series.reserve(trace_paths.size());
    for (const std::string& path : trace_paths) {
        const TraceSeries ts = load_trace_csv(path);
        PlotSeries ps;
        auto slash = path.find_last_of('/');
        ps.label = slash == std::string::npos ? path : path.substr(slash + 1);
        ps.x = ts.k;
        ps.y = ts.worst_dist2;
        series.push_back(std::move(ps));
    }
    render_convergence_svg(series, epsilon, out_path);
}

}  // namespace asyncqp
