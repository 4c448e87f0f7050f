#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "asyncqp/async_sim.hpp"
#include "asyncqp/block_norm.hpp"
#include "asyncqp/experiment.hpp"
#include "asyncqp/io.hpp"
#include "asyncqp/param_planner.hpp"
#include "asyncqp/problem_gen.hpp"
#include "asyncqp/qp_model.hpp"

namespace py = pybind11;
using namespace asyncqp;

namespace {

std::string set_index_repr(const SetIndex& s) {
    switch (s.kind) {
        case SetIndex::Kind::Outside: return "outside";
        case SetIndex::Kind::Converged: return "converged";
        case SetIndex::Kind::Index: return std::to_string(s.s);
    }
    return "?";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Totally asynchronous block-gradient quadratic programming";

    static py::exception<InfeasibleError> infeasible(m, "InfeasibleError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const InfeasibleError& e) {
            py::set_error(infeasible, e.what());
        } catch (const ConfigError& e) {
            py::set_error(PyExc_ValueError, e.what());
        } catch (const IoError& e) {
            py::set_error(PyExc_OSError, e.what());
        }
    });

    py::class_<BlockPartition>(m, "BlockPartition")
        .def(py::init<std::vector<int>>(), py::arg("sizes"))
        .def_property_readonly("sizes", &BlockPartition::sizes)
        .def_property_readonly("num_blocks", &BlockPartition::num_blocks)
        .def_property_readonly("total", &BlockPartition::total)
        .def("start", &BlockPartition::start)
        .def("size", &BlockPartition::size);

    py::class_<Box>(m, "Box")
        .def(py::init([](Vector lower, Vector upper) {
                 return Box{std::move(lower), std::move(upper)};
             }),
             py::arg("lower"), py::arg("upper"))
        .def_readonly("lower", &Box::lower)
        .def_readonly("upper", &Box::upper);

    py::class_<SpectralInfo>(m, "SpectralInfo")
        .def_readonly("norm2", &SpectralInfo::norm2)
        .def_readonly("lambda_min", &SpectralInfo::lambda_min)
        .def_readonly("cond", &SpectralInfo::cond)
        .def_readonly("is_upper_bound", &SpectralInfo::is_upper_bound)
        .def_readonly("lambda_min_valid", &SpectralInfo::lambda_min_valid);

    py::class_<RegularizationChoice>(m, "RegularizationChoice")
        .def(py::init([](std::vector<double> alphas) {
                 return RegularizationChoice{std::move(alphas)};
             }),
             py::arg("alphas"))
        .def_readonly("alphas", &RegularizationChoice::alphas)
        .def_property_readonly("alpha_min", &RegularizationChoice::alpha_min)
        .def_property_readonly("alpha_max", &RegularizationChoice::alpha_max);

    py::class_<QuadraticProblem>(m, "QuadraticProblem")
        .def(py::init<Matrix, Vector, BlockPartition, std::optional<Box>>(), py::arg("q"),
             py::arg("r"), py::arg("partition"), py::arg("box") = std::nullopt)
        .def_property_readonly("q", &QuadraticProblem::q)
        .def_property_readonly("r", &QuadraticProblem::r)
        .def_property_readonly("partition", &QuadraticProblem::partition)
        .def_property_readonly("n", &QuadraticProblem::dim)
        .def_property_readonly("num_agents", &QuadraticProblem::num_agents)
        .def("objective", &QuadraticProblem::objective, py::arg("x"))
        .def("gradient", &QuadraticProblem::gradient, py::arg("x"))
        .def("gradient_block", &QuadraticProblem::gradient_block, py::arg("agent"), py::arg("x"))
        .def("q_row_block", &QuadraticProblem::q_row_block, py::arg("agent"))
        .def("r_block", &QuadraticProblem::r_block, py::arg("agent"))
        .def("exact_minimizer", &QuadraticProblem::exact_minimizer);

    m.def("block_rows",
          py::overload_cast<const Matrix&, int, const BlockPartition&>(&block_rows),
          py::arg("m"), py::arg("block"), py::arg("partition"));
    m.def("block_rows_vector",
          py::overload_cast<const Vector&, int, const BlockPartition&>(&block_rows),
          py::arg("v"), py::arg("block"), py::arg("partition"));
    m.def("regularize", &regularize, py::arg("problem"), py::arg("choice"));
    m.def("spectral_exact", &spectral_exact, py::arg("q"));
    m.def("spectral_bounds", &spectral_bounds, py::arg("q"));
    m.def("project_box", &project_box, py::arg("x"), py::arg("box"));
    m.def("spectral_norm", &spectral_norm, py::arg("m"));

    py::class_<NormScheme>(m, "NormScheme")
        .def(py::init([](std::vector<double> weights, std::vector<double> exponents) {
                 NormScheme s;
                 s.weights = std::move(weights);
                 s.exponents = std::move(exponents);
                 s.validate_values();
                 return s;
             }),
             py::arg("weights"), py::arg("exponents"))
        .def_static("uniform", &NormScheme::uniform, py::arg("num_blocks"),
                    py::arg("weight") = 1.0,
                    py::arg("exponent") = std::numeric_limits<double>::infinity())
        .def_readonly("weights", &NormScheme::weights)
        .def_readonly("exponents", &NormScheme::exponents);

    m.def("block_max_norm", &block_max_norm, py::arg("x"), py::arg("partition"), py::arg("scheme"));
    m.def("induced_norm_bound", &induced_norm_bound, py::arg("b"), py::arg("scheme"));
    m.def("initial_radius", &initial_radius, py::arg("states"), py::arg("x_hat"),
          py::arg("partition"), py::arg("scheme"));

    py::class_<SetIndex>(m, "SetIndex")
        .def_property_readonly("is_outside",
                               [](const SetIndex& s) { return s.kind == SetIndex::Kind::Outside; })
        .def_property_readonly(
            "is_converged", [](const SetIndex& s) { return s.kind == SetIndex::Kind::Converged; })
        .def_property_readonly("s", [](const SetIndex& s) { return s.s; })
        .def("__repr__", &set_index_repr);

    m.def("set_index", &set_index, py::arg("y"), py::arg("x_hat"), py::arg("q"), py::arg("n"),
          py::arg("d_o"), py::arg("scheme"), py::arg("partition"));
    m.def("set_index_from_distance", &set_index_from_distance, py::arg("distance"), py::arg("q"),
          py::arg("n"), py::arg("d_o"));

    py::class_<StepsizeInterval>(m, "StepsizeInterval")
        .def_readonly("lower", &StepsizeInterval::lower)
        .def_readonly("upper", &StepsizeInterval::upper)
        .def("contains", &StepsizeInterval::contains);

    py::class_<GammaMatrix>(m, "GammaMatrix")
        .def(py::init([](std::vector<double> gammas) { return GammaMatrix{std::move(gammas)}; }),
             py::arg("gammas"))
        .def_readonly("gammas", &GammaMatrix::gammas);

    py::class_<RegularizationPlan>(m, "RegularizationPlan")
        .def_readonly("alpha_lower", &RegularizationPlan::alpha_lower)
        .def_readonly("alpha_upper", &RegularizationPlan::alpha_upper)
        .def_readonly("k_d", &RegularizationPlan::k_d)
        .def_readonly("epsilon", &RegularizationPlan::epsilon)
        .def_readonly("predicted_error_bound", &RegularizationPlan::predicted_error_bound)
        .def_readonly("predicted_stepsizes", &RegularizationPlan::predicted_stepsizes)
        .def_readonly("reg_norm2_bound", &RegularizationPlan::reg_norm2_bound);

    m.def("stepsize_interval", &stepsize_interval, py::arg("norm2"), py::arg("cond"));
    m.def("validate_interval", &validate_interval, py::arg("gamma_lower"), py::arg("gamma_upper"),
          py::arg("norm2"), py::arg("cond"));
    m.def("contraction_factor", &contraction_factor, py::arg("q"), py::arg("gamma"),
          py::arg("partition"));
    m.def("improves_conditioning", &improves_conditioning, py::arg("choice"), py::arg("cond_q"));
    m.def("feasible_kd_lower", &feasible_kd_lower, py::arg("cond_q"), py::arg("norm2"),
          py::arg("norm_r"), py::arg("epsilon"));
    m.def("alpha_min_lower", &alpha_min_lower, py::arg("cond_q"), py::arg("norm2"),
          py::arg("norm_r"), py::arg("epsilon"), py::arg("k_d"));
    m.def("alpha_max_upper", &alpha_max_upper, py::arg("cond_q"), py::arg("norm2"),
          py::arg("norm_r"), py::arg("epsilon"));
    m.def("error_bound", &error_bound, py::arg("cond_q"), py::arg("norm2"), py::arg("norm_r"),
          py::arg("alpha_max"));
    m.def("plan_regularization", &plan_regularization, py::arg("cond_q"), py::arg("norm2"),
          py::arg("norm_r"), py::arg("epsilon"), py::arg("k_d"));
    m.def("sample_stepsizes", &sample_stepsizes, py::arg("interval"), py::arg("count"),
          py::arg("seed"));
    m.def("sample_alphas", &sample_alphas, py::arg("plan"), py::arg("count"), py::arg("seed"));

    py::enum_<SpectrumLaw>(m, "SpectrumLaw")
        .value("UNIFORM", SpectrumLaw::Uniform)
        .value("LOG_UNIFORM", SpectrumLaw::LogUniform);

    py::class_<GenSpec>(m, "GenSpec")
        .def(py::init<>())
        .def_readwrite("n", &GenSpec::n)
        .def_readwrite("num_agents", &GenSpec::num_agents)
        .def_readwrite("block_sizes", &GenSpec::block_sizes)
        .def_readwrite("norm2", &GenSpec::norm2)
        .def_readwrite("cond", &GenSpec::cond)
        .def_readwrite("spectrum", &GenSpec::spectrum)
        .def_readwrite("r_norm", &GenSpec::r_norm)
        .def_readwrite("r_explicit", &GenSpec::r_explicit)
        .def_readwrite("seed", &GenSpec::seed);

    m.def("even_partition", &even_partition, py::arg("n"), py::arg("num_agents"));
    m.def("random_orthogonal", &random_orthogonal, py::arg("n"), py::arg("seed"));
    m.def("generate_q", &generate_q, py::arg("spec"));
    m.def("generate_r", &generate_r, py::arg("spec"));
    m.def("generate_problem", &generate_problem, py::arg("spec"));

    py::class_<ActivationSchedule>(m, "ActivationSchedule")
        .def_static("bernoulli", &ActivationSchedule::bernoulli, py::arg("p_update"),
                    py::arg("p_transmit"), py::arg("seed"))
        .def_static("explicit_times", &ActivationSchedule::explicit_times,
                    py::arg("update_times"), py::arg("transmit_times"))
        .def("updates_at", &ActivationSchedule::updates_at, py::arg("k"), py::arg("agent"))
        .def("transmits_at", &ActivationSchedule::transmits_at, py::arg("k"), py::arg("sender"),
             py::arg("receiver"));

    py::class_<DelayModel>(m, "DelayModel")
        .def_static("fixed_delay", &DelayModel::fixed_delay, py::arg("d"))
        .def_static("uniform", &DelayModel::uniform, py::arg("lo"), py::arg("hi"), py::arg("seed"))
        .def_static("adversarial", &DelayModel::adversarial)
        .def_static("custom_list", &DelayModel::custom_list, py::arg("delays"))
        .def("delay", &DelayModel::delay, py::arg("sender"), py::arg("receiver"),
             py::arg("send_time"));

    py::class_<SimOptions>(m, "SimOptions")
        .def(py::init<>())
        .def_readwrite("updates_see_same_tick_deliveries",
                       &SimOptions::updates_see_same_tick_deliveries)
        .def_readwrite("timestamp_dedup", &SimOptions::timestamp_dedup)
        .def_readwrite("record_own_history", &SimOptions::record_own_history)
        .def_readwrite("record_events", &SimOptions::record_events);

    py::class_<SimTrace>(m, "SimTrace")
        .def_readonly("horizon", &SimTrace::horizon)
        .def_readonly("num_agents", &SimTrace::num_agents)
        .def_readonly("n", &SimTrace::n)
        .def_readonly("contraction_q", &SimTrace::contraction_q)
        .def_readonly("d_o", &SimTrace::d_o)
        .def_readonly("set_index_valid", &SimTrace::set_index_valid)
        .def_readonly("updates", &SimTrace::updates)
        .def_readonly("sends", &SimTrace::sends)
        .def_readonly("deliveries", &SimTrace::deliveries)
        .def_readonly("final_states", &SimTrace::final_states)
        .def("max_dist2_at", &SimTrace::max_dist2_at, py::arg("k"))
        .def("max_dist_blockmax_at", &SimTrace::max_dist_blockmax_at, py::arg("k"))
        .def("dist2",
             [](const SimTrace& t, int agent) {
                 Vector out(t.horizon + 1);
                 for (long k = 0; k <= t.horizon; ++k) out(k) = t.row(k, agent).dist2;
                 return out;
             },
             py::arg("agent"))
        .def("dist_blockmax",
             [](const SimTrace& t, int agent) {
                 Vector out(t.horizon + 1);
                 for (long k = 0; k <= t.horizon; ++k) out(k) = t.row(k, agent).dist_blockmax;
                 return out;
             },
             py::arg("agent"));

    m.def("run", &run, py::arg("problem"), py::arg("schedule"), py::arg("delays"),
          py::arg("gammas"), py::arg("horizon"), py::arg("initial_states"), py::arg("scheme"),
          py::arg("options") = SimOptions{},
          py::call_guard<py::gil_scoped_release>());

    py::class_<LivenessReport>(m, "LivenessReport")
        .def_readonly("ok", &LivenessReport::ok)
        .def_readonly("window", &LivenessReport::window)
        .def_readonly("worst_gap", &LivenessReport::worst_gap)
        .def_readonly("worst_agent", &LivenessReport::worst_agent)
        .def_readonly("per_agent_worst_gap", &LivenessReport::per_agent_worst_gap)
        .def_readonly("violating_agents", &LivenessReport::violating_agents);

    m.def("liveness_check", &liveness_check, py::arg("schedule"), py::arg("num_agents"),
          py::arg("horizon"), py::arg("window"));

    py::class_<MonotoneReport>(m, "MonotoneReport")
        .def_readonly("nondecreasing", &MonotoneReport::nondecreasing)
        .def_readonly("first_violation_k", &MonotoneReport::first_violation_k);

    m.def("monotone_set_diagnostic", &monotone_set_diagnostic, py::arg("trace"), py::arg("q"),
          py::arg("n"), py::arg("d_o"));

    py::class_<ParallelResult>(m, "ParallelResult")
        .def_readonly("final_states", &ParallelResult::final_states)
        .def_readonly("total_updates", &ParallelResult::total_updates);

    m.def("run_parallel", &run_parallel, py::arg("problem"), py::arg("gammas"),
          py::arg("iterations"), py::arg("initial_states"),
          py::call_guard<py::gil_scoped_release>());

    m.def("write_problem_file", &write_problem_file, py::arg("problem"), py::arg("path"));
    m.def("load_problem_file", &load_problem_file, py::arg("path"));
    m.def("write_trace_csv", &write_trace_csv, py::arg("trace"), py::arg("path"));

    py::class_<RunSummary>(m, "RunSummary")
        .def_readonly("final_dist2_max", &RunSummary::final_dist2_max)
        .def_readonly("initial_dist2_max", &RunSummary::initial_dist2_max)
        .def_readonly("contraction_q", &RunSummary::contraction_q)
        .def_readonly("measured_k_qa", &RunSummary::measured_k_qa)
        .def_readonly("measured_e_a", &RunSummary::measured_e_a)
        .def_readonly("e_a_bound", &RunSummary::e_a_bound)
        .def_readonly("regularized", &RunSummary::regularized)
        .def_readonly("trace_path", &RunSummary::trace_path)
        .def("__str__", &RunSummary::to_string);

    m.def("load_config", &load_config, py::arg("path"));
    m.def("cmd_plan",
          [](const std::string& config_path) { return cmd_plan(load_config(config_path)).to_string(); },
          py::arg("config_path"));
    m.def("cmd_run",
          [](const std::string& config_path) { return cmd_run(load_config(config_path)); },
          py::arg("config_path"), py::call_guard<py::gil_scoped_release>());
    m.def("cmd_plot", &cmd_plot, py::arg("trace_paths"), py::arg("epsilon"), py::arg("out_path"));
}
