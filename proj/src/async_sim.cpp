#include "asyncqp/async_sim.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "asyncqp/rng.hpp"

namespace asyncqp {

namespace {

constexpr std::uint64_t kTagUpdate = 0x75706474ULL;
constexpr std::uint64_t kTagTransmit = 0x786d6974ULL;
constexpr std::uint64_t kTagDelay = 0x646c6179ULL;

std::uint64_t link_word(int sender, int receiver) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(sender)) << 32) |
           static_cast<std::uint32_t>(receiver);
}

}  // namespace

ActivationSchedule ActivationSchedule::bernoulli(double p_update, double p_transmit,
                                                 std::uint64_t seed) {
    ActivationSchedule s;
    s.mode = Mode::Bernoulli;
    s.p_update = p_update;
    s.p_transmit = p_transmit;
    s.seed = seed;
    return s;
}

ActivationSchedule ActivationSchedule::explicit_times(
    std::vector<std::vector<long>> update_times, std::vector<std::vector<long>> transmit_times) {
    ActivationSchedule s;
    s.mode = Mode::Explicit;
    s.update_times = std::move(update_times);
    s.transmit_times = std::move(transmit_times);
    for (auto& v : s.update_times) std::sort(v.begin(), v.end());
    for (auto& v : s.transmit_times) std::sort(v.begin(), v.end());
    return s;
}

bool ActivationSchedule::updates_at(long k, int agent) const {
    if (mode == Mode::Bernoulli)
        return counter_u01(seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(agent),
                           kTagUpdate) < p_update;
    const auto& times = update_times.at(static_cast<std::size_t>(agent));
    return std::binary_search(times.begin(), times.end(), k);
}

bool ActivationSchedule::transmits_at(long k, int sender, int receiver) const {
    if (sender == receiver) return false;
    if (mode == Mode::Bernoulli)
        return counter_u01(seed, static_cast<std::uint64_t>(k), link_word(sender, receiver),
                           kTagTransmit) < p_transmit;
    const auto& times = transmit_times.at(static_cast<std::size_t>(sender));
    return std::binary_search(times.begin(), times.end(), k);
}

void ActivationSchedule::validate(int num_agents, long horizon) const {
    if (mode == Mode::Bernoulli) {
        if (!(p_update > 0.0 && p_update <= 1.0) || !(p_transmit > 0.0 && p_transmit <= 1.0))
            throw std::invalid_argument("schedule: Bernoulli probabilities must be in (0, 1]");
        return;
    }
    if (static_cast<int>(update_times.size()) != num_agents ||
        static_cast<int>(transmit_times.size()) != num_agents)
        throw std::invalid_argument("schedule: explicit time lists must cover every agent");
    for (int i = 0; i < num_agents; ++i) {
        const auto& times = update_times[static_cast<std::size_t>(i)];
        const bool has_update = std::any_of(times.begin(), times.end(),
                                            [&](long t) { return t >= 0 && t < horizon; });
        if (!has_update)
            throw std::invalid_argument(
                "schedule: infeasible, agent " + std::to_string(i) +
                " has no update time within the horizon");
    }
}

DelayModel DelayModel::fixed_delay(long d) {
    DelayModel m;
    m.mode = Mode::Fixed;
    m.fixed = d;
    m.validate();
    return m;
}

DelayModel DelayModel::uniform(long lo, long hi, std::uint64_t seed) {
    DelayModel m;
    m.mode = Mode::UniformInt;
    m.lo = lo;
    m.hi = hi;
    m.seed = seed;
    m.validate();
    return m;
}

DelayModel DelayModel::adversarial() {
    DelayModel m;
    m.mode = Mode::AdversarialGrowing;
    return m;
}

DelayModel DelayModel::custom_list(std::vector<long> delays) {
    DelayModel m;
    m.mode = Mode::CustomList;
    m.custom = std::move(delays);
    m.validate();
    return m;
}

void DelayModel::validate() const {
    switch (mode) {
        case Mode::Fixed:
            if (fixed < 1) throw std::invalid_argument("delay: fixed delay must be >= 1");
            break;
        case Mode::UniformInt:
            if (lo < 1 || hi < lo)
                throw std::invalid_argument("delay: uniform range needs 1 <= lo <= hi");
            break;
        case Mode::CustomList:
            if (custom.empty()) throw std::invalid_argument("delay: custom list is empty");
            for (long d : custom)
                if (d < 1) throw std::invalid_argument("delay: custom delays must be >= 1");
            break;
        case Mode::AdversarialGrowing:
            break;
    }
}

long DelayModel::delay(int sender, int receiver, long send_time) const {
    switch (mode) {
        case Mode::Fixed:
            return fixed;
        case Mode::UniformInt:
            return counter_int(seed, lo, hi, static_cast<std::uint64_t>(send_time),
                               link_word(sender, receiver), kTagDelay);
        case Mode::AdversarialGrowing:
            return std::max(1L, (send_time + 1) / 2);  // ceil(k/2), clamped to >= 1
        case Mode::CustomList: {
            const auto idx = std::min(static_cast<std::size_t>(std::max(0L, send_time)),
                                      custom.size() - 1);
            return custom[idx];
        }
    }
    return 1;
}

Simulator::Simulator(const QuadraticProblem& problem, GammaMatrix gammas,
                     ActivationSchedule schedule, DelayModel delays,
                     std::vector<Vector> initial_states, SimOptions options)
    : schedule_(std::move(schedule)), delays_(std::move(delays)), options_(options) {
    const BlockPartition& partition = problem.partition();
    const int num_agents = partition.num_blocks();
    gammas.validate();
    if (static_cast<int>(gammas.gammas.size()) != num_agents)
        throw std::invalid_argument("simulator: one stepsize per agent required");
    if (static_cast<int>(initial_states.size()) != num_agents)
        throw std::invalid_argument("simulator: one initial state per agent required");
    delays_.validate();

    agents_.reserve(static_cast<std::size_t>(num_agents));
    for (int i = 0; i < num_agents; ++i) {
        AgentState a;
        a.id = i;
        a.local = initial_states[static_cast<std::size_t>(i)];
        if (a.local.size() != problem.dim())
            throw std::invalid_argument("simulator: initial state has wrong dimension");
        a.gamma = gammas.gammas[static_cast<std::size_t>(i)];
        a.block_start = partition.start(i);
        a.block_size = partition.size(i);
        a.q_row_block = problem.q_row_block(i);
        a.r_block = problem.r_block(i);
        if (problem.box()) {
            Box slice;
            slice.lower = problem.box()->lower.segment(a.block_start, a.block_size);
            slice.upper = problem.box()->upper.segment(a.block_start, a.block_size);
            a.own_box = std::move(slice);
        }
        a.slot_compute_time.assign(static_cast<std::size_t>(num_agents), 0);
        agents_.push_back(std::move(a));
    }
    if (options_.record_own_history) {
        own_history_.resize(static_cast<std::size_t>(num_agents));
        record_history();
    }
}

void Simulator::record_history() {
    for (auto& a : agents_) own_history_[static_cast<std::size_t>(a.id)].push_back(a.own_block());
}

void Simulator::deliver_due(long delivery_tick) {
    auto [lo, hi] = in_flight_.equal_range(delivery_tick);
    std::vector<MessageInFlight> due;
    for (auto it = lo; it != hi; ++it) due.push_back(std::move(it->second));
    in_flight_.erase(lo, hi);
    // Latest compute_time per (receiver, sender) wins; send order breaks ties.
    // Applying in sorted order makes the winner the last write.
    std::sort(due.begin(), due.end(), [](const MessageInFlight& a, const MessageInFlight& b) {
        return std::tie(a.receiver, a.sender, a.compute_time, a.seq) <
               std::tie(b.receiver, b.sender, b.compute_time, b.seq);
    });
    for (const MessageInFlight& msg : due) {
        AgentState& recv = agents_[static_cast<std::size_t>(msg.receiver)];
        auto& held = recv.slot_compute_time[static_cast<std::size_t>(msg.sender)];
        if (options_.timestamp_dedup && msg.compute_time < held) continue;
        const AgentState& sender = agents_[static_cast<std::size_t>(msg.sender)];
        recv.local.segment(sender.block_start, sender.block_size) = msg.payload;
        held = msg.compute_time;
        ++deliveries_;
        if (options_.record_events)
            events_.push_back({delivery_tick, EventRecord::Type::Deliver, msg.receiver, msg.sender,
                               msg.compute_time});
    }
}

void Simulator::step() {
    const long k = k_;
    const int num_agents = static_cast<int>(agents_.size());

    // Phase B part 1: compute updates against the pre-delivery copy x^i(k).
    // The commit is deferred so deliveries (which touch disjoint slots) can
    // be applied in between without being read.
    std::vector<std::pair<int, Vector>> pending;
    const bool updates_first = !options_.updates_see_same_tick_deliveries;
    auto compute_updates = [&] {
        for (AgentState& a : agents_) {
            if (!schedule_.updates_at(k, a.id)) continue;
            Vector next = a.own_block() - a.gamma * (a.q_row_block * a.local + a.r_block);
            if (a.own_box) next = project_box(next, *a.own_box);
            pending.emplace_back(a.id, std::move(next));
        }
    };

    if (updates_first) compute_updates();

    // Phase A: deliveries due at k+1.
    deliver_due(k + 1);

    if (!updates_first) compute_updates();

    // Phase B part 2: commit own-block updates.
    for (auto& [id, value] : pending) {
        AgentState& a = agents_[static_cast<std::size_t>(id)];
        a.local.segment(a.block_start, a.block_size) = value;
        a.last_update_time = k + 1;
        a.slot_compute_time[static_cast<std::size_t>(id)] = k + 1;
        ++updates_;
        if (options_.record_events)
            events_.push_back({k + 1, EventRecord::Type::Update, id, -1, k + 1});
    }

    // Phase C: transmissions leave with send_time k+1 carrying the committed
    // own block stamped with its computation time.
    for (const AgentState& a : agents_) {
        for (int j = 0; j < num_agents; ++j) {
            if (!schedule_.transmits_at(k, a.id, j)) continue;
            MessageInFlight msg;
            msg.sender = a.id;
            msg.receiver = j;
            msg.payload = a.own_block();
            msg.compute_time = a.last_update_time;
            msg.send_time = k + 1;
            msg.delivery_time = k + 1 + delays_.delay(a.id, j, k + 1);
            msg.seq = seq_++;
            ++sends_;
            if (options_.record_events)
                events_.push_back({k + 1, EventRecord::Type::Send, a.id, j, msg.compute_time});
            in_flight_.emplace(msg.delivery_time, std::move(msg));
        }
    }

    k_ = k + 1;
    if (options_.record_own_history) record_history();
}

const TraceRow& SimTrace::row(long k, int agent) const {
    return rows.at(static_cast<std::size_t>(k) * static_cast<std::size_t>(num_agents) +
                   static_cast<std::size_t>(agent));
}

double SimTrace::max_dist2_at(long k) const {
    double worst = 0.0;
    for (int i = 0; i < num_agents; ++i) worst = std::max(worst, row(k, i).dist2);
    return worst;
}

double SimTrace::max_dist_blockmax_at(long k) const {
    double worst = 0.0;
    for (int i = 0; i < num_agents; ++i) worst = std::max(worst, row(k, i).dist_blockmax);
    return worst;
}

SimTrace run(const QuadraticProblem& problem, const ActivationSchedule& schedule,
             const DelayModel& delays, const GammaMatrix& gammas, long horizon,
             const std::vector<Vector>& initial_states, const NormScheme& scheme,
             SimOptions options) {
    if (horizon < 0) throw std::invalid_argument("run: horizon must be >= 0");
    const int num_agents = problem.num_agents();
    // A zero-step run never consults the schedule, so emptiness of explicit
    // update lists only matters for horizon >= 1.
    if (schedule.mode == ActivationSchedule::Mode::Bernoulli || horizon >= 1)
        schedule.validate(num_agents, horizon);
    scheme.validate(num_agents);

    const Vector x_hat = problem.exact_minimizer();
    const double d_o = initial_radius(initial_states, x_hat, problem.partition(), scheme);
    const double q = contraction_factor(problem.q(), gammas, problem.partition());

    SimTrace trace;
    trace.horizon = horizon;
    trace.num_agents = num_agents;
    trace.n = problem.dim();
    trace.contraction_q = q;
    trace.d_o = d_o;
    trace.set_index_valid = q > 0.0 && q < 1.0;
    trace.rows.reserve(static_cast<std::size_t>(horizon + 1) *
                       static_cast<std::size_t>(num_agents));
    trace.aggregate_set_index.reserve(static_cast<std::size_t>(horizon + 1));

    Simulator sim(problem, gammas, schedule, delays, initial_states, options);

    auto classify = [&](double dist_blockmax) -> SetIndex {
        if (!trace.set_index_valid) return SetIndex::outside();
        // A run started exactly at the fixed point has zero radius; every
        // state of such a run counts as converged.
        if (d_o == 0.0) return SetIndex::converged();
        return set_index_from_distance(dist_blockmax, q, trace.n, d_o);
    };

    auto record = [&](long k) {
        SetIndex worst = SetIndex::converged();
        for (int i = 0; i < num_agents; ++i) {
            const Vector diff = sim.agent(i).local - x_hat;
            TraceRow row;
            row.k = k;
            row.agent = i;
            row.dist2 = diff.norm();
            row.dist_blockmax = block_max_norm(diff, problem.partition(), scheme);
            row.set_index = classify(row.dist_blockmax);
            if (row.set_index.worse_than(worst)) worst = row.set_index;
            trace.rows.push_back(std::move(row));
        }
        trace.aggregate_set_index.push_back(worst);
    };

    record(0);
    for (long k = 0; k < horizon; ++k) {
        sim.step();
        record(k + 1);
    }

    trace.updates = sim.updates();
    trace.sends = sim.sends();
    trace.deliveries = sim.deliveries();
    trace.events = sim.events();
    trace.final_states.reserve(static_cast<std::size_t>(num_agents));
    for (int i = 0; i < num_agents; ++i) trace.final_states.push_back(sim.agent(i).local);
    return trace;
}

LivenessReport liveness_check(const ActivationSchedule& schedule, int num_agents, long horizon,
                              long window) {
    if (horizon < 1) throw std::invalid_argument("liveness_check: horizon must be >= 1");
    if (window < 1) throw std::invalid_argument("liveness_check: window must be >= 1");
    LivenessReport report;
    report.window = window;
    report.per_agent_worst_gap.resize(static_cast<std::size_t>(num_agents), 0);
    for (int i = 0; i < num_agents; ++i) {
        long worst = 0;
        long prev = -1;  // boundary before the first tick
        for (long k = 0; k < horizon; ++k) {
            if (!schedule.updates_at(k, i)) continue;
            worst = std::max(worst, k - prev);
            prev = k;
        }
        worst = std::max(worst, horizon - prev);  // trailing silence
        report.per_agent_worst_gap[static_cast<std::size_t>(i)] = worst;
        if (worst > report.worst_gap) {
            report.worst_gap = worst;
            report.worst_agent = i;
        }
        if (worst > window) {
            report.ok = false;
            report.violating_agents.push_back(i);
        }
    }
    return report;
}

MonotoneReport monotone_set_diagnostic(const SimTrace& trace, double q, int n, double d_o) {
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("monotone_set_diagnostic requires q in (0, 1)");
    MonotoneReport report;
    report.indices.reserve(static_cast<std::size_t>(trace.horizon + 1));
    for (long k = 0; k <= trace.horizon; ++k) {
        const double worst_dist = trace.max_dist_blockmax_at(k);
        const SetIndex s = d_o == 0.0 ? SetIndex::converged()
                                      : set_index_from_distance(worst_dist, q, n, d_o);
        if (!report.indices.empty() && s.worse_than(report.indices.back()) &&
            report.nondecreasing) {
            report.nondecreasing = false;
            report.first_violation_k = k;
        }
        report.indices.push_back(s);
    }
    return report;
}

ParallelResult run_parallel(const QuadraticProblem& problem, const GammaMatrix& gammas,
                            long iterations, const std::vector<Vector>& initial_states) {
    const int num_agents = problem.num_agents();
    gammas.validate();
    if (static_cast<int>(gammas.gammas.size()) != num_agents ||
        static_cast<int>(initial_states.size()) != num_agents)
        throw std::invalid_argument("run_parallel: per-agent gammas and states required");

    struct Mailbox {
        std::mutex mutex;
        std::vector<std::pair<int, Vector>> queue;
    };
    std::vector<Mailbox> mailboxes(static_cast<std::size_t>(num_agents));
    std::vector<Vector> locals = initial_states;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(num_agents));

    for (int i = 0; i < num_agents; ++i) {
        workers.emplace_back([&, i] {
            AgentState a;
            a.block_start = problem.partition().start(i);
            a.block_size = problem.partition().size(i);
            const Matrix q_block = problem.q_row_block(i);
            const Vector r_block = problem.r_block(i);
            const double gamma = gammas.gammas[static_cast<std::size_t>(i)];
            Vector local = locals[static_cast<std::size_t>(i)];
            for (long t = 0; t < iterations; ++t) {
                {
                    std::scoped_lock lock(mailboxes[static_cast<std::size_t>(i)].mutex);
                    for (auto& [sender, payload] :
                         mailboxes[static_cast<std::size_t>(i)].queue) {
                        local.segment(problem.partition().start(sender),
                                      problem.partition().size(sender)) = payload;
                    }
                    mailboxes[static_cast<std::size_t>(i)].queue.clear();
                }
                local.segment(a.block_start, a.block_size) -=
                    gamma * (q_block * local + r_block);
                const Vector own = local.segment(a.block_start, a.block_size);
                for (int j = 0; j < num_agents; ++j) {
                    if (j == i) continue;
                    std::scoped_lock lock(mailboxes[static_cast<std::size_t>(j)].mutex);
                    mailboxes[static_cast<std::size_t>(j)].queue.emplace_back(i, own);
                }
            }
            locals[static_cast<std::size_t>(i)] = std::move(local);
        });
    }
    for (auto& w : workers) w.join();

    ParallelResult result;
    result.final_states = std::move(locals);
    result.total_updates = iterations * num_agents;
    return result;
}

}  // namespace asyncqp
