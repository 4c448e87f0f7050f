#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "asyncqp/block_norm.hpp"
#include "asyncqp/param_planner.hpp"
#include "asyncqp/qp_model.hpp"
#include "asyncqp/types.hpp"

namespace asyncqp {

/// One agent's runtime state. The only problem data onboard is its own row
/// block, so storage per agent is O(n), not O(n^2).
struct AgentState {
    int id = 0;
    Vector local;             // x^i, this agent's copy of the global state
    double gamma = 0.0;
    int block_start = 0;
    int block_size = 0;
    Matrix q_row_block;       // Q^[i]
    Vector r_block;           // r^[i]
    std::optional<Box> own_box;  // this agent's slice of the constraint box
    long last_update_time = 0;   // state index of the last own-block change
    // Per sender block: the state index at which the held value was computed
    // by its owner (the tau bookkeeping).
    std::vector<long> slot_compute_time;

    Vector own_block() const { return local.segment(block_start, block_size); }
};

/// A state block in transit from sender to receiver.
struct MessageInFlight {
    int sender = 0;
    int receiver = 0;
    Vector payload;          // x_j^j as of compute_time
    long compute_time = 0;   // k_a: when the payload value was computed
    long send_time = 0;
    long delivery_time = 0;  // k_b > compute_time
    std::uint64_t seq = 0;   // global send order, used as a deterministic tie-break
};

/// When agents update and transmit. Times are ticks k in [0, horizon): an
/// agent with k in K^i computes its update during step k (producing the
/// state at k+1); a transmit scheduled at tick k sends the freshly committed
/// own block with send_time k+1.
struct ActivationSchedule {
    enum class Mode { Bernoulli, Explicit };
    Mode mode = Mode::Bernoulli;

    // Bernoulli mode: independent draws per agent per tick (updates) and per
    // directed link per tick (transmissions).
    double p_update = 1.0;
    double p_transmit = 1.0;
    std::uint64_t seed = 0;

    // Explicit mode: sorted tick lists; transmissions broadcast to all peers.
    std::vector<std::vector<long>> update_times;
    std::vector<std::vector<long>> transmit_times;

    static ActivationSchedule bernoulli(double p_update, double p_transmit, std::uint64_t seed);
    static ActivationSchedule explicit_times(std::vector<std::vector<long>> update_times,
                                             std::vector<std::vector<long>> transmit_times);

    bool updates_at(long k, int agent) const;
    bool transmits_at(long k, int sender, int receiver) const;
    void validate(int num_agents, long horizon) const;
};

/// Transit delay per message, always >= 1 tick. The adversarial mode grows
/// without bound (delay(k) = ceil(k/2)) yet still delivers every message,
/// which exercises total asynchrony.
struct DelayModel {
    enum class Mode { Fixed, UniformInt, AdversarialGrowing, CustomList };
    Mode mode = Mode::Fixed;
    long fixed = 1;
    long lo = 1;
    long hi = 1;
    std::uint64_t seed = 0;
    std::vector<long> custom;  // indexed by send tick, clamped to the last entry

    static DelayModel fixed_delay(long d);
    static DelayModel uniform(long lo, long hi, std::uint64_t seed);
    static DelayModel adversarial();
    static DelayModel custom_list(std::vector<long> delays);

    long delay(int sender, int receiver, long send_time) const;
    void validate() const;
};

struct SimOptions {
    // Default phase order: updates read the pre-delivery copy x^i(k);
    // deliveries land in x^i(k+1). Flipping this lets updates see same-tick
    // deliveries.
    bool updates_see_same_tick_deliveries = false;
    // Discard a delivered block older (by compute_time) than the one held.
    bool timestamp_dedup = false;
    bool record_own_history = false;  // keep per-tick own-block history (tests)
    bool record_events = false;
};

struct EventRecord {
    enum class Type { Update, Send, Deliver };
    long k = 0;  // tick at which the event takes effect
    Type type = Type::Update;
    int i = 0;
    int j = -1;  // peer agent; -1 for updates
    long compute_time = 0;
};

struct TraceRow {
    long k = 0;
    int agent = 0;
    double dist2 = 0.0;          // ||x^i(k) - x_hat||_2
    double dist_blockmax = 0.0;  // ||x^i(k) - x_hat||_max
    SetIndex set_index;
};

struct SimTrace {
    long horizon = 0;
    int num_agents = 0;
    int n = 0;
    double contraction_q = 0.0;
    double d_o = 0.0;
    bool set_index_valid = false;  // false when q >= 1 made indexing undefined
    std::vector<TraceRow> rows;    // (horizon + 1) * num_agents, k-major
    std::vector<SetIndex> aggregate_set_index;  // per tick, worst agent
    std::vector<Vector> final_states;
    long updates = 0;
    long sends = 0;
    long deliveries = 0;
    std::vector<EventRecord> events;

    const TraceRow& row(long k, int agent) const;
    double max_dist2_at(long k) const;
    double max_dist_blockmax_at(long k) const;
};

/// Deterministic single-threaded reference executor. Time is a global
/// integer tick; step() moves the world from k to k+1 in three phases:
///   A. messages with delivery_time == k+1 overwrite receiver slots
///      (latest compute_time per (receiver, sender) wins, then send order),
///   B. agents with k in K^i apply the block gradient step, reading their
///      pre-delivery copy (unless configured otherwise),
///   C. scheduled transmissions enqueue the committed own block.
class Simulator {
public:
    Simulator(const QuadraticProblem& problem, GammaMatrix gammas, ActivationSchedule schedule,
              DelayModel delays, std::vector<Vector> initial_states, SimOptions options = {});

    void step();
    long now() const { return k_; }
    int num_agents() const { return static_cast<int>(agents_.size()); }
    const AgentState& agent(int i) const { return agents_.at(static_cast<std::size_t>(i)); }
    std::size_t in_flight_count() const { return in_flight_.size(); }

    long updates() const { return updates_; }
    long sends() const { return sends_; }
    long deliveries() const { return deliveries_; }
    const std::vector<EventRecord>& events() const { return events_; }
    /// own_history()[j][t] = agent j's own block at state index t
    /// (only populated with SimOptions::record_own_history).
    const std::vector<std::vector<Vector>>& own_history() const { return own_history_; }

private:
    std::vector<AgentState> agents_;
    ActivationSchedule schedule_;
    DelayModel delays_;
    SimOptions options_;
    long k_ = 0;
    std::uint64_t seq_ = 0;
    std::multimap<long, MessageInFlight> in_flight_;
    long updates_ = 0, sends_ = 0, deliveries_ = 0;
    std::vector<EventRecord> events_;
    std::vector<std::vector<Vector>> own_history_;

    void deliver_due(long delivery_tick);
    void record_history();
};

/// Execute `horizon` steps and record distances against the problem's own
/// unconstrained minimizer.
SimTrace run(const QuadraticProblem& problem, const ActivationSchedule& schedule,
             const DelayModel& delays, const GammaMatrix& gammas, long horizon,
             const std::vector<Vector>& initial_states, const NormScheme& scheme,
             SimOptions options = {});

/// Finite-horizon proxy for "every K^i is infinite": every agent must update
/// at least once in every window of `window` ticks.
struct LivenessReport {
    bool ok = true;
    long window = 0;
    long worst_gap = 0;
    int worst_agent = -1;
    std::vector<long> per_agent_worst_gap;
    std::vector<int> violating_agents;
};

LivenessReport liveness_check(const ActivationSchedule& schedule, int num_agents, long horizon,
                              long window);

/// Forward-invariance diagnostic: the achieved set index of the worst agent
/// copy should never decrease along a run.
struct MonotoneReport {
    bool nondecreasing = true;
    long first_violation_k = -1;
    std::vector<SetIndex> indices;
};

MonotoneReport monotone_set_diagnostic(const SimTrace& trace, double q, int n, double d_o);

/// Optional parallel executor: one worker per agent exchanging blocks through
/// mutex-guarded mailboxes. Not trace-identical to the reference executor but
/// subject to the same convergence invariants.
struct ParallelResult {
    std::vector<Vector> final_states;
    long total_updates = 0;
};

ParallelResult run_parallel(const QuadraticProblem& problem, const GammaMatrix& gammas,
                            long iterations, const std::vector<Vector>& initial_states);

}  // namespace asyncqp
