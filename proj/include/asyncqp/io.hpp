#pragma once

#include <string>
#include <vector>

#include "asyncqp/async_sim.hpp"
#include "asyncqp/qp_model.hpp"
#include "asyncqp/types.hpp"

namespace asyncqp {

/// Shortest exact decimal for a double (round-trips bit-exactly).
std::string format_double(double v);

/// Problem files are JSON documents with a format_version field, block
/// sizes, row-major Q, r, and optional box bounds.
void write_problem_file(const QuadraticProblem& problem, const std::string& path);
QuadraticProblem load_problem_file(const std::string& path);

/// Trace CSV schema: k,agent_id,dist2,dist_blockmax,set_index
void write_trace_csv(const SimTrace& trace, const std::string& path);

/// Event log schema: k,type,i,j,compute_time (j empty for updates).
void write_events_csv(const SimTrace& trace, const std::string& path);

/// Worst-agent 2-norm distance per tick, as read back from a trace CSV.
struct TraceSeries {
    std::vector<double> k;
    std::vector<double> worst_dist2;
};

TraceSeries load_trace_csv(const std::string& path);

}  // namespace asyncqp
