#include "asyncqp/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace asyncqp {

namespace {

using nlohmann::json;

constexpr int kProblemFormatVersion = 1;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path + ": " + e.what());
    }
    return doc;
}

void dump_json(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path);
}

std::string set_index_field(const SimTrace& trace, const SetIndex& s) {
    if (!trace.set_index_valid) return "na";
    switch (s.kind) {
        case SetIndex::Kind::Outside: return "outside";
        case SetIndex::Kind::Converged: return "converged";
        case SetIndex::Kind::Index: return std::to_string(s.s);
    }
    return "na";
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) {
        const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf, static_cast<std::size_t>(len));
    }
    return std::string(buf, end);
}

void write_problem_file(const QuadraticProblem& problem, const std::string& path) {
    json doc;
    doc["format_version"] = kProblemFormatVersion;
    doc["n"] = problem.dim();
    doc["blocks"] = problem.partition().sizes();
    std::vector<double> q;
    q.reserve(static_cast<std::size_t>(problem.dim()) * static_cast<std::size_t>(problem.dim()));
    for (int i = 0; i < problem.dim(); ++i)
        for (int j = 0; j < problem.dim(); ++j) q.push_back(problem.q()(i, j));
    doc["q"] = std::move(q);
    doc["r"] = std::vector<double>(problem.r().data(), problem.r().data() + problem.dim());
    if (problem.box()) {
        doc["box"]["lower"] = std::vector<double>(problem.box()->lower.data(),
                                                  problem.box()->lower.data() + problem.dim());
        doc["box"]["upper"] = std::vector<double>(problem.box()->upper.data(),
                                                  problem.box()->upper.data() + problem.dim());
    }
    dump_json(doc, path);
}

QuadraticProblem load_problem_file(const std::string& path) {
    const json doc = load_json(path);
    try {
        if (doc.at("format_version").get<int>() != kProblemFormatVersion)
            throw IoError(path + ": unsupported problem format_version");
        const int n = doc.at("n").get<int>();
        BlockPartition partition(doc.at("blocks").get<std::vector<int>>());
        const auto qs = doc.at("q").get<std::vector<double>>();
        if (static_cast<int>(qs.size()) != n * n)
            throw IoError(path + ": q has wrong length");
        Matrix q(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                q(i, j) = qs[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                             static_cast<std::size_t>(j)];
        const auto rs = doc.at("r").get<std::vector<double>>();
        if (static_cast<int>(rs.size()) != n) throw IoError(path + ": r has wrong length");
        Vector r = Eigen::Map<const Vector>(rs.data(), n);
        std::optional<Box> box;
        if (doc.contains("box")) {
            const auto lo = doc.at("box").at("lower").get<std::vector<double>>();
            const auto hi = doc.at("box").at("upper").get<std::vector<double>>();
            if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
                throw IoError(path + ": box bounds have wrong length");
            box = Box{Eigen::Map<const Vector>(lo.data(), n), Eigen::Map<const Vector>(hi.data(), n)};
        }
        return QuadraticProblem(std::move(q), std::move(r), std::move(partition), std::move(box));
    } catch (const json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
}

void write_trace_csv(const SimTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "k,agent_id,dist2,dist_blockmax,set_index\n";
    for (const TraceRow& row : trace.rows) {
        out << row.k << ',' << row.agent << ',' << format_double(row.dist2) << ','
            << format_double(row.dist_blockmax) << ',' << set_index_field(trace, row.set_index)
            << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

void write_events_csv(const SimTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "k,type,i,j,compute_time\n";
    for (const EventRecord& e : trace.events) {
        const char* type = e.type == EventRecord::Type::Update   ? "update"
                           : e.type == EventRecord::Type::Send   ? "send"
                                                                 : "deliver";
        out << e.k << ',' << type << ',' << e.i << ',';
        if (e.j >= 0) out << e.j;
        out << ',' << e.compute_time << '\n';
    }
    if (!out) throw IoError("write failed for " + path);
}

TraceSeries load_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty trace file");
    std::map<double, double> worst;  // k -> max dist2
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string k_str, agent_str, dist_str;
        if (!std::getline(ss, k_str, ',') || !std::getline(ss, agent_str, ',') ||
            !std::getline(ss, dist_str, ','))
            throw IoError(path + ": malformed CSV at line " + std::to_string(lineno));
        try {
            const double k = std::stod(k_str);
            const double dist = std::stod(dist_str);
            auto [it, inserted] = worst.emplace(k, dist);
            if (!inserted) it->second = std::max(it->second, dist);
        } catch (const std::exception&) {
            throw IoError(path + ": malformed CSV at line " + std::to_string(lineno));
        }
    }
    if (worst.empty()) throw IoError(path + ": trace has no data rows");
    TraceSeries series;
    series.k.reserve(worst.size());
    series.worst_dist2.reserve(worst.size());
    for (const auto& [k, dist] : worst) {
        series.k.push_back(k);
        series.worst_dist2.push_back(dist);
    }
    return series;
}

}  // namespace asyncqp
