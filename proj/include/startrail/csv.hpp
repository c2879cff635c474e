#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "startrail/sim.hpp"

namespace startrail {

// CSV rendering is the simulator's output contract, so formatting here is
// fixed: integers as-is, doubles with a pinned precision, no locale input.

inline std::string format_double(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return std::string(buf);
}

inline std::string requests_csv(const RunMetrics& m) {
    std::string out = "node,cid,start_ms,end_ms,success\n";
    for (const auto& r : m.requests) {
        out += std::to_string(r.node);
        out += ',';
        out += r.cid.display();
        out += ',';
        out += std::to_string(r.start_ms);
        out += ',';
        out += std::to_string(r.end_ms);
        out += ',';
        out += (r.success && !r.censored) ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline std::string nodes_csv(const RunMetrics& m) {
    std::string out = "node,time_ms,used_bytes,bytes_sent,pinned_count\n";
    for (const auto& s : m.samples) {
        out += std::to_string(s.node);
        out += ',';
        out += std::to_string(s.time_ms);
        out += ',';
        out += std::to_string(s.used_bytes);
        out += ',';
        out += std::to_string(s.bytes_sent);
        out += ',';
        out += std::to_string(s.pinned_count);
        out += '\n';
    }
    return out;
}

inline std::string summary_csv(const Scenario& sc, const RunMetrics& m) {
    std::ostringstream out;
    out << "key,value\n";
    auto kv = [&out](const std::string& k, const std::string& v) { out << k << ',' << v << '\n'; };
    kv("name", sc.name);
    kv("policy", to_string(sc.policy.kind));
    kv("node_count", std::to_string(sc.node_count));
    kv("bootstrap_count", std::to_string(sc.bootstrap_count));
    kv("provider_count", std::to_string(sc.provider_count));
    kv("startrail_fraction", format_double(sc.startrail_fraction, 4));
    kv("request_period_ms", std::to_string(sc.request_period_ms));
    kv("duration_ms", std::to_string(sc.duration_ms));
    kv("drain_grace_ms", std::to_string(sc.drain_grace_ms));
    kv("run_seed", std::to_string(sc.run_seed));
    kv("pareto_alpha", format_double(sc.policy.pareto_alpha, 4));
    kv("base_one_way_ms", std::to_string(sc.latency.base_one_way_ms));
    kv("jitter_ms", std::to_string(sc.latency.jitter_ms));
    kv("block_count", std::to_string(sc.dataset.block_count));
    kv("block_size", std::to_string(sc.dataset.block_size));
    kv("group_bytes", std::to_string(sc.dataset.group_bytes));
    kv("window_hop_ms", std::to_string(sc.node_config.window_hop_ms));
    kv("window_samples", std::to_string(sc.node_config.window_samples));
    kv("popularity_threshold", std::to_string(sc.node_config.popularity_threshold));
    kv("storage_budget_bytes", std::to_string(sc.node_config.storage_budget_bytes));
    kv("steady_start_ms", std::to_string(m.steady_start_ms));
    kv("end_ms", std::to_string(m.end_ms));
    kv("completed_requests", std::to_string(m.completed_count));
    kv("failed_requests", std::to_string(m.failed_count));
    kv("censored_requests", std::to_string(m.censored_count));
    kv("p95_request_ms", std::to_string(m.p95_request_ms));
    kv("mean_request_ms", format_double(m.mean_request_ms));
    kv("p95_used_bytes", std::to_string(m.p95_used_bytes));
    kv("p95_node_bytes_sent", std::to_string(m.p95_node_bytes_sent));
    kv("total_bytes_sent_steady", std::to_string(m.total_bytes_sent_steady));
    kv("total_bytes_sent_warmup", std::to_string(m.total_bytes_sent_warmup));
    kv("total_messages", std::to_string(m.total_messages));
    return out.str();
}

inline std::string sweep_csv(const SweepResult& sweep) {
    std::string out = "fraction,mean_ms,p95_ms\n";
    for (const auto& p : sweep.points) {
        out += format_double(p.fraction, 4);
        out += ',';
        out += format_double(p.mean_ms);
        out += ',';
        out += format_double(p.p95_ms);
        out += '\n';
    }
    return out;
}

inline std::string dataset_csv(const Dataset& d) {
    std::string out = "index,cid,size_bytes,group\n";
    std::size_t index = 0;
    for (std::size_t g = 0; g < d.groups.size(); ++g) {
        for (std::size_t i = 0; i < d.groups[g].size(); ++i, ++index) {
            out += std::to_string(index);
            out += ',';
            out += d.blocks[index].cid.display();
            out += ',';
            out += std::to_string(d.blocks[index].size());
            out += ',';
            out += std::to_string(g);
            out += '\n';
        }
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write file: " + path);
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path);
}

// Reads a summary.csv back into key -> value form (used for --baseline deltas).
inline std::map<std::string, std::string> read_summary_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open summary file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (first) {
            first = false;  // header
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        out[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return out;
}

}  // namespace startrail
