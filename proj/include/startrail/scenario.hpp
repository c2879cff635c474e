#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "startrail/config.hpp"
#include "startrail/messages.hpp"
#include "startrail/workloads.hpp"

namespace startrail {

struct LatencyParams {
    SimTime base_one_way_ms = 100;
    SimTime jitter_ms = 0;
};

struct DatasetParams {
    std::int64_t block_count = 2000;
    std::int64_t block_size = 4096;
    std::int64_t group_bytes = 3145728;  // 3 MB files
};

struct DhtParams {
    int k = 20;          // bucket capacity and provide fan-out
    int alpha = 3;       // lookup parallelism
    int lookup_want = 3; // providers a lookup tries to gather
};

struct ExchangeParams {
    int fanout = 3;  // providers contacted in parallel per fetch
    SimTime fetch_timeout_ms = 60 * kSecond;
};

struct Scenario {
    std::string name = "scenario";
    int node_count = 100;
    int bootstrap_count = 5;
    int provider_count = 2;
    double startrail_fraction = 0.0;
    SimTime request_period_ms = 30 * kSecond;
    SimTime duration_ms = 10 * kMinute;
    SimTime drain_grace_ms = 90 * kSecond;  // lets in-flight requests finish after the end
    std::uint64_t run_seed = 1;

    AccessPolicy policy;
    LatencyParams latency;
    DatasetParams dataset;
    NodeConfig node_config;
    DhtParams dht;
    ExchangeParams exchange;
    SizeModel sizes;
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<std::string> validate(const Scenario& s) {
    std::vector<std::string> errors;
    if (s.node_count < 1) errors.push_back("node_count: must be >= 1");
    if (s.bootstrap_count < 1) errors.push_back("bootstrap_count: must be >= 1");
    if (s.provider_count < 0) errors.push_back("provider_count: must be >= 0");
    if (s.bootstrap_count + s.provider_count > s.node_count)
        errors.push_back("node_count: must cover bootstrap_count + provider_count");
    if (!(s.startrail_fraction >= 0.0 && s.startrail_fraction <= 1.0))
        errors.push_back("startrail_fraction: must be in [0, 1]");
    if (s.request_period_ms <= 0) errors.push_back("request_period_ms: must be > 0");
    if (s.duration_ms < 0) errors.push_back("duration_ms: must be >= 0");
    if (s.drain_grace_ms < 0) errors.push_back("drain_grace_ms: must be >= 0");
    if (!(s.policy.pareto_alpha > 0.0)) errors.push_back("policy.pareto_alpha: must be > 0");
    if (s.latency.base_one_way_ms < 0) errors.push_back("latency.base_one_way_ms: must be >= 0");
    if (s.latency.jitter_ms < 0) errors.push_back("latency.jitter_ms: must be >= 0");
    if (s.dataset.block_count < 1) errors.push_back("dataset.block_count: must be >= 1");
    if (s.dataset.block_size < 1 ||
        s.dataset.block_size > static_cast<std::int64_t>(kDefaultMaxBlockSize))
        errors.push_back("dataset.block_size: must be in [1, 262144]");
    if (s.dataset.group_bytes < 1) errors.push_back("dataset.group_bytes: must be >= 1");
    if (s.dht.k < 1) errors.push_back("dht.k: must be >= 1");
    if (s.dht.alpha < 1) errors.push_back("dht.alpha: must be >= 1");
    if (s.dht.lookup_want < 1) errors.push_back("dht.lookup_want: must be >= 1");
    if (s.exchange.fanout < 1) errors.push_back("exchange.fanout: must be >= 1");
    if (s.exchange.fetch_timeout_ms <= 0)
        errors.push_back("exchange.fetch_timeout_ms: must be > 0");
    if (s.sizes.overhead_bytes < 0 || s.sizes.cid_field_bytes < 0 || s.sizes.entry_bytes < 0 ||
        s.sizes.provide_bytes < 0 || s.sizes.block_overhead_bytes < 0)
        errors.push_back("sizes: all fields must be >= 0");
    for (auto& e : validate(s.node_config)) errors.push_back(e);
    // Providers preload the whole dataset; a dataset that cannot fit makes the
    // scenario unreachable, so fail fast instead of thrashing the GC.
    if (s.provider_count > 0 &&
        s.dataset.block_count * s.dataset.block_size > s.node_config.storage_budget_bytes)
        errors.push_back(
            "dataset.block_count: dataset exceeds node_config.storage_budget_bytes");
    return errors;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        std::int64_t out = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return out;
    } catch (...) {
        throw ScenarioError(key + ": expected an integer, got '" + v + "'");
    }
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return out;
    } catch (...) {
        throw ScenarioError(key + ": expected a number, got '" + v + "'");
    }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ScenarioError(key + ": expected true or false, got '" + v + "'");
}

inline std::string parse_string(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    return v;
}

}  // namespace detail

// Applies one dotted key (section.key or a bare top-level key) to the
// scenario. Shared by the file parser and by --set overrides, so both accept
// exactly the same keys and diagnostics always name the offending one.
inline void apply_setting(Scenario& s, const std::string& key, const std::string& raw_value) {
    using detail::parse_bool;
    using detail::parse_double;
    using detail::parse_int;
    const std::string value = detail::trim(raw_value);

    if (key == "name") { s.name = detail::parse_string(value); return; }
    if (key == "node_count") { s.node_count = static_cast<int>(parse_int(key, value)); return; }
    if (key == "bootstrap_count") {
        s.bootstrap_count = static_cast<int>(parse_int(key, value));
        return;
    }
    if (key == "provider_count") {
        s.provider_count = static_cast<int>(parse_int(key, value));
        return;
    }
    if (key == "startrail_fraction") { s.startrail_fraction = parse_double(key, value); return; }
    if (key == "request_period_ms") { s.request_period_ms = parse_int(key, value); return; }
    if (key == "duration_ms") { s.duration_ms = parse_int(key, value); return; }
    if (key == "drain_grace_ms") { s.drain_grace_ms = parse_int(key, value); return; }
    if (key == "run_seed") {
        s.run_seed = static_cast<std::uint64_t>(parse_int(key, value));
        return;
    }

    if (key == "policy.kind") {
        std::string v = detail::parse_string(value);
        if (v == "RA") s.policy.kind = PolicyKind::RA;
        else if (v == "PR") s.policy.kind = PolicyKind::PR;
        else if (v == "FR") s.policy.kind = PolicyKind::FR;
        else throw ScenarioError("policy.kind: expected RA, PR or FR, got '" + v + "'");
        return;
    }
    if (key == "policy.pareto_alpha") { s.policy.pareto_alpha = parse_double(key, value); return; }

    if (key == "latency.base_one_way_ms") {
        s.latency.base_one_way_ms = parse_int(key, value);
        return;
    }
    if (key == "latency.jitter_ms") { s.latency.jitter_ms = parse_int(key, value); return; }

    if (key == "dataset.block_count") { s.dataset.block_count = parse_int(key, value); return; }
    if (key == "dataset.block_size") { s.dataset.block_size = parse_int(key, value); return; }
    if (key == "dataset.group_bytes") { s.dataset.group_bytes = parse_int(key, value); return; }

    if (key == "node_config.startrail_enabled") {
        s.node_config.startrail_enabled = parse_bool(key, value);
        return;
    }
    if (key == "node_config.window_hop_ms") {
        s.node_config.window_hop_ms = parse_int(key, value);
        return;
    }
    if (key == "node_config.window_samples") {
        s.node_config.window_samples = static_cast<int>(parse_int(key, value));
        return;
    }
    if (key == "node_config.popularity_threshold") {
        s.node_config.popularity_threshold = parse_int(key, value);
        return;
    }
    if (key == "node_config.storage_budget_bytes") {
        s.node_config.storage_budget_bytes = parse_int(key, value);
        return;
    }
    if (key == "node_config.pin_highwater_fraction") {
        s.node_config.pin_highwater_fraction = parse_double(key, value);
        return;
    }
    if (key == "node_config.gc_lowwater_fraction") {
        s.node_config.gc_lowwater_fraction = parse_double(key, value);
        return;
    }
    if (key == "node_config.gc_full_sweep") {
        s.node_config.gc_full_sweep = parse_bool(key, value);
        return;
    }
    if (key == "node_config.provider_record_ttl_ms") {
        s.node_config.provider_record_ttl_ms = parse_int(key, value);
        return;
    }

    if (key == "dht.k") { s.dht.k = static_cast<int>(parse_int(key, value)); return; }
    if (key == "dht.alpha") { s.dht.alpha = static_cast<int>(parse_int(key, value)); return; }
    if (key == "dht.lookup_want") {
        s.dht.lookup_want = static_cast<int>(parse_int(key, value));
        return;
    }

    if (key == "exchange.fanout") {
        s.exchange.fanout = static_cast<int>(parse_int(key, value));
        return;
    }
    if (key == "exchange.fetch_timeout_ms") {
        s.exchange.fetch_timeout_ms = parse_int(key, value);
        return;
    }

    if (key == "sizes.overhead_bytes") { s.sizes.overhead_bytes = parse_int(key, value); return; }
    if (key == "sizes.cid_field_bytes") {
        s.sizes.cid_field_bytes = parse_int(key, value);
        return;
    }
    if (key == "sizes.entry_bytes") { s.sizes.entry_bytes = parse_int(key, value); return; }
    if (key == "sizes.provide_bytes") { s.sizes.provide_bytes = parse_int(key, value); return; }
    if (key == "sizes.block_overhead_bytes") {
        s.sizes.block_overhead_bytes = parse_int(key, value);
        return;
    }

    throw ScenarioError("unknown scenario key: " + key);
}

// Applies a "key=value" override as given on the command line.
inline void apply_override(Scenario& s, const std::string& setting) {
    std::size_t eq = setting.find('=');
    if (eq == std::string::npos) {
        throw ScenarioError("override '" + setting + "': expected key=value");
    }
    apply_setting(s, detail::trim(setting.substr(0, eq)), setting.substr(eq + 1));
}

// Scenario text: `key = value` lines with `[section]` tables, `#` comments.
inline Scenario parse_scenario_text(const std::string& text) {
    Scenario s;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = std::string::npos;
        bool in_quotes = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quotes = !in_quotes;
            if (line[i] == '#' && !in_quotes) { hash = i; break; }
        }
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ScenarioError("line " + std::to_string(lineno) + ": malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (!section.empty()) key = section + "." + key;
        apply_setting(s, key, value);
    }
    return s;
}

inline Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

inline void write_scenario(std::ostream& out, const Scenario& s) {
    out << "name = \"" << s.name << "\"\n";
    out << "node_count = " << s.node_count << "\n";
    out << "bootstrap_count = " << s.bootstrap_count << "\n";
    out << "provider_count = " << s.provider_count << "\n";
    out << "startrail_fraction = " << s.startrail_fraction << "\n";
    out << "request_period_ms = " << s.request_period_ms << "\n";
    out << "duration_ms = " << s.duration_ms << "\n";
    out << "drain_grace_ms = " << s.drain_grace_ms << "\n";
    out << "run_seed = " << s.run_seed << "\n";
    out << "\n[policy]\n";
    out << "kind = \"" << to_string(s.policy.kind) << "\"\n";
    out << "pareto_alpha = " << s.policy.pareto_alpha << "\n";
    out << "\n[latency]\n";
    out << "base_one_way_ms = " << s.latency.base_one_way_ms << "\n";
    out << "jitter_ms = " << s.latency.jitter_ms << "\n";
    out << "\n[dataset]\n";
    out << "block_count = " << s.dataset.block_count << "\n";
    out << "block_size = " << s.dataset.block_size << "\n";
    out << "group_bytes = " << s.dataset.group_bytes << "\n";
    out << "\n[node_config]\n";
    out << "startrail_enabled = " << (s.node_config.startrail_enabled ? "true" : "false") << "\n";
    out << "window_hop_ms = " << s.node_config.window_hop_ms << "\n";
    out << "window_samples = " << s.node_config.window_samples << "\n";
    out << "popularity_threshold = " << s.node_config.popularity_threshold << "\n";
    out << "storage_budget_bytes = " << s.node_config.storage_budget_bytes << "\n";
    out << "pin_highwater_fraction = " << s.node_config.pin_highwater_fraction << "\n";
    out << "gc_lowwater_fraction = " << s.node_config.gc_lowwater_fraction << "\n";
    out << "gc_full_sweep = " << (s.node_config.gc_full_sweep ? "true" : "false") << "\n";
    out << "provider_record_ttl_ms = " << s.node_config.provider_record_ttl_ms << "\n";
    out << "\n[dht]\n";
    out << "k = " << s.dht.k << "\n";
    out << "alpha = " << s.dht.alpha << "\n";
    out << "lookup_want = " << s.dht.lookup_want << "\n";
    out << "\n[exchange]\n";
    out << "fanout = " << s.exchange.fanout << "\n";
    out << "fetch_timeout_ms = " << s.exchange.fetch_timeout_ms << "\n";
    out << "\n[sizes]\n";
    out << "overhead_bytes = " << s.sizes.overhead_bytes << "\n";
    out << "cid_field_bytes = " << s.sizes.cid_field_bytes << "\n";
    out << "entry_bytes = " << s.sizes.entry_bytes << "\n";
    out << "provide_bytes = " << s.sizes.provide_bytes << "\n";
    out << "block_overhead_bytes = " << s.sizes.block_overhead_bytes << "\n";
}

inline std::string scenario_to_text(const Scenario& s) {
    std::ostringstream out;
    write_scenario(out, s);
    return out.str();
}

// The six benchmark rows: each access policy with and without the cache
// layer. Desk-scale datasets keep runs deterministic and fast while leaving
// the contrast between the paired runs measurable.
inline Scenario benchmark_scenario(PolicyKind kind, bool with_startrail) {
    Scenario s;
    s.node_count = 100;
    s.bootstrap_count = 5;
    s.provider_count = 2;
    s.startrail_fraction = with_startrail ? 1.0 : 0.0;
    s.request_period_ms = 30 * kSecond;
    s.duration_ms = 10 * kMinute;
    s.run_seed = 42;
    s.latency.base_one_way_ms = 100;
    s.latency.jitter_ms = 0;
    s.policy.kind = kind;
    s.policy.pareto_alpha = 0.3;
    s.node_config.startrail_enabled = with_startrail;
    s.node_config.storage_budget_bytes = 64LL * 1024 * 1024;
    s.dataset.block_size = 4096;
    s.dataset.group_bytes = 12 * 4096;  // 12 blocks per file group
    switch (kind) {
        case PolicyKind::RA:
            s.name = with_startrail ? "ra_with_startrail" : "ra_without_startrail";
            s.dataset.block_count = 32;
            break;
        case PolicyKind::PR:
            s.name = with_startrail ? "pr_with_startrail" : "pr_without_startrail";
            s.dataset.block_count = 8;
            break;
        case PolicyKind::FR:
            s.name = with_startrail ? "fr_with_startrail" : "fr_without_startrail";
            s.dataset.block_count = 72;  // 6 file groups
            break;
    }
    return s;
}

}  // namespace startrail
