#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace startrail {

using SimTime = std::int64_t;  // virtual milliseconds

constexpr SimTime kSecond = 1000;
constexpr SimTime kMinute = 60 * kSecond;
constexpr SimTime kHour = 60 * kMinute;

// Per-node knobs. One instance is stamped onto every simulated node; the
// update path (update_configs) revalidates before applying.
struct NodeConfig {
    bool startrail_enabled = true;

    // Popularity hopping window: window_samples consecutive hops of
    // window_hop_ms each form the sampling window.
    SimTime window_hop_ms = 10 * kSecond;
    int window_samples = 3;
    std::int64_t popularity_threshold = 2;

    std::int64_t storage_budget_bytes = 10LL * 1024 * 1024 * 1024;
    double pin_highwater_fraction = 0.90;  // refuse new pins at or above this
    double gc_lowwater_fraction = 0.80;    // GC evicts down to this
    bool gc_full_sweep = false;            // true: evict every unpinned block instead

    SimTime provider_record_ttl_ms = 24 * kHour;
};

// Returns one message per violated field, each naming the offending key.
// Empty result means the config is usable.
inline std::vector<std::string> validate(const NodeConfig& c) {
    std::vector<std::string> errors;
    if (c.window_hop_ms <= 0) errors.push_back("node_config.window_hop_ms: must be > 0");
    if (c.window_samples < 1) errors.push_back("node_config.window_samples: must be >= 1");
    if (c.popularity_threshold < 1)
        errors.push_back("node_config.popularity_threshold: must be >= 1");
    if (c.storage_budget_bytes <= 0)
        errors.push_back("node_config.storage_budget_bytes: must be > 0");
    if (!(c.gc_lowwater_fraction > 0.0 && c.gc_lowwater_fraction < 1.0))
        errors.push_back("node_config.gc_lowwater_fraction: must be in (0, 1)");
    if (!(c.pin_highwater_fraction > 0.0 && c.pin_highwater_fraction <= 1.0))
        errors.push_back("node_config.pin_highwater_fraction: must be in (0, 1]");
    if (c.gc_lowwater_fraction >= c.pin_highwater_fraction)
        errors.push_back(
            "node_config.gc_lowwater_fraction: must be below pin_highwater_fraction");
    if (c.provider_record_ttl_ms <= 0)
        errors.push_back("node_config.provider_record_ttl_ms: must be > 0");
    return errors;
}

}  // namespace startrail
