#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "startrail/config.hpp"
#include "startrail/ids.hpp"
#include "startrail/startrail_core.hpp"

namespace startrail {

// Nearest-rank percentile: rank = ceil(p * n), 1-based, over the sorted
// sample. p in (0, 1]; the sample must be non-empty.
template <typename T>
T percentile(std::vector<T> samples, double p) {
    if (samples.empty()) throw std::invalid_argument("percentile: empty sample");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("percentile: p must be in (0, 1]");
    std::sort(samples.begin(), samples.end());
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(p * static_cast<double>(samples.size())));
    if (rank < 1) rank = 1;
    return samples[rank - 1];
}

struct RequestRecord {
    int node = 0;
    ContentId cid;  // representative cid: the block, or the first block of a group
    SimTime start_ms = 0;
    SimTime end_ms = 0;
    bool success = false;
    bool censored = false;  // still in flight when the run was cut off
};

struct NodeSample {
    int node = 0;
    SimTime time_ms = 0;
    std::int64_t used_bytes = 0;
    std::int64_t bytes_sent = 0;
    std::int64_t pinned_count = 0;
};

struct NodeTotals {
    int node = 0;
    std::int64_t bytes_sent_total = 0;
    std::int64_t bytes_sent_warmup = 0;
    std::int64_t bytes_received_total = 0;
    std::int64_t messages_sent = 0;
};

struct LoggedStartrailEvent {
    int node = 0;
    StartrailEvent event;
};

struct RunMetrics {
    std::string scenario_name;
    double startrail_fraction = 0.0;
    SimTime steady_start_ms = 0;
    SimTime end_ms = 0;

    std::vector<RequestRecord> requests;
    std::vector<NodeSample> samples;
    std::vector<NodeTotals> node_totals;
    std::vector<LoggedStartrailEvent> startrail_events;

    // Aggregates over completed (non-censored, successful) requests.
    std::int64_t completed_count = 0;
    std::int64_t failed_count = 0;
    std::int64_t censored_count = 0;
    SimTime p95_request_ms = 0;
    double mean_request_ms = 0.0;

    std::int64_t p95_used_bytes = 0;        // p95 of network-wide stored bytes over time
    std::int64_t p95_node_bytes_sent = 0;   // over per-node steady-state totals
    std::int64_t total_bytes_sent_steady = 0;
    std::int64_t total_bytes_sent_warmup = 0;
    std::int64_t total_messages = 0;

    void finalize() {
        std::vector<SimTime> durations;
        completed_count = failed_count = censored_count = 0;
        for (const auto& r : requests) {
            if (r.censored) {
                ++censored_count;
            } else if (r.success) {
                ++completed_count;
                durations.push_back(r.end_ms - r.start_ms);
            } else {
                ++failed_count;
            }
        }
        if (!durations.empty()) {
            p95_request_ms = percentile(durations, 0.95);
            std::int64_t sum = 0;
            for (SimTime d : durations) sum += d;
            mean_request_ms = static_cast<double>(sum) / static_cast<double>(durations.size());
        } else {
            p95_request_ms = 0;
            mean_request_ms = 0.0;
        }

        if (!samples.empty()) {
            // Network-wide stored bytes per sample instant; p95 over that
            // series. Bounded above by storage budget times node count.
            std::map<SimTime, std::int64_t> by_time;
            for (const auto& s : samples) by_time[s.time_ms] += s.used_bytes;
            std::vector<std::int64_t> sums;
            sums.reserve(by_time.size());
            for (const auto& [t, sum] : by_time) sums.push_back(sum);
            p95_used_bytes = percentile(sums, 0.95);
        }

        total_bytes_sent_steady = total_bytes_sent_warmup = total_messages = 0;
        if (!node_totals.empty()) {
            std::vector<std::int64_t> steady;
            steady.reserve(node_totals.size());
            for (const auto& t : node_totals) {
                std::int64_t s = t.bytes_sent_total - t.bytes_sent_warmup;
                steady.push_back(s);
                total_bytes_sent_steady += s;
                total_bytes_sent_warmup += t.bytes_sent_warmup;
                total_messages += t.messages_sent;
            }
            p95_node_bytes_sent = percentile(steady, 0.95);
        }
    }
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    bool degenerate = true;  // fewer than two distinct x values
};

inline LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    LinearFit fit;
    if (xs.size() != ys.size() || xs.size() < 2) return fit;
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) return fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.degenerate = false;
    return fit;
}

}  // namespace startrail
