// Smallest useful example: a 24-node network, half of it running the cache
// layer, fetching from a Pareto-distributed workload for two simulated
// minutes. Prints the aggregate numbers and the cache events that fired.

#include <iostream>

#include "startrail/startrail.hpp"

int main() {
    using namespace startrail;

    Scenario sc;
    sc.name = "minimal";
    sc.node_count = 24;
    sc.bootstrap_count = 2;
    sc.provider_count = 2;
    sc.startrail_fraction = 0.5;
    sc.request_period_ms = 10 * kSecond;
    sc.duration_ms = 2 * kMinute;
    sc.run_seed = 7;
    sc.policy.kind = PolicyKind::PR;
    sc.dataset.block_count = 8;
    sc.dataset.block_size = 4096;
    sc.node_config.storage_budget_bytes = 8 << 20;

    Simulator sim(sc);
    RunMetrics m = sim.run();

    std::cout << "completed " << m.completed_count << " requests, failed " << m.failed_count
              << "\n";
    std::cout << "p95 request " << m.p95_request_ms << " ms, mean "
              << format_double(m.mean_request_ms) << " ms\n";
    std::cout << "steady-state bytes sent " << m.total_bytes_sent_steady << " (warm-up "
              << m.total_bytes_sent_warmup << ")\n";

    int cached = 0, unpinned = 0;
    for (const auto& le : m.startrail_events) {
        if (le.event.kind == StartrailEventKind::cached) ++cached;
        if (le.event.kind == StartrailEventKind::unpinned) ++unpinned;
    }
    std::cout << "cache events: " << cached << " cached, " << unpinned << " unpinned\n";
    return 0;
}
