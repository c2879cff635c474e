#pragma once

#include <cstdint>
#include <deque>
#include <map>

#include "startrail/config.hpp"
#include "startrail/ids.hpp"

namespace startrail {

// Hopping-window popularity counter.
//
// Time is cut into samples of window_hop_ms; the sampling window is the
// current sample plus the last window_samples-1 finished ones. A cid is
// popular the moment its observation count across the window reaches the
// threshold (the triggering observation is counted first, then tested).
//
// Samples advance lazily on observation and eagerly on hop ticks; both paths
// land on identical boundaries (start0 + m * hop), so interleaving them never
// changes the outcome.
class PopularityManager {
  public:
    explicit PopularityManager(NodeConfig cfg, SimTime start = 0)
        : cfg_(cfg), current_start_(start) {}

    // Counts one sighting of cid at `now` and reports whether the window sum
    // has reached the popularity threshold.
    bool observe_and_test(const ContentId& cid, SimTime now) {
        roll_to(now);
        ++current_counts_[cid];
        return window_sum(cid) >= cfg_.popularity_threshold;
    }

    // Advances the current sample in whole hops until it covers `now`.
    // Gaps spanning the whole window reset the history in one step instead of
    // iterating hop by hop.
    void roll_to(SimTime now) {
        if (now < current_start_ + cfg_.window_hop_ms) return;
        std::int64_t hops_behind = (now - current_start_) / cfg_.window_hop_ms;
        if (hops_behind >= cfg_.window_samples) {
            history_.clear();
            current_counts_.clear();
            current_start_ += hops_behind * cfg_.window_hop_ms;
            return;
        }
        for (std::int64_t i = 0; i < hops_behind; ++i) {
            history_.push_back(std::move(current_counts_));
            current_counts_.clear();
            current_start_ += cfg_.window_hop_ms;
            prune();
        }
    }

    // Sum over the current sample and the retained history. Callers that need
    // the sum at a boundary (hop ticks) roll first.
    std::int64_t window_sum(const ContentId& cid) const {
        std::int64_t sum = 0;
        auto it = current_counts_.find(cid);
        if (it != current_counts_.end()) sum += it->second;
        for (const auto& sample : history_) {
            auto h = sample.find(cid);
            if (h != sample.end()) sum += h->second;
        }
        return sum;
    }

    // Applies a new config if it validates; a shrunken window takes effect
    // immediately (excess history is dropped). Returns false and keeps the
    // old config otherwise.
    bool update_configs(const NodeConfig& cfg) {
        if (!validate(cfg).empty()) return false;
        cfg_ = cfg;
        prune();
        return true;
    }

    const NodeConfig& config() const { return cfg_; }
    SimTime current_sample_start() const { return current_start_; }
    std::size_t history_size() const { return history_.size(); }

  private:
    using Counts = std::map<ContentId, std::int64_t>;

    void prune() {
        while (history_.size() > static_cast<std::size_t>(cfg_.window_samples - 1)) {
            history_.pop_front();
        }
    }

    NodeConfig cfg_;
    SimTime current_start_;
    Counts current_counts_;
    std::deque<Counts> history_;  // oldest first
};

}  // namespace startrail
