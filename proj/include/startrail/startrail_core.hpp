#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "startrail/blockstore.hpp"
#include "startrail/config.hpp"
#include "startrail/ids.hpp"
#include "startrail/popularity.hpp"

namespace startrail {

enum class StartrailEventKind { popular, cached, unpinned, fetch_failed };

inline const char* to_string(StartrailEventKind k) {
    switch (k) {
        case StartrailEventKind::popular: return "popular";
        case StartrailEventKind::cached: return "cached";
        case StartrailEventKind::unpinned: return "unpinned";
        case StartrailEventKind::fetch_failed: return "fetch_failed";
    }
    return "?";
}

struct StartrailEvent {
    SimTime time = 0;
    ContentId cid;
    StartrailEventKind kind{};
};

// Wiring into the host node. start_fetch must be asynchronous (the node
// reports back through on_fetch_complete); announce publishes a provider
// record for a block this node now serves.
struct StartrailHooks {
    std::function<void(const ContentId&)> start_fetch;
    std::function<void(const ContentId&)> announce;
    std::function<void(const StartrailEvent&)> log;
};

// The adaptive-cache decision core. Fed with every GET_PROVIDER a node
// receives from remote peers; never with lookups the node itself originates,
// so a node's own cache-fill traffic cannot inflate its own counters.
class StartrailCore {
  public:
    StartrailCore(NodeConfig cfg, Blockstore& store, PopularityManager& popularity,
                  StartrailHooks hooks)
        : cfg_(cfg), store_(store), popularity_(popularity), hooks_(std::move(hooks)) {}

    // Observes one remote sighting of cid. When the sighting tips the cid
    // over the popularity threshold the block is cached: pinned and announced
    // if already stored, fetched otherwise. Returns the popularity verdict.
    bool process(const ContentId& cid, SimTime now) {
        if (!cfg_.startrail_enabled) return false;
        bool popular = popularity_.observe_and_test(cid, now);
        if (!popular) return false;

        if (store_.contains(cid)) {
            if (pinned_.count(cid) == 0) {
                emit(now, cid, StartrailEventKind::popular);
                // A pin refusal (store at the high-water mark) still leaves
                // the block served and announced; it is just evictable.
                if (store_.pin(cid, now)) pinned_.insert(cid);
                hooks_.announce(cid);
                emit(now, cid, StartrailEventKind::cached);
            }
        } else if (in_flight_.count(cid) == 0) {
            emit(now, cid, StartrailEventKind::popular);
            in_flight_.insert(cid);
            hooks_.start_fetch(cid);
        }
        return true;
    }

    // Completion callback for fetches started by process(). On success the
    // host node has already stored the verified block.
    void on_fetch_complete(const ContentId& cid, SimTime now, bool success) {
        in_flight_.erase(cid);
        if (!success) {
            emit(now, cid, StartrailEventKind::fetch_failed);
            return;
        }
        if (store_.pin(cid, now)) pinned_.insert(cid);
        hooks_.announce(cid);
        emit(now, cid, StartrailEventKind::cached);
    }

    // Hop-boundary sweep: drops the pin of every cached cid whose window sum
    // fell below the threshold. Returns the cids unpinned this tick.
    std::vector<ContentId> on_hop_tick(SimTime now) {
        std::vector<ContentId> dropped;
        if (!cfg_.startrail_enabled) return dropped;
        popularity_.roll_to(now);
        for (auto it = pinned_.begin(); it != pinned_.end();) {
            if (popularity_.window_sum(*it) < cfg_.popularity_threshold) {
                store_.unpin(*it);
                emit(now, *it, StartrailEventKind::unpinned);
                dropped.push_back(*it);
                it = pinned_.erase(it);
            } else {
                ++it;
            }
        }
        return dropped;
    }

    // Stages a new config. Validation failures leave everything untouched.
    bool update_configs(const NodeConfig& cfg) {
        if (!validate(cfg).empty()) return false;
        if (!popularity_.update_configs(cfg)) return false;
        cfg_ = cfg;
        return true;
    }

    bool enabled() const { return cfg_.startrail_enabled; }
    const std::set<ContentId>& pinned_cids() const { return pinned_; }
    const std::set<ContentId>& fetches_in_flight() const { return in_flight_; }
    const NodeConfig& config() const { return cfg_; }

  private:
    void emit(SimTime now, const ContentId& cid, StartrailEventKind kind) {
        if (hooks_.log) hooks_.log(StartrailEvent{now, cid, kind});
    }

    NodeConfig cfg_;
    Blockstore& store_;
    PopularityManager& popularity_;
    StartrailHooks hooks_;
    std::set<ContentId> pinned_;
    std::set<ContentId> in_flight_;
};

}  // namespace startrail
