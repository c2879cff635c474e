#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "startrail/block.hpp"
#include "startrail/config.hpp"

namespace startrail {

struct StoreStats {
    std::int64_t used_bytes = 0;
    std::int64_t pinned_bytes = 0;
    std::int64_t block_count = 0;
    std::int64_t pinned_count = 0;
};

// Content-addressed store with pinning and LRU garbage collection.
//
// Invariants:
//   - only verified blocks are admitted;
//   - used_bytes always equals the sum of stored payload sizes;
//   - pinned entries are never evicted, even when the budget stays exceeded;
//   - eviction order is strictly (last_access, cid) ascending.
class Blockstore {
  public:
    explicit Blockstore(NodeConfig cfg) : cfg_(cfg) {}

    // Admits a verified block. Re-putting an existing cid only refreshes its
    // last_access. Runs GC if the store grew past the budget.
    // Returns false iff the block fails verification.
    bool put(const Block& b, SimTime now) {
        if (!verify_block(b)) return false;
        auto it = entries_.find(b.cid);
        if (it != entries_.end()) {
            it->second.last_access = now;
            return true;
        }
        Entry e;
        e.block = b;
        e.last_access = now;
        used_bytes_ += static_cast<std::int64_t>(b.size());
        entries_.emplace(b.cid, std::move(e));
        if (used_bytes_ > cfg_.storage_budget_bytes) gc(now);
        return true;
    }

    std::optional<Block> get(const ContentId& cid, SimTime now) {
        auto it = entries_.find(cid);
        if (it == entries_.end()) return std::nullopt;
        it->second.last_access = now;
        return it->second.block;
    }

    bool contains(const ContentId& cid) const { return entries_.count(cid) != 0; }

    // Pinning is refused once the store is at or beyond the high-water mark,
    // so some headroom is always left for regular traffic. Pinning an already
    // pinned block is a no-op success; pinning an absent cid fails.
    bool pin(const ContentId& cid, SimTime /*now*/) {
        auto it = entries_.find(cid);
        if (it == entries_.end()) return false;
        if (it->second.pinned) return true;
        double highwater = cfg_.pin_highwater_fraction *
                           static_cast<double>(cfg_.storage_budget_bytes);
        if (static_cast<double>(used_bytes_) >= highwater) return false;
        it->second.pinned = true;
        pinned_bytes_ += static_cast<std::int64_t>(it->second.block.size());
        return true;
    }

    bool unpin(const ContentId& cid) {
        auto it = entries_.find(cid);
        if (it == entries_.end() || !it->second.pinned) return false;
        it->second.pinned = false;
        pinned_bytes_ -= static_cast<std::int64_t>(it->second.block.size());
        return true;
    }

    bool is_pinned(const ContentId& cid) const {
        auto it = entries_.find(cid);
        return it != entries_.end() && it->second.pinned;
    }

    // Evicts unpinned blocks, least recently used first, until used_bytes is
    // at or below the low-water mark. With gc_full_sweep every unpinned block
    // goes at once. Returns the evicted cids in eviction order.
    std::vector<ContentId> gc(SimTime /*now*/) {
        std::vector<std::pair<SimTime, ContentId>> victims;
        for (const auto& [cid, e] : entries_) {
            if (!e.pinned) victims.emplace_back(e.last_access, cid);
        }
        std::sort(victims.begin(), victims.end());

        double lowwater =
            cfg_.gc_lowwater_fraction * static_cast<double>(cfg_.storage_budget_bytes);
        std::vector<ContentId> evicted;
        for (const auto& [access, cid] : victims) {
            if (!cfg_.gc_full_sweep && static_cast<double>(used_bytes_) <= lowwater) break;
            auto it = entries_.find(cid);
            used_bytes_ -= static_cast<std::int64_t>(it->second.block.size());
            entries_.erase(it);
            evicted.push_back(cid);
        }
        return evicted;
    }

    void set_config(const NodeConfig& cfg) { cfg_ = cfg; }
    const NodeConfig& config() const { return cfg_; }

    StoreStats stats() const {
        StoreStats s;
        s.used_bytes = used_bytes_;
        s.pinned_bytes = pinned_bytes_;
        s.block_count = static_cast<std::int64_t>(entries_.size());
        for (const auto& [cid, e] : entries_) {
            if (e.pinned) ++s.pinned_count;
        }
        return s;
    }

    std::int64_t used_bytes() const { return used_bytes_; }

    // Debug export: one row per block, cid order.
    void snapshot_csv(std::ostream& out) const {
        out << "cid,size,pinned,last_access_ms\n";
        for (const auto& [cid, e] : entries_) {
            out << cid.display() << ',' << e.block.size() << ',' << (e.pinned ? 1 : 0) << ','
                << e.last_access << '\n';
        }
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (const auto& [cid, e] : entries_) fn(cid, e.block, e.pinned, e.last_access);
    }

  private:
    struct Entry {
        Block block;
        SimTime last_access = 0;
        bool pinned = false;
    };

    NodeConfig cfg_;
    std::map<ContentId, Entry> entries_;
    std::int64_t used_bytes_ = 0;
    std::int64_t pinned_bytes_ = 0;
};

}  // namespace startrail
