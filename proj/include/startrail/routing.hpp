#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "startrail/config.hpp"
#include "startrail/ids.hpp"

namespace startrail {

// Kademlia-style k-bucket table. Bucket index is the shared prefix length
// between the owner id and the contact id. Buckets hold at most k live
// contacts; in this simulation peers never fail, so a full bucket simply
// drops newcomers (the usual least-recently-seen eviction never fires).
class RoutingTable {
  public:
    RoutingTable(PeerId owner, int k) : owner_(owner), k_(k) {}

    // Insert or move-to-tail (most recently seen last).
    void refresh(const PeerId& peer) {
        if (peer == owner_) return;
        auto& bucket = buckets_[bucket_index(peer)];
        auto it = std::find(bucket.begin(), bucket.end(), peer);
        if (it != bucket.end()) {
            bucket.erase(it);
            bucket.push_back(peer);
            return;
        }
        if (bucket.size() < static_cast<std::size_t>(k_)) bucket.push_back(peer);
    }

    bool contains(const PeerId& peer) const {
        const auto& bucket = buckets_[bucket_index(peer)];
        return std::find(bucket.begin(), bucket.end(), peer) != bucket.end();
    }

    // The `count` known peers closest to `target` by XOR distance. Ties (none
    // in practice, ids are distinct) break on peer id so the order is total.
    std::vector<PeerId> closest(const Hash256& target, std::size_t count) const {
        std::vector<PeerId> all;
        for (const auto& bucket : buckets_) all.insert(all.end(), bucket.begin(), bucket.end());
        std::sort(all.begin(), all.end(), [&](const PeerId& a, const PeerId& b) {
            Hash256 da = xor_bytes(a.id, target);
            Hash256 db = xor_bytes(b.id, target);
            if (da != db) return da < db;
            return a < b;
        });
        if (all.size() > count) all.resize(count);
        return all;
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& bucket : buckets_) n += bucket.size();
        return n;
    }

    std::size_t bucket_size(int index) const { return buckets_[index].size(); }

    int bucket_index(const PeerId& peer) const {
        int prefix = shared_prefix_bits(owner_.id, peer.id);
        return prefix > 255 ? 255 : prefix;
    }

    const PeerId& owner() const { return owner_; }
    int k() const { return k_; }

  private:
    PeerId owner_;
    int k_;
    std::array<std::vector<PeerId>, 256> buckets_;
};

// Provider records: who claims to hold which cid, with an expiry stamp.
// Re-announcements extend the expiry; lookups never return expired entries.
class ProviderStore {
  public:
    void add(const ContentId& cid, const PeerId& provider, SimTime expires_at) {
        auto& slot = records_[cid][provider];
        if (expires_at > slot) slot = expires_at;
    }

    // Unexpired providers in peer-id order (deterministic across runs).
    std::vector<PeerId> providers_for(const ContentId& cid, SimTime now) {
        auto it = records_.find(cid);
        if (it == records_.end()) return {};
        std::vector<PeerId> out;
        for (auto rec = it->second.begin(); rec != it->second.end();) {
            if (rec->second <= now) {
                rec = it->second.erase(rec);
            } else {
                out.push_back(rec->first);
                ++rec;
            }
        }
        if (it->second.empty()) records_.erase(it);
        return out;
    }

    std::size_t record_count() const {
        std::size_t n = 0;
        for (const auto& [cid, provs] : records_) n += provs.size();
        return n;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (const auto& [cid, provs] : records_) {
            for (const auto& [peer, expires] : provs) fn(cid, peer, expires);
        }
    }

  private:
    std::map<ContentId, std::map<PeerId, SimTime>> records_;
};

// Outcome of a provider lookup: hops counts query rounds (0 when satisfied
// from local records), messages_sent counts queries this node issued.
struct LookupResult {
    std::vector<PeerId> providers;
    int hops = 0;
    int messages_sent = 0;
};

}  // namespace startrail
