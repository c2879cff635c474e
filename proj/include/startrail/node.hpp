#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "startrail/blockstore.hpp"
#include "startrail/messages.hpp"
#include "startrail/popularity.hpp"
#include "startrail/routing.hpp"
#include "startrail/scenario.hpp"
#include "startrail/startrail_core.hpp"

namespace startrail {

// Services the simulation host provides to a node. All side effects of a node
// (traffic, timers, metrics) flow through here, which keeps nodes free of any
// global state and makes runs reproducible.
struct NodeEnv {
    virtual ~NodeEnv() = default;
    virtual SimTime now() const = 0;
    virtual void send_message(int from_index, const PeerId& to, Message msg) = 0;
    virtual void schedule_fetch_deadline(int node_index, SimTime at, ContentId cid,
                                         std::uint64_t token) = 0;
    virtual void log_startrail(int node_index, const StartrailEvent& ev) = 0;
    virtual void request_finished(int node_index, std::uint64_t request_id, bool success) = 0;
    virtual void join_finished(int node_index) = 0;
};

// One simulated peer: Kademlia-style routing with provider records, a
// blockstore, a want-list based exchange, and (optionally) the Startrail
// cache layer hooked into GET_PROVIDER reception.
//
// Not movable: the Startrail core keeps references into sibling members.
class Node {
  public:
    Node(int index, PeerId self, const Scenario& scenario, bool startrail_enabled,
         bool force_core, NodeEnv& env)
        : index_(index),
          self_(self),
          cfg_(scenario.node_config),
          dht_(scenario.dht),
          exchange_(scenario.exchange),
          env_(env),
          store_(with_enabled(scenario.node_config, startrail_enabled)),
          popularity_(with_enabled(scenario.node_config, startrail_enabled)),
          table_(self, scenario.dht.k) {
        cfg_.startrail_enabled = startrail_enabled;
        if (startrail_enabled || force_core) {
            StartrailHooks hooks;
            hooks.start_fetch = [this](const ContentId& cid) {
                start_fetch(cid, /*providers_needed=*/1, /*startrail=*/true, /*waiter=*/0);
            };
            hooks.announce = [this](const ContentId& cid) { announce_local(cid); };
            hooks.log = [this](const StartrailEvent& ev) { env_.log_startrail(index_, ev); };
            core_.emplace(cfg_, store_, popularity_, std::move(hooks));
        }
    }

    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    // ---- application surface ----------------------------------------------

    // Seeds the table and walks toward the own id to populate buckets.
    void bootstrap(const std::vector<PeerId>& seeds) {
        for (const auto& s : seeds) table_.refresh(s);
        start_lookup(LookupMode::closest, self_.id, ContentId{}, dht_.lookup_want,
                     [this](PendingLookup&) { env_.join_finished(index_); });
    }

    // Stores a block locally without any traffic (provider preload).
    void preload(const Block& b) { store_.put(b, env_.now()); }

    // Publishes a provider record: finds the k closest nodes to the cid and
    // sends each a PROVIDE. The local record is stored unconditionally, so an
    // isolated node still becomes discoverable once contacted.
    void announce(const ContentId& cid, std::function<void(int)> done) {
        records_.add(cid, self_, env_.now() + cfg_.provider_record_ttl_ms);
        start_lookup(LookupMode::closest, cid.digest, cid, dht_.lookup_want,
                     [this, cid, done](PendingLookup& lk) {
                         int sent = 0;
                         std::size_t k = static_cast<std::size_t>(dht_.k);
                         for (std::size_t i = 0; i < lk.shortlist.size() && i < k; ++i) {
                             env_.send_message(index_, lk.shortlist[i], Provide{cid, self_});
                             ++sent;
                         }
                         if (done) done(sent);
                     });
    }

    // Cheap announce used for cache fills: a node that turned out popular for a
    // cid sits on the lookup paths toward it, so its table already covers the
    // cid's neighborhood. Provider records go straight to the k closest known
    // peers with no iterative walk.
    void announce_local(const ContentId& cid) {
        records_.add(cid, self_, env_.now() + cfg_.provider_record_ttl_ms);
        for (const auto& p : table_.closest(cid.digest, static_cast<std::size_t>(dht_.k))) {
            env_.send_message(index_, p, Provide{cid, self_});
        }
    }

    // Iterative provider lookup. Local records satisfying `want` short-circuit
    // with zero traffic; otherwise the lookup walks toward the cid, querying
    // alpha unqueried candidates per round, and stops as soon as enough
    // providers are known or the k closest candidates are all queried.
    void find_providers(const ContentId& cid, int want,
                        std::function<void(const LookupResult&)> cb) {
        std::vector<PeerId> local = records_.providers_for(cid, env_.now());
        if (static_cast<int>(local.size()) >= want) {
            LookupResult r;
            r.providers = sort_by_distance(std::move(local), cid.digest);
            cb(r);
            return;
        }
        start_lookup(LookupMode::providers, cid.digest, cid, want,
                     [this, cid, cb](PendingLookup& lk) {
                         LookupResult r;
                         r.providers = sort_by_distance(
                             std::vector<PeerId>(lk.providers.begin(), lk.providers.end()),
                             cid.digest);
                         r.hops = lk.rounds;
                         r.messages_sent = lk.messages;
                         cb(r);
                     },
                     local);
    }

    // Application-level request: resolve every cid (single block, or a whole
    // file group). Locally stored blocks count as immediate hits.
    void start_request(std::uint64_t request_id, const std::vector<ContentId>& cids) {
        PendingRequest req;
        req.pending = 0;
        std::set<ContentId> distinct(cids.begin(), cids.end());
        std::vector<ContentId> missing;
        for (const auto& cid : distinct) {
            if (store_.get(cid, env_.now())) continue;  // touches last_access
            missing.push_back(cid);
        }
        if (missing.empty()) {
            env_.request_finished(index_, request_id, true);
            return;
        }
        req.pending = static_cast<int>(missing.size());
        requests_[request_id] = req;
        for (const auto& cid : missing) {
            start_fetch(cid, dht_.lookup_want, /*startrail=*/false, request_id);
        }
    }

    // Hop boundary: roll the popularity window and drop stale pins.
    void on_hop_tick() {
        if (core_ && core_->enabled()) core_->on_hop_tick(env_.now());
    }

    // Fetch deadline timer. The token guards against a stale timer from an
    // earlier fetch of the same cid killing a fresh one.
    void on_fetch_deadline(const ContentId& cid, std::uint64_t token) {
        auto it = fetches_.find(cid);
        if (it == fetches_.end() || it->second.token != token) return;
        complete_fetch(it->second, false);
        fetches_.erase(it);
    }

    // Applies a config update across the store, the popularity window and the
    // cache core. Rejected as a whole if validation fails.
    bool update_configs(const NodeConfig& cfg) {
        if (!validate(cfg).empty()) return false;
        cfg_ = cfg;
        store_.set_config(cfg);
        if (core_) return core_->update_configs(cfg);
        return popularity_.update_configs(cfg);
    }

    // ---- network entry ------------------------------------------------------

    void handle_message(const PeerId& from, const Message& msg) {
        std::visit([&](const auto& m) { handle(from, m); }, msg);
    }

    // ---- introspection ------------------------------------------------------

    const PeerId& id() const { return self_; }
    int index() const { return index_; }
    bool startrail_enabled() const { return cfg_.startrail_enabled; }
    Blockstore& store() { return store_; }
    const Blockstore& store() const { return store_; }
    PopularityManager& popularity() { return popularity_; }
    StartrailCore* core() { return core_ ? &*core_ : nullptr; }
    RoutingTable& table() { return table_; }
    ProviderStore& provider_records() { return records_; }
    const NodeConfig& config() const { return cfg_; }

    // Cids with an active fetch (the exchange want list).
    std::vector<ContentId> want_list() const {
        std::vector<ContentId> out;
        for (const auto& [cid, f] : fetches_) out.push_back(cid);
        return out;
    }

  private:
    enum class LookupMode { providers, closest };

    struct PendingLookup {
        LookupMode mode{};
        Hash256 target{};
        ContentId cid;  // providers mode only
        int want = 0;
        std::vector<PeerId> shortlist;  // sorted by (distance to target, id)
        std::set<PeerId> seen;
        std::set<PeerId> queried;
        std::set<PeerId> providers;
        int outstanding = 0;
        int rounds = 0;
        int messages = 0;
        std::function<void(PendingLookup&)> on_done;
    };

    struct PendingFetch {
        ContentId cid;
        std::uint64_t token = 0;
        bool startrail_interest = false;
        bool completed = false;
        std::vector<std::uint64_t> waiters;
    };

    struct PendingRequest {
        int pending = 0;
        bool any_failed = false;
    };

    static NodeConfig with_enabled(NodeConfig cfg, bool enabled) {
        cfg.startrail_enabled = enabled;
        return cfg;
    }

    std::vector<PeerId> sort_by_distance(std::vector<PeerId> peers, const Hash256& target) const {
        std::sort(peers.begin(), peers.end(), [&](const PeerId& a, const PeerId& b) {
            Hash256 da = xor_bytes(a.id, target);
            Hash256 db = xor_bytes(b.id, target);
            if (da != db) return da < db;
            return a < b;
        });
        return peers;
    }

    // ---- lookup machinery --------------------------------------------------

    void start_lookup(LookupMode mode, const Hash256& target, const ContentId& cid, int want,
                      std::function<void(PendingLookup&)> on_done,
                      const std::vector<PeerId>& known_providers = {}) {
        std::uint64_t id = next_lookup_id_++;
        PendingLookup lk;
        lk.mode = mode;
        lk.target = target;
        lk.cid = cid;
        lk.want = want;
        lk.on_done = std::move(on_done);
        for (const auto& p : known_providers) lk.providers.insert(p);
        for (const auto& p : table_.closest(target, static_cast<std::size_t>(dht_.k))) {
            lk.seen.insert(p);
        }
        lk.shortlist.assign(lk.seen.begin(), lk.seen.end());
        lk.shortlist = sort_by_distance(std::move(lk.shortlist), target);
        auto [it, ok] = lookups_.emplace(id, std::move(lk));
        (void)ok;
        advance_lookup(id, it->second);
    }

    void advance_lookup(std::uint64_t id, PendingLookup& lk) {
        if (lk.mode == LookupMode::providers &&
            static_cast<int>(lk.providers.size()) >= lk.want) {
            finish_lookup(id);
            return;
        }
        // Unqueried candidates among the k closest known.
        std::vector<PeerId> next;
        std::size_t limit = std::min(lk.shortlist.size(), static_cast<std::size_t>(dht_.k));
        for (std::size_t i = 0; i < limit && next.size() < static_cast<std::size_t>(dht_.alpha);
             ++i) {
            if (lk.queried.count(lk.shortlist[i]) == 0) next.push_back(lk.shortlist[i]);
        }
        if (next.empty()) {
            finish_lookup(id);
            return;
        }
        ++lk.rounds;
        for (const auto& peer : next) {
            lk.queried.insert(peer);
            ++lk.outstanding;
            ++lk.messages;
            if (lk.mode == LookupMode::providers) {
                env_.send_message(index_, peer, GetProvider{id, lk.cid});
            } else {
                env_.send_message(index_, peer, FindNode{id, lk.target});
            }
        }
    }

    void merge_closer(PendingLookup& lk, const std::vector<PeerId>& closer) {
        bool dirty = false;
        for (const auto& p : closer) {
            if (p == self_) continue;
            table_.refresh(p);
            if (lk.seen.insert(p).second) {
                lk.shortlist.push_back(p);
                dirty = true;
            }
        }
        if (dirty) lk.shortlist = sort_by_distance(std::move(lk.shortlist), lk.target);
    }

    void on_lookup_reply(std::uint64_t id, const std::vector<PeerId>& providers,
                         const std::vector<PeerId>& closer) {
        auto it = lookups_.find(id);
        if (it == lookups_.end()) return;  // stale reply
        PendingLookup& lk = it->second;
        merge_closer(lk, closer);
        for (const auto& p : providers) lk.providers.insert(p);
        if (--lk.outstanding == 0) advance_lookup(id, lk);
    }

    void finish_lookup(std::uint64_t id) {
        auto node = lookups_.extract(id);
        if (node.empty()) return;
        PendingLookup& lk = node.mapped();
        if (lk.on_done) lk.on_done(lk);
    }

    // ---- exchange machinery --------------------------------------------------

    // waiter == 0 with startrail == true marks a cache-fill fetch. Cache fills
    // are content with a single provider (whatever is already on record);
    // client fetches gather the configured want count first.
    void start_fetch(const ContentId& cid, int providers_needed, bool startrail,
                     std::uint64_t waiter) {
        auto it = fetches_.find(cid);
        if (it != fetches_.end()) {
            if (startrail) {
                it->second.startrail_interest = true;
            } else {
                it->second.waiters.push_back(waiter);
            }
            return;
        }
        PendingFetch f;
        f.cid = cid;
        f.token = next_fetch_token_++;
        f.startrail_interest = startrail;
        if (!startrail) f.waiters.push_back(waiter);
        std::uint64_t token = f.token;
        fetches_.emplace(cid, std::move(f));
        env_.schedule_fetch_deadline(index_, env_.now() + exchange_.fetch_timeout_ms, cid,
                                     token);
        find_providers(cid, providers_needed, [this, cid](const LookupResult& r) {
            auto fit = fetches_.find(cid);
            if (fit == fetches_.end() || fit->second.completed) return;
            std::vector<PeerId> targets;
            for (const auto& p : r.providers) {
                if (p == self_) continue;  // stale self-record; the block is gone
                targets.push_back(p);
                if (targets.size() == static_cast<std::size_t>(exchange_.fanout)) break;
            }
            if (targets.empty()) {
                complete_fetch(fit->second, false);
                fetches_.erase(fit);
                return;
            }
            for (const auto& p : targets) {
                env_.send_message(index_, p, Want{{cid}});
            }
        });
    }

    void complete_fetch(PendingFetch& f, bool success) {
        f.completed = true;
        for (std::uint64_t request_id : f.waiters) {
            auto rit = requests_.find(request_id);
            if (rit == requests_.end()) continue;
            if (!success) rit->second.any_failed = true;
            if (--rit->second.pending == 0) {
                bool ok = !rit->second.any_failed;
                requests_.erase(rit);
                env_.request_finished(index_, request_id, ok);
            }
        }
        if (f.startrail_interest && core_) {
            core_->on_fetch_complete(f.cid, env_.now(), success);
        }
    }

    // ---- message handlers -----------------------------------------------------

    void handle(const PeerId& from, const GetProvider& m) {
        table_.refresh(from);
        // Snapshot the reply before the cache hook runs: the answer a peer
        // gets never depends on what Startrail decides to do locally.
        ProvidersReply reply;
        reply.lookup_id = m.lookup_id;
        reply.cid = m.cid;
        reply.providers = records_.providers_for(m.cid, env_.now());
        reply.closer = closest_excluding(m.cid.digest, from);
        if (core_ && core_->enabled()) core_->process(m.cid, env_.now());
        env_.send_message(index_, from, std::move(reply));
    }

    void handle(const PeerId& from, const FindNode& m) {
        table_.refresh(from);
        NodesReply reply;
        reply.lookup_id = m.lookup_id;
        reply.closer = closest_excluding(m.target, from);
        env_.send_message(index_, from, std::move(reply));
    }

    void handle(const PeerId& from, const ProvidersReply& m) {
        table_.refresh(from);
        on_lookup_reply(m.lookup_id, m.providers, m.closer);
    }

    void handle(const PeerId& from, const NodesReply& m) {
        table_.refresh(from);
        on_lookup_reply(m.lookup_id, {}, m.closer);
    }

    void handle(const PeerId& from, const Provide& m) {
        table_.refresh(from);
        records_.add(m.cid, m.provider, env_.now() + cfg_.provider_record_ttl_ms);
    }

    void handle(const PeerId& from, const Want& m) {
        for (const auto& cid : m.cids) {
            if (auto b = store_.get(cid, env_.now())) {
                env_.send_message(index_, from, BlockMsg{*b});
            }
        }
    }

    void handle(const PeerId& /*from*/, const BlockMsg& m) {
        auto it = fetches_.find(m.block.cid);
        if (it == fetches_.end() || it->second.completed) return;  // late duplicate
        if (!verify_block(m.block)) return;  // tampered; keep waiting for an honest copy
        store_.put(m.block, env_.now());
        complete_fetch(it->second, true);
        fetches_.erase(it);
    }

    std::vector<PeerId> closest_excluding(const Hash256& target, const PeerId& requester) {
        auto peers = table_.closest(target, static_cast<std::size_t>(dht_.k) + 1);
        std::erase(peers, requester);
        if (peers.size() > static_cast<std::size_t>(dht_.k)) {
            peers.resize(static_cast<std::size_t>(dht_.k));
        }
        return peers;
    }

    int index_;
    PeerId self_;
    NodeConfig cfg_;
    DhtParams dht_;
    ExchangeParams exchange_;
    NodeEnv& env_;

    Blockstore store_;
    PopularityManager popularity_;
    std::optional<StartrailCore> core_;
    RoutingTable table_;
    ProviderStore records_;

    std::uint64_t next_lookup_id_ = 1;
    std::uint64_t next_fetch_token_ = 1;
    std::map<std::uint64_t, PendingLookup> lookups_;
    std::map<ContentId, PendingFetch> fetches_;
    std::map<std::uint64_t, PendingRequest> requests_;
};

}  // namespace startrail
