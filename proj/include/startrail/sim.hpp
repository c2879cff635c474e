#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "startrail/metrics.hpp"
#include "startrail/node.hpp"
#include "startrail/rng.hpp"
#include "startrail/scenario.hpp"
#include "startrail/workloads.hpp"

namespace startrail {

struct SweepPoint {
    double fraction = 0.0;
    double mean_ms = 0.0;
    double p95_ms = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    LinearFit fit;
};

// The dataset a scenario runs against, derived from the run seed so the same
// scenario always fetches the same content.
inline Dataset dataset_for(const Scenario& sc) {
    return build_dataset(sc.dataset.block_count, sc.dataset.block_size, sc.dataset.group_bytes,
                         derive_seed(static_cast<std::uint64_t>(sc.run_seed), "dataset"));
}

// Discrete-event simulation of one scenario. The virtual clock only moves
// when events fire; ties break on insertion order, so a run is a pure
// function of the scenario (seed included).
//
// Lifecycle: bootstraps join at t=0, remaining nodes join staggered, then
// providers preload the dataset and announce every block. All of that is
// warm-up. The steady phase starts at the next popularity-hop boundary and
// carries the request triggers, hop ticks and storage samplers.
class Simulator final : public NodeEnv {
  public:
    explicit Simulator(Scenario sc, bool force_startrail_core = false)
        : sc_(std::move(sc)),
          jitter_rng_(make_stream(sc_.run_seed, "jitter")) {
        auto errors = validate(sc_);
        if (!errors.empty()) {
            std::string joined;
            for (const auto& e : errors) {
                if (!joined.empty()) joined += "; ";
                joined += e;
            }
            throw ScenarioError(joined);
        }
        if (sc_.provider_count == 0 && sc_.duration_ms > 0 && client_count() > 0) {
            throw ScenarioError("provider_count: zero providers with a nonzero request load");
        }

        dataset_ = dataset_for(sc_);

        // Startrail enablement: floor(fraction * n) nodes picked by seeded
        // shuffle; bootstraps and providers are eligible like any other.
        std::vector<int> order(static_cast<std::size_t>(sc_.node_count));
        for (int i = 0; i < sc_.node_count; ++i) order[static_cast<std::size_t>(i)] = i;
        auto enable_rng = make_stream(sc_.run_seed, "enablement");
        std::shuffle(order.begin(), order.end(), enable_rng);
        auto enabled_n = static_cast<std::size_t>(sc_.startrail_fraction *
                                                  static_cast<double>(sc_.node_count));
        std::vector<bool> enabled(static_cast<std::size_t>(sc_.node_count), false);
        for (std::size_t i = 0; i < enabled_n && i < order.size(); ++i) {
            enabled[static_cast<std::size_t>(order[i])] = true;
        }

        nodes_.reserve(static_cast<std::size_t>(sc_.node_count));
        totals_.resize(static_cast<std::size_t>(sc_.node_count));
        for (int i = 0; i < sc_.node_count; ++i) {
            PeerId id = peer_id_for_node(i, sc_.run_seed);
            peer_index_[id] = i;
            nodes_.push_back(std::make_unique<Node>(i, id, sc_, enabled[static_cast<std::size_t>(i)],
                                                    force_startrail_core, *this));
            totals_[static_cast<std::size_t>(i)].node = i;
        }
        for (int i = 0; i < sc_.node_count; ++i) {
            workload_rngs_.push_back(make_stream(sc_.run_seed, "workload", i));
        }

        metrics_.scenario_name = sc_.name;
        metrics_.startrail_fraction = sc_.startrail_fraction;
    }

    // ---- NodeEnv --------------------------------------------------------------

    SimTime now() const override { return clock_; }

    void send_message(int from_index, const PeerId& to, Message msg) override {
        std::int64_t size = message_size(msg, sc_.sizes);
        auto& t = totals_[static_cast<std::size_t>(from_index)];
        t.bytes_sent_total += size;
        t.messages_sent += 1;
        SimTime delay = sc_.latency.base_one_way_ms + draw_jitter();
        int to_index = peer_index_.at(to);
        PeerId from = nodes_[static_cast<std::size_t>(from_index)]->id();
        push(clock_ + delay, Delivery{to_index, from, std::move(msg), size});
    }

    void schedule_fetch_deadline(int node_index, SimTime at, ContentId cid,
                                 std::uint64_t token) override {
        push(at, Deadline{node_index, cid, token});
    }

    void log_startrail(int node_index, const StartrailEvent& ev) override {
        metrics_.startrail_events.push_back({node_index, ev});
    }

    void request_finished(int node_index, std::uint64_t request_id, bool success) override {
        auto it = pending_requests_.find(request_id);
        if (it == pending_requests_.end()) return;  // censored earlier
        RequestRecord rec;
        rec.node = node_index;
        rec.cid = it->second.cid;
        rec.start_ms = it->second.start_ms;
        rec.end_ms = clock_;
        rec.success = success;
        rec.censored = false;
        metrics_.requests.push_back(rec);
        helper_results_[request_id] = success;
        pending_requests_.erase(it);
    }

    void join_finished(int /*node_index*/) override { ++joined_; }

    // ---- phases ---------------------------------------------------------------

    // Runs joins, dataset preload and provider announcements, then parks the
    // clock at the next hop boundary where the steady phase begins.
    void setup() {
        for (int i = 0; i < sc_.bootstrap_count; ++i) push(0, Join{i});
        for (int i = sc_.bootstrap_count; i < sc_.node_count; ++i) {
            push(static_cast<SimTime>(i - sc_.bootstrap_count + 1) * kJoinStaggerMs, Join{i});
        }
        run_until_idle();

        for (int p = provider_begin(); p < provider_end(); ++p) {
            for (const auto& b : dataset_.blocks) nodes_[static_cast<std::size_t>(p)]->preload(b);
        }
        for (int p = provider_begin(); p < provider_end(); ++p) {
            for (const auto& b : dataset_.blocks) {
                nodes_[static_cast<std::size_t>(p)]->announce(b.cid, [this](int) { ++announced_; });
            }
        }
        run_until_idle();

        SimTime hop = sc_.node_config.window_hop_ms;
        steady_start_ = (clock_ / hop + 1) * hop;
        clock_ = steady_start_;
        metrics_.steady_start_ms = steady_start_;
        for (auto& t : totals_) t.bytes_sent_warmup = t.bytes_sent_total;
    }

    // Steady phase: request triggers with per-node phase offsets, hop ticks,
    // storage samples, then a drain pass so in-flight requests resolve on
    // their own (the fetch deadline bounds how long that can take).
    void run_steady() {
        SimTime hop = sc_.node_config.window_hop_ms;
        SimTime end = steady_start_ + sc_.duration_ms;
        for (SimTime t = steady_start_ + hop; t < end; t += hop) push(t, HopTick{});
        for (SimTime t = steady_start_; t <= end; t += hop) push(t, Sample{});
        push(end, EndMark{});
        for (int c = client_begin(); c < sc_.node_count; ++c) {
            auto phase_rng = make_stream(sc_.run_seed, "trigger-phase", c);
            SimTime offset = static_cast<SimTime>(
                phase_rng() % static_cast<std::uint64_t>(sc_.request_period_ms));
            SimTime first = steady_start_ + offset;
            if (first < end) push(first, Trigger{c});
        }

        SimTime censor_line = end + sc_.drain_grace_ms;
        while (!queue_.empty()) {
            Event ev = pop();
            if (ev.at > censor_line && !pending_requests_.empty()) censor_pending(censor_line);
            clock_ = ev.at;
            dispatch(ev.body);
        }
        if (!pending_requests_.empty()) censor_pending(std::max(clock_, censor_line));
        metrics_.end_ms = end;
    }

    RunMetrics run() {
        setup();
        run_steady();
        metrics_.node_totals = totals_;
        metrics_.finalize();
        return metrics_;
    }

    // ---- test support -----------------------------------------------------------

    Node& node(int i) { return *nodes_.at(static_cast<std::size_t>(i)); }
    int node_count() const { return sc_.node_count; }
    const Dataset& dataset() const { return dataset_; }
    const Scenario& scenario() const { return sc_; }
    SimTime steady_start() const { return steady_start_; }
    RunMetrics& metrics() { return metrics_; }
    const std::vector<NodeTotals>& totals() const { return totals_; }
    int joined_count() const { return joined_; }

    // Processes queued events until none remain; clock rests at the last one.
    void run_until_idle() {
        while (!queue_.empty()) {
            Event ev = pop();
            clock_ = ev.at;
            dispatch(ev.body);
        }
    }

    // Processes events up to and including virtual time t, then parks there.
    void run_until(SimTime t) {
        while (!queue_.empty() && queue_.top().at <= t) {
            Event ev = pop();
            clock_ = ev.at;
            dispatch(ev.body);
        }
        if (clock_ < t) clock_ = t;
    }

    // Drops a message into the network as if `from` had sent it; bypasses the
    // byte accounting (the sender need not be a simulated node).
    void inject_message(const PeerId& from, int to_index, Message msg) {
        push(clock_ + sc_.latency.base_one_way_ms, Delivery{to_index, from, std::move(msg), 0});
    }

    LookupResult find_providers_and_wait(int node_index, const ContentId& cid, int want) {
        std::optional<LookupResult> out;
        node(node_index).find_providers(cid, want, [&](const LookupResult& r) { out = r; });
        run_until_idle();
        if (!out) throw std::logic_error("lookup did not complete");
        return *out;
    }

    int announce_and_wait(int node_index, const ContentId& cid) {
        std::optional<int> out;
        node(node_index).announce(cid, [&](int sent) { out = sent; });
        run_until_idle();
        if (!out) throw std::logic_error("announce did not complete");
        return *out;
    }

    // Issues a synthetic request and runs the network until it resolves.
    bool fetch_and_wait(int node_index, const std::vector<ContentId>& cids) {
        std::uint64_t id = next_request_id_++;
        pending_requests_[id] = PendingReq{node_index, cids.front(), clock_};
        node(node_index).start_request(id, cids);
        run_until_idle();
        auto it = helper_results_.find(id);
        if (it == helper_results_.end()) throw std::logic_error("request did not resolve");
        bool ok = it->second;
        helper_results_.erase(it);
        return ok;
    }

  private:
    static constexpr SimTime kJoinStaggerMs = 200;

    struct Delivery {
        int to = 0;
        PeerId from;
        Message msg;
        std::int64_t size = 0;
    };
    struct Join {
        int node = 0;
    };
    struct HopTick {};
    struct Trigger {
        int node = 0;
    };
    struct Sample {};
    struct Deadline {
        int node = 0;
        ContentId cid;
        std::uint64_t token = 0;
    };
    struct EndMark {};
    using Body = std::variant<Delivery, Join, HopTick, Trigger, Sample, Deadline, EndMark>;

    struct Event {
        SimTime at = 0;
        std::uint64_t seq = 0;
        Body body;
    };
    struct LaterEvent {
        bool operator()(const Event& a, const Event& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };

    struct PendingReq {
        int node = 0;
        ContentId cid;
        SimTime start_ms = 0;
    };

    int provider_begin() const { return sc_.bootstrap_count; }
    int provider_end() const { return sc_.bootstrap_count + sc_.provider_count; }
    int client_begin() const { return provider_end(); }
    int client_count() const { return sc_.node_count - client_begin(); }

    SimTime draw_jitter() {
        if (sc_.latency.jitter_ms <= 0) return 0;
        return static_cast<SimTime>(jitter_rng_() %
                                    static_cast<std::uint64_t>(sc_.latency.jitter_ms + 1));
    }

    void push(SimTime at, Body body) { queue_.push(Event{at, next_seq_++, std::move(body)}); }

    Event pop() {
        Event ev = queue_.top();
        queue_.pop();
        return ev;
    }

    void dispatch(const Body& body) {
        std::visit([this](const auto& b) { handle(b); }, body);
    }

    void handle(const Delivery& d) {
        totals_[static_cast<std::size_t>(d.to)].bytes_received_total += d.size;
        nodes_[static_cast<std::size_t>(d.to)]->handle_message(d.from, d.msg);
    }

    void handle(const Join& j) {
        std::vector<PeerId> seeds;
        for (int b = 0; b < sc_.bootstrap_count; ++b) {
            if (b == j.node) continue;
            seeds.push_back(nodes_[static_cast<std::size_t>(b)]->id());
        }
        nodes_[static_cast<std::size_t>(j.node)]->bootstrap(seeds);
    }

    void handle(const HopTick&) {
        for (auto& n : nodes_) n->on_hop_tick();
    }

    void handle(const Trigger& t) {
        auto cids = next_request(sc_.policy, dataset_, workload_rngs_[static_cast<std::size_t>(t.node)]);
        std::uint64_t id = next_request_id_++;
        pending_requests_[id] = PendingReq{t.node, cids.front(), clock_};
        nodes_[static_cast<std::size_t>(t.node)]->start_request(id, cids);
        SimTime next = clock_ + sc_.request_period_ms;
        if (next < steady_start_ + sc_.duration_ms) push(next, Trigger{t.node});
    }

    void handle(const Sample&) {
        for (int i = 0; i < sc_.node_count; ++i) {
            const auto& store = nodes_[static_cast<std::size_t>(i)]->store();
            NodeSample s;
            s.node = i;
            s.time_ms = clock_;
            s.used_bytes = store.used_bytes();
            s.bytes_sent = totals_[static_cast<std::size_t>(i)].bytes_sent_total;
            s.pinned_count = store.stats().pinned_count;
            metrics_.samples.push_back(s);
        }
    }

    void handle(const Deadline& d) {
        nodes_[static_cast<std::size_t>(d.node)]->on_fetch_deadline(d.cid, d.token);
    }

    void handle(const EndMark&) {}

    // Ends every request still pending past the drain line. Does not happen
    // with the default timeouts (the fetch deadline fires first); kept so a
    // scenario with a tight drain window still terminates cleanly.
    void censor_pending(SimTime at) {
        for (const auto& [id, req] : pending_requests_) {
            RequestRecord rec;
            rec.node = req.node;
            rec.cid = req.cid;
            rec.start_ms = req.start_ms;
            rec.end_ms = at;
            rec.success = false;
            rec.censored = true;
            metrics_.requests.push_back(rec);
            helper_results_[id] = false;
        }
        pending_requests_.clear();
    }

    Scenario sc_;
    Dataset dataset_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::map<PeerId, int> peer_index_;
    std::vector<std::mt19937_64> workload_rngs_;
    std::mt19937_64 jitter_rng_;

    std::priority_queue<Event, std::vector<Event>, LaterEvent> queue_;
    std::uint64_t next_seq_ = 0;
    SimTime clock_ = 0;
    SimTime steady_start_ = 0;
    int joined_ = 0;
    int announced_ = 0;

    std::uint64_t next_request_id_ = 1;
    std::map<std::uint64_t, PendingReq> pending_requests_;
    std::map<std::uint64_t, bool> helper_results_;

    std::vector<NodeTotals> totals_;
    RunMetrics metrics_;
};

// Runs the base scenario once per fraction. Each fraction gets its own seed
// derived from the fraction value, so repeating a fraction repeats its run
// exactly while distinct fractions stay decorrelated.
inline SweepResult adoption_sweep(const Scenario& base, const std::vector<double>& fractions) {
    SweepResult out;
    std::vector<double> xs, ys;
    for (double f : fractions) {
        if (f < 0.0 || f > 1.0) {
            throw ScenarioError("sweep fraction must be within [0, 1]");
        }
        Scenario sc = base;
        sc.startrail_fraction = f;
        sc.run_seed = static_cast<std::int64_t>(derive_seed(
            static_cast<std::uint64_t>(base.run_seed), "sweep",
            static_cast<std::uint64_t>(f * 10000.0 + 0.5)));
        Simulator sim(std::move(sc));
        RunMetrics m = sim.run();
        SweepPoint p;
        p.fraction = f;
        p.mean_ms = m.mean_request_ms;
        p.p95_ms = static_cast<double>(m.p95_request_ms);
        out.points.push_back(p);
        xs.push_back(f);
        ys.push_back(p.mean_ms);
    }
    out.fit = linear_fit(xs, ys);
    return out;
}

}  // namespace startrail
