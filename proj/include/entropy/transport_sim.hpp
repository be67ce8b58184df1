#pragma once

#include <functional>
#include <queue>
#include <random>

#include "entropy/protocol.hpp"

namespace entropy::net {

struct LatencyModel {
    double base = 0.0;    // seconds
    double jitter = 0.0;  // uniform extra delay in [0, jitter)
    double drop = 0.0;    // per-message drop probability
};

// Deterministic in-memory network: envelopes and node timers share one event
// queue ordered by (time, sequence). Identical (nodes, seed, inputs) replay to
// identical traces.
class SimNet {
  public:
    explicit SimNet(uint64_t seed, LatencyModel model = {}) : rng_(seed), model_(model) {}

    void attach(protocol::Node* node) {
        nodes_[node->id()] = node;
        order_.push_back(node);
        protocol::Effects fx;
        node->start(now_, fx);
        dispatch(node, std::move(fx));
    }

    double now() const { return now_; }
    const std::vector<protocol::Node*>& nodes() const { return order_; }

    void run_until(double t) {
        while (!queue_.empty() && queue_.top().at <= t) {
            Event ev = queue_.top();
            queue_.pop();
            now_ = ev.at;
            protocol::Node* node = find(ev.dst);
            if (!node) continue;
            protocol::Effects fx;
            if (ev.is_timer)
                node->on_timer(ev.token, now_, fx);
            else
                node->on_envelope(ev.env, now_, fx);
            dispatch(node, std::move(fx));
        }
        now_ = std::max(now_, t);
    }

    void run_for(double dt) { run_until(now_ + dt); }

    // Inject an envelope from outside the protocol (control plane, tests).
    void inject(const wire::Envelope& env) { enqueue_envelope(env); }

    // instrumentation
    uint64_t count(wire::MsgType t) const {
        auto it = counts_.find(t);
        return it == counts_.end() ? 0 : it->second;
    }
    uint64_t dropped() const { return dropped_; }
    // fragment payload deliveries: FragmentData(present) + cache booster responses
    uint64_t fragment_transfers() const { return fragment_transfers_; }
    void reset_counters() {
        counts_.clear();
        dropped_ = 0;
        fragment_transfers_ = 0;
    }

    protocol::Node* find(const crypto::NodeId& id) const {
        auto it = nodes_.find(id);
        return it == nodes_.end() ? nullptr : it->second;
    }

    // Drive events until the job completes or the deadline passes.
    const protocol::JobResult* wait_job(protocol::Node* node, uint64_t job, double deadline) {
        while (now_ < deadline) {
            const protocol::JobResult* res = node->job(job);
            if (res && res->state != protocol::JobState::Running) return res;
            if (queue_.empty()) break;
            run_until(std::min(deadline, queue_.top().at));
        }
        return node->job(job);
    }

  private:
    struct Event {
        double at = 0;
        uint64_t seq = 0;
        bool is_timer = false;
        crypto::NodeId dst{};
        uint64_t token = 0;
        wire::Envelope env;

        bool operator>(const Event& o) const {
            if (at != o.at) return at > o.at;
            return seq > o.seq;
        }
    };

    void dispatch(protocol::Node* from, protocol::Effects&& fx) {
        for (auto& t : fx.timers) {
            Event ev;
            ev.at = now_ + t.delay;
            ev.seq = seq_++;
            ev.is_timer = true;
            ev.dst = from->id();
            ev.token = t.token;
            queue_.push(std::move(ev));
        }
        for (auto& s : fx.sends) enqueue_envelope(s.env);
    }

    void enqueue_envelope(const wire::Envelope& env) {
        counts_[env.msg_type]++;
        if (env.msg_type == wire::MsgType::FragmentData ||
            env.msg_type == wire::MsgType::ChunkCacheResponse) {
            try {
                auto msg = wire::decode_message(env);
                if (auto* fd = std::get_if<wire::FragmentDataMsg>(&msg); fd && fd->present)
                    ++fragment_transfers_;
                if (auto* cc = std::get_if<wire::ChunkCacheResponseMsg>(&msg); cc && cc->kind == 2)
                    ++fragment_transfers_;
            } catch (const wire::WireError&) {
            }
        }
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (model_.drop > 0 && u(rng_) < model_.drop) {
            ++dropped_;
            return;
        }
        double delay = model_.base;
        if (model_.jitter > 0) delay += u(rng_) * model_.jitter;
        Event ev;
        ev.at = now_ + delay;
        ev.seq = seq_++;
        ev.is_timer = false;
        ev.dst = env.dst;
        ev.env = env;
        queue_.push(std::move(ev));
    }

    std::mt19937_64 rng_;
    LatencyModel model_;
    double now_ = 0;
    uint64_t seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
    std::map<crypto::NodeId, protocol::Node*> nodes_;
    std::vector<protocol::Node*> order_;
    std::map<wire::MsgType, uint64_t> counts_;
    uint64_t dropped_ = 0;
    uint64_t fragment_transfers_ = 0;
};

}  // namespace entropy::net
