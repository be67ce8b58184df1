#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>

#include "entropy/codec.hpp"
#include "entropy/selection.hpp"
#include "entropy/wire.hpp"

namespace entropy::protocol {

using Timestamp = double;  // seconds
using Duration = double;

struct NodeConfig {
    crypto::KeyPair keys;
    std::string address;
    codec::CodecParams codec;
    selection::SelectionParams sel;

    Duration heartbeat_interval = 10.0;
    Duration liveness_timeout = 0;  // 0 derives 3 * heartbeat
    Duration sync_interval = 0;     // 0 derives 4 * heartbeat
    Duration repair_jitter = 0;     // 0 derives heartbeat
    Duration cache_ttl = 600.0;
    Duration tick_interval = 0;     // 0 derives heartbeat / 4
    int locate_rounds = 3;
    size_t max_inflight = 16;
    int peer_attempts = 2;
    bool byzantine = false;
    uint64_t rng_seed = 0;

    Duration liveness() const { return liveness_timeout > 0 ? liveness_timeout : 3 * heartbeat_interval; }
    Duration sync() const { return sync_interval > 0 ? sync_interval : 4 * heartbeat_interval; }
    Duration jitter() const { return repair_jitter > 0 ? repair_jitter : heartbeat_interval; }
    Duration tick() const { return tick_interval > 0 ? tick_interval : heartbeat_interval / 4; }

    void validate() const {
        codec.validate();
        sel.validate();
        if (heartbeat_interval <= 0) throw std::invalid_argument("heartbeat must be > 0");
        if (liveness() <= heartbeat_interval)
            throw std::invalid_argument("liveness timeout must exceed the heartbeat interval");
    }
};

struct Effects {
    struct Send {
        wire::Envelope env;
        std::string address;  // used by the socket backend; the simulator routes by dst id
    };
    struct Timer {
        Duration delay;
        uint64_t token;
    };
    std::vector<Send> sends;
    std::vector<Timer> timers;
};

struct MemberInfo {
    uint64_t fragment_index = 0;
    Timestamp last_claim = 0;
    Timestamp first_seen = 0;
    std::string address;
    crypto::PublicKey pk{};
};

struct GroupView {
    Digest256 chunk_hash{};
    std::map<crypto::NodeId, MemberInfo> members;

    size_t alive(Timestamp now, Duration timeout) const {
        size_t n = 0;
        for (const auto& [id, m] : members)
            if (now - m.last_claim <= timeout) ++n;
        return n;
    }
};

struct StoredFragment {
    codec::Fragment fragment;
    selection::SelectionProof proof;
    Timestamp received_at = 0;
    Timestamp expiration = 0;  // <= 0 means no expiry
};

struct ObjectRecipe {
    Digest256 object_hash{};
    std::vector<Digest256> chunk_hashes;
    Timestamp expiration = 0;
    codec::CodecParams params;
};

enum class JobState { Running, Succeeded, Failed };

struct JobResult {
    JobState state = JobState::Running;
    std::string error;
    ObjectRecipe recipe;            // store jobs
    Bytes object;                   // query jobs
    std::vector<std::string> chunk_status;
};

// One Entropy peer. Single logical event loop: every message and timer is fed
// in serially along with the current time; outbound work comes back through
// Effects. The same state machine runs under the simulated network and the
// socket runner.
class Node {
  public:
    Node(NodeConfig cfg, std::shared_ptr<selection::Directory> dir)
        : cfg_(std::move(cfg)),
          dir_(std::move(dir)),
          id_(crypto::node_id(cfg_.keys.pk)),
          rng_(cfg_.rng_seed ? cfg_.rng_seed : load_u64_le(cfg_.keys.seed.data())) {
        cfg_.validate();
    }

    const crypto::NodeId& id() const { return id_; }
    const NodeConfig& config() const { return cfg_; }

    void start(Timestamp now, Effects& fx) {
        started_ = now;
        schedule(fx, uniform(0, cfg_.heartbeat_interval), Action{Action::Heartbeat, {}, 0});
        schedule(fx, uniform(0, cfg_.sync()), Action{Action::Sync, {}, 0});
        schedule(fx, cfg_.tick(), Action{Action::Tick, {}, 0});
    }

    // ---- client operations -------------------------------------------------

    uint64_t begin_store(BytesView object, std::span<const uint8_t, 32> secret,
                         Timestamp expiration, Timestamp now, Effects& fx) {
        uint64_t id = next_job_++;
        auto& res = results_[id];
        StoreJob job;
        job.id = id;
        job.expiration = expiration;
        try {
            auto chunks = codec::outer_encode(object, secret, cfg_.codec);
            res.recipe.object_hash = chunks[0].object_hash;
            res.recipe.expiration = expiration;
            res.recipe.params = cfg_.codec;
            for (auto& c : chunks) {
                StoreChunk sc;
                sc.chash = c.chunk_hash();
                sc.coder = std::make_shared<codec::InnerCoder>(sc.chash, view(c.data), cfg_.codec.k_inner);
                res.recipe.chunk_hashes.push_back(sc.chash);
                job.chunks.push_back(std::move(sc));
            }
        } catch (const std::exception& e) {
            res.state = JobState::Failed;
            res.error = e.what();
            return id;
        }
        StoreJob& slot = stores_[id] = std::move(job);
        for (size_t i = 0; i < slot.chunks.size(); ++i)
            slot.chunks[i].locate_op = start_locate(slot.chunks[i].chash, Purpose::StoreChunk, id, i, now, fx);
        return id;
    }

    uint64_t begin_query(const ObjectRecipe& recipe, std::span<const uint8_t, 32> secret,
                         Timestamp now, Effects& fx) {
        uint64_t id = next_job_++;
        results_[id];
        QueryJob job;
        job.id = id;
        job.recipe = recipe;
        std::copy(secret.begin(), secret.end(), job.secret.begin());
        for (size_t j = 0; j < recipe.chunk_hashes.size(); ++j) {
            QueryChunk qc;
            qc.chash = recipe.chunk_hashes[j];
            qc.position = j;
            job.chunks.push_back(std::move(qc));
        }
        QueryJob& slot = queries_[id] = std::move(job);
        for (size_t j = 0; j < slot.chunks.size(); ++j)
            slot.chunks[j].locate_op = start_locate(slot.chunks[j].chash, Purpose::QueryChunk, id, j, now, fx);
        return id;
    }

    const JobResult* job(uint64_t id) const {
        auto it = results_.find(id);
        return it == results_.end() ? nullptr : &it->second;
    }

    // ---- introspection and test/control access ------------------------------

    bool holds_fragment(const Digest256& chash) const {
        return store_.count(chash) > 0 || fake_store_.count(chash) > 0;
    }
    const StoredFragment* stored(const Digest256& chash) const {
        auto it = store_.find(chash);
        return it == store_.end() ? nullptr : &it->second;
    }
    const GroupView* group_view(const Digest256& chash) const {
        auto it = views_.find(chash);
        return it == views_.end() ? nullptr : &it->second;
    }
    std::vector<Digest256> held_chunks() const {
        std::vector<Digest256> out;
        for (const auto& [h, f] : store_) out.push_back(h);
        for (const auto& [h, f] : fake_store_) out.push_back(h);
        return out;
    }
    bool repairing(const Digest256& chash) const { return repairs_.count(chash) > 0; }

    // Forced eviction: drop the fragment and stop claiming it.
    void drop_fragment(const Digest256& chash, Timestamp) {
        store_.erase(chash);
        fake_store_.erase(chash);
        views_.erase(chash);
        lottery_.erase(chash);
    }

    // ---- event entry points --------------------------------------------------

    void on_timer(uint64_t token, Timestamp now, Effects& fx) {
        auto it = timers_.find(token);
        if (it == timers_.end()) return;
        Action act = it->second;
        timers_.erase(it);
        switch (act.kind) {
            case Action::Heartbeat:
                on_heartbeat(now, fx);
                schedule(fx, cfg_.heartbeat_interval, Action{Action::Heartbeat, {}, 0});
                break;
            case Action::Sync:
                on_membership_sync(now, fx);
                schedule(fx, cfg_.sync(), Action{Action::Sync, {}, 0});
                break;
            case Action::Tick:
                on_tick(now, fx);
                schedule(fx, cfg_.tick(), Action{Action::Tick, {}, 0});
                break;
            case Action::RepairFire:
                repair_timer_pending_.erase(act.chash);
                start_repair(act.chash, now, fx);
                break;
        }
    }

    void on_envelope(const wire::Envelope& env, Timestamp now, Effects& fx) {
        wire::Message msg;
        try {
            msg = wire::decode_message(env);
        } catch (const wire::WireError&) {
            return;  // malformed input is dropped
        }
        std::visit([&](auto& m) { handle(env.src, m, now, fx); }, msg);
    }

  private:
    // ---- timers -------------------------------------------------------------

    struct Action {
        enum Kind { Heartbeat, Sync, Tick, RepairFire } kind;
        Digest256 chash;
        uint64_t aux;
    };

    void schedule(Effects& fx, Duration delay, Action act) {
        uint64_t token = next_token_++;
        timers_[token] = act;
        fx.timers.push_back({delay, token});
    }

    double uniform(double lo, double hi) {
        std::uniform_real_distribution<double> d(lo, hi);
        return d(rng_);
    }

    // ---- outbound helpers -----------------------------------------------------

    template <typename T>
    void send_to(Effects& fx, const crypto::NodeId& dst, const std::string& address, const T& msg) {
        fx.sends.push_back({wire::make_envelope(id_, dst, msg), address});
    }

    std::optional<selection::SelectionProof> lottery(const Digest256& chash) {
        auto it = lottery_.find(chash);
        if (it != lottery_.end()) return it->second;
        auto proof = selection::selection_proof(cfg_.keys, chash, cfg_.sel);
        lottery_[chash] = proof;
        return proof;
    }

    uint64_t pick_fresh_index(const Digest256& chash) {
        const GroupView* v = group_view(chash);
        for (;;) {
            uint64_t idx = codec::kNonSystematicBase +
                           rng_() % (~uint64_t(0) - codec::kNonSystematicBase + 1);
            bool clash = false;
            if (v)
                for (const auto& [id, m] : v->members) clash |= m.fragment_index == idx;
            if (!clash) return idx;
        }
    }

    void upsert_member(const Digest256& chash, const crypto::NodeId& nid, uint64_t index,
                       const crypto::PublicKey& pk, const std::string& address, Timestamp seen) {
        auto& view = views_[chash];
        view.chunk_hash = chash;
        auto [it, fresh] = view.members.try_emplace(nid);
        MemberInfo& m = it->second;
        if (fresh) m.first_seen = seen;
        m.fragment_index = index;
        m.last_claim = std::max(m.last_claim, seen);
        if (!address.empty()) m.address = address;
        m.pk = pk;
    }

    wire::PersistenceClaimMsg make_claim(const Digest256& chash, uint64_t index,
                                         const selection::SelectionProof& proof, Timestamp now) {
        wire::PersistenceClaimMsg c;
        c.chunk_hash = chash;
        c.stream_index = index;
        c.pk = cfg_.keys.pk;
        c.vrf_hash = proof.vrf.hash;
        c.vrf_proof = proof.vrf.proof;
        c.timestamp = now;
        c.address = cfg_.address;
        c.signature = crypto::sign_claim(cfg_.keys, view(c.signed_payload()));
        return c;
    }

    void broadcast_claim(const Digest256& chash, uint64_t index,
                         const selection::SelectionProof& proof, Timestamp now, Effects& fx) {
        auto vit = views_.find(chash);
        if (vit == views_.end()) return;
        auto claim = make_claim(chash, index, proof, now);
        for (const auto& [nid, m] : vit->second.members) {
            if (nid == id_) continue;
            send_to(fx, nid, m.address, claim);
        }
    }

    void adopt_fragment(codec::Fragment frag, const selection::SelectionProof& proof,
                        Timestamp expiration, Timestamp now, Effects& fx) {
        const Digest256 chash = frag.chunk_hash;
        uint64_t index = frag.stream_index;
        store_[chash] = StoredFragment{std::move(frag), proof, now, expiration};
        upsert_member(chash, id_, index, cfg_.keys.pk, cfg_.address, now);
        broadcast_claim(chash, index, proof, now, fx);
    }

    // ---- locate machinery -----------------------------------------------------

    enum class Purpose { StoreChunk, QueryChunk, RepairSearch, Sync };

    struct LocateOp {
        uint64_t id = 0;
        Digest256 chash{};
        Purpose purpose = Purpose::Sync;
        uint64_t job = 0;
        size_t chunk = 0;
        std::vector<selection::NodeRecord> candidates;
        size_t next = 0;
        std::map<crypto::NodeId, Timestamp> inflight;
        std::set<crypto::NodeId> responded;
        int rounds_left = 0;
        bool active = true;
    };

    uint64_t start_locate(const Digest256& chash, Purpose purpose, uint64_t job, size_t chunk,
                          Timestamp now, Effects& fx) {
        LocateOp op;
        op.id = next_locate_++;
        op.chash = chash;
        op.purpose = purpose;
        op.job = job;
        op.chunk = chunk;
        op.rounds_left = cfg_.locate_rounds - 1;
        op.candidates = dir_->lookup(chash, cfg_.sel.candidates());
        locates_.push_back(std::move(op));
        pump_locate(locates_.back(), now, fx);
        return locates_.back().id;
    }

    void pump_locate(LocateOp& op, Timestamp now, Effects& fx) {
        while (op.inflight.size() < cfg_.max_inflight && op.next < op.candidates.size()) {
            const auto& cand = op.candidates[op.next++];
            if (cand.node_id == id_) {
                // answer our own lottery locally
                auto proof = lottery(op.chash);
                if (proof) {
                    PeerRef self{cand.node_id, cand.address, cand.pk, holds_fragment(op.chash), 0};
                    if (const StoredFragment* sf = stored(op.chash))
                        self.stream_index = sf->fragment.stream_index;
                    deliver_verified(op, self, now, fx);
                }
                op.responded.insert(cand.node_id);
                continue;
            }
            if (op.responded.count(cand.node_id) || op.inflight.count(cand.node_id)) continue;
            wire::ProofRequestMsg req{op.chash, cfg_.address};
            send_to(fx, cand.node_id, cand.address, req);
            op.inflight[cand.node_id] = now + 2 * cfg_.tick();
        }
    }

    void locate_tick(Timestamp now, Effects& fx) {
        for (auto& op : locates_) {
            if (!op.active) continue;
            for (auto it = op.inflight.begin(); it != op.inflight.end();) {
                // recycle the slot; a late response is still accepted when it lands
                if (it->second < now)
                    it = op.inflight.erase(it);
                else
                    ++it;
            }
            pump_locate(op, now, fx);
            if (op.inflight.empty() && op.next >= op.candidates.size()) {
                if (op.rounds_left > 0 && !locate_target_met(op, now)) {
                    --op.rounds_left;
                    op.candidates = dir_->lookup(op.chash, cfg_.sel.candidates());
                    op.next = 0;
                    op.responded.clear();
                    pump_locate(op, now, fx);
                } else {
                    op.active = false;
                    locate_exhausted(op, now, fx);
                }
            }
        }
        std::erase_if(locates_, [](const LocateOp& op) { return !op.active; });
    }

    bool locate_target_met(const LocateOp& op, Timestamp now) {
        switch (op.purpose) {
            case Purpose::StoreChunk: {
                auto it = stores_.find(op.job);
                if (it == stores_.end()) return true;
                const StoreChunk& sc = it->second.chunks[op.chunk];
                return sc.members.size() >= cfg_.codec.r_group;
            }
            case Purpose::QueryChunk: {
                auto it = queries_.find(op.job);
                if (it == queries_.end()) return true;
                return it->second.chunks[op.chunk].decoded;
            }
            case Purpose::RepairSearch: {
                auto it = searches_.find(op.chash);
                if (it == searches_.end()) return true;
                return it->second.found.size() >= it->second.deficit;
            }
            case Purpose::Sync:
                return true;
        }
        return true;
    }

    struct PeerRef {
        crypto::NodeId node_id{};
        std::string address;
        crypto::PublicKey pk{};
        bool holds = false;
        uint64_t stream_index = 0;
    };

    void deliver_verified(LocateOp& op, const PeerRef& peer, Timestamp now, Effects& fx) {
        switch (op.purpose) {
            case Purpose::StoreChunk: {
                auto it = stores_.find(op.job);
                if (it == stores_.end()) return;
                StoreChunk& sc = it->second.chunks[op.chunk];
                if (sc.exhausted) sc.exhausted_at = now;
                if (sc.known.insert(peer.node_id).second) sc.ready.push_back(peer);
                progress_store_chunk(it->second, sc, now, fx);
                break;
            }
            case Purpose::QueryChunk: {
                auto it = queries_.find(op.job);
                if (it == queries_.end()) return;
                QueryChunk& qc = it->second.chunks[op.chunk];
                if (qc.exhausted) qc.exhausted_at = now;
                // only actual fragment holders are useful for retrieval
                if (peer.holds && qc.known.insert(peer.node_id).second) qc.ready.push_back(peer);
                progress_query_chunk(it->second, qc, now, fx);
                break;
            }
            case Purpose::RepairSearch: {
                auto it = searches_.find(op.chash);
                if (it == searches_.end()) return;
                RepairSearch& rs = it->second;
                const GroupView* v = group_view(op.chash);
                bool member = peer.holds || peer.node_id == id_ ||
                              (v && v->members.count(peer.node_id) &&
                               now - v->members.at(peer.node_id).last_claim <= cfg_.liveness());
                if (!member && rs.seen.insert(peer.node_id).second) rs.found.push_back(peer);
                maybe_fire_repair_requests(op.chash, rs, now, fx, false);
                break;
            }
            case Purpose::Sync: {
                if (peer.holds && (holds_fragment(op.chash) || repairing(op.chash)))
                    upsert_member(op.chash, peer.node_id, peer.stream_index, peer.pk, peer.address,
                                  now);
                break;
            }
        }
    }

    void locate_exhausted(LocateOp& op, Timestamp now, Effects& fx) {
        switch (op.purpose) {
            case Purpose::StoreChunk: {
                auto it = stores_.find(op.job);
                if (it == stores_.end()) return;
                it->second.chunks[op.chunk].exhausted = true;
                it->second.chunks[op.chunk].exhausted_at = now;
                progress_store_chunk(it->second, it->second.chunks[op.chunk], now, fx);
                break;
            }
            case Purpose::QueryChunk: {
                auto it = queries_.find(op.job);
                if (it == queries_.end()) return;
                it->second.chunks[op.chunk].exhausted = true;
                it->second.chunks[op.chunk].exhausted_at = now;
                progress_query_chunk(it->second, it->second.chunks[op.chunk], now, fx);
                break;
            }
            case Purpose::RepairSearch: {
                auto it = searches_.find(op.chash);
                if (it != searches_.end()) maybe_fire_repair_requests(op.chash, it->second, now, fx, true);
                break;
            }
            case Purpose::Sync:
                break;
        }
    }

    // ---- store job ------------------------------------------------------------

    struct StoreChunk {
        Digest256 chash{};
        std::shared_ptr<codec::InnerCoder> coder;
        std::deque<PeerRef> ready;
        std::set<crypto::NodeId> known;
        std::map<crypto::NodeId, int> attempts;
        struct Pending {
            PeerRef peer;
            uint64_t index;
            Timestamp deadline;
        };
        std::vector<Pending> pending;
        struct Member {
            uint64_t index;
            crypto::PublicKey pk;
            std::string address;
        };
        std::map<crypto::NodeId, Member> members;
        std::vector<uint64_t> free_indices;
        uint64_t next_index = 0;
        uint64_t locate_op = 0;
        bool exhausted = false;
        Timestamp exhausted_at = 0;
        bool pushed = false;
    };

    struct StoreJob {
        uint64_t id = 0;
        Timestamp expiration = 0;
        std::vector<StoreChunk> chunks;
        bool finished = false;
    };

    void progress_store_chunk(StoreJob& job, StoreChunk& sc, Timestamp now, Effects& fx) {
        if (job.finished) return;
        const uint32_t r = cfg_.codec.r_group;
        while (sc.members.size() + sc.pending.size() < r && !sc.ready.empty()) {
            PeerRef peer = sc.ready.front();
            sc.ready.pop_front();
            if (sc.members.count(peer.node_id)) continue;
            if (sc.attempts[peer.node_id] >= cfg_.peer_attempts) continue;
            bool busy = false;
            for (const auto& p : sc.pending) busy |= p.peer.node_id == peer.node_id;
            if (busy) continue;
            ++sc.attempts[peer.node_id];
            uint64_t index;
            if (!sc.free_indices.empty()) {
                index = sc.free_indices.back();
                sc.free_indices.pop_back();
            } else {
                index = sc.next_index++;
            }
            wire::StoreFragmentMsg msg;
            msg.chunk_hash = sc.chash;
            msg.stream_index = index;
            msg.expiration = job.expiration;
            msg.reply_address = cfg_.address;
            msg.data = sc.coder->encode(index).data;
            send_to(fx, peer.node_id, peer.address, msg);
            sc.pending.push_back({peer, index, now + 4 * cfg_.tick()});
        }

        if (sc.members.size() >= r && !sc.pushed) {
            sc.pushed = true;
            wire::MembershipPushMsg push;
            push.chunk_hash = sc.chash;
            for (const auto& [nid, m] : sc.members)
                push.entries.push_back({m.pk, m.address, m.index});
            for (const auto& [nid, m] : sc.members) send_to(fx, nid, m.address, push);
        }
        check_store_done(job, now);
    }

    void check_store_done(StoreJob& job, Timestamp now) {
        if (job.finished) return;
        const uint32_t r = cfg_.codec.r_group;
        // stragglers may still arrive after the last locate round; give them a window
        const Duration grace = 8 * cfg_.tick();
        bool all = true, stuck = false;
        for (const auto& sc : job.chunks) {
            if (sc.members.size() < r) {
                all = false;
                if (sc.exhausted && sc.ready.empty() && sc.pending.empty() &&
                    now >= sc.exhausted_at + grace)
                    stuck = true;
            }
        }
        auto& res = results_[job.id];
        if (all) {
            job.finished = true;
            res.state = JobState::Succeeded;
        } else if (stuck) {
            job.finished = true;
            res.state = JobState::Failed;
            res.error = "store failed: insufficient willing peers";
            for (size_t i = 0; i < job.chunks.size(); ++i)
                res.chunk_status.push_back("chunk " + std::to_string(i) + ": " +
                                           std::to_string(job.chunks[i].members.size()) + "/" +
                                           std::to_string(r) + " fragments stored");
        }
    }

    void store_tick(Timestamp now, Effects& fx) {
        for (auto& [id, job] : stores_) {
            if (job.finished) continue;
            for (auto& sc : job.chunks) {
                for (auto it = sc.pending.begin(); it != sc.pending.end();) {
                    if (it->deadline < now) {
                        sc.free_indices.push_back(it->index);
                        if (sc.attempts[it->peer.node_id] < cfg_.peer_attempts)
                            sc.ready.push_back(it->peer);
                        it = sc.pending.erase(it);
                    } else {
                        ++it;
                    }
                }
                progress_store_chunk(job, sc, now, fx);
            }
        }
    }

    // ---- query job ------------------------------------------------------------

    struct QueryChunk {
        Digest256 chash{};
        size_t position = 0;
        std::deque<PeerRef> ready;
        std::set<crypto::NodeId> known;
        std::map<crypto::NodeId, int> attempts;
        std::map<crypto::NodeId, Timestamp> pending;
        std::map<crypto::NodeId, PeerRef> peers;
        std::map<uint64_t, Bytes> fragments;
        int decode_failures = 0;
        bool decoded = false;
        bool failed = false;
        Bytes data;
        uint64_t locate_op = 0;
        bool exhausted = false;
        Timestamp exhausted_at = 0;
    };

    struct QueryJob {
        uint64_t id = 0;
        ObjectRecipe recipe;
        std::array<uint8_t, 32> secret{};
        std::vector<QueryChunk> chunks;
        bool finished = false;
    };

    void progress_query_chunk(QueryJob& job, QueryChunk& qc, Timestamp now, Effects& fx) {
        if (job.finished || qc.decoded || qc.failed) return;
        const uint32_t k = job.recipe.params.k_inner;
        while (!qc.ready.empty() &&
               qc.fragments.size() + qc.pending.size() < size_t(k) &&
               qc.pending.size() < cfg_.max_inflight) {
            PeerRef peer = qc.ready.front();
            qc.ready.pop_front();
            if (qc.pending.count(peer.node_id)) continue;
            if (qc.attempts[peer.node_id] >= cfg_.peer_attempts) continue;
            ++qc.attempts[peer.node_id];
            qc.peers[peer.node_id] = peer;
            wire::GetFragmentMsg msg{qc.chash, cfg_.address};
            send_to(fx, peer.node_id, peer.address, msg);
            qc.pending[peer.node_id] = now + 4 * cfg_.tick();
        }
        try_decode_chunk(job, qc, now, fx);
        if (!qc.decoded && qc.exhausted && qc.ready.empty() && qc.pending.empty() &&
            qc.fragments.size() < size_t(k) && now >= qc.exhausted_at + 8 * cfg_.tick()) {
            qc.failed = true;
        }
        check_query_done(job, now, fx);
    }

    void try_decode_chunk(QueryJob& job, QueryChunk& qc, Timestamp now, Effects& fx) {
        const auto& params = job.recipe.params;
        if (qc.decoded || qc.fragments.size() < params.k_inner) return;
        std::vector<codec::Fragment> frags;
        for (const auto& [idx, data] : qc.fragments)
            frags.push_back(codec::Fragment{qc.chash, idx, data});
        try {
            qc.data = codec::inner_decode(frags, params);
            qc.decoded = true;
            qc.pending.clear();
        } catch (const codec::IntegrityError&) {
            // retry with a different fragment subset
            ++qc.decode_failures;
            if (!qc.fragments.empty()) qc.fragments.erase(std::prev(qc.fragments.end()));
            if (qc.decode_failures > int(2 * params.k_inner)) qc.failed = true;
        } catch (const codec::NeedMoreSymbols&) {
        }
        check_query_done(job, now, fx);
    }

    void check_query_done(QueryJob& job, Timestamp, Effects&) {
        if (job.finished) return;
        const auto& params = job.recipe.params;
        size_t decoded = 0, failed = 0;
        for (const auto& qc : job.chunks) {
            decoded += qc.decoded ? 1 : 0;
            failed += qc.failed ? 1 : 0;
        }
        auto& res = results_[job.id];
        if (decoded >= params.k_outer) {
            job.finished = true;
            try {
                auto indices = codec::outer_indices(std::span<const uint8_t, 32>(job.secret),
                                                    job.recipe.object_hash, params);
                std::vector<codec::Symbol> symbols;
                for (const auto& qc : job.chunks)
                    if (qc.decoded) symbols.push_back({indices[qc.position], qc.data});
                res.object = codec::outer_decode(symbols, params, &job.recipe.object_hash);
                res.state = JobState::Succeeded;
            } catch (const std::exception& e) {
                res.state = JobState::Failed;
                res.error = std::string("outer decode failed: ") + e.what();
            }
        } else if (failed > job.chunks.size() - params.k_outer) {
            job.finished = true;
            res.state = JobState::Failed;
            res.error = "object unavailable";
            for (size_t i = 0; i < job.chunks.size(); ++i) {
                const auto& qc = job.chunks[i];
                res.chunk_status.push_back(
                    "chunk " + std::to_string(i) + ": " +
                    (qc.decoded ? "recovered"
                                : (qc.failed ? "unrecoverable" : "pending, " +
                                       std::to_string(qc.fragments.size()) + " fragments")));
            }
        }
    }

    void query_tick(Timestamp now, Effects& fx) {
        for (auto& [id, job] : queries_) {
            if (job.finished) continue;
            for (auto& qc : job.chunks) {
                for (auto it = qc.pending.begin(); it != qc.pending.end();) {
                    if (it->second < now) {
                        auto peer = qc.peers.find(it->first);
                        if (peer != qc.peers.end() && qc.attempts[it->first] < cfg_.peer_attempts)
                            qc.ready.push_back(peer->second);
                        it = qc.pending.erase(it);
                    } else {
                        ++it;
                    }
                }
                progress_query_chunk(job, qc, now, fx);
            }
        }
    }

    // ---- group maintenance ------------------------------------------------------

    void on_heartbeat(Timestamp now, Effects& fx) {
        // lazy GC of expired fragments
        for (auto it = store_.begin(); it != store_.end();) {
            if (it->second.expiration > 0 && it->second.expiration < now) {
                views_.erase(it->first);
                lottery_.erase(it->first);
                it = store_.erase(it);
            } else {
                ++it;
            }
        }
        for (auto it = fake_store_.begin(); it != fake_store_.end();) {
            if (it->second.expiration > 0 && it->second.expiration < now) {
                views_.erase(it->first);
                it = fake_store_.erase(it);
            } else {
                ++it;
            }
        }
        for (auto it = cache_.begin(); it != cache_.end();) {
            if (it->second.expires < now)
                it = cache_.erase(it);
            else
                ++it;
        }

        auto maintain = [&](const Digest256& chash, uint64_t index,
                            const selection::SelectionProof& proof) {
            upsert_member(chash, id_, index, cfg_.keys.pk, cfg_.address, now);
            broadcast_claim(chash, index, proof, now, fx);
            auto& view = views_[chash];
            for (auto it = view.members.begin(); it != view.members.end();) {
                if (it->first != id_ && now - it->second.last_claim > cfg_.liveness())
                    it = view.members.erase(it);
                else
                    ++it;
            }
            size_t alive = view.alive(now, cfg_.liveness());
            if (alive < cfg_.codec.r_group && !repair_timer_pending_.count(chash) &&
                !searches_.count(chash)) {
                repair_timer_pending_.insert(chash);
                schedule(fx, uniform(0, cfg_.jitter()), Action{Action::RepairFire, chash, 0});
            }
        };
        for (auto& [chash, held] : store_) maintain(chash, held.fragment.stream_index, held.proof);
        for (auto& [chash, fake] : fake_store_) maintain(chash, fake.index, fake.proof);
    }

    void on_membership_sync(Timestamp now, Effects& fx) {
        auto want = [&](const Digest256& chash) {
            for (const auto& op : locates_)
                if (op.active && op.chash == chash && op.purpose == Purpose::Sync) return false;
            return true;
        };
        for (const auto& [chash, held] : store_)
            if (want(chash)) start_locate(chash, Purpose::Sync, 0, 0, now, fx);
        for (const auto& [chash, fake] : fake_store_)
            if (want(chash)) start_locate(chash, Purpose::Sync, 0, 0, now, fx);
        for (auto& [chash, task] : repairs_) {
            if (want(chash)) start_locate(chash, Purpose::Sync, 0, 0, now, fx);
            task.asked.clear();  // allow re-pulling from refreshed membership
        }
    }

    // ---- repair: outbound search -------------------------------------------------

    struct RepairSearch {
        size_t deficit = 0;
        std::vector<PeerRef> found;
        std::set<crypto::NodeId> seen;
        uint64_t locate_op = 0;
    };

    void start_repair(const Digest256& chash, Timestamp now, Effects& fx) {
        if (!holds_fragment(chash)) return;
        const GroupView* v = group_view(chash);
        size_t alive = v ? v->alive(now, cfg_.liveness()) : 0;
        if (alive >= cfg_.codec.r_group) return;
        if (searches_.count(chash)) return;
        RepairSearch rs;
        rs.deficit = cfg_.codec.r_group - alive;
        searches_.emplace(chash, std::move(rs));
        uint64_t op = start_locate(chash, Purpose::RepairSearch, 0, 0, now, fx);
        auto it = searches_.find(chash);
        if (it != searches_.end()) it->second.locate_op = op;
    }

    void maybe_fire_repair_requests(const Digest256& chash, RepairSearch& rs, Timestamp now,
                                    Effects& fx, bool exhausted) {
        if (rs.found.size() < rs.deficit && !exhausted) return;
        wire::RepairRequestMsg req;
        req.chunk_hash = chash;
        req.sender_address = cfg_.address;
        const StoredFragment* held = stored(chash);
        auto fit = fake_store_.find(chash);
        req.expiration = held ? held->expiration : (fit != fake_store_.end() ? fit->second.expiration : 0);
        if (const GroupView* v = group_view(chash)) {
            for (const auto& [nid, m] : v->members) {
                if (now - m.last_claim > cfg_.liveness()) continue;
                req.view.push_back({m.pk, m.address, m.fragment_index});
            }
        }
        size_t n = std::min(rs.found.size(), rs.deficit);
        for (size_t i = 0; i < n; ++i) send_to(fx, rs.found[i].node_id, rs.found[i].address, req);
        // insufficient new peers: drop the search; the next heartbeat retries
        searches_.erase(chash);
    }

    // ---- repair: inbound join-and-regenerate ----------------------------------------

    struct RepairTask {
        Digest256 chash{};
        int phase = 0;  // 0 probing caches, 1 pulling fragments
        Timestamp probe_deadline = 0;
        bool booster_requested = false;
        Timestamp booster_deadline = 0;
        uint64_t fresh_index = 0;
        Timestamp expiration = 0;
        std::map<crypto::NodeId, Timestamp> pending;
        std::set<crypto::NodeId> asked;
        std::map<uint64_t, Bytes> fragments;
        int decode_failures = 0;
        Timestamp started = 0;
    };

    void repair_pump(RepairTask& t, Timestamp now, Effects& fx) {
        const GroupView* v = group_view(t.chash);
        if (!v) return;
        if (t.phase == 0) {
            for (const auto& [nid, m] : v->members) {
                if (nid == id_ || t.asked.count(nid)) continue;
                if (now - m.last_claim > cfg_.liveness()) continue;
                wire::ChunkCacheRequestMsg probe{t.chash, 0, 0, cfg_.address};
                send_to(fx, nid, m.address, probe);
                t.asked.insert(nid);
            }
            if (now >= t.probe_deadline && !t.booster_requested) {
                t.phase = 1;
                t.asked.clear();
            }
            if (t.booster_requested && now >= t.booster_deadline) {
                t.booster_requested = false;
                t.phase = 1;
                t.asked.clear();
            }
            return;
        }
        const uint32_t k = cfg_.codec.k_inner;
        for (const auto& [nid, m] : v->members) {
            if (t.fragments.size() + t.pending.size() >= size_t(k)) break;
            if (t.pending.size() >= cfg_.max_inflight) break;
            if (nid == id_ || t.asked.count(nid) || t.pending.count(nid)) continue;
            if (now - m.last_claim > cfg_.liveness()) continue;
            wire::GetFragmentMsg msg{t.chash, cfg_.address};
            send_to(fx, nid, m.address, msg);
            t.pending[nid] = now + 4 * cfg_.tick();
            t.asked.insert(nid);
        }
    }

    void repair_complete_with_chunk(RepairTask& t, Bytes chunk_data, Timestamp now, Effects& fx) {
        const Digest256 chash = t.chash;
        if (cfg_.cache_ttl > 0 && !cfg_.byzantine)
            cache_[chash] = CacheEntry{chunk_data, now + cfg_.cache_ttl};
        auto proof = lottery(chash);
        if (!proof) {
            repairs_.erase(chash);
            return;
        }
        codec::InnerCoder coder(chash, view(chunk_data), cfg_.codec.k_inner);
        adopt_fragment(coder.encode(t.fresh_index), *proof, t.expiration, now, fx);
        repairs_.erase(chash);
    }

    void repair_complete_with_fragment(RepairTask& t, codec::Fragment frag, Timestamp now,
                                       Effects& fx) {
        auto proof = lottery(t.chash);
        if (!proof) {
            repairs_.erase(t.chash);
            return;
        }
        adopt_fragment(std::move(frag), *proof, t.expiration, now, fx);
        repairs_.erase(t.chash);
    }

    void repair_tick(Timestamp now, Effects& fx) {
        for (auto& [chash, t] : repairs_) {
            for (auto it = t.pending.begin(); it != t.pending.end();) {
                if (it->second < now)
                    it = t.pending.erase(it);
                else
                    ++it;
            }
            repair_pump(t, now, fx);
        }
    }

    // ---- message handlers ----------------------------------------------------------

    void handle(const crypto::NodeId& src, const wire::StoreFragmentMsg& m, Timestamp now,
                Effects& fx) {
        wire::StoreAckMsg ack;
        ack.chunk_hash = m.chunk_hash;
        ack.address = cfg_.address;
        auto proof = lottery(m.chunk_hash);
        if (!proof) {
            ack.ok = false;
            ack.reason = "not selected";
            send_to(fx, src, m.reply_address, ack);
            return;
        }
        if (m.expiration > 0 && m.expiration < now) {
            ack.ok = false;
            ack.reason = "expired";
            send_to(fx, src, m.reply_address, ack);
            return;
        }
        ack.ok = true;
        ack.pk = cfg_.keys.pk;
        ack.vrf_hash = proof->vrf.hash;
        ack.vrf_proof = proof->vrf.proof;
        if (cfg_.byzantine) {
            auto [it, fresh] = fake_store_.try_emplace(m.chunk_hash);
            if (fresh) {
                it->second.index = m.stream_index;
                it->second.proof = *proof;
                it->second.expiration = m.expiration;
                upsert_member(m.chunk_hash, id_, m.stream_index, cfg_.keys.pk, cfg_.address, now);
            }
            ack.stream_index = it->second.index;
            send_to(fx, src, m.reply_address, ack);
            return;
        }
        auto held = store_.find(m.chunk_hash);
        if (held != store_.end()) {
            ack.stream_index = held->second.fragment.stream_index;  // already stored
            send_to(fx, src, m.reply_address, ack);
            return;
        }
        ack.stream_index = m.stream_index;
        codec::Fragment frag{m.chunk_hash, m.stream_index, m.data};
        store_[m.chunk_hash] = StoredFragment{std::move(frag), *proof, now, m.expiration};
        upsert_member(m.chunk_hash, id_, m.stream_index, cfg_.keys.pk, cfg_.address, now);
        send_to(fx, src, m.reply_address, ack);
    }

    void handle(const crypto::NodeId& src, const wire::StoreAckMsg& m, Timestamp now, Effects& fx) {
        for (auto& [id, job] : stores_) {
            if (job.finished) continue;
            for (auto& sc : job.chunks) {
                if (sc.chash != m.chunk_hash) continue;
                auto p = std::find_if(sc.pending.begin(), sc.pending.end(),
                                      [&](const StoreChunk::Pending& x) { return x.peer.node_id == src; });
                if (sc.exhausted) sc.exhausted_at = now;  // signal: keep waiting for stragglers
                std::string address = m.address;
                if (p != sc.pending.end()) {
                    address = p->peer.address;
                    // the sent index is reusable unless the peer stored exactly it
                    if (!m.ok || m.stream_index != p->index) sc.free_indices.push_back(p->index);
                    sc.pending.erase(p);
                }
                if (m.ok) {
                    // late acks after a timeout still count: the fragment is stored
                    selection::SelectionProof proof{m.chunk_hash, m.pk, {m.vrf_hash, m.vrf_proof}};
                    if (crypto::node_id(m.pk) == src &&
                        selection::verify_selection(m.chunk_hash, proof, cfg_.sel))
                        sc.members[src] = {m.stream_index, m.pk, address};
                } else {
                    sc.attempts[src] = cfg_.peer_attempts;  // refused; do not retry
                }
                progress_store_chunk(job, sc, now, fx);
                return;
            }
        }
    }

    void handle(const crypto::NodeId& src, const wire::GetFragmentMsg& m, Timestamp, Effects& fx) {
        wire::FragmentDataMsg out;
        out.chunk_hash = m.chunk_hash;
        auto it = store_.find(m.chunk_hash);
        if (it == store_.end() || cfg_.byzantine) {
            out.present = false;
        } else {
            out.present = true;
            out.stream_index = it->second.fragment.stream_index;
            out.data = it->second.fragment.data;
        }
        send_to(fx, src, m.reply_address, out);
    }

    void handle(const crypto::NodeId& src, const wire::FragmentDataMsg& m, Timestamp now,
                Effects& fx) {
        // repairs first, then query chunks; both may be pulling the same chunk.
        // Late arrivals past their deadline are still valid fragments.
        auto rit = repairs_.find(m.chunk_hash);
        if (rit != repairs_.end()) {
            RepairTask& t = rit->second;
            t.pending.erase(src);
            if (m.present) {
                t.fragments[m.stream_index] = m.data;
                if (t.fragments.size() >= cfg_.codec.k_inner) {
                    std::vector<codec::Fragment> frags;
                    for (const auto& [idx, data] : t.fragments)
                        frags.push_back({m.chunk_hash, idx, data});
                    try {
                        Bytes chunk = codec::inner_decode(frags, cfg_.codec);
                        repair_complete_with_chunk(t, std::move(chunk), now, fx);
                        return;
                    } catch (const codec::IntegrityError&) {
                        ++t.decode_failures;
                        if (!t.fragments.empty()) t.fragments.erase(std::prev(t.fragments.end()));
                        if (t.decode_failures > int(2 * cfg_.codec.k_inner)) {
                            repairs_.erase(m.chunk_hash);
                            return;
                        }
                    } catch (const codec::NeedMoreSymbols&) {
                    }
                }
            }
            repair_pump(rit->second, now, fx);
        }
        for (auto& [id, job] : queries_) {
            if (job.finished) continue;
            for (auto& qc : job.chunks) {
                if (qc.chash != m.chunk_hash) continue;
                qc.pending.erase(src);
                if (qc.exhausted) qc.exhausted_at = now;
                if (m.present) qc.fragments[m.stream_index] = m.data;
                progress_query_chunk(job, qc, now, fx);
            }
        }
    }

    void handle(const crypto::NodeId& src, const wire::ProofRequestMsg& m, Timestamp, Effects& fx) {
        wire::ProofResponseMsg out;
        out.chunk_hash = m.chunk_hash;
        out.address = cfg_.address;
        out.pk = cfg_.keys.pk;
        auto proof = lottery(m.chunk_hash);
        if (proof) {
            out.selected = true;
            out.vrf_hash = proof->vrf.hash;
            out.vrf_proof = proof->vrf.proof;
            if (const StoredFragment* sf = stored(m.chunk_hash)) {
                out.holds = true;
                out.stream_index = sf->fragment.stream_index;
            } else if (auto fit = fake_store_.find(m.chunk_hash); fit != fake_store_.end()) {
                out.holds = true;  // byzantine nodes claim storage
                out.stream_index = fit->second.index;
            }
        }
        send_to(fx, src, m.reply_address, out);
    }

    void handle(const crypto::NodeId& src, const wire::ProofResponseMsg& m, Timestamp now,
                Effects& fx) {
        bool verified = false;
        if (m.selected) {
            selection::SelectionProof proof{m.chunk_hash, m.pk, {m.vrf_hash, m.vrf_proof}};
            verified = crypto::node_id(m.pk) == src &&
                       selection::verify_selection(m.chunk_hash, proof, cfg_.sel);
        }
        for (auto& op : locates_) {
            if (!op.active || op.chash != m.chunk_hash) continue;
            op.inflight.erase(src);
            if (!op.responded.insert(src).second) continue;  // duplicate response
            if (verified)
                deliver_verified(op, {src, m.address, m.pk, m.holds, m.stream_index}, now, fx);
            pump_locate(op, now, fx);
        }
    }

    void handle(const crypto::NodeId& src, const wire::PersistenceClaimMsg& m, Timestamp now,
                Effects&) {
        if (src == id_) return;
        if (!holds_fragment(m.chunk_hash) && !repairing(m.chunk_hash)) return;  // not our group
        if (crypto::node_id(m.pk) != src) return;
        // freshness window bounds replay of old claims
        if (m.timestamp < now - cfg_.liveness() || m.timestamp > now + cfg_.liveness()) return;
        if (!crypto::verify_claim(m.pk, view(m.signed_payload()), m.signature)) return;
        selection::SelectionProof proof{m.chunk_hash, m.pk, {m.vrf_hash, m.vrf_proof}};
        if (!selection::verify_selection(m.chunk_hash, proof, cfg_.sel)) return;
        upsert_member(m.chunk_hash, src, m.stream_index, m.pk, m.address,
                      std::min(now, m.timestamp));
    }

    void handle(const crypto::NodeId& src, const wire::RepairRequestMsg& m, Timestamp now,
                Effects& fx) {
        auto proof = lottery(m.chunk_hash);
        if (!proof) return;  // we did not win the lottery for this chunk
        merge_view_entries(m.chunk_hash, m.view, now);

        if (store_.count(m.chunk_hash)) {
            // already storing: respond immediately so the sender refreshes us
            const auto& held = store_.at(m.chunk_hash);
            send_to(fx, src, m.sender_address,
                    make_claim(m.chunk_hash, held.fragment.stream_index, held.proof, now));
            return;
        }
        if (cfg_.byzantine) {
            // claims storage without pulling any data
            auto [it, fresh] = fake_store_.try_emplace(m.chunk_hash);
            if (fresh) {
                it->second.index = pick_fresh_index(m.chunk_hash);
                it->second.proof = *proof;
                it->second.expiration = m.expiration;
            }
            upsert_member(m.chunk_hash, id_, it->second.index, cfg_.keys.pk, cfg_.address, now);
            broadcast_claim(m.chunk_hash, it->second.index, *proof, now, fx);
            return;
        }
        if (repairs_.count(m.chunk_hash)) return;  // already joining

        RepairTask t;
        t.chash = m.chunk_hash;
        t.fresh_index = pick_fresh_index(m.chunk_hash);
        t.expiration = m.expiration;
        t.started = now;
        t.probe_deadline = now + 2 * cfg_.tick();
        repairs_[m.chunk_hash] = std::move(t);
        repair_pump(repairs_[m.chunk_hash], now, fx);
    }

    void handle(const crypto::NodeId& src, const wire::ChunkCacheRequestMsg& m, Timestamp now,
                Effects& fx) {
        wire::ChunkCacheResponseMsg out;
        out.chunk_hash = m.chunk_hash;
        out.address = cfg_.address;
        auto it = cache_.find(m.chunk_hash);
        if (it == cache_.end() || it->second.expires < now || cfg_.byzantine) {
            out.kind = 0;
        } else if (m.mode == 0) {
            out.kind = 1;  // cached; ask again with mode=1 to get a fragment
        } else {
            // booster path: build the requested fragment locally, ship only it
            codec::InnerCoder coder(m.chunk_hash, view(it->second.chunk), cfg_.codec.k_inner);
            auto frag = coder.encode(m.stream_index);
            out.kind = 2;
            out.stream_index = m.stream_index;
            out.data = std::move(frag.data);
        }
        send_to(fx, src, m.reply_address, out);
    }

    void handle(const crypto::NodeId& src, const wire::ChunkCacheResponseMsg& m, Timestamp now,
                Effects& fx) {
        auto it = repairs_.find(m.chunk_hash);
        if (it == repairs_.end()) return;
        RepairTask& t = it->second;
        if (m.kind == 1 && t.phase == 0 && !t.booster_requested) {
            t.booster_requested = true;
            t.booster_deadline = now + 4 * cfg_.tick();
            wire::ChunkCacheRequestMsg build{m.chunk_hash, 1, t.fresh_index, cfg_.address};
            send_to(fx, src, m.address, build);
        } else if (m.kind == 2 && m.stream_index == t.fresh_index) {
            repair_complete_with_fragment(t, codec::Fragment{m.chunk_hash, m.stream_index, m.data},
                                          now, fx);
        }
    }

    void handle(const crypto::NodeId&, const wire::MembershipPushMsg& m, Timestamp now, Effects&) {
        if (!holds_fragment(m.chunk_hash) && !repairing(m.chunk_hash)) return;
        merge_view_entries(m.chunk_hash, m.entries, now);
    }

    void handle(const crypto::NodeId& src, const wire::CtrlGetViewMsg& m, Timestamp now,
                Effects& fx) {
        wire::CtrlViewResponseMsg out;
        out.chunk_hash = m.chunk_hash;
        out.holds = store_.count(m.chunk_hash) > 0;
        if (out.holds) out.own_index = store_.at(m.chunk_hash).fragment.stream_index;
        if (const GroupView* v = group_view(m.chunk_hash)) {
            out.alive = uint32_t(v->alive(now, cfg_.liveness()));
            for (const auto& [nid, mem] : v->members)
                out.entries.push_back({nid, mem.pk, mem.address, mem.fragment_index,
                                       mem.last_claim, mem.first_seen});
        }
        send_to(fx, src, m.reply_address, out);
    }

    void handle(const crypto::NodeId&, const wire::CtrlViewResponseMsg&, Timestamp, Effects&) {
        // consumed by tools, not by peers
    }

    void handle(const crypto::NodeId&, const wire::CtrlDropFragmentMsg& m, Timestamp now, Effects&) {
        drop_fragment(m.chunk_hash, now);
    }

    void merge_view_entries(const Digest256& chash, const std::vector<wire::ViewEntry>& entries,
                            Timestamp now) {
        for (const auto& e : entries) {
            crypto::NodeId nid = crypto::node_id(e.pk);
            if (nid == id_) continue;
            upsert_member(chash, nid, e.stream_index, e.pk, e.address, now);
        }
    }

    void on_tick(Timestamp now, Effects& fx) {
        locate_tick(now, fx);
        store_tick(now, fx);
        query_tick(now, fx);
        repair_tick(now, fx);
    }

    // ---- state -------------------------------------------------------------------

    NodeConfig cfg_;
    std::shared_ptr<selection::Directory> dir_;
    crypto::NodeId id_;
    std::mt19937_64 rng_;
    Timestamp started_ = 0;

    struct FakeHolding {
        uint64_t index = 0;
        selection::SelectionProof proof;
        Timestamp expiration = 0;
    };
    struct CacheEntry {
        Bytes chunk;
        Timestamp expires = 0;
    };

    std::map<Digest256, StoredFragment> store_;
    std::map<Digest256, FakeHolding> fake_store_;
    std::map<Digest256, GroupView> views_;
    std::map<Digest256, CacheEntry> cache_;
    std::map<Digest256, std::optional<selection::SelectionProof>> lottery_;

    uint64_t next_token_ = 1;
    std::map<uint64_t, Action> timers_;

    uint64_t next_locate_ = 1;
    std::vector<LocateOp> locates_;

    uint64_t next_job_ = 1;
    std::map<uint64_t, StoreJob> stores_;
    std::map<uint64_t, QueryJob> queries_;
    std::map<uint64_t, JobResult> results_;

    std::map<Digest256, RepairSearch> searches_;
    std::map<Digest256, RepairTask> repairs_;
    std::set<Digest256> repair_timer_pending_;
};

}  // namespace entropy::protocol
