#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

#include "entropy/codec.hpp"
#include "entropy/crypto.hpp"
#include "entropy/selection.hpp"

namespace entropy::sim {

inline constexpr double kHoursPerYear = 8766.0;

struct SimConfig {
    uint64_t nodes = 1000;
    double byzantine_fraction = 0.0;
    double churn_per_year = 52.0;  // permanent departures per honest node per year
    uint64_t objects = 100;
    codec::CodecParams codec;
    double scale_exponent = 0.0;  // 0 derives (r_group + 8) / 2
    double cache_ttl_hours = 0.0;  // 0 disables the chunk cache
    double years = 1.0;
    double heartbeat_hours = 1.0;
    double liveness_multiple = 3.0;
    double repair_jitter_hours = 1.0;
    double repair_latency_hours = 1.0;  // transfer + decode time per repair
    double object_expiry_years = 0.0;   // 0 = objects never expire
    uint64_t fragment_cap_per_node = 0;  // mu; 0 = uncapped
    uint64_t seed = 0;
    bool real_vrf = false;  // run the full VRF instead of the seeded PRG stub
    bool audit = false;     // verify fragment conservation at the end of the run

    void validate() const {
        codec.validate();
        if (nodes < 2) throw std::invalid_argument("need at least 2 nodes");
        if (byzantine_fraction < 0 || byzantine_fraction >= 1)
            throw std::invalid_argument("byzantine fraction must be in [0,1)");
        if (churn_per_year < 0) throw std::invalid_argument("churn must be >= 0");
        if (objects < 1) throw std::invalid_argument("need at least one object");
        if (years <= 0) throw std::invalid_argument("duration must be positive");
    }
};

struct AttackerConfig {
    enum class Strategy { OmniscientGreedy, Random };
    Strategy strategy = Strategy::OmniscientGreedy;
    double attacked_fraction = 0.0;  // fraction of all nodes disabled
    uint64_t budget = 0;             // absolute node budget; overrides fraction when > 0
    double attack_time_years = 0.0;  // when the attack executes
    uint64_t mu = 1;                 // fragments-per-node cap used in the analytic bound

    uint64_t resolve_budget(uint64_t n) const {
        return budget > 0 ? budget : uint64_t(attacked_fraction * double(n));
    }
};

struct TracePoint {
    double t = 0;
    uint32_t honest_alive = 0;
};

struct Metrics {
    // object-size units; one fragment transfer = 1 / (n_chunks * k_inner)
    double repair_traffic_objects = 0;
    uint64_t repairs = 0;
    uint64_t repaired_fragments = 0;
    uint64_t cache_hits = 0;
    uint64_t fragment_losses = 0;
    uint64_t churn_events = 0;
    uint64_t absorbed_groups = 0;
    uint64_t lost_objects = 0;
    double lost_fraction = 0;
    uint64_t placed_fragments = 0;
    double storage_redundancy_nominal = 0;
    double storage_redundancy_placed = 0;
    uint64_t attack_kills = 0;
    std::vector<TracePoint> trace;
    int64_t min_trace_alive = -1;
};

namespace detail {

inline uint64_t mix_chash(uint64_t secret, const U256& chash) {
    uint64_t s = secret;
    s ^= chash.limb[0] * 0x9e3779b97f4a7c15ull;
    s ^= chash.limb[1] * 0xc2b2ae3d27d4eb4full;
    s ^= chash.limb[2] * 0x165667b19e3779f9ull;
    s ^= chash.limb[3] * 0x27d4eb2f165667c5ull;
    return s;
}

// Seeded-PRG stand-in for the VRF output: uniform 256-bit value per
// (node, chunk), deterministic across the run.
inline U256 stub_vrf(uint64_t secret, const U256& chash) {
    uint64_t state = mix_chash(secret, chash);
    U256 r;
    for (auto& l : r.limb) l = splitmix64(state);
    return r;
}

}  // namespace detail

// Event-driven simulation of the full protocol at chunk-group granularity.
// Selection uses the real ring-distance/threshold math; churn applies to
// honest nodes only (Byzantine identities stay online), replacements join
// with fresh identifiers so N and the Byzantine fraction stay constant.
class Engine {
  public:
    Engine(const SimConfig& cfg, uint32_t trace_group = UINT32_MAX)
        : cfg_(cfg), rng_(cfg.seed), trace_group_(trace_group) {
        cfg_.validate();
        sel_.total_nodes = cfg_.nodes;
        sel_.r_group = cfg_.codec.r_group;
        sel_.scale_exponent = cfg_.scale_exponent;
        sel_.validate();

        uint64_t byz = uint64_t(std::floor(cfg_.byzantine_fraction * double(cfg_.nodes)));
        nodes_.resize(cfg_.nodes);
        for (uint64_t i = 0; i < cfg_.nodes; ++i) {
            nodes_[i].honest = i >= byz;
            if (nodes_[i].honest) honest_slots_.push_back(uint32_t(i));
            assign_identity(uint32_t(i));
        }
    }

    Metrics run(const AttackerConfig* attacker = nullptr) {
        place_objects();
        if (trace_group_ != UINT32_MAX) record_trace(0.0);

        double horizon = cfg_.years;
        double churn_rate = cfg_.churn_per_year * double(honest_slots_.size());
        if (churn_rate > 0) schedule(next_exp(churn_rate), Ev::Churn, 0);
        if (attacker && attacker->resolve_budget(cfg_.nodes) > 0)
            schedule(attacker->attack_time_years, Ev::Attack, 0);
        if (cfg_.object_expiry_years > 0)
            for (uint32_t i = 0; i < objects_.size(); ++i)
                schedule(cfg_.object_expiry_years, Ev::Expiry, i);

        while (!queue_.empty() && queue_.top().t <= horizon) {
            Ev ev = queue_.top();
            queue_.pop();
            now_ = ev.t;
            switch (ev.kind) {
                case Ev::Churn: {
                    churn_one();
                    schedule(now_ + next_exp(churn_rate), Ev::Churn, 0);
                    break;
                }
                case Ev::Check:
                    group_check(ev.arg);
                    break;
                case Ev::Repair:
                    repair_group(ev.arg);
                    break;
                case Ev::Attack:
                    run_attack(*attacker);
                    break;
                case Ev::Expiry:
                    expire_object(ev.arg);
                    break;
            }
        }
        now_ = horizon;

        metrics_.lost_fraction = double(metrics_.lost_objects) / double(objects_.size());
        metrics_.storage_redundancy_nominal = cfg_.codec.redundancy();
        metrics_.storage_redundancy_placed =
            double(metrics_.placed_fragments) /
            (double(objects_.size()) * double(cfg_.codec.k_outer) * double(cfg_.codec.k_inner));
        if (trace_group_ != UINT32_MAX) record_trace(horizon);
        if (cfg_.audit) audit_conservation();
        return metrics_;
    }

  private:
    struct Node {
        U256 id{};
        uint64_t secret = 0;
        crypto::KeyPair keys;  // real-vrf mode only
        uint64_t gen = 0;
        bool honest = true;
        bool alive = true;
        std::vector<uint32_t> groups;
    };

    struct Member {
        uint32_t slot = 0;
        uint64_t gen = 0;
        bool honest = true;
    };

    struct CacheRef {
        uint32_t slot = 0;
        uint64_t gen = 0;
        double expires = 0;
    };

    struct Group {
        U256 chash{};
        uint32_t object = 0;
        std::vector<Member> members;
        uint32_t honest_alive = 0;
        bool absorbed = false;
        bool retired = false;
        bool check_scheduled = false;
        bool repair_pending = false;
        std::vector<CacheRef> caches;
    };

    struct Object {
        uint32_t first_group = 0;
        uint32_t recoverable = 0;
        bool lost = false;
        bool expired = false;
    };

    struct Ev {
        enum Kind { Churn, Check, Repair, Attack, Expiry } kind = Churn;
        double t = 0;
        uint64_t seq = 0;
        uint32_t arg = 0;

        bool operator>(const Ev& o) const { return t != o.t ? t > o.t : seq > o.seq; }
    };

    // -- identity and ring ---------------------------------------------------

    void assign_identity(uint32_t slot) {
        Node& n = nodes_[slot];
        U256 id;
        for (auto& l : id.limb) l = rng_();
        n.id = id;
        n.secret = rng_();
        if (cfg_.real_vrf) {
            std::array<uint8_t, 32> seed{};
            uint64_t a = rng_(), b = rng_();
            for (int i = 0; i < 8; ++i) {
                seed[size_t(i)] = uint8_t(a >> (8 * i));
                seed[size_t(8 + i)] = uint8_t(b >> (8 * i));
            }
            n.keys = crypto::keygen(BytesView(seed.data(), seed.size()));
            n.id = to_u256(crypto::node_id(n.keys.pk));
        }
        ring_[n.id] = slot;
    }

    bool eligible(const Node& n, const U256& chash) const {
        double d = selection::distance_u256(n.id, chash, cfg_.nodes);
        auto thr = selection::eligibility_threshold(d, sel_);
        if (cfg_.real_vrf) {
            Digest256 input = digest_from_u256(chash);
            auto out = crypto::vrf_prove(n.keys, BytesView(input.data(), input.size()));
            return thr.accepts(to_u256(out.hash));
        }
        return thr.accepts(detail::stub_vrf(n.secret, chash));
    }

    // Walk the ring outward from chash in minor-arc order, yielding candidate
    // slots. Returns at most `limit` candidates.
    template <typename Fn>
    void walk_candidates(const U256& chash, size_t limit, Fn&& fn) const {
        if (ring_.empty()) return;
        auto fwd = ring_.lower_bound(chash);
        if (fwd == ring_.end()) fwd = ring_.begin();
        auto bwd = fwd == ring_.begin() ? std::prev(ring_.end()) : std::prev(fwd);
        size_t steps = std::min(limit, ring_.size());
        for (size_t i = 0; i < steps; ++i) {
            if (fwd == bwd) {
                if (!fn(fwd->second)) return;
                break;
            }
            U256 df = U256::ring_distance(fwd->first, chash);
            U256 db = U256::ring_distance(bwd->first, chash);
            if (df <= db) {
                if (!fn(fwd->second)) return;
                ++fwd;
                if (fwd == ring_.end()) fwd = ring_.begin();
            } else {
                if (!fn(bwd->second)) return;
                bwd = bwd == ring_.begin() ? std::prev(ring_.end()) : std::prev(bwd);
            }
        }
    }

    bool is_member(const Group& g, uint32_t slot) const {
        for (const auto& m : g.members)
            if (m.slot == slot && m.gen == nodes_[slot].gen) return true;
        return false;
    }

    bool node_full(const Node& n) const {
        return cfg_.fragment_cap_per_node > 0 && n.groups.size() >= cfg_.fragment_cap_per_node;
    }

    // -- lifecycle ------------------------------------------------------------

    void place_objects() {
        objects_.resize(cfg_.objects);
        groups_.reserve(cfg_.objects * cfg_.codec.n_chunks);
        for (uint32_t oi = 0; oi < cfg_.objects; ++oi) {
            Object& obj = objects_[oi];
            obj.first_group = uint32_t(groups_.size());
            obj.recoverable = cfg_.codec.n_chunks;
            for (uint32_t ci = 0; ci < cfg_.codec.n_chunks; ++ci) {
                Group g;
                g.object = oi;
                for (auto& l : g.chash.limb) l = rng_();
                uint32_t gid = uint32_t(groups_.size());
                recruit_into(g, gid, cfg_.codec.r_group, true);
                metrics_.placed_fragments += g.members.size();
                if (g.honest_alive < cfg_.codec.k_inner) absorb(g, gid);
                groups_.push_back(std::move(g));
            }
        }
        groups_by_hash_.reserve(groups_.size());
        for (uint32_t i = 0; i < groups_.size(); ++i)
            groups_by_hash_.push_back({groups_[i].chash, i});
        std::sort(groups_by_hash_.begin(), groups_by_hash_.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    // Adds up to `want` new eligible members in ring-distance order.
    // At placement no traffic is charged; repairs account per joiner.
    void recruit_into(Group& g, uint32_t gid, size_t want, bool placement) {
        size_t added = 0;
        bool cache_ok = !placement && cache_alive(g);
        walk_candidates(g.chash, sel_.candidates(), [&](uint32_t slot) {
            if (added >= want) return false;
            Node& n = nodes_[slot];
            if (!n.alive || node_full(n) || is_member(g, slot)) return true;
            if (!eligible(n, g.chash)) return true;
            g.members.push_back({slot, n.gen, n.honest});
            n.groups.push_back(gid);
            ++added;
            if (n.honest) {
                ++g.honest_alive;
                if (trace_group_ == gid) record_trace(now_);
            }
            if (!placement) {
                ++metrics_.repaired_fragments;
                double unit = 1.0 / (double(cfg_.codec.n_chunks) * double(cfg_.codec.k_inner));
                if (n.honest) {
                    if (cache_ok) {
                        metrics_.repair_traffic_objects += unit;  // booster ships one fragment
                        ++metrics_.cache_hits;
                    } else {
                        metrics_.repair_traffic_objects += double(cfg_.codec.k_inner) * unit;
                        if (cfg_.cache_ttl_hours > 0)
                            g.caches.push_back(
                                {slot, n.gen, now_ + cfg_.cache_ttl_hours / kHoursPerYear});
                    }
                }
                // byzantine joiners claim membership without pulling data
            }
            return added < want;
        });
    }

    bool cache_alive(Group& g) {
        auto valid = [&](const CacheRef& c) {
            return c.expires >= now_ && nodes_[c.slot].alive && nodes_[c.slot].gen == c.gen &&
                   nodes_[c.slot].honest;
        };
        std::erase_if(g.caches, [&](const CacheRef& c) { return !valid(c); });
        return !g.caches.empty();
    }

    void absorb(Group& g, uint32_t gid) {
        if (g.absorbed || g.retired) return;
        g.absorbed = true;
        ++metrics_.absorbed_groups;
        Object& obj = objects_[g.object];
        if (obj.expired || obj.lost) return;
        --obj.recoverable;
        if (obj.recoverable < cfg_.codec.k_outer) {
            obj.lost = true;
            ++metrics_.lost_objects;
        }
        (void)gid;
    }

    void churn_one() {
        ++metrics_.churn_events;
        std::uniform_int_distribution<size_t> pick(0, honest_slots_.size() - 1);
        uint32_t slot = honest_slots_[pick(rng_)];
        if (!nodes_[slot].alive) return;  // disabled by an attack; slot stays dead
        kill_node(slot, true);
    }

    void kill_node(uint32_t slot, bool replace) {
        Node& n = nodes_[slot];
        ring_.erase(n.id);
        uint64_t old_gen = n.gen;
        std::vector<uint32_t> held = std::move(n.groups);
        n.groups.clear();
        n.gen++;

        for (uint32_t gid : held) {
            Group& g = groups_[gid];
            auto it = std::find_if(g.members.begin(), g.members.end(), [&](const Member& m) {
                return m.slot == slot && m.gen == old_gen;
            });
            if (it == g.members.end()) continue;
            bool honest = it->honest;
            g.members.erase(it);
            if (honest) {
                --g.honest_alive;
                ++metrics_.fragment_losses;
                if (trace_group_ == gid) record_trace(now_);
            }
            if (g.retired || g.absorbed) continue;
            if (g.honest_alive < cfg_.codec.k_inner) {
                absorb(g, gid);
                continue;
            }
            if (!g.check_scheduled && !g.repair_pending) {
                g.check_scheduled = true;
                double detect = cfg_.liveness_multiple * cfg_.heartbeat_hours / kHoursPerYear +
                                uniform() * cfg_.heartbeat_hours / kHoursPerYear;
                schedule(now_ + detect, Ev::Check, gid);
            }
        }

        if (replace) {
            assign_identity(slot);
            n.alive = true;
            // a fresh identity near a starved group lets its repair retry
            notify_birth(n.id);
        } else {
            n.alive = false;
        }
    }

    void notify_birth(const U256& id) {
        if (groups_by_hash_.empty()) return;
        double frac = (sel_.m() + 40.0) / double(cfg_.nodes);
        if (frac > 0.5) frac = 0.5;
        uint64_t mant = uint64_t(frac * 0x1p63);
        U256 w = U256::shifted(mant, 193);
        U256 lo = id - w;
        U256 hi = id + w;
        auto visit_range = [&](const U256& a, const U256& b) {
            auto it = std::lower_bound(groups_by_hash_.begin(), groups_by_hash_.end(), a,
                                       [](const auto& p, const U256& v) { return p.first < v; });
            for (; it != groups_by_hash_.end() && it->first <= b; ++it) {
                Group& g = groups_[it->second];
                if (g.absorbed || g.retired || g.check_scheduled || g.repair_pending) continue;
                if (g.members.size() >= cfg_.codec.r_group) continue;
                g.check_scheduled = true;
                double sync = (1.0 + 4.0 * uniform()) * cfg_.heartbeat_hours / kHoursPerYear;
                schedule(now_ + sync, Ev::Check, it->second);
            }
        };
        if (lo <= hi) {
            visit_range(lo, hi);
        } else {  // window wraps the ring origin
            visit_range(lo, U256{{~0ull, ~0ull, ~0ull, ~0ull}});
            visit_range(U256{}, hi);
        }
    }

    void group_check(uint32_t gid) {
        Group& g = groups_[gid];
        g.check_scheduled = false;
        if (g.absorbed || g.retired || g.repair_pending) return;
        if (g.members.size() >= cfg_.codec.r_group) return;
        g.repair_pending = true;
        double delay = (uniform() * cfg_.repair_jitter_hours + cfg_.repair_latency_hours) /
                       kHoursPerYear;
        schedule(now_ + delay, Ev::Repair, gid);
    }

    void repair_group(uint32_t gid) {
        Group& g = groups_[gid];
        g.repair_pending = false;
        if (g.absorbed || g.retired) return;
        if (g.members.size() >= cfg_.codec.r_group) return;
        size_t deficit = cfg_.codec.r_group - g.members.size();
        ++metrics_.repairs;
        recruit_into(g, gid, deficit, false);
        // still short: wait for a birth near the group or the next member loss
    }

    void expire_object(uint32_t oi) {
        Object& obj = objects_[oi];
        if (obj.expired) return;
        obj.expired = true;
        for (uint32_t gid = obj.first_group; gid < obj.first_group + cfg_.codec.n_chunks; ++gid) {
            Group& g = groups_[gid];
            g.retired = true;
            for (const auto& m : g.members) {
                Node& n = nodes_[m.slot];
                if (n.gen != m.gen) continue;
                std::erase(n.groups, gid);
            }
            g.members.clear();
            g.honest_alive = 0;
        }
    }

    // -- targeted attack ------------------------------------------------------

    void run_attack(const AttackerConfig& atk) {
        uint64_t budget = atk.resolve_budget(cfg_.nodes);
        if (atk.strategy == AttackerConfig::Strategy::Random) {
            std::vector<uint32_t> alive;
            for (uint32_t s : honest_slots_)
                if (nodes_[s].alive) alive.push_back(s);
            std::shuffle(alive.begin(), alive.end(), rng_);
            for (uint64_t i = 0; i < budget && i < alive.size(); ++i) {
                kill_node(alive[i], false);
                ++metrics_.attack_kills;
            }
            return;
        }
        // Omniscient greedy: repeatedly push the group with the smallest
        // honest margin toward absorption, disabling its highest-degree
        // honest member. Kills are atomic w.r.t. repair.
        for (uint64_t used = 0; used < budget; ++used) {
            uint32_t best = UINT32_MAX;
            int64_t best_margin = INT64_MAX;
            for (uint32_t gi = 0; gi < groups_.size(); ++gi) {
                const Group& g = groups_[gi];
                if (g.absorbed || g.retired) continue;
                int64_t margin = int64_t(g.honest_alive) - int64_t(cfg_.codec.k_inner);
                if (margin < best_margin) {
                    best_margin = margin;
                    best = gi;
                }
            }
            if (best == UINT32_MAX) break;
            const Group& g = groups_[best];
            uint32_t victim = UINT32_MAX;
            size_t degree = 0;
            for (const auto& m : g.members) {
                if (!m.honest) continue;
                const Node& n = nodes_[m.slot];
                if (!n.alive || n.gen != m.gen) continue;
                if (victim == UINT32_MAX || n.groups.size() > degree) {
                    victim = m.slot;
                    degree = n.groups.size();
                }
            }
            if (victim == UINT32_MAX) break;
            kill_node(victim, false);
            ++metrics_.attack_kills;
        }
    }

    // -- bookkeeping ------------------------------------------------------------

    void record_trace(double t) {
        if (trace_group_ >= groups_.size()) {
            if (!groups_.empty()) {
                metrics_.trace.push_back({t, 0});
            }
            return;
        }
        uint32_t alive = groups_[trace_group_].honest_alive;
        metrics_.trace.push_back({t, alive});
        if (metrics_.min_trace_alive < 0 || int64_t(alive) < metrics_.min_trace_alive)
            metrics_.min_trace_alive = int64_t(alive);
    }

    void audit_conservation() {
        // Fragments on honest alive nodes must equal per-group honest counts
        // and per-node group lists; every change went through placement,
        // churn, attack, expiry, or repair.
        uint64_t from_groups = 0;
        for (const auto& g : groups_) {
            uint32_t honest = 0;
            for (const auto& m : g.members)
                if (m.honest && nodes_[m.slot].alive && nodes_[m.slot].gen == m.gen) ++honest;
            if (honest != g.honest_alive) throw std::logic_error("conservation: group count drift");
            from_groups += honest;
        }
        uint64_t from_nodes = 0;
        for (uint32_t s = 0; s < nodes_.size(); ++s) {
            const Node& n = nodes_[s];
            if (!n.honest || !n.alive) continue;
            for (uint32_t gid : n.groups) {
                if (is_member(groups_[gid], s)) ++from_nodes;
            }
        }
        if (from_nodes != from_groups) throw std::logic_error("conservation: node/group mismatch");
    }

    double uniform() {
        std::uniform_real_distribution<double> d(0.0, 1.0);
        return d(rng_);
    }

    double next_exp(double rate) {
        std::exponential_distribution<double> d(rate);
        return d(rng_);
    }

    void schedule(double t, Ev::Kind kind, uint32_t arg) {
        Ev ev;
        ev.t = t;
        ev.seq = seq_++;
        ev.kind = kind;
        ev.arg = arg;
        queue_.push(ev);
    }

    SimConfig cfg_;
    std::mt19937_64 rng_;
    selection::SelectionParams sel_;
    uint32_t trace_group_ = UINT32_MAX;

    std::vector<Node> nodes_;
    std::vector<uint32_t> honest_slots_;
    std::map<U256, uint32_t> ring_;
    std::vector<Group> groups_;
    std::vector<std::pair<U256, uint32_t>> groups_by_hash_;
    std::vector<Object> objects_;

    double now_ = 0;
    uint64_t seq_ = 0;
    std::priority_queue<Ev, std::vector<Ev>, std::greater<Ev>> queue_;
    Metrics metrics_;
};

inline Metrics run_entropy(const SimConfig& cfg) { return Engine(cfg).run(); }

inline Metrics run_entropy_attacked(const SimConfig& cfg, const AttackerConfig& atk) {
    return Engine(cfg).run(&atk);
}

// Fragment-survival trace for one chunk group over the run.
inline Metrics trace_fragments(const SimConfig& cfg, uint32_t group_index) {
    return Engine(cfg, group_index).run();
}

// -- 3-replica baseline -------------------------------------------------------

// Ceph-like comparison system: every object on three random peers, repair
// immediately after a holder visibly fails. Byzantine holders claim storage,
// never serve data, and never leave on their own.
class BaselineEngine {
  public:
    explicit BaselineEngine(const SimConfig& cfg) : cfg_(cfg), rng_(cfg.seed ^ 0xBA5E11AEull) {
        cfg_.validate();
        uint64_t byz = uint64_t(std::floor(cfg_.byzantine_fraction * double(cfg_.nodes)));
        nodes_.resize(cfg_.nodes);
        for (uint64_t i = 0; i < cfg_.nodes; ++i) {
            nodes_[i].honest = i >= byz;
            if (nodes_[i].honest) honest_slots_.push_back(uint32_t(i));
        }
    }

    Metrics run(const AttackerConfig* attacker = nullptr) {
        objects_.resize(cfg_.objects);
        for (uint32_t oi = 0; oi < cfg_.objects; ++oi) {
            for (int r = 0; r < 3; ++r) {
                uint32_t slot = pick_new_holder(oi);
                place_replica(oi, size_t(r), slot);
            }
            metrics_.placed_fragments += 3;
        }
        metrics_.storage_redundancy_nominal = 3.0;
        metrics_.storage_redundancy_placed = 3.0;

        double horizon = cfg_.years;
        double churn_rate = cfg_.churn_per_year * double(honest_slots_.size());
        if (churn_rate > 0) schedule(next_exp(churn_rate), BEv::Churn, 0, 0);
        if (attacker && attacker->resolve_budget(cfg_.nodes) > 0)
            schedule(attacker->attack_time_years, BEv::Attack, 0, 0);

        while (!queue_.empty() && queue_.top().t <= horizon) {
            BEv ev = queue_.top();
            queue_.pop();
            now_ = ev.t;
            switch (ev.kind) {
                case BEv::Churn:
                    churn_one();
                    schedule(now_ + next_exp(churn_rate), BEv::Churn, 0, 0);
                    break;
                case BEv::Repair:
                    repair(ev.obj, ev.rep);
                    break;
                case BEv::Attack:
                    run_attack(*attacker);
                    break;
            }
        }

        // silent loss: no honest data-holding replica left
        for (uint32_t oi = 0; oi < objects_.size(); ++oi) mark_if_dead(oi);
        metrics_.lost_fraction = double(metrics_.lost_objects) / double(objects_.size());
        return metrics_;
    }

  private:
    struct BNode {
        uint64_t gen = 0;
        bool honest = true;
        bool alive = true;
        std::vector<std::pair<uint32_t, uint8_t>> held;  // (object, replica idx)
    };
    struct Replica {
        uint32_t slot = 0;
        uint64_t gen = 0;
        bool has_data = false;
    };
    struct BObject {
        std::array<Replica, 3> reps;
        bool lost = false;
    };
    struct BEv {
        enum Kind { Churn, Repair, Attack } kind = Churn;
        double t = 0;
        uint64_t seq = 0;
        uint32_t obj = 0;
        uint8_t rep = 0;
        bool operator>(const BEv& o) const { return t != o.t ? t > o.t : seq > o.seq; }
    };

    bool replica_alive(const Replica& r) const {
        return nodes_[r.slot].alive && nodes_[r.slot].gen == r.gen;
    }

    bool has_source(const BObject& o, int except) const {
        for (int i = 0; i < 3; ++i) {
            if (i == except) continue;
            if (replica_alive(o.reps[size_t(i)]) && o.reps[size_t(i)].has_data) return true;
        }
        return false;
    }

    void mark_if_dead(uint32_t oi) {
        BObject& o = objects_[oi];
        if (o.lost) return;
        if (!has_source(o, -1)) {
            o.lost = true;
            ++metrics_.lost_objects;
        }
    }

    uint32_t pick_new_holder(uint32_t oi) {
        for (;;) {
            std::uniform_int_distribution<uint32_t> pick(0, uint32_t(nodes_.size() - 1));
            uint32_t slot = pick(rng_);
            if (!nodes_[slot].alive) continue;
            bool dup = false;
            for (const auto& r : objects_[oi].reps)
                dup |= replica_alive(r) && r.slot == slot;
            if (!dup) return slot;
        }
    }

    void place_replica(uint32_t oi, size_t idx, uint32_t slot) {
        BNode& n = nodes_[slot];
        objects_[oi].reps[idx] = {slot, n.gen, n.honest};
        n.held.push_back({oi, uint8_t(idx)});
    }

    void churn_one() {
        ++metrics_.churn_events;
        std::uniform_int_distribution<size_t> pick(0, honest_slots_.size() - 1);
        uint32_t slot = honest_slots_[pick(rng_)];
        if (!nodes_[slot].alive) return;
        kill_node(slot, true);
    }

    void kill_node(uint32_t slot, bool replace) {
        BNode& n = nodes_[slot];
        auto held = std::move(n.held);
        n.held.clear();
        n.gen++;
        n.alive = replace;
        for (auto [oi, idx] : held) {
            if (objects_[oi].lost) continue;
            // the baseline repairs immediately on a visible holder failure
            schedule(now_, BEv::Repair, oi, idx);
        }
    }

    void repair(uint32_t oi, uint8_t idx) {
        BObject& o = objects_[oi];
        if (o.lost) return;
        if (replica_alive(o.reps[idx])) return;  // already re-placed
        if (!has_source(o, idx)) {
            o.lost = true;
            ++metrics_.lost_objects;
            return;
        }
        uint32_t slot = pick_new_holder(oi);
        place_replica(oi, idx, slot);
        metrics_.repair_traffic_objects += 1.0;  // one object copy per repair
        ++metrics_.repairs;
    }

    void run_attack(const AttackerConfig& atk) {
        uint64_t budget = atk.resolve_budget(cfg_.nodes);
        if (atk.strategy == AttackerConfig::Strategy::Random) {
            std::vector<uint32_t> alive;
            for (uint32_t s : honest_slots_)
                if (nodes_[s].alive) alive.push_back(s);
            std::shuffle(alive.begin(), alive.end(), rng_);
            for (uint64_t i = 0; i < budget && i < alive.size(); ++i) kill_attacked(alive[i]);
            finish_attack();
            return;
        }
        // greedy: erase objects with the fewest honest holders first;
        // kills are shared across objects
        std::set<uint32_t> killed;
        std::vector<uint32_t> order(objects_.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            return honest_holders(a).size() < honest_holders(b).size();
        });
        for (uint32_t oi : order) {
            auto holders = honest_holders(oi);
            std::vector<uint32_t> fresh;
            for (uint32_t s : holders)
                if (!killed.count(s)) fresh.push_back(s);
            if (killed.size() + fresh.size() > budget) continue;
            for (uint32_t s : fresh) {
                killed.insert(s);
                kill_attacked(s);
            }
            if (killed.size() >= budget) break;
        }
        finish_attack();
    }

    std::vector<uint32_t> honest_holders(uint32_t oi) const {
        std::vector<uint32_t> out;
        for (const auto& r : objects_[oi].reps)
            if (replica_alive(r) && r.has_data) out.push_back(r.slot);
        return out;
    }

    void kill_attacked(uint32_t slot) {
        BNode& n = nodes_[slot];
        if (!n.alive) return;
        ++metrics_.attack_kills;
        auto held = std::move(n.held);
        n.held.clear();
        n.gen++;
        n.alive = false;
        pending_orphans_.insert(pending_orphans_.end(), held.begin(), held.end());
    }

    void finish_attack() {
        // repairs trigger only after the (atomic) attack completes
        for (auto [oi, idx] : pending_orphans_) {
            if (objects_[oi].lost) continue;
            schedule(now_, BEv::Repair, oi, idx);
        }
        pending_orphans_.clear();
        for (uint32_t oi = 0; oi < objects_.size(); ++oi) mark_if_dead(oi);
    }

    double next_exp(double rate) {
        std::exponential_distribution<double> d(rate);
        return d(rng_);
    }

    void schedule(double t, BEv::Kind kind, uint32_t obj, uint8_t rep) {
        BEv ev;
        ev.t = t;
        ev.seq = seq_++;
        ev.kind = kind;
        ev.obj = obj;
        ev.rep = rep;
        queue_.push(ev);
    }

    SimConfig cfg_;
    std::mt19937_64 rng_;
    std::vector<BNode> nodes_;
    std::vector<uint32_t> honest_slots_;
    std::vector<BObject> objects_;
    std::vector<std::pair<uint32_t, uint8_t>> pending_orphans_;
    double now_ = 0;
    uint64_t seq_ = 0;
    std::priority_queue<BEv, std::vector<BEv>, std::greater<BEv>> queue_;
    Metrics metrics_;
};

inline Metrics run_baseline(const SimConfig& cfg) { return BaselineEngine(cfg).run(); }

inline Metrics run_baseline_attacked(const SimConfig& cfg, const AttackerConfig& atk) {
    return BaselineEngine(cfg).run(&atk);
}

struct SweepPoint {
    double x = 0;
    Metrics metrics;
};

inline std::vector<SweepPoint> run_byzantine_sweep(const SimConfig& base,
                                                   const std::vector<double>& fractions,
                                                   bool baseline) {
    std::vector<SweepPoint> out;
    for (double f : fractions) {
        SimConfig cfg = base;
        cfg.byzantine_fraction = f;
        out.push_back({f, baseline ? run_baseline(cfg) : run_entropy(cfg)});
    }
    return out;
}

inline std::vector<SweepPoint> run_targeted(const SimConfig& base, const AttackerConfig& atk,
                                            const std::vector<double>& fractions, bool baseline) {
    std::vector<SweepPoint> out;
    for (double f : fractions) {
        AttackerConfig a = atk;
        a.attacked_fraction = f;
        a.budget = 0;
        out.push_back({f, baseline ? run_baseline_attacked(base, a)
                                   : run_entropy_attacked(base, a)});
    }
    return out;
}

}  // namespace entropy::sim
