#pragma once

// Shared protocol scenario harness: builds an in-process cluster of Nodes on
// the simulated network and exposes the checks used by both the unit tests
// and the acceptance suite.

#include <memory>
#include <random>
#include <sstream>

#include "entropy/transport_sim.hpp"

namespace entropy::scenario {

struct ClusterConfig {
    size_t nodes = 150;
    uint64_t seed = 1;
    codec::CodecParams codec{8, 16, 4, 5, 0.02};  // k_inner, r_group, k_outer, n_chunks
    double scale_exponent = 18;
    double heartbeat = 10.0;
    double tick = 0;  // 0 keeps the node default (heartbeat / 4)
    net::LatencyModel latency{0.5, 1.5, 0.0};
    double byzantine_fraction = 0.0;
    double cache_ttl = 600.0;
};

class Cluster {
  public:
    explicit Cluster(const ClusterConfig& cc)
        : cfg_(cc), ring_(std::make_shared<selection::MemoryRing>()), net_(cc.seed, cc.latency) {
        std::mt19937_64 rng(cc.seed * 77 + 1);
        size_t byz = size_t(double(cc.nodes) * cc.byzantine_fraction);
        for (size_t i = 0; i < cc.nodes; ++i) {
            std::array<uint8_t, 32> seed{};
            uint64_t sv = rng();
            for (int b = 0; b < 8; ++b) seed[size_t(b)] = uint8_t(sv >> (8 * b));
            seed[9] = uint8_t(i);
            seed[10] = uint8_t(i >> 8);

            protocol::NodeConfig nc;
            nc.keys = crypto::keygen(BytesView(seed.data(), seed.size()));
            nc.address = "sim:" + std::to_string(i);
            nc.codec = cc.codec;
            nc.sel.total_nodes = cc.nodes;
            nc.sel.r_group = cc.codec.r_group;
            nc.sel.scale_exponent = cc.scale_exponent;
            nc.heartbeat_interval = cc.heartbeat;
            nc.tick_interval = cc.tick;
            nc.cache_ttl = cc.cache_ttl;
            nc.byzantine = i < byz;
            nc.rng_seed = rng();
            nodes_.push_back(std::make_unique<protocol::Node>(nc, ring_));
            ring_->add({nodes_.back()->id(), nc.address, nc.keys.pk});
        }
        // attach after the ring is complete so every node sees full membership
        for (auto& n : nodes_) net_.attach(n.get());
    }

    net::SimNet& net() { return net_; }
    const ClusterConfig& config() const { return cfg_; }
    std::vector<std::unique_ptr<protocol::Node>>& nodes() { return nodes_; }
    protocol::Node* node(size_t i) { return nodes_[i].get(); }
    protocol::Node* honest_node(size_t skip = 0) {
        for (auto& n : nodes_) {
            if (n->config().byzantine) continue;
            if (skip-- == 0) return n.get();
        }
        return nullptr;
    }

    // Ground truth: nodes actually holding a live fragment of the chunk
    // (Byzantine fake holdings excluded).
    std::vector<protocol::Node*> holders(const Digest256& chash) {
        std::vector<protocol::Node*> out;
        for (auto& n : nodes_)
            if (n->stored(chash)) out.push_back(n.get());
        return out;
    }

    // Every stored fragment must carry a proof that verifies: the protocol
    // safety invariant, checked over the whole cluster.
    bool all_fragments_verifiably_selected() {
        selection::SelectionParams sp = nodes_[0]->config().sel;
        for (auto& n : nodes_) {
            for (const auto& chash : n->held_chunks()) {
                const protocol::StoredFragment* sf = n->stored(chash);
                if (!sf) continue;  // byzantine fake holding
                if (!selection::verify_selection(chash, sf->proof, sp)) return false;
                if (sf->fragment.chunk_hash != chash) return false;
            }
        }
        return true;
    }

    std::string state_fingerprint() {
        std::ostringstream os;
        for (auto& n : nodes_) {
            os << to_hex(n->id()).substr(0, 8) << "{";
            auto held = n->held_chunks();
            std::sort(held.begin(), held.end());
            for (const auto& h : held) {
                os << to_hex(h).substr(0, 8);
                const protocol::StoredFragment* sf = n->stored(h);
                if (sf) os << ":" << sf->fragment.stream_index;
                os << ",";
            }
            os << "}";
        }
        return os.str();
    }

  private:
    ClusterConfig cfg_;
    std::shared_ptr<selection::MemoryRing> ring_;
    std::vector<std::unique_ptr<protocol::Node>> nodes_;
    net::SimNet net_;
};

inline std::array<uint8_t, 32> client_secret(uint8_t fill) {
    std::array<uint8_t, 32> s{};
    s.fill(fill);
    s[0] = 0xC1;
    return s;
}

struct StoreOutcome {
    bool ok = false;
    protocol::ObjectRecipe recipe;
    std::string error;
};

inline StoreOutcome store_object(Cluster& c, protocol::Node* via, const Bytes& object,
                                 const std::array<uint8_t, 32>& secret, double timeout = 600) {
    protocol::Effects fx;
    uint64_t job = via->begin_store(view(object), secret, 0, c.net().now(), fx);
    for (auto& s : fx.sends) c.net().inject(s.env);  // begin_* emits sends only
    const protocol::JobResult* res = c.net().wait_job(via, job, c.net().now() + timeout);
    StoreOutcome out;
    if (res && res->state == protocol::JobState::Succeeded) {
        out.ok = true;
        out.recipe = res->recipe;
    } else if (res) {
        out.error = res->error;
        for (const auto& s : res->chunk_status) out.error += "; " + s;
        out.recipe = res->recipe;
    }
    return out;
}

struct QueryOutcome {
    bool ok = false;
    Bytes object;
    std::string error;
};

inline QueryOutcome query_object(Cluster& c, protocol::Node* via,
                                 const protocol::ObjectRecipe& recipe,
                                 const std::array<uint8_t, 32>& secret, double timeout = 600) {
    protocol::Effects fx;
    uint64_t job = via->begin_query(recipe, secret, c.net().now(), fx);
    for (auto& s : fx.sends) c.net().inject(s.env);
    const protocol::JobResult* res = c.net().wait_job(via, job, c.net().now() + timeout);
    QueryOutcome out;
    if (res && res->state == protocol::JobState::Succeeded) {
        out.ok = true;
        out.object = res->object;
    } else if (res) {
        out.error = res->error;
        for (const auto& s : res->chunk_status) out.error += "; " + s;
    }
    return out;
}

inline Bytes random_object(uint64_t seed, size_t n) {
    std::mt19937_64 rng(seed);
    Bytes b(n);
    for (auto& x : b) x = uint8_t(rng());
    return b;
}

}  // namespace entropy::scenario
