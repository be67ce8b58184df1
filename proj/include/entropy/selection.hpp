#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "entropy/crypto.hpp"
#include "entropy/hash.hpp"
#include "entropy/u256.hpp"

namespace entropy::selection {

struct SelectionParams {
    uint32_t hashlen = 256;
    uint64_t total_nodes = 0;  // N, from configuration
    uint32_t r_group = 80;
    double scale_exponent = 0.0;   // m; 0 derives (r_group + 8) / 2
    uint32_t candidate_count = 0;  // C; 0 derives 4 * r_group

    double m() const { return scale_exponent > 0 ? scale_exponent : (double(r_group) + 8.0) / 2.0; }
    uint32_t candidates() const { return candidate_count > 0 ? candidate_count : 4 * r_group; }

    void validate() const {
        if (hashlen != 256) throw std::invalid_argument("hashlen must be 256");
        if (total_nodes < 1) throw std::invalid_argument("total_nodes must be >= 1");
        if (m() <= 0) throw std::invalid_argument("scale exponent must be > 0");
    }
};

// Alg. 2 Distance: d = ring_distance / D + 1 with D = 2^hashlen / N, i.e. the
// expected number of node IDs between the two points, plus one.
inline double distance_u256(const U256& a, const U256& b, uint64_t total_nodes) {
    if (total_nodes < 1) throw std::invalid_argument("total_nodes must be >= 1");
    U256 ring = U256::ring_distance(a, b);
    long double scaled = ring.to_long_double() * (long double)total_nodes * 0x1p-256L;
    return double(1.0L + scaled);
}

inline double distance(const Digest256& a, const Digest256& b, uint64_t total_nodes) {
    return distance_u256(to_u256(a), to_u256(b), total_nodes);
}

// Acceptance threshold t = floor(2^m * 2^(hashlen - d)), clamped to 2^hashlen.
// A node is selected iff its VRF output r < t.
struct Threshold {
    U256 limit{};
    bool accept_all = false;

    bool accepts(const U256& r) const { return accept_all || r < limit; }
};

inline Threshold eligibility_threshold(double d, const SelectionParams& p) {
    long double e = (long double)p.hashlen + (long double)p.m() - (long double)d;
    if (e >= (long double)p.hashlen) return Threshold{{}, true};
    if (e < 0.0L) return Threshold{{}, false};
    long double ip = floorl(e);
    long double fr = e - ip;
    uint64_t mant = uint64_t(floorl(exp2l(fr) * 0x1p62L));
    return Threshold{U256::shifted(mant, int(ip) - 62), false};
}

inline double eligibility_probability(double d, const SelectionParams& p) {
    double x = p.m() - d;
    if (x >= 0) return 1.0;
    return std::exp2(x);
}

struct SelectionProof {
    Digest256 chunk_hash{};
    crypto::PublicKey pk{};
    crypto::VrfOutput vrf{};
};

inline std::optional<SelectionProof> selection_proof(const crypto::KeyPair& kp,
                                                     const Digest256& chunk_hash,
                                                     const SelectionParams& p) {
    p.validate();
    crypto::NodeId id = crypto::node_id(kp.pk);
    double d = distance(chunk_hash, id, p.total_nodes);
    auto vrf = crypto::vrf_prove(kp, BytesView(chunk_hash.data(), chunk_hash.size()));
    if (!eligibility_threshold(d, p).accepts(to_u256(vrf.hash))) return std::nullopt;
    return SelectionProof{chunk_hash, kp.pk, vrf};
}

inline bool verify_selection(const Digest256& chunk_hash, const SelectionProof& proof,
                             const SelectionParams& p) {
    p.validate();
    if (proof.chunk_hash != chunk_hash) return false;
    if (!crypto::vrf_verify(proof.pk, BytesView(chunk_hash.data(), chunk_hash.size()),
                            proof.vrf.hash, proof.vrf.proof))
        return false;
    double d = distance(chunk_hash, crypto::node_id(proof.pk), p.total_nodes);
    return eligibility_threshold(d, p).accepts(to_u256(proof.vrf.hash));
}

struct NodeRecord {
    crypto::NodeId node_id{};
    std::string address;
    crypto::PublicKey pk{};
};

// Pluggable peer directory; lookups return the nearest nodes on the ring in
// ascending minor-arc distance, best effort.
class Directory {
  public:
    virtual ~Directory() = default;
    virtual std::vector<NodeRecord> lookup(const Digest256& target, size_t count) const = 0;
    virtual size_t size() const = 0;
};

class MemoryRing : public Directory {
  public:
    void add(const NodeRecord& rec) { ring_[to_u256(rec.node_id)] = rec; }
    void remove(const crypto::NodeId& id) { ring_.erase(to_u256(id)); }
    size_t size() const override { return ring_.size(); }

    std::vector<NodeRecord> lookup(const Digest256& target, size_t count) const override {
        std::vector<NodeRecord> out;
        if (ring_.empty()) return out;
        count = std::min(count, ring_.size());
        U256 t = to_u256(target);

        auto fwd = ring_.lower_bound(t);
        if (fwd == ring_.end()) fwd = ring_.begin();
        auto bwd = fwd == ring_.begin() ? std::prev(ring_.end()) : std::prev(fwd);

        size_t taken = 0;
        while (taken < count) {
            if (taken + 1 >= ring_.size() && fwd == bwd) {
                out.push_back(fwd->second);
                break;
            }
            U256 df = U256::ring_distance(fwd->first, t);
            U256 db = U256::ring_distance(bwd->first, t);
            if (fwd == bwd) {
                out.push_back(fwd->second);
                ++taken;
                break;
            }
            if (df <= db) {
                out.push_back(fwd->second);
                ++fwd;
                if (fwd == ring_.end()) fwd = ring_.begin();
            } else {
                out.push_back(bwd->second);
                bwd = bwd == ring_.begin() ? std::prev(ring_.end()) : std::prev(bwd);
            }
            ++taken;
        }
        return out;
    }

  private:
    std::map<U256, NodeRecord> ring_;
};

struct LocatedPeer {
    NodeRecord node;
    SelectionProof proof;
};

// Alg. 2 Locate: query the C nearest candidates for selection proofs and keep
// the verified ones, in ascending ring distance. The proof fetch is pluggable:
// in-process for the simulator and tests, a ProofRequest exchange in the node.
template <typename ProveFn>
std::vector<LocatedPeer> locate(const Digest256& chunk_hash, const Directory& dir,
                                const SelectionParams& p, ProveFn&& request_proof) {
    p.validate();
    std::vector<LocatedPeer> out;
    std::set<crypto::NodeId> seen;
    for (const auto& cand : dir.lookup(chunk_hash, p.candidates())) {
        if (!seen.insert(cand.node_id).second) continue;
        std::optional<SelectionProof> proof = request_proof(cand);
        if (!proof) continue;
        if (proof->pk != cand.pk) continue;
        if (crypto::node_id(proof->pk) != cand.node_id) continue;
        if (verify_selection(chunk_hash, *proof, p)) out.push_back(LocatedPeer{cand, *proof});
    }
    return out;
}

}  // namespace entropy::selection
