#pragma once

#include <bit>
#include <variant>
#include <vector>

#include "entropy/common.hpp"
#include "entropy/crypto.hpp"
#include "entropy/hash.hpp"

namespace entropy::wire {

struct WireError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr uint8_t kVersion = 1;
inline constexpr size_t kMaxPayload = 16 * 1024 * 1024;
inline constexpr size_t kHeaderSize = 4 + 1 + 1 + 32 + 32;  // len, version, type, src, dst

enum class MsgType : uint8_t {
    StoreFragment = 1,
    StoreAck = 2,
    GetFragment = 3,
    FragmentData = 4,
    ProofRequest = 5,
    ProofResponse = 6,
    PersistenceClaim = 7,
    RepairRequest = 8,
    ChunkCacheRequest = 9,
    ChunkCacheResponse = 10,
    MembershipPush = 11,
    // control plane, outside the storage protocol
    CtrlGetView = 64,
    CtrlViewResponse = 65,
    CtrlDropFragment = 66,
};

inline bool known_type(uint8_t t) {
    return (t >= 1 && t <= 11) || (t >= 64 && t <= 66);
}

struct Envelope {
    uint8_t version = kVersion;
    MsgType msg_type = MsgType::StoreFragment;
    crypto::NodeId src{};
    crypto::NodeId dst{};
    Bytes payload;
};

// Frame: 4-byte big-endian total length (including these 4 bytes), version,
// msg_type, 32-byte src, 32-byte dst, payload.
inline Bytes encode_envelope(const Envelope& e) {
    if (e.payload.size() > kMaxPayload) throw WireError("payload exceeds 16 MiB");
    Bytes out;
    out.reserve(kHeaderSize + e.payload.size());
    put_u32_be(out, uint32_t(kHeaderSize + e.payload.size()));
    out.push_back(e.version);
    out.push_back(uint8_t(e.msg_type));
    out.insert(out.end(), e.src.begin(), e.src.end());
    out.insert(out.end(), e.dst.begin(), e.dst.end());
    out.insert(out.end(), e.payload.begin(), e.payload.end());
    return out;
}

inline Envelope decode_envelope(BytesView frame) {
    if (frame.size() < kHeaderSize) throw WireError("truncated frame");
    uint32_t total = load_u32_be(frame.data());
    if (total != frame.size()) throw WireError("frame length mismatch");
    if (total > kHeaderSize + kMaxPayload) throw WireError("oversize frame");
    Envelope e;
    e.version = frame[4];
    if (e.version != kVersion) throw WireError("unsupported version");
    if (!known_type(frame[5])) throw WireError("unknown message type");
    e.msg_type = MsgType(frame[5]);
    std::copy(frame.begin() + 6, frame.begin() + 38, e.src.begin());
    std::copy(frame.begin() + 38, frame.begin() + 70, e.dst.begin());
    e.payload.assign(frame.begin() + 70, frame.end());
    return e;
}

namespace detail {

struct Writer {
    Bytes out;

    void u8(uint8_t v) { out.push_back(v); }
    void u16(uint16_t v) { put_u16_be(out, v); }
    void u32(uint32_t v) { put_u32_be(out, v); }
    void u64(uint64_t v) { put_u64_be(out, v); }
    void f64(double v) { put_u64_be(out, std::bit_cast<uint64_t>(v)); }
    void raw(BytesView b) { out.insert(out.end(), b.begin(), b.end()); }
    template <size_t N>
    void arr(const std::array<uint8_t, N>& a) {
        out.insert(out.end(), a.begin(), a.end());
    }
    void str(const std::string& s) {
        if (s.size() > 0xFFFF) throw WireError("string too long");
        u16(uint16_t(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }
    void blob(const Bytes& b) {
        if (b.size() > kMaxPayload) throw WireError("blob too long");
        u32(uint32_t(b.size()));
        raw(view(b));
    }
};

struct Reader {
    BytesView in;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > in.size()) throw WireError("truncated message");
    }
    uint8_t u8() {
        need(1);
        return in[pos++];
    }
    uint16_t u16() {
        need(2);
        uint16_t v = uint16_t(in[pos] << 8 | in[pos + 1]);
        pos += 2;
        return v;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = load_u32_be(in.data() + pos);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = load_u64_be(in.data() + pos);
        pos += 8;
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    template <size_t N>
    std::array<uint8_t, N> arr() {
        need(N);
        std::array<uint8_t, N> a;
        std::copy(in.begin() + pos, in.begin() + pos + N, a.begin());
        pos += N;
        return a;
    }
    Digest256 digest() {
        Digest256 d;
        auto a = arr<32>();
        std::copy(a.begin(), a.end(), d.begin());
        return d;
    }
    std::string str() {
        uint16_t n = u16();
        need(n);
        std::string s(reinterpret_cast<const char*>(in.data() + pos), n);
        pos += n;
        return s;
    }
    Bytes blob() {
        uint32_t n = u32();
        if (n > kMaxPayload) throw WireError("blob too long");
        need(n);
        Bytes b(in.begin() + pos, in.begin() + pos + n);
        pos += n;
        return b;
    }
    void done() const {
        if (pos != in.size()) throw WireError("trailing bytes");
    }
};

}  // namespace detail

struct StoreFragmentMsg {
    static constexpr MsgType kType = MsgType::StoreFragment;
    Digest256 chunk_hash{};
    uint64_t stream_index = 0;
    double expiration = 0;
    std::string reply_address;
    Bytes data;
};

struct StoreAckMsg {
    static constexpr MsgType kType = MsgType::StoreAck;
    Digest256 chunk_hash{};
    bool ok = false;
    uint64_t stream_index = 0;
    std::string reason;
    crypto::PublicKey pk{};
    Digest256 vrf_hash{};
    crypto::VrfProof vrf_proof{};
    std::string address;
};

struct GetFragmentMsg {
    static constexpr MsgType kType = MsgType::GetFragment;
    Digest256 chunk_hash{};
    std::string reply_address;
};

struct FragmentDataMsg {
    static constexpr MsgType kType = MsgType::FragmentData;
    Digest256 chunk_hash{};
    bool present = false;
    uint64_t stream_index = 0;
    Bytes data;
};

struct ProofRequestMsg {
    static constexpr MsgType kType = MsgType::ProofRequest;
    Digest256 chunk_hash{};
    std::string reply_address;
};

struct ProofResponseMsg {
    static constexpr MsgType kType = MsgType::ProofResponse;
    Digest256 chunk_hash{};
    bool selected = false;
    bool holds = false;  // prover currently stores a fragment of this chunk
    uint64_t stream_index = 0;
    crypto::PublicKey pk{};
    Digest256 vrf_hash{};
    crypto::VrfProof vrf_proof{};
    std::string address;
};

struct PersistenceClaimMsg {
    static constexpr MsgType kType = MsgType::PersistenceClaim;
    Digest256 chunk_hash{};
    uint64_t stream_index = 0;
    crypto::PublicKey pk{};
    Digest256 vrf_hash{};
    crypto::VrfProof vrf_proof{};
    double timestamp = 0;
    std::string address;
    crypto::Signature signature{};

    // Everything before the signature, in wire order.
    Bytes signed_payload() const {
        detail::Writer w;
        w.arr(chunk_hash);
        w.u64(stream_index);
        w.arr(pk);
        w.arr(vrf_hash);
        w.arr(vrf_proof);
        w.f64(timestamp);
        w.str(address);
        return std::move(w.out);
    }
};

struct ViewEntry {
    crypto::PublicKey pk{};
    std::string address;
    uint64_t stream_index = 0;
};

struct RepairRequestMsg {
    static constexpr MsgType kType = MsgType::RepairRequest;
    Digest256 chunk_hash{};
    std::string sender_address;
    double expiration = 0;  // carried so regenerated fragments expire with the object
    std::vector<ViewEntry> view;
};

struct ChunkCacheRequestMsg {
    static constexpr MsgType kType = MsgType::ChunkCacheRequest;
    Digest256 chunk_hash{};
    uint8_t mode = 0;  // 0 probe, 1 build fragment at stream_index
    uint64_t stream_index = 0;
    std::string reply_address;
};

struct ChunkCacheResponseMsg {
    static constexpr MsgType kType = MsgType::ChunkCacheResponse;
    Digest256 chunk_hash{};
    uint8_t kind = 0;  // 0 absent, 1 cached, 2 fragment
    uint64_t stream_index = 0;
    Bytes data;
    std::string address;
};

struct MembershipPushMsg {
    static constexpr MsgType kType = MsgType::MembershipPush;
    Digest256 chunk_hash{};
    std::vector<ViewEntry> entries;
};

struct CtrlGetViewMsg {
    static constexpr MsgType kType = MsgType::CtrlGetView;
    Digest256 chunk_hash{};
    std::string reply_address;
};

struct CtrlViewEntry {
    crypto::NodeId node_id{};
    crypto::PublicKey pk{};
    std::string address;
    uint64_t stream_index = 0;
    double last_claim = 0;
    double first_seen = 0;
};

struct CtrlViewResponseMsg {
    static constexpr MsgType kType = MsgType::CtrlViewResponse;
    Digest256 chunk_hash{};
    bool holds = false;
    uint64_t own_index = 0;
    uint32_t alive = 0;
    std::vector<CtrlViewEntry> entries;
};

struct CtrlDropFragmentMsg {
    static constexpr MsgType kType = MsgType::CtrlDropFragment;
    Digest256 chunk_hash{};
};

using Message =
    std::variant<StoreFragmentMsg, StoreAckMsg, GetFragmentMsg, FragmentDataMsg, ProofRequestMsg,
                 ProofResponseMsg, PersistenceClaimMsg, RepairRequestMsg, ChunkCacheRequestMsg,
                 ChunkCacheResponseMsg, MembershipPushMsg, CtrlGetViewMsg, CtrlViewResponseMsg,
                 CtrlDropFragmentMsg>;

namespace detail {

inline void encode_body(Writer& w, const StoreFragmentMsg& m) {
    w.arr(m.chunk_hash);
    w.u64(m.stream_index);
    w.f64(m.expiration);
    w.str(m.reply_address);
    w.blob(m.data);
}
inline void decode_body(Reader& r, StoreFragmentMsg& m) {
    m.chunk_hash = r.digest();
    m.stream_index = r.u64();
    m.expiration = r.f64();
    m.reply_address = r.str();
    m.data = r.blob();
}

inline void encode_body(Writer& w, const StoreAckMsg& m) {
    w.arr(m.chunk_hash);
    w.u8(m.ok ? 1 : 0);
    w.u64(m.stream_index);
    w.str(m.reason);
    w.arr(m.pk);
    w.arr(m.vrf_hash);
    w.arr(m.vrf_proof);
    w.str(m.address);
}
inline void decode_body(Reader& r, StoreAckMsg& m) {
    m.chunk_hash = r.digest();
    m.ok = r.u8() != 0;
    m.stream_index = r.u64();
    m.reason = r.str();
    m.pk = r.arr<32>();
    m.vrf_hash = r.digest();
    m.vrf_proof = r.arr<96>();
    m.address = r.str();
}

inline void encode_body(Writer& w, const GetFragmentMsg& m) {
    w.arr(m.chunk_hash);
    w.str(m.reply_address);
}
inline void decode_body(Reader& r, GetFragmentMsg& m) {
    m.chunk_hash = r.digest();
    m.reply_address = r.str();
}

inline void encode_body(Writer& w, const FragmentDataMsg& m) {
    w.arr(m.chunk_hash);
    w.u8(m.present ? 1 : 0);
    w.u64(m.stream_index);
    w.blob(m.data);
}
inline void decode_body(Reader& r, FragmentDataMsg& m) {
    m.chunk_hash = r.digest();
    m.present = r.u8() != 0;
    m.stream_index = r.u64();
    m.data = r.blob();
}

inline void encode_body(Writer& w, const ProofRequestMsg& m) {
    w.arr(m.chunk_hash);
    w.str(m.reply_address);
}
inline void decode_body(Reader& r, ProofRequestMsg& m) {
    m.chunk_hash = r.digest();
    m.reply_address = r.str();
}

inline void encode_body(Writer& w, const ProofResponseMsg& m) {
    w.arr(m.chunk_hash);
    w.u8(m.selected ? 1 : 0);
    w.u8(m.holds ? 1 : 0);
    w.u64(m.stream_index);
    w.arr(m.pk);
    w.arr(m.vrf_hash);
    w.arr(m.vrf_proof);
    w.str(m.address);
}
inline void decode_body(Reader& r, ProofResponseMsg& m) {
    m.chunk_hash = r.digest();
    m.selected = r.u8() != 0;
    m.holds = r.u8() != 0;
    m.stream_index = r.u64();
    m.pk = r.arr<32>();
    m.vrf_hash = r.digest();
    m.vrf_proof = r.arr<96>();
    m.address = r.str();
}

inline void encode_body(Writer& w, const PersistenceClaimMsg& m) {
    w.raw(view(m.signed_payload()));
    w.arr(m.signature);
}
inline void decode_body(Reader& r, PersistenceClaimMsg& m) {
    m.chunk_hash = r.digest();
    m.stream_index = r.u64();
    m.pk = r.arr<32>();
    m.vrf_hash = r.digest();
    m.vrf_proof = r.arr<96>();
    m.timestamp = r.f64();
    m.address = r.str();
    m.signature = r.arr<64>();
}

inline void encode_view_entries(Writer& w, const std::vector<ViewEntry>& entries) {
    if (entries.size() > 0xFFFF) throw WireError("view too large");
    w.u16(uint16_t(entries.size()));
    for (const auto& e : entries) {
        w.arr(e.pk);
        w.str(e.address);
        w.u64(e.stream_index);
    }
}
inline std::vector<ViewEntry> decode_view_entries(Reader& r) {
    uint16_t n = r.u16();
    std::vector<ViewEntry> entries;
    entries.reserve(n);
    for (uint16_t i = 0; i < n; ++i) {
        ViewEntry e;
        e.pk = r.arr<32>();
        e.address = r.str();
        e.stream_index = r.u64();
        entries.push_back(std::move(e));
    }
    return entries;
}

inline void encode_body(Writer& w, const RepairRequestMsg& m) {
    w.arr(m.chunk_hash);
    w.str(m.sender_address);
    w.f64(m.expiration);
    encode_view_entries(w, m.view);
}
inline void decode_body(Reader& r, RepairRequestMsg& m) {
    m.chunk_hash = r.digest();
    m.sender_address = r.str();
    m.expiration = r.f64();
    m.view = decode_view_entries(r);
}

inline void encode_body(Writer& w, const ChunkCacheRequestMsg& m) {
    w.arr(m.chunk_hash);
    w.u8(m.mode);
    w.u64(m.stream_index);
    w.str(m.reply_address);
}
inline void decode_body(Reader& r, ChunkCacheRequestMsg& m) {
    m.chunk_hash = r.digest();
    m.mode = r.u8();
    m.stream_index = r.u64();
    m.reply_address = r.str();
}

inline void encode_body(Writer& w, const ChunkCacheResponseMsg& m) {
    w.arr(m.chunk_hash);
    w.u8(m.kind);
    w.u64(m.stream_index);
    w.blob(m.data);
    w.str(m.address);
}
inline void decode_body(Reader& r, ChunkCacheResponseMsg& m) {
    m.chunk_hash = r.digest();
    m.kind = r.u8();
    m.stream_index = r.u64();
    m.data = r.blob();
    m.address = r.str();
}

inline void encode_body(Writer& w, const MembershipPushMsg& m) {
    w.arr(m.chunk_hash);
    encode_view_entries(w, m.entries);
}
inline void decode_body(Reader& r, MembershipPushMsg& m) {
    m.chunk_hash = r.digest();
    m.entries = decode_view_entries(r);
}

inline void encode_body(Writer& w, const CtrlGetViewMsg& m) {
    w.arr(m.chunk_hash);
    w.str(m.reply_address);
}
inline void decode_body(Reader& r, CtrlGetViewMsg& m) {
    m.chunk_hash = r.digest();
    m.reply_address = r.str();
}

inline void encode_body(Writer& w, const CtrlViewResponseMsg& m) {
    w.arr(m.chunk_hash);
    w.u8(m.holds ? 1 : 0);
    w.u64(m.own_index);
    w.u32(m.alive);
    if (m.entries.size() > 0xFFFF) throw WireError("view too large");
    w.u16(uint16_t(m.entries.size()));
    for (const auto& e : m.entries) {
        w.arr(e.node_id);
        w.arr(e.pk);
        w.str(e.address);
        w.u64(e.stream_index);
        w.f64(e.last_claim);
        w.f64(e.first_seen);
    }
}
inline void decode_body(Reader& r, CtrlViewResponseMsg& m) {
    m.chunk_hash = r.digest();
    m.holds = r.u8() != 0;
    m.own_index = r.u64();
    m.alive = r.u32();
    uint16_t n = r.u16();
    m.entries.reserve(n);
    for (uint16_t i = 0; i < n; ++i) {
        CtrlViewEntry e;
        e.node_id = r.digest();
        e.pk = r.arr<32>();
        e.address = r.str();
        e.stream_index = r.u64();
        e.last_claim = r.f64();
        e.first_seen = r.f64();
        m.entries.push_back(std::move(e));
    }
}

inline void encode_body(Writer& w, const CtrlDropFragmentMsg& m) { w.arr(m.chunk_hash); }
inline void decode_body(Reader& r, CtrlDropFragmentMsg& m) { m.chunk_hash = r.digest(); }

}  // namespace detail

template <typename T>
Envelope make_envelope(const crypto::NodeId& src, const crypto::NodeId& dst, const T& msg) {
    detail::Writer w;
    detail::encode_body(w, msg);
    Envelope e;
    e.msg_type = T::kType;
    e.src = src;
    e.dst = dst;
    e.payload = std::move(w.out);
    return e;
}

inline Message decode_message(const Envelope& e) {
    detail::Reader r{view(e.payload), 0};
    auto finish = [&](auto msg) -> Message {
        r.done();
        return Message{std::move(msg)};
    };
    switch (e.msg_type) {
        case MsgType::StoreFragment: {
            StoreFragmentMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::StoreAck: {
            StoreAckMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::GetFragment: {
            GetFragmentMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::FragmentData: {
            FragmentDataMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::ProofRequest: {
            ProofRequestMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::ProofResponse: {
            ProofResponseMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::PersistenceClaim: {
            PersistenceClaimMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::RepairRequest: {
            RepairRequestMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::ChunkCacheRequest: {
            ChunkCacheRequestMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::ChunkCacheResponse: {
            ChunkCacheResponseMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::MembershipPush: {
            MembershipPushMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::CtrlGetView: {
            CtrlGetViewMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::CtrlViewResponse: {
            CtrlViewResponseMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
        case MsgType::CtrlDropFragment: {
            CtrlDropFragmentMsg m;
            detail::decode_body(r, m);
            return finish(std::move(m));
        }
    }
    throw WireError("unknown message type");
}

}  // namespace entropy::wire
