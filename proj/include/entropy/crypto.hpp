#pragma once

#include <sodium.h>

#include <array>
#include <optional>

#include "entropy/common.hpp"
#include "entropy/hash.hpp"

namespace entropy::crypto {

using PublicKey = std::array<uint8_t, 32>;
using NodeId = Digest256;
using Signature = std::array<uint8_t, 64>;

// VRF proof: Gamma (32) || c (32) || s (32).
using VrfProof = std::array<uint8_t, 96>;

struct VrfOutput {
    Digest256 hash{};  // r, read big-endian on the ring
    VrfProof proof{};
};

struct KeyPair {
    std::array<uint8_t, 32> seed{};
    std::array<uint8_t, 32> scalar{};
    PublicKey pk{};
};

namespace detail {

using Point = std::array<uint8_t, 32>;
using Scalar = std::array<uint8_t, 32>;

inline Scalar reduce64(const std::array<uint8_t, 64>& wide) {
    Scalar s;
    crypto_core_ristretto255_scalar_reduce(s.data(), wide.data());
    return s;
}

inline Point hash_to_point(const PublicKey& pk, BytesView input) {
    auto wide = sha512_parts({view("entropy/vrf/h2c"), BytesView(pk.data(), pk.size()), input});
    Point p;
    crypto_core_ristretto255_from_hash(p.data(), wide.data());
    return p;
}

inline Scalar challenge(const char* tag, std::initializer_list<BytesView> parts) {
    crypto_hash_sha512_state st;
    crypto_hash_sha512_init(&st);
    crypto_hash_sha512_update(&st, reinterpret_cast<const uint8_t*>(tag), std::strlen(tag));
    for (const auto& p : parts) crypto_hash_sha512_update(&st, p.data(), p.size());
    std::array<uint8_t, 64> wide;
    crypto_hash_sha512_final(&st, wide.data());
    return reduce64(wide);
}

inline BytesView bv(const std::array<uint8_t, 32>& a) { return BytesView(a.data(), a.size()); }

}  // namespace detail

inline KeyPair keygen(BytesView seed) {
    ensure_sodium();
    if (seed.size() != 32) throw std::invalid_argument("seed must be 32 bytes");
    KeyPair kp;
    std::copy(seed.begin(), seed.end(), kp.seed.begin());
    auto wide = sha512_parts({view("entropy/keygen"), seed});
    kp.scalar = detail::reduce64(wide);
    if (crypto_scalarmult_ristretto255_base(kp.pk.data(), kp.scalar.data()) != 0)
        throw std::runtime_error("degenerate key seed");
    return kp;
}

inline NodeId node_id(const PublicKey& pk) { return sha256(BytesView(pk.data(), pk.size())); }

// ECVRF-style construction over ristretto255: Gamma = x*H(pk, input) with a
// deterministic Chaum-Pedersen proof that log_B(pk) == log_H(Gamma). The output
// hash binds Gamma alone, so any accepted proof for (pk, input) yields one r.
inline VrfOutput vrf_prove(const KeyPair& kp, BytesView input) {
    ensure_sodium();
    using namespace detail;
    Point h = hash_to_point(kp.pk, input);
    Point gamma;
    if (crypto_scalarmult_ristretto255(gamma.data(), kp.scalar.data(), h.data()) != 0)
        throw std::runtime_error("vrf: degenerate hash point");
    Scalar k = challenge("entropy/vrf/nonce", {bv(kp.scalar), bv(h), input});
    Point u, v;
    if (crypto_scalarmult_ristretto255_base(u.data(), k.data()) != 0 ||
        crypto_scalarmult_ristretto255(v.data(), k.data(), h.data()) != 0)
        throw std::runtime_error("vrf: degenerate nonce");
    Scalar c = challenge("entropy/vrf/chal", {bv(kp.pk), bv(h), bv(gamma), bv(u), bv(v)});
    Scalar cx, s;
    crypto_core_ristretto255_scalar_mul(cx.data(), c.data(), kp.scalar.data());
    crypto_core_ristretto255_scalar_add(s.data(), k.data(), cx.data());

    VrfOutput out;
    std::copy(gamma.begin(), gamma.end(), out.proof.begin());
    std::copy(c.begin(), c.end(), out.proof.begin() + 32);
    std::copy(s.begin(), s.end(), out.proof.begin() + 64);
    out.hash = sha256_parts({view("entropy/vrf/out"), bv(gamma)});
    return out;
}

inline bool vrf_verify(const PublicKey& pk, BytesView input, const Digest256& r, const VrfProof& proof) {
    ensure_sodium();
    using namespace detail;
    Point gamma;
    Scalar c, s;
    std::copy(proof.begin(), proof.begin() + 32, gamma.begin());
    std::copy(proof.begin() + 32, proof.begin() + 64, c.begin());
    std::copy(proof.begin() + 64, proof.end(), s.begin());

    if (crypto_core_ristretto255_is_valid_point(gamma.data()) != 1) return false;
    if (crypto_core_ristretto255_is_valid_point(pk.data()) != 1) return false;

    Point h = hash_to_point(pk, input);
    Point sb, cp, u, sh, cg, v;
    if (crypto_scalarmult_ristretto255_base(sb.data(), s.data()) != 0) return false;
    if (crypto_scalarmult_ristretto255(cp.data(), c.data(), pk.data()) != 0) return false;
    if (crypto_core_ristretto255_sub(u.data(), sb.data(), cp.data()) != 0) return false;
    if (crypto_scalarmult_ristretto255(sh.data(), s.data(), h.data()) != 0) return false;
    if (crypto_scalarmult_ristretto255(cg.data(), c.data(), gamma.data()) != 0) return false;
    if (crypto_core_ristretto255_sub(v.data(), sh.data(), cg.data()) != 0) return false;

    Scalar expect = challenge("entropy/vrf/chal", {bv(pk), bv(h), bv(gamma), bv(u), bv(v)});
    if (sodium_memcmp(expect.data(), c.data(), c.size()) != 0) return false;
    Digest256 rr = sha256_parts({view("entropy/vrf/out"), bv(gamma)});
    return sodium_memcmp(rr.data(), r.data(), r.size()) == 0;
}

// Deterministic Schnorr signature over ristretto255 with the same keypair.
inline Signature sign_claim(const KeyPair& kp, BytesView payload) {
    ensure_sodium();
    using namespace detail;
    Scalar k = challenge("entropy/sig/nonce", {bv(kp.scalar), payload});
    Point rp;
    if (crypto_scalarmult_ristretto255_base(rp.data(), k.data()) != 0)
        throw std::runtime_error("sign: degenerate nonce");
    Scalar c = challenge("entropy/sig/chal", {bv(rp), bv(kp.pk), payload});
    Scalar cx, s;
    crypto_core_ristretto255_scalar_mul(cx.data(), c.data(), kp.scalar.data());
    crypto_core_ristretto255_scalar_add(s.data(), k.data(), cx.data());
    Signature sig;
    std::copy(rp.begin(), rp.end(), sig.begin());
    std::copy(s.begin(), s.end(), sig.begin() + 32);
    return sig;
}

inline bool verify_claim(const PublicKey& pk, BytesView payload, const Signature& sig) {
    ensure_sodium();
    using namespace detail;
    Point rp;
    Scalar s;
    std::copy(sig.begin(), sig.begin() + 32, rp.begin());
    std::copy(sig.begin() + 32, sig.end(), s.begin());
    if (crypto_core_ristretto255_is_valid_point(rp.data()) != 1) return false;
    if (crypto_core_ristretto255_is_valid_point(pk.data()) != 1) return false;
    Scalar c = challenge("entropy/sig/chal", {bv(rp), bv(pk), payload});
    Point sb, cp, expect;
    if (crypto_scalarmult_ristretto255_base(sb.data(), s.data()) != 0) return false;
    if (crypto_scalarmult_ristretto255(cp.data(), c.data(), pk.data()) != 0) return false;
    if (crypto_core_ristretto255_sub(expect.data(), sb.data(), cp.data()) != 0) return false;
    return sodium_memcmp(expect.data(), rp.data(), rp.size()) == 0;
}

}  // namespace entropy::crypto
