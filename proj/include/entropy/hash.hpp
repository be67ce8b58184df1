#pragma once

#include <sodium.h>

#include <array>
#include <initializer_list>

#include "entropy/common.hpp"
#include "entropy/u256.hpp"

namespace entropy {

inline void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw std::runtime_error("sodium_init failed");
}

struct Digest256 : std::array<uint8_t, 32> {};

inline Digest256 sha256(BytesView data) {
    ensure_sodium();
    Digest256 d;
    crypto_hash_sha256(d.data(), data.data(), data.size());
    return d;
}

inline Digest256 sha256_parts(std::initializer_list<BytesView> parts) {
    ensure_sodium();
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    for (const auto& p : parts) crypto_hash_sha256_update(&st, p.data(), p.size());
    Digest256 d;
    crypto_hash_sha256_final(&st, d.data());
    return d;
}

inline std::array<uint8_t, 64> sha512_parts(std::initializer_list<BytesView> parts) {
    ensure_sodium();
    crypto_hash_sha512_state st;
    crypto_hash_sha512_init(&st);
    for (const auto& p : parts) crypto_hash_sha512_update(&st, p.data(), p.size());
    std::array<uint8_t, 64> d;
    crypto_hash_sha512_final(&st, d.data());
    return d;
}

inline Digest256 content_hash(BytesView data) { return sha256(data); }

inline std::array<uint8_t, 32> hmac_sha256(std::span<const uint8_t, 32> key, BytesView msg) {
    ensure_sodium();
    std::array<uint8_t, 32> mac;
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, key.data(), key.size());
    crypto_auth_hmacsha256_update(&st, msg.data(), msg.size());
    crypto_auth_hmacsha256_final(&st, mac.data());
    return mac;
}

inline std::string to_hex(const Digest256& d) { return hex_encode(BytesView(d.data(), d.size())); }

inline Digest256 digest_from_hex(const std::string& s) {
    Bytes raw = hex_decode(s);
    if (raw.size() != 32) throw std::invalid_argument("digest hex must be 64 chars");
    Digest256 d;
    std::copy(raw.begin(), raw.end(), d.begin());
    return d;
}

// Hash digests are read as big-endian 256-bit integers on the ring.
inline U256 to_u256(const Digest256& d) { return U256::from_be_bytes(BytesView(d.data(), d.size())); }

inline Digest256 digest_from_u256(const U256& v) {
    Digest256 d;
    v.to_be_bytes(d.data());
    return d;
}

}  // namespace entropy
