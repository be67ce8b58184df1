#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace entropy::gf256 {

// GF(2^8) with reduction polynomial 0x11B and generator 0x03.

namespace detail {

constexpr uint8_t xtime(uint8_t a) { return uint8_t((a << 1) ^ ((a & 0x80) ? 0x1B : 0x00)); }

constexpr std::array<uint8_t, 512> build_exp() {
    std::array<uint8_t, 512> e{};
    uint8_t x = 1;
    for (int i = 0; i < 255; ++i) {
        e[size_t(i)] = x;
        e[size_t(i) + 255] = x;
        x = uint8_t(x ^ xtime(x));  // multiply by the generator 0x03
    }
    e[510] = e[0];
    e[511] = e[1];
    return e;
}

inline constexpr std::array<uint8_t, 512> kExp = build_exp();

constexpr std::array<uint16_t, 256> build_log() {
    std::array<uint16_t, 256> l{};
    for (int i = 0; i < 255; ++i) l[kExp[size_t(i)]] = uint16_t(i);
    l[0] = 0;  // log(0) undefined; guarded by callers
    return l;
}

inline constexpr std::array<uint16_t, 256> kLog = build_log();

constexpr std::array<uint8_t, 65536> build_mul() {
    std::array<uint8_t, 65536> m{};
    for (int a = 1; a < 256; ++a)
        for (int b = 1; b < 256; ++b)
            m[size_t(a) * 256 + size_t(b)] = kExp[size_t(kLog[size_t(a)]) + size_t(kLog[size_t(b)])];
    return m;
}

inline constexpr std::array<uint8_t, 65536> kMul = build_mul();

}  // namespace detail

inline uint8_t mul(uint8_t a, uint8_t b) { return detail::kMul[size_t(a) * 256 + size_t(b)]; }

inline uint8_t inv(uint8_t a) { return detail::kExp[255 - detail::kLog[a]]; }

inline uint8_t div(uint8_t a, uint8_t b) { return a == 0 ? 0 : mul(a, inv(b)); }

// dst ^= c * src over n bytes.
inline void mul_acc(uint8_t* dst, const uint8_t* src, size_t n, uint8_t c) {
    if (c == 0) return;
    if (c == 1) {
        for (size_t i = 0; i < n; ++i) dst[i] ^= src[i];
        return;
    }
    const uint8_t* row = &detail::kMul[size_t(c) * 256];
    for (size_t i = 0; i < n; ++i) dst[i] ^= row[src[i]];
}

inline void mul_in_place(uint8_t* p, size_t n, uint8_t c) {
    if (c == 1) return;
    const uint8_t* row = &detail::kMul[size_t(c) * 256];
    for (size_t i = 0; i < n; ++i) p[i] = row[p[i]];
}

}  // namespace entropy::gf256
