#pragma once

#include <array>
#include <cstdint>

#include "entropy/common.hpp"

namespace entropy {

// Unsigned 256-bit integer for hash-ring arithmetic. limb[0] is least significant.
struct U256 {
    std::array<uint64_t, 4> limb{};

    static U256 from_be_bytes(BytesView b) {
        if (b.size() != 32) throw std::invalid_argument("U256 needs 32 bytes");
        U256 v;
        for (int i = 0; i < 4; ++i) v.limb[3 - i] = load_u64_be(b.data() + 8 * i);
        return v;
    }

    void to_be_bytes(uint8_t out[32]) const {
        for (int i = 0; i < 4; ++i) {
            uint64_t w = limb[3 - i];
            for (int j = 0; j < 8; ++j) out[8 * i + j] = uint8_t(w >> (8 * (7 - j)));
        }
    }

    bool is_zero() const { return (limb[0] | limb[1] | limb[2] | limb[3]) == 0; }

    friend bool operator==(const U256& a, const U256& b) { return a.limb == b.limb; }

    friend bool operator<(const U256& a, const U256& b) {
        for (int i = 3; i >= 0; --i) {
            if (a.limb[i] != b.limb[i]) return a.limb[i] < b.limb[i];
        }
        return false;
    }
    friend bool operator>(const U256& a, const U256& b) { return b < a; }
    friend bool operator<=(const U256& a, const U256& b) { return !(b < a); }
    friend bool operator>=(const U256& a, const U256& b) { return !(a < b); }

    // Subtraction mod 2^256.
    friend U256 operator-(const U256& a, const U256& b) {
        U256 r;
        uint64_t borrow = 0;
        for (int i = 0; i < 4; ++i) {
            uint64_t d = a.limb[i] - b.limb[i];
            uint64_t borrow_out = (a.limb[i] < b.limb[i]) ? 1 : 0;
            uint64_t d2 = d - borrow;
            if (d < borrow) borrow_out = 1;
            r.limb[i] = d2;
            borrow = borrow_out;
        }
        return r;
    }

    // Addition mod 2^256.
    friend U256 operator+(const U256& a, const U256& b) {
        U256 r;
        uint64_t carry = 0;
        for (int i = 0; i < 4; ++i) {
            uint64_t s = a.limb[i] + b.limb[i];
            uint64_t carry_out = (s < a.limb[i]) ? 1 : 0;
            uint64_t s2 = s + carry;
            if (s2 < s) carry_out = 1;
            r.limb[i] = s2;
            carry = carry_out;
        }
        return r;
    }

    // Minor arc between two ring positions: min(a-b, b-a) mod 2^256.
    static U256 ring_distance(const U256& a, const U256& b) {
        U256 d1 = a - b;
        U256 d2 = b - a;
        return d1 < d2 ? d1 : d2;
    }

    long double to_long_double() const {
        long double v = 0.0L;
        for (int i = 3; i >= 0; --i) v = v * 0x1p64L + (long double)limb[i];
        return v;
    }

    // mantissa * 2^shift, saturating at zero for shift <= -64; caller keeps shift < 256.
    static U256 shifted(uint64_t mantissa, int shift) {
        U256 r;
        if (shift >= 0) {
            int w = shift / 64, s = shift % 64;
            if (w < 4) {
                r.limb[w] = mantissa << s;
                if (s != 0 && w + 1 < 4) r.limb[w + 1] = mantissa >> (64 - s);
            }
        } else {
            int s = -shift;
            r.limb[0] = s >= 64 ? 0 : mantissa >> s;
        }
        return r;
    }
};

}  // namespace entropy
