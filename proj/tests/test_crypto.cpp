#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "entropy/crypto.hpp"

using namespace entropy;
using namespace entropy::crypto;

namespace {

KeyPair kp_from(uint64_t n) {
    std::array<uint8_t, 32> seed{};
    for (int i = 0; i < 8; ++i) seed[i] = uint8_t(n >> (8 * i));
    return keygen(BytesView(seed.data(), seed.size()));
}

// chi-square 0.999 quantiles: 15 dof from the standard table; 255 dof via the
// Wilson-Hilferty approximation k*(1 - 2/(9k) + z*sqrt(2/(9k)))^3 with z = 3.0902.
constexpr double kChi2_999_15 = 37.697;
constexpr double kChi2_999_255 = 330.6;

}  // namespace

TEST_CASE("keygen is deterministic and collision-free") {
    auto a = kp_from(42), b = kp_from(42);
    CHECK(a.pk == b.pk);
    CHECK(a.scalar == b.scalar);

    std::set<PublicKey> pks;
    for (uint64_t i = 0; i < 10000; ++i) REQUIRE(pks.insert(kp_from(i).pk).second);
}

TEST_CASE("node_id is SHA-256 of the public key") {
    PublicKey zero{};
    CHECK(to_hex(node_id(zero)) == "66687aadf862bd776c8fc18b8e9f8e20089714856ee233b3902a591d0d5f2925");
}

TEST_CASE("vrf determinism and completeness") {
    auto kp = kp_from(7);
    Bytes input = {1, 2, 3, 4};
    auto o1 = vrf_prove(kp, view(input));
    auto o2 = vrf_prove(kp, view(input));
    CHECK(o1.hash == o2.hash);
    CHECK(o1.proof == o2.proof);
    CHECK(vrf_verify(kp.pk, view(input), o1.hash, o1.proof));
}

TEST_CASE("vrf soundness under mutation") {
    auto kp = kp_from(11);
    Bytes input = {9, 9, 9};
    auto out = vrf_prove(kp, view(input));

    for (size_t i = 0; i < out.proof.size(); ++i) {
        auto bad = out.proof;
        bad[i] ^= 0x01;
        REQUIRE_FALSE(vrf_verify(kp.pk, view(input), out.hash, bad));
    }

    auto bad_hash = out.hash;
    bad_hash[31] ^= 0x01;  // r + 1
    CHECK_FALSE(vrf_verify(kp.pk, view(input), bad_hash, out.proof));

    Bytes extended = input;
    extended.push_back(0x00);
    auto other = vrf_prove(kp, view(extended));
    CHECK(other.hash != out.hash);
    CHECK_FALSE(vrf_verify(kp.pk, view(extended), out.hash, out.proof));

    auto kp2 = kp_from(12);
    CHECK_FALSE(vrf_verify(kp2.pk, view(input), out.hash, out.proof));
}

TEST_CASE("vrf output uniformity (top nibble, 16 bins)") {
    auto kp = kp_from(13);
    std::array<int, 16> bins{};
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        Bytes input(8);
        for (int j = 0; j < 8; ++j) input[j] = uint8_t(i >> (8 * j));
        auto out = vrf_prove(kp, view(input));
        bins[out.hash[0] >> 4]++;
    }
    double expect = double(n) / 16.0;
    double chi2 = 0;
    for (int c : bins) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < kChi2_999_15);
}

TEST_CASE("node ids are uniform on the ring (top byte, 256 bins)") {
    std::array<int, 256> bins{};
    const int n = 10000;
    for (uint64_t i = 0; i < n; ++i) bins[node_id(kp_from(i + 500000).pk)[0]]++;
    double expect = double(n) / 256.0;
    double chi2 = 0;
    for (int c : bins) chi2 += (c - expect) * (c - expect) / expect;
    CHECK(chi2 < kChi2_999_255);
}

TEST_CASE("claim signatures") {
    auto kp = kp_from(21);
    Bytes payload = {5, 6, 7, 8, 9};
    auto sig = sign_claim(kp, view(payload));
    CHECK(verify_claim(kp.pk, view(payload), sig));

    auto tampered = payload;
    tampered[2] ^= 0xFF;
    CHECK_FALSE(verify_claim(kp.pk, view(tampered), sig));

    auto kp2 = kp_from(22);
    CHECK_FALSE(verify_claim(kp2.pk, view(payload), sig));

    for (size_t i = 0; i < sig.size(); i += 7) {
        auto bad = sig;
        bad[i] ^= 0x10;
        REQUIRE_FALSE(verify_claim(kp.pk, view(payload), bad));
    }
}

TEST_CASE("vrf uniqueness: no second r is accepted for a fixed (pk, input)") {
    auto kp = kp_from(31);
    Bytes input = {0xAA, 0xBB};
    auto out = vrf_prove(kp, view(input));

    std::mt19937_64 rng(99);
    int accepted_other = 0;
    for (int t = 0; t < 2000; ++t) {
        auto r = out.hash;
        auto proof = out.proof;
        // random single-byte mutations across r and the proof
        if (rng() & 1) r[rng() % 32] ^= uint8_t(1 + rng() % 255);
        proof[rng() % 96] ^= uint8_t(1 + rng() % 255);
        bool ok = vrf_verify(kp.pk, view(input), r, proof);
        if (ok && r != out.hash) ++accepted_other;
        // accepted proofs must reproduce the canonical r
        if (ok) REQUIRE(r == out.hash);
    }
    CHECK(accepted_other == 0);
}
