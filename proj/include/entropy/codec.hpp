#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "entropy/common.hpp"
#include "entropy/gf256.hpp"
#include "entropy/hash.hpp"

namespace entropy::codec {

struct CodecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Recoverable: the caller should fetch more symbols and retry.
struct NeedMoreSymbols : CodecError {
    using CodecError::CodecError;
};

// A symbol (or the decoded payload) failed a consistency or hash check.
struct IntegrityError : CodecError {
    using CodecError::CodecError;
};

struct CodecParams {
    uint32_t k_inner = 32;
    uint32_t r_group = 80;
    uint32_t k_outer = 8;
    uint32_t n_chunks = 10;
    double decode_overhead = 0.02;

    void validate() const {
        if (k_inner < 1 || r_group < 1 || k_outer < 1 || n_chunks < 1)
            throw std::invalid_argument("codec params must be >= 1");
        if (n_chunks < k_outer) throw std::invalid_argument("n_chunks must be >= k_outer");
        if (r_group < k_inner) throw std::invalid_argument("r_group must be >= k_inner");
    }

    // Stored bytes per object byte: (n/k_outer) * (R/k_inner). 3.125 at defaults.
    double redundancy() const {
        return (double(n_chunks) / double(k_outer)) * (double(r_group) / double(k_inner));
    }
};

// Outer chunk stream indices live above 2^32 so no stored chunk ever equals plaintext.
inline constexpr uint64_t kNonSystematicBase = uint64_t(1) << 32;

// Coefficient row for one encoding symbol. Systematic identity row below k,
// a deterministic PRG row (never all-zero) at and above k.
inline std::vector<uint8_t> coeff_row(uint64_t stream_index, uint32_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::vector<uint8_t> row(k, 0);
    if (stream_index < k) {
        row[size_t(stream_index)] = 1;
        return row;
    }
    uint64_t state = stream_index ^ (uint64_t(k) * 0x9e3779b97f4a7c15ull);
    splitmix64(state);  // decorrelate nearby (index, k) seeds
    while (true) {
        uint64_t word = 0;
        int have = 0;
        bool nonzero = false;
        for (uint32_t i = 0; i < k; ++i) {
            if (have == 0) {
                word = splitmix64(state);
                have = 8;
            }
            row[i] = uint8_t(word);
            word >>= 8;
            --have;
            nonzero |= row[i] != 0;
        }
        if (nonzero) return row;
    }
}

struct Symbol {
    uint64_t stream_index = 0;
    Bytes data;
};

inline Bytes encode_symbol(const std::vector<Bytes>& sources, uint64_t stream_index) {
    if (sources.empty()) throw std::invalid_argument("no source blocks");
    size_t len = sources[0].size();
    for (const auto& s : sources)
        if (s.size() != len) throw CodecError("source blocks must have equal length");
    uint32_t k = uint32_t(sources.size());
    if (stream_index < k) return sources[size_t(stream_index)];
    auto row = coeff_row(stream_index, k);
    Bytes out(len, 0);
    for (uint32_t j = 0; j < k; ++j) gf256::mul_acc(out.data(), sources[j].data(), len, row[j]);
    return out;
}

// Gaussian elimination over GF(256). Throws NeedMoreSymbols when the rows do not
// reach rank k, IntegrityError when the system is inconsistent (corrupt symbol).
inline std::vector<Bytes> decode_symbols(const std::vector<Symbol>& symbols, uint32_t k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::map<uint64_t, const Bytes*> unique;
    for (const auto& s : symbols) unique.emplace(s.stream_index, &s.data);
    if (unique.size() < k)
        throw NeedMoreSymbols("need more symbols: have " + std::to_string(unique.size()) +
                              " distinct, need " + std::to_string(k));
    size_t len = unique.begin()->second->size();
    for (const auto& [idx, data] : unique)
        if (data->size() != len) throw CodecError("symbol blocks must have equal length");

    size_t m = unique.size();
    std::vector<std::vector<uint8_t>> mat;
    std::vector<Bytes> rhs;
    mat.reserve(m);
    rhs.reserve(m);
    for (const auto& [idx, data] : unique) {
        mat.push_back(coeff_row(idx, k));
        rhs.push_back(*data);
    }

    std::vector<size_t> pivot_of_col(k, SIZE_MAX);
    size_t rank = 0;
    for (uint32_t col = 0; col < k && rank < m; ++col) {
        size_t p = SIZE_MAX;
        for (size_t r = rank; r < m; ++r) {
            if (mat[r][col] != 0) {
                p = r;
                break;
            }
        }
        if (p == SIZE_MAX) continue;
        std::swap(mat[p], mat[rank]);
        std::swap(rhs[p], rhs[rank]);
        uint8_t piv = mat[rank][col];
        if (piv != 1) {
            uint8_t ipiv = gf256::inv(piv);
            for (uint32_t c = col; c < k; ++c) mat[rank][c] = gf256::mul(mat[rank][c], ipiv);
            gf256::mul_in_place(rhs[rank].data(), len, ipiv);
        }
        for (size_t r = 0; r < m; ++r) {
            if (r == rank) continue;
            uint8_t f = mat[r][col];
            if (f == 0) continue;
            for (uint32_t c = col; c < k; ++c) mat[r][c] ^= gf256::mul(f, mat[rank][c]);
            gf256::mul_acc(rhs[r].data(), rhs[rank].data(), len, f);
        }
        pivot_of_col[col] = rank;
        ++rank;
    }

    // Redundant rows must have reduced to zero on both sides; a nonzero
    // right-hand side with a zero row means some symbol was corrupted.
    for (size_t r = rank; r < m; ++r) {
        bool zero = std::all_of(rhs[r].begin(), rhs[r].end(), [](uint8_t b) { return b == 0; });
        if (!zero) throw IntegrityError("inconsistent symbol set: corrupt symbol detected");
    }
    if (rank < k)
        throw NeedMoreSymbols("need more symbols: rank " + std::to_string(rank) + " of " +
                              std::to_string(k));

    std::vector<Bytes> out(k);
    for (uint32_t col = 0; col < k; ++col) out[col] = std::move(rhs[pivot_of_col[col]]);
    return out;
}

namespace detail {

// Length-prefixed framing shared by both layers: 8-byte little-endian payload
// length, then the payload, zero-padded to k equal blocks.
inline std::vector<Bytes> frame_blocks(BytesView payload, uint32_t k) {
    Bytes frame;
    put_u64_le(frame, payload.size());
    frame.insert(frame.end(), payload.begin(), payload.end());
    size_t block = (frame.size() + k - 1) / k;
    if (block == 0) block = 1;
    frame.resize(block * k, 0);
    std::vector<Bytes> blocks(k);
    for (uint32_t i = 0; i < k; ++i)
        blocks[i].assign(frame.begin() + ptrdiff_t(i * block), frame.begin() + ptrdiff_t((i + 1) * block));
    return blocks;
}

inline Bytes unframe(const std::vector<Bytes>& blocks) {
    Bytes frame;
    for (const auto& b : blocks) frame.insert(frame.end(), b.begin(), b.end());
    if (frame.size() < 8) throw IntegrityError("decoded frame too short");
    uint64_t len = load_u64_le(frame.data());
    if (len > frame.size() - 8) throw IntegrityError("decoded frame has bad length prefix");
    for (size_t i = 8 + len; i < frame.size(); ++i)
        if (frame[i] != 0) throw IntegrityError("decoded frame has nonzero padding");
    return Bytes(frame.begin() + 8, frame.begin() + 8 + ptrdiff_t(len));
}

}  // namespace detail

struct Chunk {
    Digest256 object_hash{};
    uint64_t stream_index = 0;
    Bytes data;

    Digest256 chunk_hash() const { return content_hash(view(data)); }
};

struct Fragment {
    Digest256 chunk_hash{};
    uint64_t stream_index = 0;
    Bytes data;
};

// Keyed chunk index selection: HMAC-SHA-256(secret, object_hash || j), first
// 8 bytes big-endian, mapped into [2^32, 2^64). Duplicates re-draw with an
// appended retry counter.
inline std::vector<uint64_t> outer_indices(std::span<const uint8_t, 32> secret,
                                           const Digest256& object_hash, const CodecParams& p) {
    p.validate();
    std::vector<uint64_t> out;
    std::set<uint64_t> seen;
    out.reserve(p.n_chunks);
    for (uint32_t j = 0; j < p.n_chunks; ++j) {
        for (uint32_t retry = 0;; ++retry) {
            Bytes msg(object_hash.begin(), object_hash.end());
            put_u64_be(msg, j);
            if (retry > 0) put_u32_be(msg, retry);
            auto mac = hmac_sha256(secret, view(msg));
            uint64_t v = load_u64_be(mac.data());
            uint64_t idx = kNonSystematicBase + v % (~uint64_t(0) - kNonSystematicBase + 1);
            if (seen.insert(idx).second) {
                out.push_back(idx);
                break;
            }
        }
    }
    return out;
}

inline std::vector<Chunk> outer_encode(BytesView object, std::span<const uint8_t, 32> secret,
                                       const CodecParams& p) {
    p.validate();
    if (object.empty()) throw std::invalid_argument("object must be non-empty");
    Digest256 oh = content_hash(object);
    auto blocks = detail::frame_blocks(object, p.k_outer);
    auto indices = outer_indices(secret, oh, p);
    std::vector<Chunk> chunks;
    chunks.reserve(indices.size());
    for (uint64_t idx : indices) chunks.push_back(Chunk{oh, idx, encode_symbol(blocks, idx)});
    return chunks;
}

inline Bytes outer_decode(const std::vector<Symbol>& chunks, const CodecParams& p,
                          const Digest256* expected_hash = nullptr) {
    p.validate();
    auto blocks = decode_symbols(chunks, p.k_outer);
    Bytes object = detail::unframe(blocks);
    if (expected_hash && content_hash(view(object)) != *expected_hash)
        throw IntegrityError("decoded object hash mismatch");
    return object;
}

// Splits one chunk into inner source blocks once and encodes any number of
// fragments from it. Fragment 0..k_inner-1 are the systematic prefix.
class InnerCoder {
  public:
    InnerCoder(const Digest256& chunk_hash, BytesView chunk_data, uint32_t k_inner)
        : chunk_hash_(chunk_hash), blocks_(detail::frame_blocks(chunk_data, k_inner)) {}

    Fragment encode(uint64_t stream_index) const {
        return Fragment{chunk_hash_, stream_index, encode_symbol(blocks_, stream_index)};
    }

    size_t fragment_size() const { return blocks_[0].size(); }

  private:
    Digest256 chunk_hash_;
    std::vector<Bytes> blocks_;
};

inline Fragment inner_encode(const Chunk& chunk, uint64_t stream_index, uint32_t k_inner) {
    return InnerCoder(chunk.chunk_hash(), view(chunk.data), k_inner).encode(stream_index);
}

inline Bytes inner_decode(const std::vector<Fragment>& fragments, const CodecParams& p) {
    p.validate();
    if (fragments.empty()) throw NeedMoreSymbols("no fragments");
    const Digest256& chash = fragments[0].chunk_hash;
    std::vector<Symbol> symbols;
    symbols.reserve(fragments.size());
    for (const auto& f : fragments) {
        if (f.chunk_hash != chash) throw CodecError("fragments from different chunks");
        symbols.push_back(Symbol{f.stream_index, f.data});
    }
    auto blocks = decode_symbols(symbols, p.k_inner);
    Bytes chunk = detail::unframe(blocks);
    if (content_hash(view(chunk)) != chash) {
        std::string idx;
        for (const auto& f : fragments) idx += std::to_string(f.stream_index) + " ";
        throw IntegrityError("decoded chunk hash mismatch; suspect fragment indices: " + idx);
    }
    return chunk;
}

}  // namespace entropy::codec
