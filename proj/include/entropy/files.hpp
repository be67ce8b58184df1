#pragma once

#include <json.hpp>

#include <fstream>

#include "entropy/protocol.hpp"

namespace entropy::files {

using nlohmann::json;

inline Bytes read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, BytesView data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
}

inline void write_text(const std::string& path, const std::string& text) {
    write_file(path, view(text));
}

// 32-byte raw seed files
inline std::array<uint8_t, 32> read_seed(const std::string& path) {
    Bytes raw = read_file(path);
    if (raw.size() != 32) throw std::runtime_error(path + ": seed file must be exactly 32 bytes");
    std::array<uint8_t, 32> seed{};
    std::copy(raw.begin(), raw.end(), seed.begin());
    return seed;
}

// Membership file: JSON list of {node_id, address, pk}, hex-encoded keys.
inline json membership_to_json(const std::vector<selection::NodeRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) {
        arr.push_back({{"node_id", to_hex(r.node_id)},
                       {"address", r.address},
                       {"pk", hex_encode(BytesView(r.pk.data(), r.pk.size()))}});
    }
    return arr;
}

inline std::vector<selection::NodeRecord> membership_from_json(const json& arr) {
    std::vector<selection::NodeRecord> out;
    for (const auto& e : arr) {
        selection::NodeRecord r;
        r.node_id = digest_from_hex(e.at("node_id").get<std::string>());
        r.address = e.at("address").get<std::string>();
        Bytes pk = hex_decode(e.at("pk").get<std::string>());
        if (pk.size() != 32) throw std::runtime_error("membership pk must be 32 bytes");
        std::copy(pk.begin(), pk.end(), r.pk.begin());
        if (crypto::node_id(r.pk) != r.node_id)
            throw std::runtime_error("membership node_id does not match pk");
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<selection::NodeRecord> load_membership(const std::string& path) {
    return membership_from_json(json::parse(read_file(path)));
}

// Public-key registry: node_id hex -> pk hex.
inline json registry_to_json(const std::vector<selection::NodeRecord>& records) {
    json obj = json::object();
    for (const auto& r : records)
        obj[to_hex(r.node_id)] = hex_encode(BytesView(r.pk.data(), r.pk.size()));
    return obj;
}

// Recipe file: {object_hash, chunk_hashes[], expiration, params}.
inline json recipe_to_json(const protocol::ObjectRecipe& r) {
    json chunks = json::array();
    for (const auto& c : r.chunk_hashes) chunks.push_back(to_hex(c));
    return json{{"object_hash", to_hex(r.object_hash)},
                {"chunk_hashes", chunks},
                {"expiration", r.expiration},
                {"params",
                 {{"k_inner", r.params.k_inner},
                  {"r_group", r.params.r_group},
                  {"k_outer", r.params.k_outer},
                  {"n_chunks", r.params.n_chunks}}}};
}

inline protocol::ObjectRecipe recipe_from_json(const json& j) {
    protocol::ObjectRecipe r;
    r.object_hash = digest_from_hex(j.at("object_hash").get<std::string>());
    for (const auto& c : j.at("chunk_hashes")) r.chunk_hashes.push_back(digest_from_hex(c));
    r.expiration = j.at("expiration").get<double>();
    const auto& p = j.at("params");
    r.params.k_inner = p.at("k_inner").get<uint32_t>();
    r.params.r_group = p.at("r_group").get<uint32_t>();
    r.params.k_outer = p.at("k_outer").get<uint32_t>();
    r.params.n_chunks = p.at("n_chunks").get<uint32_t>();
    r.params.validate();
    if (r.chunk_hashes.size() != r.params.n_chunks)
        throw std::runtime_error("recipe chunk count does not match params");
    return r;
}

}  // namespace entropy::files
