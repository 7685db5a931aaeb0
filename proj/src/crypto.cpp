#include "chronocache/crypto.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "chronocache/encoding.hpp"

namespace chronocache::crypto {

namespace {

using nlohmann::json;

[[noreturn]] void crypto_fail(const char* what) {
    throw std::runtime_error(std::string("crypto failure: ") + what);
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Reused per thread; GCM contexts are cheap to re-init but not to allocate.
EVP_CIPHER_CTX* tls_cipher_ctx() {
    thread_local struct Holder {
        EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
        ~Holder() { EVP_CIPHER_CTX_free(ctx); }
    } holder;
    if (!holder.ctx)
        crypto_fail("EVP_CIPHER_CTX_new");
    return holder.ctx;
}

EVP_MAC* hmac_impl() {
    static EVP_MAC* mac = EVP_MAC_fetch(nullptr, "HMAC", nullptr);
    if (!mac)
        crypto_fail("EVP_MAC_fetch(HMAC)");
    return mac;
}

} // namespace

std::string Tag::hex() const { return enc::hex_encode(bytes); }

std::optional<Tag> Tag::from_hex(std::string_view hex) {
    const auto raw = enc::hex_decode(hex);
    if (!raw || raw->size() != kTagBytes)
        return std::nullopt;
    Tag t;
    std::copy(raw->begin(), raw->end(), t.bytes.begin());
    return t;
}

void SystemEntropy::fill(std::span<std::uint8_t> out) {
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1)
        crypto_fail("RAND_bytes");
}

void SeededEntropy::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t word = splitmix64(state_);
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<std::uint8_t>(word);
            word >>= 8;
        }
    }
}

NodeKeySet::NodeKeySet(std::uint32_t m, std::vector<ContentKey> keys)
    : m_(m), keys_(std::move(keys)) {
    const std::size_t want = (std::size_t{1} << (m + 1)); // slot 0 + nodes
    if (keys_.size() != want)
        throw std::runtime_error("node key set has wrong cardinality");
}

const ContentKey& NodeKeySet::at(NodeId node) const {
    if (node < 1 || node >= keys_.size())
        throw std::out_of_range("node id outside key set");
    return keys_[node];
}

NodeKeySet keygen(const tree::TreeParams& params, EntropySource& entropy) {
    std::vector<ContentKey> keys(std::size_t{params.node_count()} + 1);
    for (NodeId n = 1; n <= params.node_count(); ++n)
        entropy.fill(keys[n].bytes);
    return NodeKeySet(params.m, std::move(keys));
}

MacKey gen_mac_key(EntropySource& entropy) {
    MacKey k;
    entropy.fill(k.bytes);
    return k;
}

Tag derive_tag(const MacKey& mac_key, std::span<const std::uint8_t> content,
               NodeId node) {
    if (content.empty())
        throw std::invalid_argument("content must be non-empty");

    std::uint8_t suffix[8];
    const std::uint64_t j = node;
    for (int i = 0; i < 8; ++i)
        suffix[i] = static_cast<std::uint8_t>(j >> (56 - 8 * i));

    EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(hmac_impl());
    if (!ctx)
        crypto_fail("EVP_MAC_CTX_new");
    char digest_name[] = "SHA256";
    OSSL_PARAM params[] = {
        OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest_name, 0),
        OSSL_PARAM_construct_end(),
    };
    Tag tag;
    std::size_t out_len = 0;
    const bool ok =
        EVP_MAC_init(ctx, mac_key.bytes.data(), mac_key.bytes.size(), params) &&
        EVP_MAC_update(ctx, content.data(), content.size()) &&
        EVP_MAC_update(ctx, suffix, sizeof(suffix)) &&
        EVP_MAC_final(ctx, tag.bytes.data(), &out_len, tag.bytes.size());
    EVP_MAC_CTX_free(ctx);
    if (!ok || out_len != kTagBytes)
        crypto_fail("HMAC-SHA256");
    return tag;
}

std::span<const std::uint8_t> nonce_from_tag(const Tag& tag, NonceBits nb) {
    return std::span<const std::uint8_t>(tag.bytes).first(nonce_len(nb));
}

Bytes encrypt(const ContentKey& key, const Tag& tag,
              std::span<const std::uint8_t> plaintext, NonceBits nb) {
    const auto nonce = nonce_from_tag(tag, nb);
    EVP_CIPHER_CTX* ctx = tls_cipher_ctx();

    if (EVP_EncryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_IVLEN,
                            static_cast<int>(nonce.size()), nullptr) != 1 ||
        EVP_EncryptInit_ex(ctx, nullptr, nullptr, key.bytes.data(), nonce.data()) != 1)
        crypto_fail("GCM encrypt init");

    Bytes out(plaintext.size() + kAeadOverhead);
    int len = 0;
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(ctx, out.data(), &len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1)
        crypto_fail("GCM encrypt update");
    int fin = 0;
    if (EVP_EncryptFinal_ex(ctx, out.data() + len, &fin) != 1)
        crypto_fail("GCM encrypt final");
    if (static_cast<std::size_t>(len + fin) != plaintext.size())
        crypto_fail("GCM length mismatch");
    if (EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_GET_TAG,
                            static_cast<int>(kAeadOverhead),
                            out.data() + plaintext.size()) != 1)
        crypto_fail("GCM get tag");
    return out;
}

std::optional<Bytes> decrypt(const ContentKey& key, const Tag& tag,
                             std::span<const std::uint8_t> ciphertext,
                             NonceBits nb) {
    if (ciphertext.size() < kAeadOverhead)
        return std::nullopt;
    const auto nonce = nonce_from_tag(tag, nb);
    const std::size_t body = ciphertext.size() - kAeadOverhead;
    EVP_CIPHER_CTX* ctx = tls_cipher_ctx();

    if (EVP_DecryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
        EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_IVLEN,
                            static_cast<int>(nonce.size()), nullptr) != 1 ||
        EVP_DecryptInit_ex(ctx, nullptr, nullptr, key.bytes.data(), nonce.data()) != 1)
        crypto_fail("GCM decrypt init");

    Bytes out(body);
    int len = 0;
    if (body > 0 &&
        EVP_DecryptUpdate(ctx, out.data(), &len, ciphertext.data(),
                          static_cast<int>(body)) != 1)
        return std::nullopt;
    // set_tag copies, the const_cast is an OpenSSL API wart
    if (EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_TAG,
                            static_cast<int>(kAeadOverhead),
                            const_cast<std::uint8_t*>(ciphertext.data() + body)) != 1)
        crypto_fail("GCM set tag");
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx, out.data() + len, &fin) != 1)
        return std::nullopt; // authentication failure
    out.resize(static_cast<std::size_t>(len + fin));
    return out;
}

std::string keyset_to_json(const NodeKeySet& keys) {
    json obj;
    obj["m"] = keys.m();
    json key_map = json::object();
    for (NodeId n = 1; n <= keys.size(); ++n)
        key_map[std::to_string(n)] = enc::b64url_encode(keys.at(n).bytes);
    obj["keys"] = std::move(key_map);
    return obj.dump();
}

NodeKeySet keyset_from_json(const std::string& text) {
    const json obj = json::parse(text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("m") ||
        !obj["m"].is_number_unsigned() || !obj.contains("keys") ||
        !obj["keys"].is_object())
        throw std::runtime_error("malformed key file");
    const std::uint32_t m = obj["m"].get<std::uint32_t>();
    const tree::TreeParams params(m);
    std::vector<ContentKey> keys(std::size_t{params.node_count()} + 1);
    std::vector<bool> seen(keys.size(), false);
    for (const auto& [name, value] : obj["keys"].items()) {
        std::size_t pos = 0;
        const unsigned long node = std::stoul(name, &pos);
        if (pos != name.size() || node < 1 || node > params.node_count())
            throw std::runtime_error("key file: bad node id " + name);
        if (!value.is_string())
            throw std::runtime_error("key file: key must be a string");
        const auto raw = enc::b64url_decode(value.get<std::string>());
        if (!raw || raw->size() != kKeyBytes)
            throw std::runtime_error("key file: bad key material");
        std::copy(raw->begin(), raw->end(), keys[node].bytes.begin());
        seen[node] = true;
    }
    for (NodeId n = 1; n <= params.node_count(); ++n)
        if (!seen[n])
            throw std::runtime_error("key file: missing node " + std::to_string(n));
    return NodeKeySet(m, std::move(keys));
}

std::string mac_key_to_json(const MacKey& key) {
    json obj;
    obj["mac_key"] = enc::b64url_encode(key.bytes);
    return obj.dump();
}

MacKey mac_key_from_json(const std::string& text) {
    const json obj = json::parse(text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("mac_key") ||
        !obj["mac_key"].is_string())
        throw std::runtime_error("malformed MAC key file");
    const auto raw = enc::b64url_decode(obj["mac_key"].get<std::string>());
    if (!raw || raw->size() != kKeyBytes)
        throw std::runtime_error("MAC key file: bad key material");
    MacKey k;
    std::copy(raw->begin(), raw->end(), k.bytes.begin());
    return k;
}

void save_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out)
        throw std::runtime_error("short write: " + path);
}

std::string load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace chronocache::crypto
