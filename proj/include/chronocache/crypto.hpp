#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chronocache/time_tree.hpp"
#include "chronocache/types.hpp"

namespace chronocache::crypto {

inline constexpr std::size_t kKeyBytes = 32;  // AES-256 / HMAC-SHA256 key
inline constexpr std::size_t kTagBytes = 32;  // HMAC-SHA256 output
inline constexpr std::size_t kAeadOverhead = 16;

struct ContentKey {
    std::array<std::uint8_t, kKeyBytes> bytes{};
    bool operator==(const ContentKey&) const = default;
};

struct MacKey {
    std::array<std::uint8_t, kKeyBytes> bytes{};
    bool operator==(const MacKey&) const = default;
};

// Content address: HMAC-SHA256(content || node id). Pseudorandom, so its
// prefix doubles as the AEAD nonce and it leaks nothing about the content.
struct Tag {
    std::array<std::uint8_t, kTagBytes> bytes{};
    bool operator==(const Tag&) const = default;

    std::string hex() const;
    static std::optional<Tag> from_hex(std::string_view hex);
};

struct TagHash {
    std::size_t operator()(const Tag& t) const {
        std::size_t h;
        std::memcpy(&h, t.bytes.data(), sizeof(h)); // tags are pseudorandom
        return h;
    }
};

// Nonce length used by the AEAD. 128 keeps the full tag prefix as the IV;
// 96 truncates for backends that only take 12-byte GCM nonces. Both ends
// derive the nonce from the tag, so nonces never travel.
enum class NonceBits : int { n96 = 96, n128 = 128 };

inline std::size_t nonce_len(NonceBits nb) {
    return nb == NonceBits::n96 ? 12 : 16;
}

struct EntropySource {
    virtual ~EntropySource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;
};

// OS randomness; throws std::runtime_error if the RNG fails.
class SystemEntropy final : public EntropySource {
public:
    void fill(std::span<std::uint8_t> out) override;
};

// Deterministic stream for simulations and tests. Not for real keys.
class SeededEntropy final : public EntropySource {
public:
    explicit SeededEntropy(std::uint64_t seed) : state_(seed) {}
    void fill(std::span<std::uint8_t> out) override;

private:
    std::uint64_t state_;
};

// One independent random key per tree node, indexed by node id.
class NodeKeySet {
public:
    NodeKeySet() = default;
    NodeKeySet(std::uint32_t m, std::vector<ContentKey> keys);

    std::uint32_t m() const { return m_; }
    std::size_t size() const { return keys_.empty() ? 0 : keys_.size() - 1; }
    const ContentKey& at(NodeId node) const;

private:
    std::uint32_t m_ = 0;
    std::vector<ContentKey> keys_; // slot 0 unused, nodes are 1-based
};

NodeKeySet keygen(const tree::TreeParams& params, EntropySource& entropy);
MacKey gen_mac_key(EntropySource& entropy);

// HMAC-SHA256 over content || node id as 8-byte big-endian. Content must
// be non-empty; fixed-width id keeps (content, j) framing unambiguous.
Tag derive_tag(const MacKey& mac_key, std::span<const std::uint8_t> content,
               NodeId node);

// Leading 16 (or 12) bytes of the tag, the "upper-order" bits.
std::span<const std::uint8_t> nonce_from_tag(const Tag& tag, NonceBits nb);

// AES-256-GCM with empty AAD; the auth tag is appended to the ciphertext.
// Deterministic given (key, tag, plaintext).
Bytes encrypt(const ContentKey& key, const Tag& tag,
              std::span<const std::uint8_t> plaintext, NonceBits nb);

// nullopt on any authentication failure (wrong key, wrong tag, tampering).
std::optional<Bytes> decrypt(const ContentKey& key, const Tag& tag,
                             std::span<const std::uint8_t> ciphertext,
                             NonceBits nb);

// Key file I/O. Node keys: {"m": int, "keys": {"<node>": "<base64url>"}}.
// MAC key: {"mac_key": "<base64url>"}. Both throw std::runtime_error on
// malformed files.
std::string keyset_to_json(const NodeKeySet& keys);
NodeKeySet keyset_from_json(const std::string& text);
std::string mac_key_to_json(const MacKey& key);
MacKey mac_key_from_json(const std::string& text);

void save_file(const std::string& path, const std::string& text);
std::string load_file(const std::string& path);

} // namespace chronocache::crypto
